#pragma once

// Umbrella header for the decaywatch library: decay-chain specifications,
// analytic master-equation dynamics, the observation-cycle engine, the
// clock-zeroing observer protocol, ensemble statistics, and file I/O.

#include "decaywatch/chain.hpp"
#include "decaywatch/ensemble.hpp"
#include "decaywatch/errors.hpp"
#include "decaywatch/format.hpp"
#include "decaywatch/io.hpp"
#include "decaywatch/master_equation.hpp"
#include "decaywatch/observer.hpp"
#include "decaywatch/random.hpp"
#include "decaywatch/reduction.hpp"
#include "decaywatch/statistics.hpp"
