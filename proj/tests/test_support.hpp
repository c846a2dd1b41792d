#pragma once

#include <cstddef>
#include <vector>

#include "decaywatch/chain.hpp"
#include "decaywatch/random.hpp"

namespace testutil {

// Deterministic random chain: 1..max_transitions transitions, rates in
// [0.3, 3.0].  The rate window keeps closed-form coefficients and RK4 step
// counts well conditioned.
inline decaywatch::ChainSpec random_chain(decaywatch::UniformStream& u,
                                          std::size_t max_transitions = 5) {
  const auto m = 1 + static_cast<std::size_t>(u() * static_cast<double>(max_transitions));
  std::vector<double> rates(m);
  for (double& r : rates) r = 0.3 + 2.7 * u();
  return decaywatch::ChainSpec(std::move(rates));
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace testutil
