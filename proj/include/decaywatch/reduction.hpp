#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaywatch/chain.hpp"
#include "decaywatch/errors.hpp"

namespace decaywatch {

// Observation-cycle engine.
//
// A continuously watched chain does not evolve as the full master equation.
// Instead it advances through a sequence of two-component cycles: while the
// observer registers count c, only component c (the conscious component) and
// component c+1 (the ready component) carry probability; everything further
// down the chain is cut off because current cannot flow between two
// not-yet-registered components.  Within a cycle the conscious weight obeys
// dP/dt = -r P with r the single adjacent transition rate, all of the
// leaving current enters the ready component, and the ready component is
// eventually hit with probability one.  At the hit the old component drops
// to zero, the ready component becomes the new conscious one, and the cycle
// restarts renormalized to weight 1.
//
// The hit instant within a cycle is taken to be distributed with density
// equal to the probability current into the ready component, r e^{-r tau}.
// That is the one modeling commitment of this engine; everything else is
// bookkeeping.  All randomness enters through caller-supplied uniforms, so
// the engine itself is a pure state-transition function.

struct CycleState {
  int conscious_index = 0;           // component the observer currently registers
  std::optional<int> ready_index;    // conscious_index + 1, or empty when terminal
  double cycle_clock = 0.0;          // time since the cycle began
  double global_clock = 0.0;         // completed cycle durations + cycle_clock
  double p_conscious = 1.0;          // in-cycle weight of the conscious component
};

struct HitSample {
  double waiting_time = 0.0;
  int cycle_index = 0;  // 1-based index of the reduction this hit produces
};

inline CycleState initial_cycle(const ChainSpec& chain) {
  CycleState c;
  c.ready_index = chain.num_components() > 1 ? std::optional<int>(1) : std::nullopt;
  return c;
}

inline bool is_terminal(const ChainSpec& chain, const CycleState& cycle) {
  return cycle.conscious_index + 1 >= static_cast<int>(chain.num_components());
}

// Rate of the single open transition out of the conscious component.
inline double cycle_rate(const ChainSpec& chain, const CycleState& cycle) {
  if (is_terminal(chain, cycle)) {
    throw TerminalStateError("cycle_rate: chain exhausted at component " +
                             std::to_string(cycle.conscious_index));
  }
  return chain.rates()[static_cast<std::size_t>(cycle.conscious_index)];
}

// Integrated current into the ready component of a renormalized cycle:
// 1 - e^{-r tau}.  Tends to exactly 1 as tau grows, which is the guaranteed
// hit on the ready component.
inline double hit_time_cdf(double rate, double tau) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("hit_time_cdf: rate must be positive");
  }
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("hit_time_cdf: tau must be nonnegative");
  }
  return -std::expm1(-rate * tau);
}

// Inverse-transform draw of the cycle waiting time; deterministic in (rate, u).
inline HitSample sample_hit(double rate, double u, int cycle_index = 1) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("sample_hit: rate must be positive");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("sample_hit: uniform draw must lie strictly inside (0,1)");
  }
  return HitSample{-std::log1p(-u) / rate, cycle_index};
}

// State reduction at a hit: the conscious component zeroes out, the ready
// component becomes conscious, and the next cycle starts renormalized.
inline CycleState reduce(const ChainSpec& chain, const CycleState& cycle, const HitSample& hit) {
  if (is_terminal(chain, cycle)) {
    throw TerminalStateError("reduce: chain exhausted at component " +
                             std::to_string(cycle.conscious_index));
  }
  if (!std::isfinite(hit.waiting_time) || !(hit.waiting_time > 0.0)) {
    throw std::invalid_argument("reduce: waiting time must be positive and finite");
  }
  CycleState next;
  next.conscious_index = cycle.conscious_index + 1;
  next.ready_index = (next.conscious_index + 1 < static_cast<int>(chain.num_components()))
                         ? std::optional<int>(next.conscious_index + 1)
                         : std::nullopt;
  next.cycle_clock = 0.0;
  next.global_clock = cycle.global_clock + hit.waiting_time;
  next.p_conscious = 1.0;
  return next;
}

// Deterministic within-cycle evolution: the conscious weight decays at the
// cycle rate while the clocks advance.  Terminal cycles just accumulate time.
inline CycleState evolve_within_cycle(const ChainSpec& chain, const CycleState& cycle, double dt) {
  if (!(dt >= 0.0)) {
    throw std::invalid_argument("evolve_within_cycle: dt must be nonnegative");
  }
  CycleState next = cycle;
  next.cycle_clock += dt;
  next.global_clock += dt;
  if (!is_terminal(chain, cycle)) {
    next.p_conscious = cycle.p_conscious * std::exp(-cycle_rate(chain, cycle) * dt);
  }
  return next;
}

// Full-length snapshot of the in-cycle weights.  Only the conscious and
// ready components can be nonzero; components beyond the ready one have no
// representation inside a cycle at all.
inline ComponentDistribution in_cycle_distribution(const ChainSpec& chain,
                                                   const CycleState& cycle) {
  std::vector<double> probs(chain.num_components(), 0.0);
  const auto c = static_cast<std::size_t>(cycle.conscious_index);
  probs[c] = cycle.p_conscious;
  if (cycle.ready_index) {
    probs[static_cast<std::size_t>(*cycle.ready_index)] = 1.0 - cycle.p_conscious;
  }
  return ComponentDistribution(cycle.global_clock, std::move(probs));
}

}  // namespace decaywatch
