#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaywatch/chain.hpp"
#include "decaywatch/errors.hpp"

namespace decaywatch {

// Unreduced square-modulus dynamics of the chain: a birth-type master
// equation
//
//   dP_0/dt = -r_0 P_0
//   dP_j/dt =  r_{j-1} P_{j-1} - r_j P_j      (0 < j < m)
//   dP_m/dt =  r_{m-1} P_{m-1}
//
// started from P = (1, 0, ..., 0).  Distinct rates admit a closed-form
// solution as a sum of exponentials; repeated rates fall back to fixed-step
// RK4 integration.

enum class SolveMethod { Auto, ClosedForm, RungeKutta };

// Instantaneous currents: flows[j] = rates[j] * P_j is the directed current
// from component j to j+1, and net[i] = flows[i-1] - flows[i] = dP_i/dt.
struct CurrentVector {
  double time = 0.0;
  std::vector<double> net;
  std::vector<double> flows;
};

namespace detail {

inline constexpr double kClampTolerance = 1e-9;
inline constexpr double kMaxRateRatio = 1e6;
inline constexpr double kDegenerateRelGap = 1e-12;

inline void clamp_probability(double& p) {
  if (p < 0.0) {
    if (p < -kClampTolerance) {
      throw NumericalIntegrityError("probability " + std::to_string(p) +
                                    " below zero beyond tolerated roundoff");
    }
    p = 0.0;
  } else if (p > 1.0) {
    if (p > 1.0 + kClampTolerance) {
      throw NumericalIntegrityError("probability " + std::to_string(p) +
                                    " above one beyond tolerated roundoff");
    }
    p = 1.0;
  }
}

inline bool has_degenerate_rates(const std::vector<double>& rates) {
  for (std::size_t i = 0; i < rates.size(); ++i) {
    for (std::size_t j = i + 1; j < rates.size(); ++j) {
      const double gap = std::abs(rates[i] - rates[j]);
      if (gap <= kDegenerateRelGap * std::max(rates[i], rates[j])) {
        return true;
      }
    }
  }
  return false;
}

// Partial-fraction (Bateman) solution for distinct rates.  For j < m,
//   P_j(t) = (prod_{i<j} r_i) * sum_{i<=j} e^{-r_i t} / prod_{l<=j, l!=i} (r_l - r_i)
// with numerator and denominator factors interleaved to keep the running
// product in range.  The terminal component is the complement.
inline std::vector<double> bateman_probs(const std::vector<double>& rates, double t) {
  const std::size_t m = rates.size();
  std::vector<double> probs(m + 1, 0.0);
  double head_sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double pj = 0.0;
    for (std::size_t i = 0; i <= j; ++i) {
      double coeff = 1.0;
      std::size_t numer = 0;
      for (std::size_t l = 0; l <= j; ++l) {
        if (l == i) continue;
        coeff *= rates[numer++] / (rates[l] - rates[i]);
      }
      pj += coeff * std::exp(-rates[i] * t);
    }
    clamp_probability(pj);
    probs[j] = pj;
    head_sum += pj;
  }
  double tail = 1.0 - head_sum;
  clamp_probability(tail);
  probs[m] = tail;
  return probs;
}

inline std::vector<double> master_equation_rhs(const std::vector<double>& rates,
                                               const std::vector<double>& p) {
  const std::size_t m = rates.size();
  std::vector<double> d(m + 1);
  d[0] = -rates[0] * p[0];
  for (std::size_t j = 1; j < m; ++j) {
    d[j] = rates[j - 1] * p[j - 1] - rates[j] * p[j];
  }
  d[m] = rates[m - 1] * p[m - 1];
  return d;
}

inline std::vector<double> rk4_probs(const std::vector<double>& rates, double t) {
  const std::size_t n = rates.size() + 1;
  std::vector<double> p(n, 0.0);
  p[0] = 1.0;
  if (t == 0.0) return p;

  double rmax = rates[0];
  for (double r : rates) rmax = std::max(rmax, r);
  const double target_h = std::min(1.0 / (50.0 * rmax), t / 100.0);
  const auto steps = static_cast<std::size_t>(std::ceil(t / target_h));
  const double h = t / static_cast<double>(steps);

  std::vector<double> tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto k1 = master_equation_rhs(rates, p);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    const auto k2 = master_equation_rhs(rates, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    const auto k3 = master_equation_rhs(rates, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    const auto k4 = master_equation_rhs(rates, tmp);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      clamp_probability(p[i]);
    }
  }
  return p;
}

}  // namespace detail

inline ComponentDistribution born_distribution(const ChainSpec& chain, double t,
                                               SolveMethod method = SolveMethod::Auto) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("born_distribution: time must be nonnegative");
  }
  if (chain.max_rate() / chain.min_rate() > detail::kMaxRateRatio) {
    throw std::invalid_argument("born_distribution: rate ratio above 1e6 is out of supported range");
  }
  if (method == SolveMethod::Auto) {
    method = detail::has_degenerate_rates(chain.rates()) ? SolveMethod::RungeKutta
                                                         : SolveMethod::ClosedForm;
  }
  std::vector<double> probs = (method == SolveMethod::ClosedForm)
                                  ? detail::bateman_probs(chain.rates(), t)
                                  : detail::rk4_probs(chain.rates(), t);
  return ComponentDistribution(t, std::move(probs));
}

inline CurrentVector currents(const ChainSpec& chain, const ComponentDistribution& dist) {
  const std::size_t m = chain.num_transitions();
  if (dist.size() != chain.num_components()) {
    throw std::invalid_argument("currents: distribution has " + std::to_string(dist.size()) +
                                " entries for a chain of " +
                                std::to_string(chain.num_components()) + " components");
  }
  CurrentVector cv;
  cv.time = dist.time;
  cv.flows.resize(m);
  cv.net.resize(m + 1);
  for (std::size_t j = 0; j < m; ++j) {
    cv.flows[j] = chain.rates()[j] * dist.probs[j];
  }
  for (std::size_t i = 0; i <= m; ++i) {
    const double inflow = (i > 0) ? cv.flows[i - 1] : 0.0;
    const double outflow = (i < m) ? cv.flows[i] : 0.0;
    cv.net[i] = inflow - outflow;
  }
  return cv;
}

}  // namespace decaywatch
