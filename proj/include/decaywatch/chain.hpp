#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace decaywatch {

// A decay chain S_0 -> S_1 -> ... -> S_m with only adjacent transitions.
// rates[j] is the transition rate from component j to component j+1, so a
// chain with num_components() == m+1 carries exactly m rates.  Immutable
// after construction.
class ChainSpec {
 public:
  explicit ChainSpec(std::vector<double> rates, std::vector<std::string> labels = {})
      : rates_(std::move(rates)), labels_(std::move(labels)) {
    if (rates_.empty()) {
      throw std::invalid_argument("ChainSpec: at least one transition rate required");
    }
    for (double r : rates_) {
      if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("ChainSpec: rates must be strictly positive and finite");
      }
    }
    if (!labels_.empty() && labels_.size() != rates_.size() + 1) {
      throw std::invalid_argument("ChainSpec: labels must cover every component or be absent");
    }
  }

  std::size_t num_components() const { return rates_.size() + 1; }
  std::size_t num_transitions() const { return rates_.size(); }
  const std::vector<double>& rates() const { return rates_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double max_rate() const {
    double m = rates_.front();
    for (double r : rates_) m = std::max(m, r);
    return m;
  }

  double min_rate() const {
    double m = rates_.front();
    for (double r : rates_) m = std::min(m, r);
    return m;
  }

  bool operator==(const ChainSpec& other) const = default;

 private:
  std::vector<double> rates_;
  std::vector<std::string> labels_;
};

// Square moduli of the chain components at one instant.  Entries are
// probabilities: each in [0,1], summing to 1 within kSumTolerance.
struct ComponentDistribution {
  static constexpr double kSumTolerance = 1e-9;

  double time = 0.0;
  std::vector<double> probs;

  ComponentDistribution(double t, std::vector<double> p) : time(t), probs(std::move(p)) {
    if (!(time >= 0.0)) {
      throw std::invalid_argument("ComponentDistribution: time must be nonnegative");
    }
    double sum = 0.0;
    for (double v : probs) {
      if (!(v >= 0.0) || v > 1.0) {
        throw std::invalid_argument("ComponentDistribution: entries must lie in [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("ComponentDistribution: entries must sum to 1, got " +
                                  std::to_string(sum));
    }
  }

  std::size_t size() const { return probs.size(); }
  bool operator==(const ComponentDistribution& other) const = default;
};

// Chain for n identical atoms with per-atom decay constant k.  While j atoms
// have decayed, n-j remain and the next decay arrives at rate (n-j)k, so the
// transition out of component j carries rate (n-j)k.
inline ChainSpec make_n_atom_chain(double k, int n) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("make_n_atom_chain: decay constant must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument("make_n_atom_chain: need at least one atom");
  }
  std::vector<double> rates(static_cast<std::size_t>(n));
  std::vector<std::string> labels(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j < n; ++j) {
    rates[static_cast<std::size_t>(j)] = static_cast<double>(n - j) * k;
  }
  for (int j = 0; j <= n; ++j) {
    labels[static_cast<std::size_t>(j)] = "count=" + std::to_string(j);
  }
  return ChainSpec(std::move(rates), std::move(labels));
}

// Closed-form distribution for the two-atom source: with survival weight
// a = e^{-kt} per atom, the components carry [a^2, 2a(1-a), (1-a)^2].
// The three terms are the expansion of (a + (1-a))^2, so they sum to 1.
inline ComponentDistribution two_atom_analytic(double k, double t) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("two_atom_analytic: decay constant must be positive");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("two_atom_analytic: time must be nonnegative");
  }
  const double a = std::exp(-k * t);
  const double b = 1.0 - a;
  return ComponentDistribution(t, {a * a, 2.0 * a * b, b * b});
}

// Binomial generalization: with n independent atoms, P_j(t) = C(n,j) a^{n-j} (1-a)^j.
inline ComponentDistribution n_atom_analytic(double k, int n, double t) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("n_atom_analytic: decay constant must be positive");
  }
  if (n < 1) {
    throw std::invalid_argument("n_atom_analytic: need at least one atom");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("n_atom_analytic: time must be nonnegative");
  }
  const double a = std::exp(-k * t);
  const double b = 1.0 - a;
  std::vector<double> probs(static_cast<std::size_t>(n) + 1);
  // C(n,j) by the multiplicative recurrence; exact in double for modest n.
  double coeff = 1.0;
  for (int j = 0; j <= n; ++j) {
    probs[static_cast<std::size_t>(j)] =
        coeff * std::pow(a, static_cast<double>(n - j)) * std::pow(b, static_cast<double>(j));
    coeff = coeff * static_cast<double>(n - j) / static_cast<double>(j + 1);
  }
  // Guard against pow() roundoff pushing an entry a hair past 1.
  for (double& p : probs) p = std::min(p, 1.0);
  return ComponentDistribution(t, std::move(probs));
}

// JSON document form: {"rates": [...], "labels": [...]}, rates first.
inline nlohmann::ordered_json to_json(const ChainSpec& chain) {
  nlohmann::ordered_json j;
  j["rates"] = chain.rates();
  if (!chain.labels().empty()) {
    j["labels"] = chain.labels();
  }
  return j;
}

inline ChainSpec chain_from_json(const nlohmann::json& j) {
  if (!j.contains("rates") || !j["rates"].is_array()) {
    throw std::invalid_argument("chain_from_json: missing \"rates\" array");
  }
  std::vector<double> rates = j["rates"].get<std::vector<double>>();
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    labels = j["labels"].get<std::vector<std::string>>();
  }
  return ChainSpec(std::move(rates), std::move(labels));
}

}  // namespace decaywatch
