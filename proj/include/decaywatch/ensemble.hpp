#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "decaywatch/chain.hpp"
#include "decaywatch/observer.hpp"
#include "decaywatch/random.hpp"
#include "decaywatch/statistics.hpp"

namespace decaywatch {

inline constexpr std::size_t kReservoirCap = 10'000;
inline constexpr std::int64_t kMaxTrials = 1'000'000'000;

// Uniform bottom-k reservoir.  Every candidate gets a priority drawn from
// its trial's dedicated substream and the reservoir keeps the k smallest, so
// the kept set is a uniform sample of everything offered and is identical no
// matter how offers are split across threads or merged.
class WaitingTimeReservoir {
 public:
  struct Entry {
    double priority;
    std::uint64_t tiebreak;
    double value;

    bool operator<(const Entry& other) const {
      if (priority != other.priority) return priority < other.priority;
      return tiebreak < other.tiebreak;
    }
  };

  void offer(double value, double priority, std::uint64_t tiebreak) {
    const Entry e{priority, tiebreak, value};
    if (entries_.size() < kReservoirCap) {
      entries_.push_back(e);
      std::push_heap(entries_.begin(), entries_.end());
      return;
    }
    if (e < entries_.front()) {
      std::pop_heap(entries_.begin(), entries_.end());
      entries_.back() = e;
      std::push_heap(entries_.begin(), entries_.end());
    }
  }

  void merge(const WaitingTimeReservoir& other) {
    for (const Entry& e : other.entries_) {
      offer(e.value, e.priority, e.tiebreak);
    }
  }

  std::size_t size() const { return entries_.size(); }

  // Canonical export order: ascending priority.
  std::vector<double> values() const {
    std::vector<Entry> sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(sorted.size());
    for (const Entry& e : sorted) out.push_back(e.value);
    return out;
  }

 private:
  std::vector<Entry> entries_;  // max-heap on (priority, tiebreak)
};

struct EnsembleResult {
  ChainSpec chain;
  double query_time = 0.0;
  std::int64_t trials = 0;
  std::vector<std::int64_t> count_histogram;            // occurrences of count 0..m
  std::vector<std::vector<double>> cycle_waiting_samples;  // reservoir per cycle 1..m
  std::uint64_t master_seed = 0;

  bool operator==(const EnsembleResult& other) const = default;

  std::vector<double> frequencies() const {
    std::vector<double> f(count_histogram.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = static_cast<double>(count_histogram[i]) / static_cast<double>(trials);
    }
    return f;
  }
};

namespace detail {

struct TrialOutcome {
  int count = 0;
  std::vector<double> waiting_times;  // one per sampled cycle, straddler included
};

// Shared ensemble frame: partitions trials over threads, gives trial i the
// substream (run_key, i), and merges histograms and reservoirs in a way
// that does not depend on the partitioning.
template <typename PerTrial>
EnsembleResult run_trials(const ChainSpec& chain, double query_time, std::int64_t trials,
                          std::uint64_t master_seed, std::uint64_t run_key, int threads,
                          PerTrial per_trial) {
  if (!(query_time >= 0.0)) {
    throw std::invalid_argument("ensemble: query time must be nonnegative");
  }
  if (trials < 1 || trials > kMaxTrials) {
    throw std::invalid_argument("ensemble: trials must lie in [1, 1e9]");
  }
  const std::size_t m = chain.num_transitions();
  const std::uint64_t reservoir_key = derive_key(run_key, kDomainReservoir);

  int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::max(1, std::min<int>(worker_count, static_cast<int>(std::min<std::int64_t>(trials, 64))));

  struct Partial {
    std::vector<std::int64_t> hist;
    std::vector<WaitingTimeReservoir> reservoirs;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(worker_count));

  auto work = [&](int worker) {
    Partial& local = partials[static_cast<std::size_t>(worker)];
    local.hist.assign(m + 1, 0);
    local.reservoirs.assign(m, {});
    const std::int64_t lo = trials * worker / worker_count;
    const std::int64_t hi = trials * (worker + 1) / worker_count;
    for (std::int64_t trial = lo; trial < hi; ++trial) {
      UniformStream draws(run_key, static_cast<std::uint64_t>(trial));
      const TrialOutcome outcome = per_trial(draws, trial);
      ++local.hist[static_cast<std::size_t>(outcome.count)];
      UniformStream priorities(reservoir_key, static_cast<std::uint64_t>(trial));
      for (std::size_t c = 0; c < outcome.waiting_times.size(); ++c) {
        const std::uint64_t tiebreak = (static_cast<std::uint64_t>(trial) << 16) | (c + 1);
        local.reservoirs[c].offer(outcome.waiting_times[c], priorities(), tiebreak);
      }
    }
  };

  if (worker_count == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }

  EnsembleResult result{chain, query_time, trials, std::vector<std::int64_t>(m + 1, 0),
                        std::vector<std::vector<double>>(m), master_seed};
  std::vector<WaitingTimeReservoir> merged(m);
  for (const Partial& part : partials) {
    for (std::size_t i = 0; i <= m; ++i) result.count_histogram[i] += part.hist[i];
    for (std::size_t c = 0; c < m; ++c) merged[c].merge(part.reservoirs[c]);
  }
  for (std::size_t c = 0; c < m; ++c) {
    result.cycle_waiting_samples[c] = merged[c].values();
  }
  return result;
}

}  // namespace detail

// Ensemble of observer runs under the cycle engine.  Deterministic in
// (chain, query_time, trials, master_seed) for any thread count.
inline EnsembleResult run_ensemble(const ChainSpec& chain, double query_time, std::int64_t trials,
                                   std::uint64_t master_seed, int threads = 0) {
  return detail::run_trials(
      chain, query_time, trials, master_seed, master_seed, threads,
      [&](UniformStream& draws, std::int64_t trial) {
        const TrajectoryRecord rec =
            run_trajectory(chain, query_time, draws, static_cast<std::uint64_t>(trial));
        return detail::TrialOutcome{rec.count_at_query, rec.inter_arrival};
      });
}

// Independent brute-force reference: direct jump simulation of the
// unreduced chain.  At component j the next jump arrives after an
// exponential waiting time with the full exit rate, no cycle bookkeeping
// involved.  Draws come from a key derived away from the ensemble's so the
// two samples are independent even under the same master seed.
inline EnsembleResult gillespie_oracle(const ChainSpec& chain, double query_time,
                                       std::int64_t trials, std::uint64_t master_seed,
                                       int threads = 0) {
  const std::size_t m = chain.num_transitions();
  return detail::run_trials(
      chain, query_time, trials, master_seed, derive_key(master_seed, kDomainGillespie), threads,
      [&](UniformStream& draws, std::int64_t) {
        detail::TrialOutcome outcome;
        std::size_t component = 0;
        double clock = 0.0;
        while (component < m) {
          const double tau = -std::log(draws()) / chain.rates()[component];
          outcome.waiting_times.push_back(tau);
          if (clock + tau > query_time) break;
          clock += tau;
          ++component;
        }
        outcome.count = static_cast<int>(component);
        return outcome;
      });
}

struct ComparisonReport {
  ComponentDistribution expected;
  std::vector<double> observed_freq;
  double chi_square = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  double max_abs_deviation = 0.0;
  std::vector<std::optional<double>> per_cycle_ks;  // empty cycles carry no statistic
};

// Compares an ensemble against an expected distribution on both axes: the
// final count histogram (Pearson chi-square) and the per-cycle waiting-time
// samples (KS against the cycle's exponential law).
inline ComparisonReport compare(const EnsembleResult& result,
                                const ComponentDistribution& expected) {
  if (expected.size() != result.chain.num_components()) {
    throw std::invalid_argument("compare: dimension mismatch");
  }
  ComparisonReport report{expected, result.frequencies()};
  const ChiSquareResult chi =
      chi_square_gof(result.count_histogram, expected.probs, result.trials);
  report.chi_square = chi.statistic;
  report.degrees_of_freedom = chi.degrees_of_freedom;
  report.p_value = chi.p_value;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    report.max_abs_deviation =
        std::max(report.max_abs_deviation, std::abs(report.observed_freq[i] - expected.probs[i]));
  }
  report.per_cycle_ks.resize(result.chain.num_transitions());
  for (std::size_t c = 0; c < result.chain.num_transitions(); ++c) {
    const std::vector<double>& samples = result.cycle_waiting_samples[c];
    if (!samples.empty()) {
      report.per_cycle_ks[c] = ks_statistic_exponential(samples, result.chain.rates()[c]);
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json(const EnsembleResult& result) {
  nlohmann::ordered_json j;
  j["chain"] = to_json(result.chain);
  j["query_time"] = result.query_time;
  j["trials"] = result.trials;
  j["master_seed"] = result.master_seed;
  j["count_histogram"] = result.count_histogram;
  j["cycle_waiting_samples"] = result.cycle_waiting_samples;
  return j;
}

inline nlohmann::ordered_json to_json(const ComparisonReport& report) {
  nlohmann::ordered_json j;
  j["expected"] = {{"time", report.expected.time}, {"probs", report.expected.probs}};
  j["observed_freq"] = report.observed_freq;
  j["chi_square"] = report.chi_square;
  j["degrees_of_freedom"] = report.degrees_of_freedom;
  j["p_value"] = report.p_value;
  j["max_abs_deviation"] = report.max_abs_deviation;
  nlohmann::ordered_json ks = nlohmann::ordered_json::array();
  for (const auto& d : report.per_cycle_ks) {
    if (d) {
      ks.push_back(*d);
    } else {
      ks.push_back(nullptr);
    }
  }
  j["per_cycle_ks"] = ks;
  return j;
}

}  // namespace decaywatch
