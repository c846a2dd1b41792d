#pragma once

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "decaywatch/chain.hpp"
#include "decaywatch/format.hpp"
#include "decaywatch/random.hpp"
#include "decaywatch/reduction.hpp"

namespace decaywatch {

template <typename S>
concept UniformSource = requires(S s) {
  { s() } -> std::convertible_to<double>;
};

// One observer run under the clock-zeroing procedure.  The observer zeros a
// stopwatch at every registered count, so inter_arrival holds the per-cycle
// clock readings t_1, t_2, ... and hit_times their running sums.  When the
// final sampled cycle straddles the query time, its waiting time is still
// recorded (it is the duration of the unfinished cycle) but contributes no
// count.
struct TrajectoryRecord {
  std::vector<double> inter_arrival;
  std::vector<double> hit_times;
  double query_time = 0.0;
  int count_at_query = 0;
  std::uint64_t seed = 0;

  bool operator==(const TrajectoryRecord& other) const = default;
};

// Runs cycles until the chain is exhausted or the next hit would land past
// query_time.  A hit exactly at query_time counts.  Consumes one uniform per
// sampled cycle; a pure function of (chain, query_time, stream contents).
template <UniformSource Stream>
TrajectoryRecord run_trajectory(const ChainSpec& chain, double query_time, Stream&& uniforms,
                                std::uint64_t seed) {
  if (!(query_time >= 0.0)) {
    throw std::invalid_argument("run_trajectory: query time must be nonnegative");
  }
  TrajectoryRecord rec;
  rec.query_time = query_time;
  rec.seed = seed;

  CycleState cycle = initial_cycle(chain);
  while (!is_terminal(chain, cycle) && cycle.global_clock < query_time) {
    const double rate = cycle_rate(chain, cycle);
    const HitSample hit = sample_hit(rate, uniforms(), rec.count_at_query + 1);
    rec.inter_arrival.push_back(hit.waiting_time);
    if (cycle.global_clock + hit.waiting_time <= query_time) {
      cycle = reduce(chain, cycle, hit);
      rec.hit_times.push_back(cycle.global_clock);
      ++rec.count_at_query;
    } else {
      break;  // straddling cycle: duration recorded, no count
    }
  }
  return rec;
}

inline TrajectoryRecord run_trajectory(const ChainSpec& chain, double query_time,
                                       std::uint64_t seed) {
  UniformStream stream(seed, 0);
  return run_trajectory(chain, query_time, stream, seed);
}

inline nlohmann::ordered_json to_json(const TrajectoryRecord& rec) {
  nlohmann::ordered_json j;
  j["inter_arrival"] = rec.inter_arrival;
  j["hit_times"] = rec.hit_times;
  j["query_time"] = rec.query_time;
  j["count_at_query"] = rec.count_at_query;
  j["seed"] = rec.seed;
  return j;
}

inline constexpr const char* kTrajectoryCsvHeader = "seed,query_time,count,inter_arrival";

// CSV row: seed, query_time, count, then the inter-arrival times joined by ';'.
inline std::string to_csv_row(const TrajectoryRecord& rec) {
  std::string row = std::to_string(rec.seed);
  row += ',';
  row += format_real(rec.query_time);
  row += ',';
  row += std::to_string(rec.count_at_query);
  row += ',';
  for (std::size_t i = 0; i < rec.inter_arrival.size(); ++i) {
    if (i > 0) row += ';';
    row += format_real(rec.inter_arrival[i]);
  }
  return row;
}

}  // namespace decaywatch
