#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fjs/instance.hpp"
#include "fjs/schedule.hpp"

namespace fjs {

struct ReleaseTimes {
  std::vector<TimeUnit> job_start;      // one per job
  std::vector<TimeUnit> machine_start;  // one per machine
};

struct SearchConfig {
  std::optional<double> time_limit_seconds;
  std::optional<std::int64_t> node_limit;
  std::optional<ReleaseTimes> release;
};

struct TraceEntry {
  TimeUnit makespan = 0;
  double wall_time = 0.0;  // seconds since the solve started
};

// Strictly improving incumbents in discovery order.
struct IncumbentTrace {
  std::vector<TraceEntry> entries;
};

struct BoundedResult {
  std::optional<Schedule> best;
  TimeUnit lower_bound = 0;
  bool proven_optimal = false;
  std::int64_t nodes_explored = 0;
  IncumbentTrace trace;
};

// Depth-first branch and bound over append-style decisions: pick a job with
// work left, pick a machine option for its next operation, start it at the
// earliest feasible time. An initial greedy incumbent (earliest completion
// first) seeds the bound, so the trace is never empty. Deterministic search
// order; with a node limit instead of a time limit the whole result is
// reproducible.
BoundedResult solve_exact(const FjsspInstance& instance, const SearchConfig& config = {});

// Same search with per-job and per-machine earliest-start vectors.
BoundedResult solve_subinstance(const FjsspInstance& instance, const ReleaseTimes& release,
                                SearchConfig config = {});

// Exhaustive reference: every machine assignment crossed with every
// precedence-consistent append order. Guarded to instances with at most
// eight operations. Returns the optimal makespan.
TimeUnit brute_force_oracle(const FjsspInstance& instance,
                            const std::optional<ReleaseTimes>& release = {});

std::string bounded_result_to_json(const BoundedResult& result);

}  // namespace fjs
