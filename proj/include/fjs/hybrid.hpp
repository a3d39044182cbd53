#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fjs/env.hpp"
#include "fjs/exact.hpp"
#include "fjs/gbr.hpp"
#include "fjs/instance.hpp"
#include "fjs/nn/hgat.hpp"
#include "fjs/predictor.hpp"
#include "fjs/schedule.hpp"

namespace fjs {

struct HybridConfig {
  // hand the residual instance to the exact solver once its capability score
  // exceeds this (strictly)
  double threshold = 0.98;
  // exact-phase wall budget per residual operation, seconds
  double om = 0.01;
  // fixed exact-phase budget in seconds; overrides the per-operation rule
  std::optional<double> exact_budget_override;
  // sample actions from the policy distribution instead of taking the argmax
  bool sample_actions = false;
  std::uint64_t sample_seed = 0;
  // safety cap on policy steps; 0 means one per operation
  int max_policy_steps = 0;
};

// Residual problem induced by the scheduled prefix of a state: the
// unscheduled operations keep their intra-job order, finished jobs drop out,
// and release times carry the prefix's job/machine completion times.
struct SubInstanceMap {
  struct Entry {
    int job = 0;       // original job index
    int first_op = 0;  // original index of the sub job's first operation
  };
  std::vector<Entry> jobs;  // indexed by sub job
};

struct SubInstance {
  FjsspInstance instance;
  ReleaseTimes release;
  SubInstanceMap map;
};

SubInstance remaining_subinstance(const env::HetGraphState& state);

// Union of a prefix and a sub-schedule mapped back to original indices.
// Throws std::logic_error if the union is not a valid schedule of the
// original instance.
Schedule stitch(const std::vector<Assignment>& prefix, const Schedule& sub,
                const SubInstanceMap& map, const FjsspInstance& original);

struct HybridLog {
  struct Step {
    int step = 0;
    double score = 0.0;
    bool handoff = false;
  };
  std::vector<Step> steps;
  int handoff_step = -1;       // -1 when the policy ran to completion
  bool exact_fallback = false; // exact phase produced no incumbent in budget
  double policy_seconds = 0.0;
  double exact_seconds = 0.0;
};

struct HybridResult {
  Schedule schedule;
  HybridLog log;
};

HybridResult solve_hybrid(const FjsspInstance& instance, const nn::HgatParams& policy,
                          const GbrModel& predictor, const HybridConfig& config = {});

// Policy-only rollout (greedy or sampled); useful as a baseline and as the
// fallback path of the hybrid loop.
Schedule rollout_policy(const FjsspInstance& instance, const nn::HgatParams& policy,
                        bool sample = false, std::uint64_t seed = 0);

}  // namespace fjs
