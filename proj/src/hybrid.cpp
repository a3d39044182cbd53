#include "fjs/hybrid.hpp"

#include <chrono>
#include <stdexcept>

#include "fjs/rng.hpp"

namespace fjs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// argmax with ties going to the lowest index; actions are already sorted by
// (job, machine)
int pick_action(const nn::ActionDistribution& dist, bool sample, Rng& rng) {
  if (!sample) {
    int best = 0;
    for (std::size_t i = 1; i < dist.probs.size(); ++i)
      if (dist.probs[i] > dist.probs[best]) best = static_cast<int>(i);
    return best;
  }
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(dist.probs.size()) - 1;
}

}  // namespace

SubInstance remaining_subinstance(const env::HetGraphState& state) {
  if (state.terminal())
    throw std::invalid_argument("terminal state has no residual instance");
  const FjsspInstance& original = state.instance();

  SubInstance sub;
  sub.instance.machine_count = original.machine_count;
  sub.release.machine_start.resize(original.machine_count);
  for (int m = 0; m < original.machine_count; ++m)
    sub.release.machine_start[m] = state.machine_last_end(m);

  for (int j = 0; j < static_cast<int>(original.jobs.size()); ++j) {
    const int first = state.next_op(j);
    const int total = static_cast<int>(original.jobs[j].operations.size());
    if (first >= total) continue;
    Job job;
    job.operations.assign(original.jobs[j].operations.begin() + first,
                          original.jobs[j].operations.end());
    sub.instance.jobs.push_back(std::move(job));
    sub.release.job_start.push_back(state.job_last_end(j));
    sub.map.jobs.push_back({j, first});
  }
  return sub;
}

Schedule stitch(const std::vector<Assignment>& prefix, const Schedule& sub,
                const SubInstanceMap& map, const FjsspInstance& original) {
  Schedule out;
  out.assignments = prefix;
  for (const Assignment& a : sub.assignments) {
    if (a.job < 0 || static_cast<std::size_t>(a.job) >= map.jobs.size())
      throw std::logic_error("sub-schedule references a job outside the residual map");
    Assignment mapped = a;
    mapped.job = map.jobs[a.job].job;
    mapped.op = map.jobs[a.job].first_op + a.op;
    out.assignments.push_back(mapped);
  }
  out.makespan = 0;
  for (const Assignment& a : out.assignments) out.makespan = std::max(out.makespan, a.end);

  const auto violations = validate_schedule(original, out);
  if (!violations.empty())
    throw std::logic_error("stitched schedule violates the original instance: " +
                           violations.front().detail);
  return out;
}

Schedule rollout_policy(const FjsspInstance& instance, const nn::HgatParams& policy,
                        bool sample, std::uint64_t seed) {
  env::HetGraphState state = env::initial_state(instance);
  Rng rng(seed);
  while (!state.terminal()) {
    const auto dist = nn::policy_forward(policy, env::scaled_snapshot(state));
    const env::ActionEdge action = dist.actions[pick_action(dist, sample, rng)];
    state = env::apply_action(state, action);
  }
  return state.to_schedule();
}

HybridResult solve_hybrid(const FjsspInstance& instance, const nn::HgatParams& policy,
                          const GbrModel& predictor, const HybridConfig& config) {
  if (config.om <= 0.0) throw std::invalid_argument("per-operation budget must be positive");
  instance.check_valid();

  HybridResult result;
  env::HetGraphState state = env::initial_state(instance);
  Rng rng(config.sample_seed);
  const int max_steps = config.max_policy_steps > 0
                            ? config.max_policy_steps
                            : static_cast<int>(instance.total_operations());

  int step = 0;
  bool fallback = false;
  while (!state.terminal()) {
    if (!fallback) {
      const SubInstance sub = remaining_subinstance(state);
      const double score = predict_capability(predictor, extract_features(sub.instance));
      const bool handoff = score > config.threshold;
      result.log.steps.push_back({step, score, handoff});

      if (handoff) {
        const double budget =
            config.exact_budget_override
                ? *config.exact_budget_override
                : static_cast<double>(sub.instance.total_operations()) * config.om;
        const auto t0 = std::chrono::steady_clock::now();
        SearchConfig scfg;
        scfg.time_limit_seconds = budget;
        scfg.release = sub.release;
        const BoundedResult exact = solve_exact(sub.instance, scfg);
        result.log.exact_seconds += seconds_since(t0);

        if (exact.best.has_value()) {
          result.log.handoff_step = step;
          result.schedule = stitch(state.placed(), *exact.best, sub.map, instance);
          return result;
        }
        // nothing in budget: finish with the policy alone
        result.log.exact_fallback = true;
        fallback = true;
      }
    }

    if (step >= max_steps)
      throw std::logic_error("policy loop exceeded the step cap without finishing");
    const auto t0 = std::chrono::steady_clock::now();
    const auto dist = nn::policy_forward(policy, env::scaled_snapshot(state));
    const env::ActionEdge action = dist.actions[pick_action(dist, config.sample_actions, rng)];
    state = env::apply_action(state, action);
    result.log.policy_seconds += seconds_since(t0);
    ++step;
  }

  result.schedule = state.to_schedule();
  const auto violations = validate_schedule(instance, result.schedule);
  if (!violations.empty())
    throw std::logic_error("policy rollout produced an invalid schedule: " +
                           violations.front().detail);
  return result;
}

}  // namespace fjs
