#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <memory>

#include "fjs/hybrid.hpp"
#include "fjs/rng.hpp"
#include "helpers.hpp"

using namespace fjs;
using doctest::Approx;

namespace {

// Capability model that scores everything as a sure win for the exact phase.
GbrModel always_confident() {
  std::vector<CapabilitySample> samples(12);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].features.n_operations = static_cast<double>(i + 1);
    samples[i].target = 1.0;
  }
  return train_capability_model(samples);
}

// Scores residuals with at most four operations near 1, larger ones near 0.
GbrModel confident_below_five_ops() {
  std::vector<CapabilitySample> samples;
  for (int n = 1; n <= 10; ++n) {
    for (int rep = 0; rep < 2; ++rep) {
      CapabilitySample s;
      s.features.n_operations = static_cast<double>(n);
      s.target = n <= 4 ? 1.0 : 0.0;
      samples.push_back(s);
    }
  }
  return train_capability_model(samples);
}

nn::HgatParams tiny_policy(std::uint64_t seed = 15) {
  nn::HgatDims dims;
  dims.hidden = 8;
  dims.layers = 1;
  dims.heads = 1;
  return nn::init_params(dims, seed);
}

TimeUnit max_end(const std::vector<Assignment>& as) {
  TimeUnit t = 0;
  for (const auto& a : as) t = std::max(t, a.end);
  return t;
}

}  // namespace

TEST_CASE("the untouched state induces the original problem") {
  auto inst = std::make_shared<const FjsspInstance>(testutil::worked_example());
  auto sub = remaining_subinstance(env::initial_state(inst));
  CHECK(serialize_fjs(sub.instance) == serialize_fjs(*inst));
  REQUIRE(sub.release.job_start.size() == 3);
  REQUIRE(sub.release.machine_start.size() == 3);
  for (auto t : sub.release.job_start) CHECK(t == 0);
  for (auto t : sub.release.machine_start) CHECK(t == 0);
  REQUIRE(sub.map.jobs.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(sub.map.jobs[j].job == j);
    CHECK(sub.map.jobs[j].first_op == 0);
  }
}

TEST_CASE("a scheduled prefix turns into release times") {
  auto inst = std::make_shared<const FjsspInstance>(testutil::worked_example());
  auto state = env::apply_action(env::initial_state(inst), {2, 2});  // [0,2] on machine 2
  auto sub = remaining_subinstance(state);

  CHECK(sub.instance.total_operations() == 8);
  CHECK(sub.instance.machine_count == 3);
  REQUIRE(sub.instance.jobs.size() == 3);
  CHECK(sub.instance.jobs[2].operations.size() == 2);
  // the remaining ops of the stepped job keep their option sets
  CHECK(sub.instance.jobs[2].operations[0].options.size() == 2);
  CHECK(sub.instance.jobs[2].operations[1].options.size() == 3);
  CHECK(sub.release.job_start == std::vector<TimeUnit>{0, 0, 2});
  CHECK(sub.release.machine_start == std::vector<TimeUnit>{0, 0, 2});
  CHECK(sub.map.jobs[2].first_op == 1);

  // finish the stepped job entirely: it must drop out of the residual
  state = env::apply_action(state, {2, 0});  // [2,8] on machine 0
  state = env::apply_action(state, {2, 1});  // [8,9] on machine 1
  auto sub2 = remaining_subinstance(state);
  REQUIRE(sub2.instance.jobs.size() == 2);
  CHECK(sub2.instance.total_operations() == 6);
  REQUIRE(sub2.map.jobs.size() == 2);
  CHECK(sub2.map.jobs[0].job == 0);
  CHECK(sub2.map.jobs[1].job == 1);
  CHECK(sub2.release.job_start == std::vector<TimeUnit>{0, 0});
  CHECK(sub2.release.machine_start == std::vector<TimeUnit>{8, 9, 2});
}

TEST_CASE("terminal states have no residual") {
  auto inst = std::make_shared<const FjsspInstance>(testutil::worked_example());
  auto state = env::initial_state(inst);
  while (!state.terminal()) state = env::apply_action(state, env::feasible_actions(state).front());
  CHECK_THROWS_AS(remaining_subinstance(state), std::invalid_argument);
}

TEST_CASE("stitching a full sub-solution onto an empty prefix is the identity") {
  auto inst = testutil::worked_example();
  auto res = solve_exact(inst);
  REQUIRE(res.best.has_value());
  SubInstanceMap identity;
  for (int j = 0; j < 3; ++j) identity.jobs.push_back({j, 0});
  auto merged = stitch({}, *res.best, identity, inst);
  CHECK(merged.makespan == res.best->makespan);
  CHECK(validate_schedule(inst, merged).empty());
}

TEST_CASE("stitching rejects unions that do not cover the instance") {
  auto inst = testutil::worked_example();
  auto res = solve_exact(inst);
  REQUIRE(res.best.has_value());
  SubInstanceMap identity;
  for (int j = 0; j < 3; ++j) identity.jobs.push_back({j, 0});
  Schedule clipped = *res.best;
  clipped.assignments.pop_back();
  CHECK_THROWS_AS(stitch({}, clipped, identity, inst), std::logic_error);
}

TEST_CASE("random prefixes stitch into valid complete schedules") {
  for (std::uint64_t seed = 700; seed < 720; ++seed) {
    auto inst = std::make_shared<const FjsspInstance>(testutil::tiny_instance(seed));
    CAPTURE(seed);
    const int total = static_cast<int>(inst->total_operations());
    Rng rng(seed);
    const int prefix_len = static_cast<int>(rng.next_int(1, total - 1));
    auto state = env::initial_state(inst);
    for (int i = 0; i < prefix_len; ++i) {
      auto acts = env::feasible_actions(state);
      state = env::apply_action(state, acts[rng.next_int(0, static_cast<int>(acts.size()) - 1)]);
    }
    auto sub = remaining_subinstance(state);
    auto res = solve_subinstance(sub.instance, sub.release);
    REQUIRE(res.best.has_value());
    CHECK(res.proven_optimal);
    CHECK(res.best->makespan == brute_force_oracle(sub.instance, sub.release));

    auto merged = stitch(state.placed(), *res.best, sub.map, *inst);
    CHECK(validate_schedule(*inst, merged).empty());
    CHECK(merged.makespan == std::max(max_end(state.placed()), res.best->makespan));
    CHECK(merged.assignments.size() == static_cast<std::size_t>(total));
  }
}

TEST_CASE("a confident estimate hands the whole problem to the exact phase") {
  auto inst = testutil::worked_example();
  auto predictor = always_confident();
  auto policy = tiny_policy();
  HybridConfig cfg;
  cfg.exact_budget_override = 5.0;
  auto out = solve_hybrid(inst, policy, predictor, cfg);

  CHECK(out.schedule.makespan == 12);
  CHECK(validate_schedule(inst, out.schedule).empty());
  CHECK(out.log.handoff_step == 0);
  REQUIRE(out.log.steps.size() == 1);
  CHECK(out.log.steps[0].step == 0);
  CHECK(out.log.steps[0].handoff);
  CHECK(out.log.steps[0].score > 0.98);
  CHECK(out.log.exact_seconds > 0.0);
  CHECK_FALSE(out.log.exact_fallback);
}

TEST_CASE("an unreachable threshold leaves the policy in charge") {
  auto inst = testutil::worked_example();
  auto predictor = always_confident();
  auto policy = tiny_policy();
  HybridConfig cfg;
  cfg.threshold = 1.01;  // scores are clamped to [0,1], so this never trips
  auto out = solve_hybrid(inst, policy, predictor, cfg);

  CHECK(out.log.handoff_step == -1);
  CHECK(out.log.steps.size() == 9);
  for (const auto& s : out.log.steps) CHECK_FALSE(s.handoff);
  CHECK(validate_schedule(inst, out.schedule).empty());
  CHECK(out.schedule.makespan >= 12);
  CHECK(out.log.exact_seconds == 0.0);

  auto rolled = rollout_policy(inst, policy);
  CHECK(rolled.makespan == out.schedule.makespan);
  REQUIRE(rolled.assignments.size() == out.schedule.assignments.size());
  for (std::size_t i = 0; i < rolled.assignments.size(); ++i) {
    CHECK(rolled.assignments[i].job == out.schedule.assignments[i].job);
    CHECK(rolled.assignments[i].machine == out.schedule.assignments[i].machine);
    CHECK(rolled.assignments[i].start == out.schedule.assignments[i].start);
  }
}

TEST_CASE("the handoff fires once the residual shrinks below the learned bar") {
  auto inst = testutil::worked_example();
  auto predictor = confident_below_five_ops();
  auto policy = tiny_policy(21);
  HybridConfig cfg;
  cfg.exact_budget_override = 5.0;
  auto out = solve_hybrid(inst, policy, predictor, cfg);

  // nine operations total; scores stay low until only four remain
  CHECK(out.log.handoff_step == 5);
  REQUIRE(out.log.steps.size() == 6);
  for (int i = 0; i < 5; ++i) {
    CHECK(out.log.steps[i].step == i);
    CHECK_FALSE(out.log.steps[i].handoff);
    CHECK(out.log.steps[i].score < 0.98);
  }
  CHECK(out.log.steps[5].handoff);
  CHECK(out.log.steps[5].score > 0.98);
  CHECK(validate_schedule(inst, out.schedule).empty());
  CHECK(out.schedule.makespan >= 12);
  CHECK(out.schedule.assignments.size() == 9);
}

TEST_CASE("handoff with a real budget recovers the optimal completion") {
  for (std::uint64_t seed = 800; seed < 810; ++seed) {
    auto inst = testutil::tiny_instance(seed);
    CAPTURE(seed);
    auto predictor = always_confident();
    auto policy = tiny_policy(seed);
    HybridConfig cfg;
    cfg.exact_budget_override = 10.0;
    auto out = solve_hybrid(inst, policy, predictor, cfg);
    CHECK(out.log.handoff_step == 0);
    CHECK(out.schedule.makespan == brute_force_oracle(inst));
    CHECK(validate_schedule(inst, out.schedule).empty());
  }
}

TEST_CASE("sampled rollouts are reproducible and feasible") {
  auto inst = testutil::worked_example();
  auto policy = tiny_policy(33);
  auto a = rollout_policy(inst, policy, true, 5);
  auto b = rollout_policy(inst, policy, true, 5);
  auto c = rollout_policy(inst, policy, true, 6);
  CHECK(validate_schedule(inst, a).empty());
  CHECK(validate_schedule(inst, c).empty());
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    CHECK(a.assignments[i].job == b.assignments[i].job);
    CHECK(a.assignments[i].machine == b.assignments[i].machine);
  }

  HybridConfig cfg;
  cfg.threshold = 1.01;
  cfg.sample_actions = true;
  cfg.sample_seed = 5;
  auto predictor = always_confident();
  auto out = solve_hybrid(inst, policy, predictor, cfg);
  CHECK(validate_schedule(inst, out.schedule).empty());
}

TEST_CASE("config validation") {
  auto inst = testutil::worked_example();
  auto predictor = always_confident();
  auto policy = tiny_policy();
  HybridConfig bad;
  bad.om = 0.0;
  CHECK_THROWS_AS(solve_hybrid(inst, policy, predictor, bad), std::invalid_argument);

  HybridConfig capped;
  capped.threshold = 1.01;
  capped.max_policy_steps = 1;  // cannot finish nine operations in one step
  CHECK_THROWS_AS(solve_hybrid(inst, policy, predictor, capped), std::logic_error);
}
