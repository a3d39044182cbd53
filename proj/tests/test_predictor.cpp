#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "fjs/generator.hpp"
#include "fjs/predictor.hpp"
#include "fjs/rng.hpp"
#include "helpers.hpp"

using namespace fjs;
using doctest::Approx;

namespace {

// Recomputed straight from the definition, independently of the library code.
InstanceFeatures features_by_hand(const FjsspInstance& inst) {
  InstanceFeatures f;
  f.n_jobs = static_cast<double>(inst.jobs.size());
  f.n_machines = static_cast<double>(inst.machine_count);
  std::vector<double> counts(inst.machine_count, 0.0);
  double min_pt = 1e300, max_pt = -1e300;
  int ops = 0;
  for (const auto& job : inst.jobs) {
    for (const auto& op : job.operations) {
      ++ops;
      std::set<int> machines;
      for (const auto& mo : op.options) {
        machines.insert(mo.machine);
        min_pt = std::min(min_pt, static_cast<double>(mo.processing_time));
        max_pt = std::max(max_pt, static_cast<double>(mo.processing_time));
      }
      for (int m : machines) counts[m] += 1.0;
    }
  }
  f.n_operations = ops;
  const double m = static_cast<double>(counts.size());
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= m;
  double var = 0.0, cube = 0.0;
  for (double c : counts) {
    var += (c - mean) * (c - mean);
    cube += (c - mean) * (c - mean) * (c - mean);
  }
  var /= m;
  cube /= m;
  const double sd = std::sqrt(var);
  f.mean_options = mean;
  f.std_options = sd;
  f.skewness_options = sd > 0.0 ? cube / (sd * sd * sd) : 0.0;
  f.min_pt = min_pt;
  f.max_pt = max_pt;
  f.span_pt = max_pt - min_pt;
  return f;
}

double mse_of(const GbrModel& model, const std::vector<std::vector<double>>& x,
              const std::vector<double>& y, int trees) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = model.predict_with(x[i], trees) - y[i];
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("descriptor values for the three-job example") {
  auto f = extract_features(testutil::worked_example());
  CHECK(f.n_operations == 9.0);
  CHECK(f.n_jobs == 3.0);
  CHECK(f.n_machines == 3.0);
  CHECK(f.mean_options == 6.0);  // each machine can process six of the nine ops
  CHECK(f.std_options == 0.0);
  CHECK(f.skewness_options == 0.0);
  CHECK(f.min_pt == 1.0);
  CHECK(f.max_pt == 7.0);
  CHECK(f.span_pt == 6.0);
  CHECK(f.as_array().size() == 9);
  CHECK(f.as_vector().size() == 9);
  CHECK(f.as_vector()[0] == 9.0);
  CHECK(InstanceFeatures::names().size() == 9);
}

TEST_CASE("descriptor values for a single-op instance") {
  FjsspInstance inst;
  inst.machine_count = 1;
  inst.jobs.push_back(testutil::job_of({{{0, 5}}}));
  auto f = extract_features(inst);
  CHECK(f.n_operations == 1.0);
  CHECK(f.n_jobs == 1.0);
  CHECK(f.n_machines == 1.0);
  CHECK(f.mean_options == 1.0);
  CHECK(f.std_options == 0.0);
  CHECK(f.skewness_options == 0.0);
  CHECK(f.min_pt == 5.0);
  CHECK(f.max_pt == 5.0);
  CHECK(f.span_pt == 0.0);
}

TEST_CASE("doubling processing times doubles only the time descriptors") {
  auto inst = testutil::worked_example();
  auto base = extract_features(inst);
  for (auto& job : inst.jobs)
    for (auto& op : job.operations)
      for (auto& mo : op.options) mo.processing_time *= 2;
  auto doubled = extract_features(inst);
  CHECK(doubled.min_pt == 2.0 * base.min_pt);
  CHECK(doubled.max_pt == 2.0 * base.max_pt);
  CHECK(doubled.span_pt == 2.0 * base.span_pt);
  CHECK(doubled.n_operations == base.n_operations);
  CHECK(doubled.mean_options == base.mean_options);
  CHECK(doubled.std_options == base.std_options);
  CHECK(doubled.skewness_options == base.skewness_options);
}

TEST_CASE("descriptors match an independent recomputation") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = generate_instance(testutil::tiny_params(seed, 4, 4));
    CAPTURE(seed);
    auto got = extract_features(inst);
    auto want = features_by_hand(inst);
    CHECK(got.n_operations == want.n_operations);
    CHECK(got.n_jobs == want.n_jobs);
    CHECK(got.n_machines == want.n_machines);
    CHECK(got.mean_options == Approx(want.mean_options).epsilon(1e-12));
    CHECK(got.std_options == Approx(want.std_options).epsilon(1e-12));
    CHECK(got.skewness_options == Approx(want.skewness_options).epsilon(1e-12));
    CHECK(got.min_pt == want.min_pt);
    CHECK(got.max_pt == want.max_pt);
    CHECK(got.span_pt == want.span_pt);
  }
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto inst = generate_instance(bc_generation_params(seed));
    CAPTURE(seed);
    auto got = extract_features(inst);
    auto want = features_by_hand(inst);
    CHECK(got.mean_options == Approx(want.mean_options).epsilon(1e-12));
    CHECK(got.std_options == Approx(want.std_options).epsilon(1e-12));
    CHECK(got.skewness_options == Approx(want.skewness_options).epsilon(1e-12));
  }
}

TEST_CASE("target ratio compares early and final incumbents") {
  IncumbentTrace trace;
  trace.entries = {{20, 0.001}, {15, 0.05}, {12, 0.4}};
  // Budget 10 * 0.01 = 0.1s: the 15 was in time, the 12 was not.
  CHECK(build_target(trace, 10, 0.01) == Approx(12.0 / 15.0).epsilon(1e-12));
  // Generous budget: the final incumbent was in time, ratio 1.
  CHECK(build_target(trace, 10, 1.0) == 1.0);
  // Budget smaller than the first incumbent's timestamp: nothing counts.
  IncumbentTrace slow;
  slow.entries = {{20, 0.5}};
  CHECK(build_target(slow, 10, 0.01) == 0.0);
  CHECK(build_target({}, 10, 0.01) == 0.0);
  CHECK_THROWS_AS(build_target(trace, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_target(trace, 10, -1.0), std::invalid_argument);
}

TEST_CASE("targets from real solves stay in the unit interval") {
  std::vector<FjsspInstance> instances;
  for (std::uint64_t seed = 500; seed < 506; ++seed)
    instances.push_back(testutil::tiny_instance(seed));
  auto samples = build_dataset(instances, 0.5, 0.01);
  REQUIRE(samples.size() == instances.size());
  for (const auto& s : samples) {
    CHECK(s.target >= 0.0);
    CHECK(s.target <= 1.0);
    CHECK(s.instance_hash != 0);
    CHECK(s.features.n_operations >= 1.0);
  }
}

TEST_CASE("boosting a constant target returns the constant") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    x.push_back({rng.next_double(), rng.next_double()});
    y.push_back(0.7);
  }
  GbrConfig cfg;
  cfg.n_trees = 5;
  auto model = GbrModel::fit(x, y, cfg);
  CHECK(model.base() == Approx(0.7).epsilon(1e-12));
  CHECK(model.predict({0.1, 0.9}) == Approx(0.7).epsilon(1e-12));
  CHECK(model.predict({100.0, -3.0}) == Approx(0.7).epsilon(1e-12));
}

TEST_CASE("boosting reduces training error monotonically") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  Rng rng(11);
  for (int i = 0; i < 80; ++i) {
    const double a = rng.next_double();
    const double b = rng.next_double();
    x.push_back({a, b});
    y.push_back(0.2 + 0.6 * (a > 0.5 ? 1.0 : 0.0) + 0.1 * b);
  }
  GbrConfig cfg;
  cfg.n_trees = 40;
  auto model = GbrModel::fit(x, y, cfg);
  REQUIRE(model.tree_count() == 40);
  double prev = mse_of(model, x, y, 0);
  const double base_mse = prev;
  for (int t = 1; t <= model.tree_count(); ++t) {
    const double cur = mse_of(model, x, y, t);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
  CHECK(prev < base_mse * 0.5);
  CHECK(model.predict(x[0]) == model.predict_with(x[0], model.tree_count()));
  CHECK_THROWS_AS(model.predict_with(x[0], 41), std::invalid_argument);
  CHECK_THROWS_AS(model.predict_with(x[0], -1), std::invalid_argument);
  CHECK_THROWS_AS(model.predict({1.0}), std::invalid_argument);
}

TEST_CASE("fits are reproducible from the data alone") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    x.push_back({rng.next_double(), rng.next_double(), rng.next_double()});
    y.push_back(x.back()[0] * 0.4 + x.back()[2]);
  }
  GbrConfig cfg;
  cfg.n_trees = 12;
  auto a = GbrModel::fit(x, y, cfg);
  auto b = GbrModel::fit(x, y, cfg);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("the ensemble beats the mean baseline out of sample") {
  auto gen = [](std::uint64_t seed, int n, std::vector<std::vector<double>>& x,
                std::vector<double>& y) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
      const double a = rng.next_double();
      const double b = rng.next_double();
      const double c = rng.next_double();
      x.push_back({a, b, c});
      y.push_back(0.1 + 0.5 * (a > 0.4 ? 1.0 : 0.0) + 0.3 * b * b + 0.05 * c);
    }
  };
  std::vector<std::vector<double>> xtr, xte;
  std::vector<double> ytr, yte;
  gen(100, 200, xtr, ytr);
  gen(200, 100, xte, yte);
  auto model = GbrModel::fit(xtr, ytr, {});
  double mean = 0.0;
  for (double v : ytr) mean += v;
  mean /= static_cast<double>(ytr.size());
  double mae_model = 0.0, mae_mean = 0.0;
  for (std::size_t i = 0; i < xte.size(); ++i) {
    mae_model += std::fabs(model.predict(xte[i]) - yte[i]);
    mae_mean += std::fabs(mean - yte[i]);
  }
  CHECK(mae_model < mae_mean);
}

TEST_CASE("identical feature rows leave only the base prediction") {
  std::vector<std::vector<double>> x(20, {1.0, 2.0});
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) y.push_back(i % 2 == 0 ? 0.0 : 1.0);
  auto model = GbrModel::fit(x, y, {});
  CHECK(model.predict({1.0, 2.0}) == Approx(0.5).epsilon(1e-12));
  CHECK(model.predict({9.0, 9.0}) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("model JSON round trips and detects tampering") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    x.push_back({rng.next_double(), rng.next_double()});
    y.push_back(x.back()[0]);
  }
  GbrConfig cfg;
  cfg.n_trees = 8;
  auto model = GbrModel::fit(x, y, cfg);
  auto j = model.to_json();
  CHECK(j.contains("checksum"));
  auto back = GbrModel::from_json(j);
  CHECK(back.tree_count() == model.tree_count());
  for (const auto& row : x)
    CHECK(back.predict(row) == model.predict(row));

  auto evil = j;
  evil["base"] = j["base"].get<double>() + 0.25;
  CHECK_THROWS_AS(GbrModel::from_json(evil), std::runtime_error);

  const std::string path = "gbr_roundtrip.json";
  model.save(path);
  auto loaded = GbrModel::load(path);
  CHECK(loaded.predict(x[0]) == model.predict(x[0]));
  std::remove(path.c_str());
}

TEST_CASE("sample CSV files round trip") {
  std::vector<FjsspInstance> instances;
  for (std::uint64_t seed = 600; seed < 604; ++seed)
    instances.push_back(testutil::tiny_instance(seed));
  auto samples = build_dataset(instances, 0.3, 0.01);
  const std::string path = "cap_samples.csv";
  write_samples_csv(path, samples);
  auto back = read_samples_csv(path);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(back[i].instance_hash == samples[i].instance_hash);
    CHECK(back[i].target == samples[i].target);
    CHECK(back[i].features == samples[i].features);
  }
  std::remove(path.c_str());
}

TEST_CASE("capability training demands a minimum sample count") {
  std::vector<CapabilitySample> few(9);
  for (std::size_t i = 0; i < few.size(); ++i) {
    few[i].features.n_operations = static_cast<double>(i + 1);
    few[i].target = 0.5;
  }
  CHECK_THROWS_AS(train_capability_model(few), std::invalid_argument);

  std::vector<CapabilitySample> enough(12);
  Rng rng(77);
  for (std::size_t i = 0; i < enough.size(); ++i) {
    enough[i].features.n_operations = static_cast<double>(10 + i);
    enough[i].features.n_jobs = 3;
    enough[i].features.mean_options = rng.next_double() * 4.0;
    enough[i].target = i < 6 ? 1.0 : 0.4;
  }
  auto model = train_capability_model(enough);
  for (const auto& s : enough) {
    const double p = predict_capability(model, s.features);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("capability estimates are clamped to the unit interval") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({static_cast<double>(i), 0, 0, 0, 0, 0, 0, 0, 0});
    y.push_back(i < 10 ? -3.0 : 4.0);  // force raw outputs far outside [0,1]
  }
  auto model = GbrModel::fit(x, y, {});
  InstanceFeatures lo;
  lo.n_operations = 0.0;
  InstanceFeatures hi;
  hi.n_operations = 19.0;
  CHECK(predict_capability(model, lo) == 0.0);
  CHECK(predict_capability(model, hi) == 1.0);
}
