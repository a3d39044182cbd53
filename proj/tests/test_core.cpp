#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "fjs/generator.hpp"
#include "fjs/hash.hpp"
#include "fjs/instance.hpp"
#include "fjs/rng.hpp"
#include "fjs/schedule.hpp"
#include "helpers.hpp"

using namespace fjs;

TEST_CASE("fjs text round trip") {
  const FjsspInstance inst = testutil::worked_example();
  const std::string text = serialize_fjs(inst);
  CHECK(parse_fjs(text) == inst);

  std::istringstream ss(text);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "3 3 2.00");
}

TEST_CASE("fjs parser accepts a real-valued header third field") {
  const FjsspInstance inst = parse_fjs("1 2 1.50\n2 1 1 3 2 1 4 2 2\n");
  CHECK(inst.jobs.size() == 1);
  CHECK(inst.machine_count == 2);
  CHECK(inst.jobs[0].operations[0].options[0] == MachineOption{0, 3});
  CHECK(inst.jobs[0].operations[1].options.size() == 2);
}

TEST_CASE("fjs parser reports 1-based line numbers") {
  // job line 3 runs out of tokens
  try {
    parse_fjs("2 2 1.00\n1 1 1 5\n1 1 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(parse_fjs(""), ParseError);
  CHECK_THROWS_AS(parse_fjs("1 1\n"), ParseError);                 // missing job line
  CHECK_THROWS_AS(parse_fjs("1 1 1.00\n1 1 2 5\n"), ParseError);   // machine out of range
  CHECK_THROWS_AS(parse_fjs("1 1 1.00\n1 1 1 5 9\n"), ParseError); // trailing tokens
  CHECK_THROWS_AS(parse_fjs("1 1 1.00\n1 1 1 x\n"), ParseError);   // non-numeric
  CHECK_THROWS_AS(parse_fjs("1 1 1.00\n1 1 0 5\n"), ParseError);   // machine id 0 (1-based disk)
}

TEST_CASE("instance validity checks") {
  FjsspInstance inst = testutil::worked_example();
  CHECK_NOTHROW(inst.check_valid());
  CHECK(inst.total_operations() == 9);
  CHECK(inst.total_options() == 18);

  FjsspInstance empty;
  empty.machine_count = 1;
  CHECK_THROWS_AS(empty.check_valid(), std::invalid_argument);

  FjsspInstance bad_pt = inst;
  bad_pt.jobs[0].operations[0].options[0].processing_time = 0;
  CHECK_THROWS_AS(bad_pt.check_valid(), std::invalid_argument);

  FjsspInstance bad_machine = inst;
  bad_machine.jobs[2].operations[0].options[0].machine = 3;
  CHECK_THROWS_AS(bad_machine.check_valid(), std::invalid_argument);
}

TEST_CASE("instance hash tracks content") {
  const FjsspInstance a = testutil::worked_example();
  FjsspInstance b = a;
  CHECK(instance_hash(a) == instance_hash(b));
  b.jobs[0].operations[0].options[0].processing_time += 1;
  CHECK(instance_hash(a) != instance_hash(b));
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(to_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(to_hex(1) == "0000000000000001");
}

TEST_CASE("schedule validation accepts the 16-makespan solution") {
  const FjsspInstance inst = testutil::worked_example();
  const Schedule s = testutil::makespan16_schedule();
  CHECK(validate_schedule(inst, s).empty());
}

namespace {
bool has_kind(const std::vector<Violation>& v, ViolationKind kind) {
  for (const auto& x : v)
    if (x.kind == kind) return true;
  return false;
}
}  // namespace

TEST_CASE("schedule validation catches each violation kind") {
  const FjsspInstance inst = testutil::worked_example();
  const Schedule good = testutil::makespan16_schedule();

  Schedule missing = good;
  missing.assignments.pop_back();
  CHECK(has_kind(validate_schedule(inst, missing), ViolationKind::kMissingOperation));

  Schedule dup = good;
  dup.assignments.push_back(dup.assignments[0]);
  CHECK(has_kind(validate_schedule(inst, dup), ViolationKind::kDuplicateOperation));

  Schedule unknown = good;
  unknown.assignments[0].op = 9;
  CHECK(has_kind(validate_schedule(inst, unknown), ViolationKind::kUnknownOperation));

  Schedule incompatible = good;
  incompatible.assignments[6].machine = 0;  // first op of job 2 runs only on machine 2
  CHECK(has_kind(validate_schedule(inst, incompatible), ViolationKind::kIncompatibleMachine));

  Schedule duration = good;
  duration.assignments[0].end += 1;
  CHECK(has_kind(validate_schedule(inst, duration), ViolationKind::kWrongDuration));

  Schedule negative = good;
  negative.assignments[6].start = -2;
  negative.assignments[6].end = 0;
  CHECK(has_kind(validate_schedule(inst, negative), ViolationKind::kNegativeStart));

  Schedule precedence = good;
  precedence.assignments[2].start = 8;  // overlaps the end of its predecessor
  precedence.assignments[2].end = 10;
  CHECK(has_kind(validate_schedule(inst, precedence), ViolationKind::kPrecedenceBroken));

  Schedule overlap = good;
  overlap.assignments[4].start = 2;  // machine 0 also runs job 2 in [2,8]
  overlap.assignments[4].end = 6;
  CHECK(has_kind(validate_schedule(inst, overlap), ViolationKind::kMachineOverlap));

  Schedule wrong_makespan = good;
  wrong_makespan.makespan = 20;
  CHECK(has_kind(validate_schedule(inst, wrong_makespan), ViolationKind::kWrongMakespan));
}

TEST_CASE("release respect check") {
  const Schedule s = testutil::makespan16_schedule();
  CHECK(respects_release(s, {0, 0, 0}, {0, 0, 0}));
  CHECK(respects_release(s, {0, 4, 0}, {0, 0, 0}));   // job 1 starts at 4
  CHECK_FALSE(respects_release(s, {1, 0, 0}, {0, 0, 0}));  // job 0 starts at 0
  CHECK_FALSE(respects_release(s, {0, 0, 0}, {0, 0, 1}));  // machine 2 starts at 0
}

TEST_CASE("optimal gap") {
  CHECK(optimal_gap(16.0, 12.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(optimal_gap(12.0, 12.0) == 0.0);
  CHECK_THROWS_AS(optimal_gap(5.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_gap(5.0, -1.0), std::invalid_argument);
}

TEST_CASE("range spec parsing") {
  CHECK(RangeSpec::parse("7").ref == RangeSpec::Ref::kNone);
  CHECK(RangeSpec::parse("7").value == 7.0);
  CHECK(RangeSpec::parse("j/2").ref == RangeSpec::Ref::kJobs);
  CHECK(RangeSpec::parse("j/2").value == 2.0);
  CHECK(RangeSpec::parse("m/1.5").ref == RangeSpec::Ref::kMachines);
  CHECK(RangeSpec::parse("m/1.5").value == doctest::Approx(1.5));
  CHECK(RangeSpec::parse("j").ref == RangeSpec::Ref::kJobs);
  CHECK(RangeSpec::parse("j").value == 1.0);
  CHECK_THROWS_AS(RangeSpec::parse("q/2"), std::invalid_argument);
  CHECK_THROWS_AS(RangeSpec::parse(""), std::invalid_argument);

  CHECK(RangeSpec::parse(RangeSpec::jobs_over(4).str()).ref == RangeSpec::Ref::kJobs);
  CHECK(RangeSpec::constant(3).str() == "3");
}

TEST_CASE("generator is deterministic per seed") {
  GenParams p = testutil::tiny_params(42);
  const FjsspInstance a = generate_instance(p);
  const FjsspInstance b = generate_instance(p);
  CHECK(a == b);
  p.seed = 43;
  CHECK_FALSE(generate_instance(p) == a);
}

TEST_CASE("generator respects the training preset ranges") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FjsspInstance inst = generate_instance(bc_generation_params(seed));
    const int j = static_cast<int>(inst.jobs.size());
    const int m = inst.machine_count;
    CHECK(j >= 11);
    CHECK(j <= 12);
    CHECK(m >= 4);
    CHECK(m <= 9);
    for (const Job& job : inst.jobs) {
      const int ops = static_cast<int>(job.operations.size());
      CHECK(ops >= 3);
      CHECK(ops <= 9);
      for (const Operation& op : job.operations) {
        const int opts = static_cast<int>(op.options.size());
        CHECK(opts >= 2);
        CHECK(opts <= m);
        std::set<int> machines;
        for (const MachineOption& o : op.options) {
          CHECK(o.processing_time >= 1);
          machines.insert(o.machine);
        }
        CHECK(static_cast<int>(machines.size()) == opts);  // no duplicate machines
      }
    }
  }
}

TEST_CASE("generator couples machine counts to the job draw") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const FjsspInstance inst = generate_instance(cp_generation_params(seed));
    const int j = static_cast<int>(inst.jobs.size());
    const int m = inst.machine_count;
    CHECK(j >= 6);
    CHECK(j <= 20);
    CHECK(m >= std::max(1, j / 2));
    CHECK(m <= std::max(1, static_cast<int>(j / 1.5)));
    for (const Job& job : inst.jobs) {
      const int ops = static_cast<int>(job.operations.size());
      CHECK(ops >= std::max(1, j / 4));
      CHECK(ops <= j);
    }
  }
}

TEST_CASE("generator rejects empty ranges") {
  GenParams p = testutil::tiny_params(1);
  p.jobs_lo = RangeSpec::constant(3);
  p.jobs_hi = RangeSpec::constant(2);
  CHECK_THROWS_AS(generate_instance(p), std::invalid_argument);
}

TEST_CASE("rng determinism and bounds") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng r(7);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 200; ++i) {
    const std::int64_t v = r.next_int(2, 5);
    CHECK(v >= 2);
    CHECK(v <= 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 4);  // every value in a small range shows up

  for (int i = 0; i < 100; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double x = r.next_real(-2.0, 3.0);
    CHECK(x >= -2.0);
    CHECK(x < 3.0);
  }
}
