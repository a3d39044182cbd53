#include "fjs/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fjs/rng.hpp"

namespace fjs {

RangeSpec RangeSpec::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty range spec");
  Ref ref = Ref::kNone;
  std::string rest = text;
  if (text[0] == 'j' || text[0] == 'J') {
    ref = Ref::kJobs;
    rest = text.substr(1);
  } else if (text[0] == 'm' || text[0] == 'M') {
    ref = Ref::kMachines;
    rest = text.substr(1);
  }
  if (ref != Ref::kNone) {
    if (rest.empty()) return {ref, 1.0};
    if (rest[0] != '/') throw std::invalid_argument("bad range spec '" + text + "'");
    rest = rest.substr(1);
  }
  std::size_t used = 0;
  double v = std::stod(rest, &used);
  if (used != rest.size()) throw std::invalid_argument("bad range spec '" + text + "'");
  if (ref != Ref::kNone && v <= 0.0)
    throw std::invalid_argument("divisor must be positive in '" + text + "'");
  return {ref, v};
}

std::string RangeSpec::str() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (ref) {
    case Ref::kNone:
      return num(value);
    case Ref::kJobs:
      return value == 1.0 ? "j" : "j/" + num(value);
    case Ref::kMachines:
      return value == 1.0 ? "m" : "m/" + num(value);
  }
  return "?";
}

GenParams bc_generation_params(std::uint64_t seed) {
  GenParams p;
  p.jobs_lo = RangeSpec::constant(11);
  p.jobs_hi = RangeSpec::constant(12);
  p.machines_lo = RangeSpec::constant(4);
  p.machines_hi = RangeSpec::constant(9);
  p.ops_per_job_lo = RangeSpec::constant(3);
  p.ops_per_job_hi = RangeSpec::constant(9);
  p.options_per_op_lo = RangeSpec::constant(2);
  p.options_per_op_hi = RangeSpec::machines_over(1.0);
  p.mean_pt_lo = 5.0;
  p.mean_pt_hi = 10.0;
  p.deviation = {0.2};
  p.seed = seed;
  return p;
}

GenParams cp_generation_params(std::uint64_t seed) {
  GenParams p;
  p.jobs_lo = RangeSpec::constant(6);
  p.jobs_hi = RangeSpec::constant(20);
  p.machines_lo = RangeSpec::jobs_over(2.0);
  p.machines_hi = RangeSpec::jobs_over(1.5);
  p.ops_per_job_lo = RangeSpec::jobs_over(4.0);
  p.ops_per_job_hi = RangeSpec::jobs_over(1.0);
  p.options_per_op_lo = RangeSpec::constant(1);
  p.options_per_op_hi = RangeSpec::machines_over(1.5);
  p.mean_pt_lo = 2.0;
  p.mean_pt_hi = 4.0;
  p.deviation = {0.15, 0.3, 0.5};
  p.seed = seed;
  return p;
}

namespace {

double resolve(const RangeSpec& spec, int jobs, int machines) {
  switch (spec.ref) {
    case RangeSpec::Ref::kNone:
      return spec.value;
    case RangeSpec::Ref::kJobs:
      return static_cast<double>(jobs) / spec.value;
    case RangeSpec::Ref::kMachines:
      return static_cast<double>(machines) / spec.value;
  }
  return 0.0;
}

// Integral range: both ends floored, lower end clamped to min_value.
std::pair<std::int64_t, std::int64_t> int_range(const RangeSpec& lo, const RangeSpec& hi,
                                                int jobs, int machines, std::int64_t min_value,
                                                const char* what) {
  const double eps = 1e-9;
  std::int64_t a = static_cast<std::int64_t>(std::floor(resolve(lo, jobs, machines) + eps));
  std::int64_t b = static_cast<std::int64_t>(std::floor(resolve(hi, jobs, machines) + eps));
  a = std::max(a, min_value);
  if (a > b)
    throw std::invalid_argument(std::string("empty ") + what + " range [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
  return {a, b};
}

}  // namespace

FjsspInstance generate_instance(const GenParams& params) {
  if (params.jobs_lo.ref != RangeSpec::Ref::kNone || params.jobs_hi.ref != RangeSpec::Ref::kNone)
    throw std::invalid_argument("job range must be constant");
  if (params.deviation.empty()) throw std::invalid_argument("no deviation choices");
  for (double d : params.deviation)
    if (!(d >= 0.0 && d < 1.0))
      throw std::invalid_argument("deviation must lie in [0, 1)");
  if (!(params.mean_pt_lo > 0.0) || params.mean_pt_hi < params.mean_pt_lo)
    throw std::invalid_argument("bad mean processing time range");

  Rng rng(params.seed);

  const auto job_range = int_range(params.jobs_lo, params.jobs_hi, 0, 0, 1, "job");
  const int n_jobs = static_cast<int>(rng.next_int(job_range.first, job_range.second));

  const auto machine_range =
      int_range(params.machines_lo, params.machines_hi, n_jobs, 0, 1, "machine");
  const int n_machines = static_cast<int>(rng.next_int(machine_range.first, machine_range.second));

  const double d =
      params.deviation[static_cast<std::size_t>(rng.next_int(0, params.deviation.size() - 1))];

  const auto ops_range =
      int_range(params.ops_per_job_lo, params.ops_per_job_hi, n_jobs, n_machines, 1, "ops-per-job");
  auto opts_range = int_range(params.options_per_op_lo, params.options_per_op_hi, n_jobs,
                              n_machines, 1, "options-per-op");
  opts_range.second = std::min<std::int64_t>(opts_range.second, n_machines);
  if (opts_range.first > opts_range.second)
    throw std::invalid_argument("empty options-per-op range after clamping to machine count");

  FjsspInstance instance;
  instance.machine_count = n_machines;
  instance.jobs.resize(n_jobs);
  std::vector<int> pool(n_machines);

  for (Job& job : instance.jobs) {
    const int n_ops = static_cast<int>(rng.next_int(ops_range.first, ops_range.second));
    job.operations.resize(n_ops);
    for (Operation& op : job.operations) {
      const int n_opts = static_cast<int>(rng.next_int(opts_range.first, opts_range.second));
      std::iota(pool.begin(), pool.end(), 0);
      for (int i = 0; i < n_opts; ++i) {
        const int pick = i + static_cast<int>(rng.next_int(0, n_machines - 1 - i));
        std::swap(pool[i], pool[pick]);
      }
      std::vector<int> machines(pool.begin(), pool.begin() + n_opts);
      std::sort(machines.begin(), machines.end());

      const double mean = rng.next_real(params.mean_pt_lo, params.mean_pt_hi);
      for (int m : machines) {
        const double raw = rng.next_real(mean * (1.0 - d), mean * (1.0 + d));
        const TimeUnit pt = std::max<TimeUnit>(1, std::llround(raw));
        op.options.push_back({m, pt});
      }
    }
  }
  return instance;
}

}  // namespace fjs
