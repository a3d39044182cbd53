#pragma once

#include <array>
#include <vector>

#include "fjs/generator.hpp"
#include "fjs/instance.hpp"
#include "fjs/schedule.hpp"

namespace testutil {

// job literal: one inner list of (machine, processing time) pairs per operation
inline fjs::Job job_of(
    const std::vector<std::vector<std::pair<int, fjs::TimeUnit>>>& op_options) {
  fjs::Job job;
  for (const auto& options : op_options) {
    fjs::Operation op;
    for (const auto& [machine, pt] : options) op.options.push_back({machine, pt});
    job.operations.push_back(std::move(op));
  }
  return job;
}

// 3 jobs x 3 operations on 3 machines; optimal makespan 12. Used across the
// suites as the shared worked example.
inline fjs::FjsspInstance worked_example() {
  using fjs::Job;
  using fjs::MachineOption;
  using fjs::Operation;
  fjs::FjsspInstance inst;
  inst.machine_count = 3;

  Job j0;
  j0.operations = {
      Operation{{MachineOption{0, 3}, MachineOption{1, 4}}},
      Operation{{MachineOption{1, 5}, MachineOption{2, 6}}},
      Operation{{MachineOption{0, 2}, MachineOption{2, 3}}},
  };
  Job j1;
  j1.operations = {
      Operation{{MachineOption{1, 1}, MachineOption{2, 2}}},
      Operation{{MachineOption{0, 4}, MachineOption{2, 5}}},
      Operation{{MachineOption{0, 3}, MachineOption{1, 4}}},
  };
  Job j2;
  j2.operations = {
      Operation{{MachineOption{2, 2}}},
      Operation{{MachineOption{0, 6}, MachineOption{1, 7}}},
      Operation{{MachineOption{0, 1}, MachineOption{1, 1}, MachineOption{2, 2}}},
  };
  inst.jobs = {j0, j1, j2};
  return inst;
}

// sum over all 9 operations of their mean processing time
inline double worked_example_mean_pt_sum() { return 185.0 / 6.0; }

// A feasible (non-optimal) solution of the worked example with makespan 16.
inline fjs::Schedule makespan16_schedule() {
  fjs::Schedule s;
  s.assignments = {
      {0, 0, 1, 0, 4},  {0, 1, 2, 4, 10}, {0, 2, 0, 12, 14},
      {1, 0, 1, 4, 5},  {1, 1, 0, 8, 12}, {1, 2, 1, 12, 16},
      {2, 0, 2, 0, 2},  {2, 1, 0, 2, 8},  {2, 2, 1, 8, 9},
  };
  s.makespan = 16;
  return s;
}

// small-instance generation params for oracle-sized tests
inline fjs::GenParams tiny_params(std::uint64_t seed, int max_jobs = 3, int max_ops = 3) {
  fjs::GenParams p;
  p.jobs_lo = fjs::RangeSpec::constant(2);
  p.jobs_hi = fjs::RangeSpec::constant(max_jobs);
  p.machines_lo = fjs::RangeSpec::constant(2);
  p.machines_hi = fjs::RangeSpec::constant(3);
  p.ops_per_job_lo = fjs::RangeSpec::constant(1);
  p.ops_per_job_hi = fjs::RangeSpec::constant(max_ops);
  p.options_per_op_lo = fjs::RangeSpec::constant(1);
  p.options_per_op_hi = fjs::RangeSpec::constant(2);
  p.mean_pt_lo = 2.0;
  p.mean_pt_hi = 6.0;
  p.deviation = {0.2};
  p.seed = seed;
  return p;
}

// keeps drawing until the instance has at most max_ops operations in total
inline fjs::FjsspInstance tiny_instance(std::uint64_t seed, int max_total_ops = 8) {
  std::uint64_t s = seed;
  for (;;) {
    const fjs::FjsspInstance inst = fjs::generate_instance(tiny_params(s));
    if (static_cast<int>(inst.total_operations()) <= max_total_ops) return inst;
    ++s;
  }
}

}  // namespace testutil
