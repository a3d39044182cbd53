#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fjs/instance.hpp"

namespace fjs {

// One end of a sampling range. Either a constant or a value coupled to an
// already-sampled quantity ("j/2" = half the job count, "m/1.5" = two thirds
// of the machine count). Coupled values are floored to integers when the
// range is integral.
struct RangeSpec {
  enum class Ref { kNone, kJobs, kMachines };
  Ref ref = Ref::kNone;
  double value = 0.0;  // the constant, or the divisor when coupled

  static RangeSpec constant(double v) { return {Ref::kNone, v}; }
  static RangeSpec jobs_over(double divisor) { return {Ref::kJobs, divisor}; }
  static RangeSpec machines_over(double divisor) { return {Ref::kMachines, divisor}; }
  // Accepts "7", "2.5", "j", "m", "j/4", "m/1.5".
  static RangeSpec parse(const std::string& text);
  std::string str() const;
};

struct GenParams {
  RangeSpec jobs_lo, jobs_hi;                    // must be constants
  RangeSpec machines_lo, machines_hi;            // may reference j
  RangeSpec ops_per_job_lo, ops_per_job_hi;      // may reference j
  RangeSpec options_per_op_lo, options_per_op_hi;  // may reference m
  double mean_pt_lo = 0.0, mean_pt_hi = 0.0;
  std::vector<double> deviation;  // discrete choices, each in [0, 1)
  std::uint64_t seed = 0;
};

GenParams bc_generation_params(std::uint64_t seed);
GenParams cp_generation_params(std::uint64_t seed);

// Draw order per instance, one RNG draw per sampled value:
//   1. job count
//   2. machine count
//   3. deviation choice index
//   4. per job: operation count
//   5. per operation: option count, then a partial Fisher-Yates shuffle of
//      machine ids (option-count draws), then the operation's mean
//      processing time, then one processing time per selected machine in
//      ascending machine order: round(U(mean*(1-d), mean*(1+d))), min 1.
// Throws std::invalid_argument when a resolved range is empty.
FjsspInstance generate_instance(const GenParams& params);

}  // namespace fjs
