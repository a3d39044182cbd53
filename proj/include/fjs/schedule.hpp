#pragma once

#include <string>
#include <vector>

#include "fjs/instance.hpp"

namespace fjs {

struct Assignment {
  int job = 0;
  int op = 0;
  int machine = 0;
  TimeUnit start = 0;
  TimeUnit end = 0;
  bool operator==(const Assignment&) const = default;
};

struct Schedule {
  std::vector<Assignment> assignments;
  TimeUnit makespan = 0;
  bool operator==(const Schedule&) const = default;
};

enum class ViolationKind {
  kMissingOperation,
  kDuplicateOperation,
  kUnknownOperation,
  kIncompatibleMachine,
  kWrongDuration,
  kNegativeStart,
  kPrecedenceBroken,
  kMachineOverlap,
  kWrongMakespan,
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Empty result means the schedule is a complete, feasible solution and its
// stored makespan matches the assignments.
std::vector<Violation> validate_schedule(const FjsspInstance& instance, const Schedule& schedule);

bool respects_release(const Schedule& schedule, const std::vector<TimeUnit>& job_start,
                      const std::vector<TimeUnit>& machine_start);

// (candidate - reference) / reference. Throws std::invalid_argument when the
// reference is not strictly positive.
double optimal_gap(double candidate, double reference);

}  // namespace fjs
