#include "fjs/schedule.hpp"

#include <algorithm>
#include <map>

namespace fjs {

namespace {

std::string op_name(int job, int op) {
  return "(" + std::to_string(job) + "," + std::to_string(op) + ")";
}

}  // namespace

std::vector<Violation> validate_schedule(const FjsspInstance& instance, const Schedule& schedule) {
  std::vector<Violation> out;
  const std::size_t n_jobs = instance.jobs.size();

  // coverage: every operation exactly once, nothing extra
  std::vector<std::vector<int>> seen(n_jobs);
  for (std::size_t j = 0; j < n_jobs; ++j) seen[j].assign(instance.jobs[j].operations.size(), 0);
  for (const auto& a : schedule.assignments) {
    if (a.job < 0 || static_cast<std::size_t>(a.job) >= n_jobs || a.op < 0 ||
        static_cast<std::size_t>(a.op) >= instance.jobs[a.job].operations.size()) {
      out.push_back({ViolationKind::kUnknownOperation, op_name(a.job, a.op) + " does not exist"});
      continue;
    }
    if (++seen[a.job][a.op] > 1)
      out.push_back({ViolationKind::kDuplicateOperation, op_name(a.job, a.op) + " assigned twice"});
  }
  for (std::size_t j = 0; j < n_jobs; ++j)
    for (std::size_t k = 0; k < seen[j].size(); ++k)
      if (seen[j][k] == 0)
        out.push_back({ViolationKind::kMissingOperation,
                       op_name(static_cast<int>(j), static_cast<int>(k)) + " not assigned"});

  TimeUnit max_end = 0;
  for (const auto& a : schedule.assignments) {
    if (a.job < 0 || static_cast<std::size_t>(a.job) >= n_jobs || a.op < 0 ||
        static_cast<std::size_t>(a.op) >= instance.jobs[a.job].operations.size())
      continue;
    const Operation& op = instance.operation(a.job, a.op);
    const MachineOption* mo = op.option_for(a.machine);
    if (mo == nullptr) {
      out.push_back({ViolationKind::kIncompatibleMachine,
                     op_name(a.job, a.op) + " cannot run on machine " + std::to_string(a.machine)});
    } else if (a.end != a.start + mo->processing_time) {
      out.push_back({ViolationKind::kWrongDuration,
                     op_name(a.job, a.op) + " has end != start + processing time"});
    }
    if (a.start < 0)
      out.push_back({ViolationKind::kNegativeStart, op_name(a.job, a.op) + " starts before 0"});
    max_end = std::max(max_end, a.end);
  }

  // precedence within each job
  std::map<std::pair<int, int>, const Assignment*> by_op;
  for (const auto& a : schedule.assignments) by_op[{a.job, a.op}] = &a;
  for (std::size_t j = 0; j < n_jobs; ++j) {
    for (std::size_t k = 1; k < instance.jobs[j].operations.size(); ++k) {
      auto prev = by_op.find({static_cast<int>(j), static_cast<int>(k) - 1});
      auto cur = by_op.find({static_cast<int>(j), static_cast<int>(k)});
      if (prev == by_op.end() || cur == by_op.end()) continue;
      if (cur->second->start < prev->second->end)
        out.push_back({ViolationKind::kPrecedenceBroken,
                       op_name(static_cast<int>(j), static_cast<int>(k)) +
                           " starts before its predecessor ends"});
    }
  }

  // machine capacity
  std::map<int, std::vector<const Assignment*>> by_machine;
  for (const auto& a : schedule.assignments) by_machine[a.machine].push_back(&a);
  for (auto& [machine, list] : by_machine) {
    std::sort(list.begin(), list.end(),
              [](const Assignment* a, const Assignment* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->start < list[i - 1]->end)
        out.push_back({ViolationKind::kMachineOverlap,
                       op_name(list[i - 1]->job, list[i - 1]->op) + " and " +
                           op_name(list[i]->job, list[i]->op) + " overlap on machine " +
                           std::to_string(machine)});
    }
  }

  if (!schedule.assignments.empty() && schedule.makespan != max_end)
    out.push_back({ViolationKind::kWrongMakespan,
                   "stored makespan " + std::to_string(schedule.makespan) +
                       " != max end " + std::to_string(max_end)});
  return out;
}

bool respects_release(const Schedule& schedule, const std::vector<TimeUnit>& job_start,
                      const std::vector<TimeUnit>& machine_start) {
  for (const auto& a : schedule.assignments) {
    if (a.job >= 0 && static_cast<std::size_t>(a.job) < job_start.size() &&
        a.start < job_start[a.job])
      return false;
    if (a.machine >= 0 && static_cast<std::size_t>(a.machine) < machine_start.size() &&
        a.start < machine_start[a.machine])
      return false;
  }
  return true;
}

double optimal_gap(double candidate, double reference) {
  if (!(reference > 0.0)) throw std::invalid_argument("gap reference must be positive");
  return (candidate - reference) / reference;
}

}  // namespace fjs
