#include "fjs/env.hpp"

#include <algorithm>
#include <cmath>

#include "fjs/hash.hpp"

namespace fjs::env {

Schedule HetGraphState::to_schedule() const {
  Schedule s;
  s.assignments = placed_;
  for (const auto& a : placed_) s.makespan = std::max(s.makespan, a.end);
  return s;
}

HetGraphState initial_state(const std::shared_ptr<const FjsspInstance>& instance) {
  instance->check_valid();
  HetGraphState s;
  s.instance_ = instance;
  const int n_jobs = static_cast<int>(instance->jobs.size());
  s.op_offset_.resize(n_jobs);
  int offset = 0;
  for (int j = 0; j < n_jobs; ++j) {
    s.op_offset_[j] = offset;
    offset += static_cast<int>(instance->jobs[j].operations.size());
  }
  s.total_ops_ = offset;
  s.next_op_.assign(n_jobs, 0);
  s.job_ready_.assign(n_jobs, 0);
  s.mach_ready_.assign(instance->machine_count, 0);
  s.mach_busy_.assign(instance->machine_count, 0);
  s.op_scheduled_.assign(offset, 0);
  return s;
}

std::vector<ActionEdge> feasible_actions(const HetGraphState& state) {
  std::vector<ActionEdge> actions;
  const FjsspInstance& inst = state.instance();
  for (int j = 0; j < static_cast<int>(inst.jobs.size()); ++j) {
    if (state.job_done(j)) continue;
    const Operation& op = inst.jobs[j].operations[state.next_op(j)];
    std::vector<int> machines;
    for (const auto& mo : op.options) machines.push_back(mo.machine);
    std::sort(machines.begin(), machines.end());
    machines.erase(std::unique(machines.begin(), machines.end()), machines.end());
    for (int m : machines) actions.push_back({j, m});
  }
  return actions;  // jobs ascending, machines ascending within a job
}

HetGraphState apply_action(const HetGraphState& state, const ActionEdge& action) {
  const FjsspInstance& inst = state.instance();
  if (action.job < 0 || action.job >= static_cast<int>(inst.jobs.size()))
    throw std::invalid_argument("action references unknown job");
  if (state.job_done(action.job))
    throw std::invalid_argument("job " + std::to_string(action.job) + " is already complete");
  const int k = state.next_op(action.job);
  const Operation& op = inst.jobs[action.job].operations[k];
  const MachineOption* mo = op.option_for(action.machine);
  if (mo == nullptr)
    throw std::invalid_argument("operation (" + std::to_string(action.job) + "," +
                                std::to_string(k) + ") cannot run on machine " +
                                std::to_string(action.machine));

  HetGraphState next = state;
  const TimeUnit start =
      std::max(state.job_last_end(action.job), state.machine_last_end(action.machine));
  const TimeUnit end = start + mo->processing_time;
  next.placed_.push_back({action.job, k, action.machine, start, end});
  next.next_op_[action.job] = k + 1;
  next.job_ready_[action.job] = end;
  next.mach_ready_[action.machine] = end;
  next.mach_busy_[action.machine] += mo->processing_time;
  next.op_scheduled_[state.op_index(action.job, k)] = 1;
  next.step_ += 1;
  return next;
}

GraphSnapshot compute_features(const HetGraphState& state) {
  const FjsspInstance& inst = state.instance();
  const int n_jobs = static_cast<int>(inst.jobs.size());
  const int n_machines = inst.machine_count;

  GraphSnapshot g;
  g.n_ops = state.total_operations();
  g.n_jobs = n_jobs;
  g.n_machines = n_machines;
  g.step = state.step();
  g.op_scheduled.assign(g.n_ops, 0);
  g.op_feat.assign(g.n_ops, {});
  g.job_feat.assign(n_jobs, {});
  g.mach_feat.assign(n_machines, {});

  // pending = not yet scheduled
  double pending_work = 0.0;  // sum of mean processing times over pending ops
  std::vector<int> machine_pending(n_machines, 0);
  for (int j = 0; j < n_jobs; ++j) {
    const auto& ops = inst.jobs[j].operations;
    for (int k = state.next_op(j); k < static_cast<int>(ops.size()); ++k) {
      pending_work += ops[k].mean_processing_time();
      std::vector<int> seen;
      for (const auto& mo : ops[k].options) seen.push_back(mo.machine);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (int m : seen) machine_pending[m] += 1;
    }
  }

  for (int j = 0; j < n_jobs; ++j) {
    const auto& ops = inst.jobs[j].operations;
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      const int g_idx = state.op_index(j, k);
      if (k < state.next_op(j)) {
        g.op_scheduled[g_idx] = 1;
        continue;  // masked: zeroed features, excluded from every edge list
      }
      const double mean = ops[k].mean_processing_time();
      auto& f = g.op_feat[g_idx];
      f[0] = (k == state.next_op(j)) ? 1.0 : 0.0;
      f[1] = pending_work;
      f[2] = mean;
      f[3] = static_cast<double>(ops[k].min_processing_time());
      f[4] = pending_work > 0.0 ? mean / pending_work : 0.0;
    }
  }

  TimeUnit min_last_end = 0;
  for (int m = 0; m < n_machines; ++m)
    min_last_end = m == 0 ? state.machine_last_end(0)
                          : std::min(min_last_end, state.machine_last_end(m));
  for (int m = 0; m < n_machines; ++m) {
    const TimeUnit last_end = state.machine_last_end(m);
    auto& f = g.mach_feat[m];
    f[0] = static_cast<double>(last_end);
    f[1] = last_end > 0
               ? static_cast<double>(state.machine_busy_time(m)) / static_cast<double>(last_end)
               : 0.0;
    f[2] = static_cast<double>(last_end - min_last_end);
  }

  for (int j = 0; j < n_jobs; ++j) {
    const auto& ops = inst.jobs[j].operations;
    double job_pending = 0.0;
    for (int k = state.next_op(j); k < static_cast<int>(ops.size()); ++k)
      job_pending += ops[k].mean_processing_time();
    auto& f = g.job_feat[j];
    f[0] = state.job_done(j) ? 1.0 : 0.0;
    f[1] = static_cast<double>(state.job_last_end(j));
    f[2] = static_cast<double>(ops.size() - state.next_op(j));
    f[3] = job_pending;
  }

  for (int j = 0; j < n_jobs; ++j) {
    const auto& ops = inst.jobs[j].operations;
    for (int k = state.next_op(j); k < static_cast<int>(ops.size()); ++k) {
      const int g_idx = state.op_index(j, k);
      const int n_options = static_cast<int>(ops[k].options.size());
      std::vector<std::pair<int, TimeUnit>> opts;
      for (const auto& mo : ops[k].options) opts.push_back({mo.machine, mo.processing_time});
      std::sort(opts.begin(), opts.end());
      opts.erase(std::unique(opts.begin(), opts.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 opts.end());
      for (const auto& [m, pt] : opts) {
        OmEdge e;
        e.op = g_idx;
        e.machine = m;
        const double p = static_cast<double>(pt);
        e.feat[0] = p;
        e.feat[1] = p / static_cast<double>(n_options);
        e.feat[2] = machine_pending[m] > 0 ? p / static_cast<double>(machine_pending[m]) : 0.0;
        e.feat[3] = pending_work > 0.0 ? p / pending_work : 0.0;
        g.om_edges.push_back(e);
      }
      if (k + 1 < static_cast<int>(ops.size()))
        g.prec_edges.push_back({g_idx, state.op_index(j, k + 1)});
      g.member_edges.push_back({g_idx, j});
    }
  }

  for (int j = 0; j < n_jobs; ++j) {
    if (state.job_done(j)) continue;
    const int k = state.next_op(j);
    const Operation& op = inst.jobs[j].operations[k];
    const int n_options = static_cast<int>(op.options.size());
    std::vector<std::pair<int, TimeUnit>> opts;
    for (const auto& mo : op.options) opts.push_back({mo.machine, mo.processing_time});
    std::sort(opts.begin(), opts.end());
    opts.erase(std::unique(opts.begin(), opts.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               opts.end());
    for (const auto& [m, pt] : opts) {
      MjEdge e;
      e.machine = m;
      e.job = j;
      const double gap = static_cast<double>(
          std::max<TimeUnit>(0, state.job_last_end(j) - state.machine_last_end(m)));
      e.feat[0] = gap;
      e.feat[1] = gap / static_cast<double>(n_options);
      e.feat[2] = machine_pending[m] > 0 ? gap / static_cast<double>(machine_pending[m]) : 0.0;
      e.feat[3] = pending_work > 0.0 ? gap / pending_work : 0.0;
      g.mj_edges.push_back(e);
    }
  }
  std::sort(g.mj_edges.begin(), g.mj_edges.end(), [](const MjEdge& a, const MjEdge& b) {
    if (a.job != b.job) return a.job < b.job;
    return a.machine < b.machine;
  });
  return g;
}

GraphSnapshot scaled_snapshot(const HetGraphState& state) {
  GraphSnapshot g = compute_features(state);
  const FjsspInstance& inst = state.instance();

  double total_mean = 0.0;
  for (const auto& job : inst.jobs)
    for (const auto& op : job.operations) total_mean += op.mean_processing_time();
  const double t = total_mean > 0.0 ? total_mean : 1.0;
  const double n = g.n_ops > 0 ? static_cast<double>(g.n_ops) : 1.0;

  for (auto& f : g.op_feat) {
    f[1] /= t;
    f[2] /= t;
    f[3] /= t;
  }
  for (auto& f : g.job_feat) {
    f[1] /= t;
    f[2] /= n;
    f[3] /= t;
  }
  for (auto& f : g.mach_feat) {
    f[0] /= t;
    f[2] /= t;
  }
  for (auto& e : g.om_edges) {
    e.feat[0] /= t;
    e.feat[1] /= t;
    e.feat[2] /= t;
  }
  for (auto& e : g.mj_edges) {
    e.feat[0] /= t;
    e.feat[1] /= t;
    e.feat[2] /= t;
  }
  g.time_scale = t;
  g.count_scale = n;
  g.scaling_scheme = kScalingScheme;
  return g;
}

Trajectory solution_to_trajectory(const std::shared_ptr<const FjsspInstance>& instance,
                                  const Schedule& schedule) {
  const auto violations = validate_schedule(*instance, schedule);
  if (!violations.empty())
    throw std::logic_error("cannot build a trajectory from an invalid schedule: " +
                           violations.front().detail);

  std::vector<Assignment> order = schedule.assignments;
  std::sort(order.begin(), order.end(), [](const Assignment& a, const Assignment& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    if (a.job != b.job) return a.job < b.job;
    return a.op < b.op;
  });

  Trajectory traj;
  traj.instance_hash = instance_hash(*instance);
  HetGraphState state = initial_state(instance);
  for (const Assignment& a : order) {
    if (state.next_op(a.job) != a.op)
      throw std::logic_error("schedule replay hit an out-of-order operation");
    const ActionEdge action{a.job, a.machine};
    HetGraphState next = apply_action(state, action);
    const Assignment& placed = next.placed().back();
    if (placed.start != a.start || placed.end != a.end)
      throw std::logic_error("schedule is not replayable without inserted idle time");
    traj.steps.push_back({std::move(state), action});
    state = std::move(next);
  }
  traj.final_makespan = state.to_schedule().makespan;
  if (traj.final_makespan != schedule.makespan)
    throw std::logic_error("replayed makespan differs from the schedule");
  return traj;
}

std::vector<TrainingSample> trajectory_samples(const Trajectory& trajectory) {
  std::vector<TrainingSample> samples;
  samples.reserve(trajectory.steps.size());
  for (const auto& step : trajectory.steps) {
    TrainingSample s;
    s.snapshot = scaled_snapshot(step.state);
    s.action_index = -1;
    const auto actions = s.snapshot.actions();
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (actions[i] == step.action) {
        s.action_index = static_cast<int>(i);
        break;
      }
    }
    if (s.action_index < 0) throw std::logic_error("trajectory action not in the feasible set");
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace fjs::env
