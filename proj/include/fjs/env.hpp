#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fjs/instance.hpp"
#include "fjs/schedule.hpp"

namespace fjs::env {

// A scheduling action: run the next unscheduled operation of `job` on
// `machine`, starting as early as job and machine allow.
struct ActionEdge {
  int job = 0;
  int machine = 0;
  bool operator==(const ActionEdge&) const = default;
};

// Constructive scheduling state. Scheduled operations stay in the node set
// but are masked; their indices never move.
class HetGraphState {
 public:
  HetGraphState() = default;

  const FjsspInstance& instance() const { return *instance_; }
  const std::shared_ptr<const FjsspInstance>& instance_ptr() const { return instance_; }
  int step() const { return step_; }
  bool terminal() const { return step_ == total_ops_; }
  int total_operations() const { return total_ops_; }

  int op_index(int job, int op) const { return op_offset_[job] + op; }
  bool op_scheduled(int global_op) const { return op_scheduled_[global_op] != 0; }
  int next_op(int job) const { return next_op_[job]; }
  bool job_done(int job) const {
    return next_op_[job] >= static_cast<int>(instance_->jobs[job].operations.size());
  }
  TimeUnit job_last_end(int job) const { return job_ready_[job]; }
  TimeUnit machine_last_end(int machine) const { return mach_ready_[machine]; }
  TimeUnit machine_busy_time(int machine) const { return mach_busy_[machine]; }
  const std::vector<Assignment>& placed() const { return placed_; }

  Schedule to_schedule() const;

 private:
  friend HetGraphState initial_state(const std::shared_ptr<const FjsspInstance>&);
  friend HetGraphState apply_action(const HetGraphState&, const ActionEdge&);

  std::shared_ptr<const FjsspInstance> instance_;
  std::vector<int> op_offset_;
  std::vector<int> next_op_;
  std::vector<TimeUnit> job_ready_;
  std::vector<TimeUnit> mach_ready_;
  std::vector<TimeUnit> mach_busy_;
  std::vector<std::uint8_t> op_scheduled_;
  std::vector<Assignment> placed_;
  int step_ = 0;
  int total_ops_ = 0;
};

HetGraphState initial_state(const std::shared_ptr<const FjsspInstance>& instance);
inline HetGraphState initial_state(const FjsspInstance& instance) {
  return initial_state(std::make_shared<const FjsspInstance>(instance));
}

// Sorted by (job, machine). Empty exactly at terminal states.
std::vector<ActionEdge> feasible_actions(const HetGraphState& state);

// Returns the successor state; the argument is untouched. Throws
// std::invalid_argument for an action that is not currently feasible.
HetGraphState apply_action(const HetGraphState& state, const ActionEdge& action);

struct OmEdge {
  int op = 0;  // global operation index
  int machine = 0;
  std::array<double, 4> feat{};  // pt, pt/op options, pt/machine's pending ops, pt/pending work
};

struct MjEdge {
  int machine = 0;
  int job = 0;
  std::array<double, 4> feat{};  // idle gap variants of the above
};

struct PrecEdge {
  int pred = 0;
  int succ = 0;
};

struct MemberEdge {
  int op = 0;
  int job = 0;
};

// Graph view of a state. Node order is stable (operations in global index
// order, then jobs, then machines); masked operations keep their slot with
// zeroed features and appear in no edge list. mj_edges are sorted by
// (job, machine) and double as the feasible action list.
struct GraphSnapshot {
  int n_ops = 0;
  int n_jobs = 0;
  int n_machines = 0;
  int step = 0;

  std::vector<std::uint8_t> op_scheduled;
  std::vector<std::array<double, 5>> op_feat;    // executable, pending-work sum, mean pt,
                                                 // min pt, mean pt / pending-work sum
  std::vector<std::array<double, 4>> job_feat;   // done, last end, ops left, pending mean-pt sum
  std::vector<std::array<double, 3>> mach_feat;  // last end, utilization, last end - min last end

  std::vector<OmEdge> om_edges;
  std::vector<PrecEdge> prec_edges;
  std::vector<MemberEdge> member_edges;
  std::vector<MjEdge> mj_edges;

  // Scaling metadata (identity for raw snapshots).
  double time_scale = 1.0;
  double count_scale = 1.0;
  std::string scaling_scheme = "raw";

  std::vector<ActionEdge> actions() const {
    std::vector<ActionEdge> a;
    a.reserve(mj_edges.size());
    for (const auto& e : mj_edges) a.push_back({e.job, e.machine});
    return a;
  }
};

inline constexpr const char* kScalingScheme = "time:/sum_mean_pt count:/n_ops v1";

// Raw feature values.
GraphSnapshot compute_features(const HetGraphState& state);

// compute_features followed by per-instance normalization: time-typed
// channels divided by the instance's total mean processing time, count-typed
// channels by the operation count. This is what the network consumes.
GraphSnapshot scaled_snapshot(const HetGraphState& state);

struct TrajectoryStep {
  HetGraphState state;
  ActionEdge action;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  TimeUnit final_makespan = 0;
  std::uint64_t instance_hash = 0;
};

// Orders the schedule by (start, end, job, op) and replays it through
// apply_action. Throws std::logic_error when the replay cannot reproduce the
// schedule exactly (a schedule with inserted idle time, or an infeasible one).
Trajectory solution_to_trajectory(const std::shared_ptr<const FjsspInstance>& instance,
                                  const Schedule& schedule);

// --- trajectory sample files -------------------------------------------------

// One training record: a scaled snapshot plus the index of the action taken
// (into the snapshot's mj/action order).
struct TrainingSample {
  GraphSnapshot snapshot;
  int action_index = 0;
};

struct TrajectoryFileMeta {
  struct Entry {
    std::uint64_t instance_hash = 0;
    int length = 0;
    TimeUnit makespan = 0;
  };
  std::vector<Entry> trajectories;
  std::string scaling_scheme;
  bool proven_optimal_only = true;
};

std::vector<TrainingSample> trajectory_samples(const Trajectory& trajectory);

// Binary record stream plus a JSON sidecar (written to path + ".meta.json").
void write_trajectory_file(const std::string& path, const std::vector<Trajectory>& trajectories,
                           bool proven_optimal_only);
std::vector<TrainingSample> read_trajectory_file(const std::string& path,
                                                 TrajectoryFileMeta* meta = nullptr);

}  // namespace fjs::env
