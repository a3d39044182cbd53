#include "fjs/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace fjs {

namespace {

using Clock = std::chrono::steady_clock;

constexpr TimeUnit kInfTime = std::numeric_limits<TimeUnit>::max() / 4;

struct OptionView {
  int machine;
  TimeUnit pt;
};

// Key of an append decision. The search only allows keys to grow along a
// branch, which removes permutations of commuting appends: any semi-active
// schedule is generated exactly once, in (start, end, job) order.
struct DecisionKey {
  TimeUnit start = -1;
  TimeUnit end = -1;
  int job = -1;

  bool operator<(const DecisionKey& o) const {
    if (start != o.start) return start < o.start;
    if (end != o.end) return end < o.end;
    return job < o.job;
  }
};

class Search {
 public:
  Search(const FjsspInstance& instance, const SearchConfig& config)
      : instance_(instance), config_(config), t0_(Clock::now()) {
    n_jobs_ = static_cast<int>(instance.jobs.size());
    n_machines_ = instance.machine_count;

    options_.resize(n_jobs_);
    tails_.resize(n_jobs_);
    for (int j = 0; j < n_jobs_; ++j) {
      const auto& ops = instance.jobs[j].operations;
      options_[j].resize(ops.size());
      tails_[j].assign(ops.size() + 1, 0);
      for (int k = static_cast<int>(ops.size()) - 1; k >= 0; --k) {
        for (const auto& mo : ops[k].options) options_[j][k].push_back({mo.machine, mo.processing_time});
        std::sort(options_[j][k].begin(), options_[j][k].end(),
                  [](const OptionView& a, const OptionView& b) {
                    if (a.pt != b.pt) return a.pt < b.pt;
                    return a.machine < b.machine;
                  });
        tails_[j][k] = tails_[j][k + 1] + instance.jobs[j].operations[k].min_processing_time();
      }
    }

    next_op_.assign(n_jobs_, 0);
    job_ready_.assign(n_jobs_, 0);
    mach_ready_.assign(n_machines_, 0);
    mand_rem_.assign(n_machines_, 0);
    if (config.release) {
      job_ready_ = config.release->job_start;
      mach_ready_ = config.release->machine_start;
    }
    sum_min_rem_ = 0;
    remaining_ = 0;
    for (int j = 0; j < n_jobs_; ++j) {
      remaining_ += static_cast<int>(instance.jobs[j].operations.size());
      sum_min_rem_ += tails_[j][0];
      for (const auto& op : instance.jobs[j].operations)
        if (op.options.size() == 1) mand_rem_[op.options[0].machine] += op.options[0].processing_time;
    }
  }

  BoundedResult run() {
    BoundedResult result;

    Schedule greedy = greedy_dispatch();
    best_makespan_ = greedy.makespan;
    best_assignments_ = greedy.assignments;
    record_incumbent(result, greedy.makespan);

    const TimeUnit root_lb = lower_bound();
    max_end_ = 0;
    dfs(result, root_lb, DecisionKey{});

    result.best = Schedule{best_assignments_, best_makespan_};
    result.proven_optimal = !limit_hit_;
    result.lower_bound =
        limit_hit_ ? std::min(abandoned_lb_, best_makespan_) : best_makespan_;
    result.nodes_explored = nodes_;
    return result;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - t0_).count();
  }

  void record_incumbent(BoundedResult& result, TimeUnit makespan) {
    result.trace.entries.push_back({makespan, elapsed()});
  }

  bool limits_exceeded() {
    if (limit_hit_) return true;
    if (config_.node_limit && nodes_ >= *config_.node_limit) return true;
    if (config_.time_limit_seconds && (nodes_ & 1023) == 0 &&
        elapsed() >= *config_.time_limit_seconds)
      return true;
    return false;
  }

  TimeUnit lower_bound() const {
    TimeUnit lb = max_end_;
    for (int j = 0; j < n_jobs_; ++j) {
      if (next_op_[j] < static_cast<int>(options_[j].size()))
        lb = std::max(lb, job_ready_[j] + tails_[j][next_op_[j]]);
    }
    TimeUnit min_ready = kInfTime;
    for (int m = 0; m < n_machines_; ++m) {
      min_ready = std::min(min_ready, mach_ready_[m]);
      if (mand_rem_[m] > 0) lb = std::max(lb, mach_ready_[m] + mand_rem_[m]);
    }
    if (sum_min_rem_ > 0 && n_machines_ > 0) {
      const TimeUnit spread = min_ready + (sum_min_rem_ + n_machines_ - 1) / n_machines_;
      lb = std::max(lb, spread);
    }
    return lb;
  }

  void dfs(BoundedResult& result, TimeUnit node_lb, DecisionKey last_key) {
    ++nodes_;
    if (limits_exceeded()) {
      limit_hit_ = true;
      abandoned_lb_ = std::min(abandoned_lb_, node_lb);
      return;
    }
    if (remaining_ == 0) {
      if (max_end_ < best_makespan_) {
        best_makespan_ = max_end_;
        best_assignments_ = placed_;
        record_incumbent(result, max_end_);
      }
      return;
    }

    // jobs ordered by earliest feasible start of their next operation
    struct Cand {
      TimeUnit est;
      int job;
    };
    std::vector<Cand> cands;
    cands.reserve(n_jobs_);
    for (int j = 0; j < n_jobs_; ++j) {
      const int k = next_op_[j];
      if (k >= static_cast<int>(options_[j].size())) continue;
      TimeUnit est = kInfTime;
      for (const auto& opt : options_[j][k])
        est = std::min(est, std::max(job_ready_[j], mach_ready_[opt.machine]));
      cands.push_back({est, j});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.est != b.est) return a.est < b.est;
      return a.job < b.job;
    });

    for (const Cand& cand : cands) {
      const int j = cand.job;
      const int k = next_op_[j];
      for (const auto& opt : options_[j][k]) {
        const TimeUnit start = std::max(job_ready_[j], mach_ready_[opt.machine]);
        const TimeUnit end = start + opt.pt;
        const DecisionKey key{start, end, j};
        if (key < last_key) continue;  // an equivalent branch already covers this order

        apply(j, k, opt, start, end);
        const TimeUnit child_lb = lower_bound();
        if (child_lb < best_makespan_) dfs(result, child_lb, key);
        undo(j, k, opt);
        if (limit_hit_) {
          // siblings not visited; node_lb under-approximates all of them
          abandoned_lb_ = std::min(abandoned_lb_, node_lb);
          return;
        }
      }
    }
  }

  void apply(int j, int k, const OptionView& opt, TimeUnit start, TimeUnit end) {
    placed_.push_back({j, k, opt.machine, start, end});
    saved_job_ready_.push_back(job_ready_[j]);
    saved_mach_ready_.push_back(mach_ready_[opt.machine]);
    saved_max_end_.push_back(max_end_);
    job_ready_[j] = end;
    mach_ready_[opt.machine] = end;
    max_end_ = std::max(max_end_, end);
    next_op_[j] = k + 1;
    --remaining_;
    sum_min_rem_ -= instance_.jobs[j].operations[k].min_processing_time();
    if (options_[j][k].size() == 1) mand_rem_[opt.machine] -= opt.pt;
  }

  void undo(int j, int k, const OptionView& opt) {
    if (options_[j][k].size() == 1) mand_rem_[opt.machine] += opt.pt;
    sum_min_rem_ += instance_.jobs[j].operations[k].min_processing_time();
    ++remaining_;
    next_op_[j] = k;
    max_end_ = saved_max_end_.back();
    saved_max_end_.pop_back();
    mach_ready_[opt.machine] = saved_mach_ready_.back();
    saved_mach_ready_.pop_back();
    job_ready_[j] = saved_job_ready_.back();
    saved_job_ready_.pop_back();
    placed_.pop_back();
  }

  // Repeatedly applies the action with the earliest completion time.
  Schedule greedy_dispatch() {
    std::vector<int> next = next_op_;
    std::vector<TimeUnit> jr = job_ready_;
    std::vector<TimeUnit> mr = mach_ready_;
    Schedule schedule;
    int left = remaining_;
    while (left > 0) {
      TimeUnit best_end = kInfTime, best_start = kInfTime;
      int best_job = -1, best_machine = -1;
      TimeUnit best_pt = 0;
      for (int j = 0; j < n_jobs_; ++j) {
        const int k = next[j];
        if (k >= static_cast<int>(options_[j].size())) continue;
        for (const auto& opt : options_[j][k]) {
          const TimeUnit start = std::max(jr[j], mr[opt.machine]);
          const TimeUnit end = start + opt.pt;
          if (end < best_end || (end == best_end && start < best_start) ||
              (end == best_end && start == best_start &&
               (j < best_job || (j == best_job && opt.machine < best_machine)))) {
            best_end = end;
            best_start = start;
            best_job = j;
            best_machine = opt.machine;
            best_pt = opt.pt;
          }
        }
      }
      schedule.assignments.push_back({best_job, next[best_job], best_machine, best_start, best_end});
      jr[best_job] = best_end;
      mr[best_machine] = best_end;
      next[best_job] += 1;
      schedule.makespan = std::max(schedule.makespan, best_end);
      --left;
      (void)best_pt;
    }
    return schedule;
  }

  const FjsspInstance& instance_;
  SearchConfig config_;
  Clock::time_point t0_;

  int n_jobs_ = 0;
  int n_machines_ = 0;
  std::vector<std::vector<std::vector<OptionView>>> options_;  // [job][op] sorted by (pt, machine)
  std::vector<std::vector<TimeUnit>> tails_;                   // [job][op] min-pt suffix sums

  std::vector<int> next_op_;
  std::vector<TimeUnit> job_ready_;
  std::vector<TimeUnit> mach_ready_;
  std::vector<TimeUnit> mand_rem_;  // work that can only run on this machine
  TimeUnit sum_min_rem_ = 0;
  TimeUnit max_end_ = 0;
  int remaining_ = 0;

  std::vector<Assignment> placed_;
  std::vector<TimeUnit> saved_job_ready_, saved_mach_ready_, saved_max_end_;

  TimeUnit best_makespan_ = kInfTime;
  std::vector<Assignment> best_assignments_;
  std::int64_t nodes_ = 0;
  bool limit_hit_ = false;
  TimeUnit abandoned_lb_ = kInfTime;
};

void check_release(const FjsspInstance& instance, const ReleaseTimes& release) {
  if (release.job_start.size() != instance.jobs.size())
    throw std::invalid_argument("release: job vector size mismatch");
  if (release.machine_start.size() != static_cast<std::size_t>(instance.machine_count))
    throw std::invalid_argument("release: machine vector size mismatch");
  for (TimeUnit t : release.job_start)
    if (t < 0) throw std::invalid_argument("release: negative job start");
  for (TimeUnit t : release.machine_start)
    if (t < 0) throw std::invalid_argument("release: negative machine start");
}

}  // namespace

BoundedResult solve_exact(const FjsspInstance& instance, const SearchConfig& config) {
  instance.check_valid();
  if (config.release) check_release(instance, *config.release);
  if (config.time_limit_seconds && !(*config.time_limit_seconds > 0.0))
    throw std::invalid_argument("time limit must be positive");
  if (config.node_limit && *config.node_limit < 0)
    throw std::invalid_argument("node limit must be non-negative");
  Search search(instance, config);
  return search.run();
}

BoundedResult solve_subinstance(const FjsspInstance& instance, const ReleaseTimes& release,
                                SearchConfig config) {
  config.release = release;
  return solve_exact(instance, config);
}

namespace {

struct OracleState {
  const FjsspInstance* instance;
  std::vector<int> next;
  std::vector<TimeUnit> jr, mr;
  TimeUnit max_end = 0;
  int remaining = 0;
  TimeUnit best = kInfTime;
};

void oracle_dfs(OracleState& s) {
  if (s.remaining == 0) {
    s.best = std::min(s.best, s.max_end);
    return;
  }
  if (s.max_end >= s.best) return;  // any completion is at least the current envelope
  const int n_jobs = static_cast<int>(s.instance->jobs.size());
  for (int j = 0; j < n_jobs; ++j) {
    const int k = s.next[j];
    if (k >= static_cast<int>(s.instance->jobs[j].operations.size())) continue;
    for (const auto& mo : s.instance->jobs[j].operations[k].options) {
      const TimeUnit start = std::max(s.jr[j], s.mr[mo.machine]);
      const TimeUnit end = start + mo.processing_time;
      const TimeUnit old_jr = s.jr[j], old_mr = s.mr[mo.machine], old_max = s.max_end;
      s.jr[j] = end;
      s.mr[mo.machine] = end;
      s.max_end = std::max(s.max_end, end);
      s.next[j] = k + 1;
      --s.remaining;
      oracle_dfs(s);
      ++s.remaining;
      s.next[j] = k;
      s.max_end = old_max;
      s.mr[mo.machine] = old_mr;
      s.jr[j] = old_jr;
    }
  }
}

}  // namespace

TimeUnit brute_force_oracle(const FjsspInstance& instance,
                            const std::optional<ReleaseTimes>& release) {
  instance.check_valid();
  if (instance.total_operations() > 8)
    throw std::invalid_argument("brute force oracle is limited to 8 operations");
  if (release) check_release(instance, *release);

  OracleState s;
  s.instance = &instance;
  s.next.assign(instance.jobs.size(), 0);
  s.jr.assign(instance.jobs.size(), 0);
  s.mr.assign(instance.machine_count, 0);
  if (release) {
    s.jr = release->job_start;
    s.mr = release->machine_start;
  }
  s.remaining = instance.total_operations();
  oracle_dfs(s);
  return s.best;
}

std::string bounded_result_to_json(const BoundedResult& result) {
  nlohmann::json j;
  if (result.best) {
    nlohmann::json best;
    best["makespan"] = result.best->makespan;
    best["assignments"] = nlohmann::json::array();
    for (const auto& a : result.best->assignments) {
      best["assignments"].push_back({{"job", a.job},
                                     {"op", a.op},
                                     {"machine", a.machine},
                                     {"start", a.start},
                                     {"end", a.end}});
    }
    j["best"] = best;
  } else {
    j["best"] = nullptr;
  }
  j["lower_bound"] = result.lower_bound;
  j["proven_optimal"] = result.proven_optimal;
  j["nodes_explored"] = result.nodes_explored;
  j["trace"] = nlohmann::json::array();
  for (const auto& e : result.trace.entries)
    j["trace"].push_back({{"makespan", e.makespan}, {"time", e.wall_time}});
  return j.dump(2);
}

}  // namespace fjs
