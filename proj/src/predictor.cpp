#include "fjs/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fjs/hash.hpp"

namespace fjs {

std::array<double, 9> InstanceFeatures::as_array() const {
  return {n_operations, n_jobs,  n_machines, mean_options, std_options,
          skewness_options, min_pt, max_pt, span_pt};
}

std::vector<double> InstanceFeatures::as_vector() const {
  const auto a = as_array();
  return std::vector<double>(a.begin(), a.end());
}

const std::array<const char*, 9>& InstanceFeatures::names() {
  static const std::array<const char*, 9> kNames = {
      "n_operations", "n_jobs", "n_machines", "mean_options", "std_options",
      "skewness_options", "min_pt", "max_pt", "span_pt"};
  return kNames;
}

InstanceFeatures extract_features(const FjsspInstance& instance) {
  instance.check_valid();
  InstanceFeatures f;
  f.n_operations = static_cast<double>(instance.total_operations());
  f.n_jobs = static_cast<double>(instance.jobs.size());
  f.n_machines = static_cast<double>(instance.machine_count);

  std::vector<double> processable(instance.machine_count, 0.0);
  TimeUnit min_pt = 0, max_pt = 0;
  bool first = true;
  for (const Job& job : instance.jobs) {
    for (const Operation& op : job.operations) {
      for (const MachineOption& opt : op.options) {
        processable[opt.machine] += 1.0;
        if (first || opt.processing_time < min_pt) min_pt = opt.processing_time;
        if (first || opt.processing_time > max_pt) max_pt = opt.processing_time;
        first = false;
      }
    }
  }

  const double m = f.n_machines;
  double mean = 0.0;
  for (double c : processable) mean += c;
  mean /= m;
  double var = 0.0, cube = 0.0;
  for (double c : processable) {
    const double d = c - mean;
    var += d * d;
    cube += d * d * d;
  }
  var /= m;
  cube /= m;
  const double sd = std::sqrt(var);

  f.mean_options = mean;
  f.std_options = sd;
  f.skewness_options = sd > 0.0 ? cube / (sd * sd * sd) : 0.0;
  f.min_pt = static_cast<double>(min_pt);
  f.max_pt = static_cast<double>(max_pt);
  f.span_pt = f.max_pt - f.min_pt;
  return f;
}

double build_target(const IncumbentTrace& trace, int n_operations, double om) {
  if (om <= 0.0) throw std::invalid_argument("per-operation budget must be positive");
  if (trace.entries.empty()) return 0.0;
  const double budget = static_cast<double>(n_operations) * om;
  TimeUnit in_budget = -1;
  for (const TraceEntry& e : trace.entries) {
    if (e.wall_time <= budget) in_budget = e.makespan;
  }
  if (in_budget < 0) return 0.0;
  const TimeUnit final_best = trace.entries.back().makespan;
  return static_cast<double>(final_best) / static_cast<double>(in_budget);
}

std::vector<CapabilitySample> build_dataset(const std::vector<FjsspInstance>& instances,
                                            double solver_time_limit, double om) {
  if (instances.empty()) throw std::invalid_argument("no instances to sample");
  std::vector<CapabilitySample> out;
  out.reserve(instances.size());
  for (const FjsspInstance& instance : instances) {
    SearchConfig cfg;
    cfg.time_limit_seconds = solver_time_limit;
    const BoundedResult result = solve_exact(instance, cfg);
    CapabilitySample s;
    s.features = extract_features(instance);
    s.target = build_target(result.trace, static_cast<int>(instance.total_operations()), om);
    s.instance_hash = instance_hash(instance);
    out.push_back(s);
  }
  return out;
}

void write_samples_csv(const std::string& path, const std::vector<CapabilitySample>& samples) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open dataset file for writing: " + path);
  f << "instance_hash";
  for (const char* name : InstanceFeatures::names()) f << ',' << name;
  f << ",target\n";
  char buf[32];
  for (const CapabilitySample& s : samples) {
    f << to_hex(s.instance_hash);
    for (double v : s.features.as_array()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      f << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.target);
    f << ',' << buf << '\n';
  }
  if (!f) throw std::runtime_error("failed writing dataset file: " + path);
}

std::vector<CapabilitySample> read_samples_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty dataset file: " + path);

  std::vector<CapabilitySample> out;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected 11 columns");
    CapabilitySample s;
    s.instance_hash = std::stoull(cells[0], nullptr, 16);
    std::array<double, 9> vals{};
    for (int i = 0; i < 9; ++i) vals[i] = std::stod(cells[1 + i]);
    s.features.n_operations = vals[0];
    s.features.n_jobs = vals[1];
    s.features.n_machines = vals[2];
    s.features.mean_options = vals[3];
    s.features.std_options = vals[4];
    s.features.skewness_options = vals[5];
    s.features.min_pt = vals[6];
    s.features.max_pt = vals[7];
    s.features.span_pt = vals[8];
    s.target = std::stod(cells[10]);
    out.push_back(s);
  }
  return out;
}

GbrModel train_capability_model(const std::vector<CapabilitySample>& samples,
                                const GbrConfig& config) {
  if (samples.size() < 10)
    throw std::invalid_argument("capability model needs at least 10 samples");
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const CapabilitySample& s : samples) {
    x.push_back(s.features.as_vector());
    y.push_back(s.target);
  }
  return GbrModel::fit(x, y, config);
}

double predict_capability(const GbrModel& model, const InstanceFeatures& features) {
  return std::clamp(model.predict(features.as_vector()), 0.0, 1.0);
}

}  // namespace fjs
