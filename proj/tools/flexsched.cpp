// Batch front door: instance generation, solving, dataset building, model
// training, and benchmarking, all file-to-file and reproducible from the run
// manifest each command leaves behind.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fjs/env.hpp"
#include "fjs/exact.hpp"
#include "fjs/generator.hpp"
#include "fjs/gbr.hpp"
#include "fjs/hash.hpp"
#include "fjs/hybrid.hpp"
#include "fjs/instance.hpp"
#include "fjs/nn/model_io.hpp"
#include "fjs/nn/train.hpp"
#include "fjs/predictor.hpp"
#include "fjs/rng.hpp"
#include "fjs/schedule.hpp"
#include "fjs/tsp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kModelError = 3;
constexpr int kInternalError = 4;

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing file: " + path);
}

// Accepts JSON, or a flat TOML subset: `key = value` lines with string,
// number, or boolean values and # comments. No tables, no arrays.
json load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
    return json::parse(text);

  json out = json::object();
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    if (line.front() == '[')
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": config tables are not supported, use flat keys");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t");
      const auto y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string{} : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": expected key = value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": unterminated string");
      out[key] = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      out[key] = value == "true";
    } else if (value.find_first_of(".eE") != std::string::npos) {
      out[key] = std::stod(value);
    } else {
      out[key] = std::stoll(value);
    }
  }
  return out;
}

class Manifest {
 public:
  Manifest(const std::string& command) {
    j_["command"] = command;
    j_["inputs"] = json::object();
    j_["outputs"] = json::array();
    start_ = std::chrono::steady_clock::now();
  }

  json& config() { return j_["config"]; }
  void input(const std::string& path) { j_["inputs"][path] = fjs::to_hex(fjs::fnv1a64(read_file(path))); }
  void output(const std::string& path) { j_["outputs"].push_back(path); }
  void set(const std::string& key, const json& value) { j_[key] = value; }

  void write(const std::string& path) {
    j_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

fjs::FjsspInstance load_instance(const std::string& path) {
  return fjs::parse_fjs(read_file(path));
}

std::vector<std::string> list_instance_files(const std::string& dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".fjs")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::string model_dir_default(const std::string& file) {
  if (const char* dir = std::getenv("FLEXSCHED_MODEL_DIR"); dir != nullptr)
    return (fs::path(dir) / file).string();
  return {};
}

fjs::nn::HgatParams load_policy(const std::string& path) {
  if (path.empty())
    throw ModelError("no policy model given (--model or FLEXSCHED_MODEL_DIR)");
  try {
    return fjs::nn::load_model(path);
  } catch (const std::exception& e) {
    throw ModelError(e.what());
  }
}

fjs::GbrModel load_predictor(const std::string& path) {
  if (path.empty())
    throw ModelError("no capability model given (--predictor or FLEXSCHED_MODEL_DIR)");
  try {
    return fjs::GbrModel::load(path);
  } catch (const std::exception& e) {
    throw ModelError(e.what());
  }
}

json schedule_to_json(const fjs::Schedule& schedule) {
  json out;
  out["makespan"] = schedule.makespan;
  json arr = json::array();
  for (const auto& a : schedule.assignments)
    arr.push_back({{"job", a.job},
                   {"op", a.op},
                   {"machine", a.machine},
                   {"start", a.start},
                   {"end", a.end}});
  out["assignments"] = std::move(arr);
  return out;
}

// ---------------------------------------------------------------- gen ------

struct GenOpts {
  std::string preset;
  std::string params_path;
  std::string out_dir;
  int count = 1;
  std::uint64_t seed = 1;
};

fjs::RangeSpec range_from_json(const json& v) {
  if (v.is_string()) return fjs::RangeSpec::parse(v.get<std::string>());
  return fjs::RangeSpec::constant(v.get<double>());
}

fjs::GenParams params_from_json(const json& j, std::uint64_t seed) {
  fjs::GenParams p;
  auto pair = [&](const char* key, fjs::RangeSpec& lo, fjs::RangeSpec& hi) {
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 2)
      throw std::runtime_error(std::string("params key '") + key + "' must be a [lo, hi] pair");
    lo = range_from_json(arr[0]);
    hi = range_from_json(arr[1]);
  };
  pair("jobs", p.jobs_lo, p.jobs_hi);
  pair("machines", p.machines_lo, p.machines_hi);
  pair("ops_per_job", p.ops_per_job_lo, p.ops_per_job_hi);
  pair("options_per_op", p.options_per_op_lo, p.options_per_op_hi);
  const json& pt = j.at("mean_pt");
  p.mean_pt_lo = pt.at(0).get<double>();
  p.mean_pt_hi = pt.at(1).get<double>();
  p.deviation = j.at("deviation").get<std::vector<double>>();
  p.seed = seed;
  return p;
}

json params_to_json(const fjs::GenParams& p) {
  return {{"jobs", {p.jobs_lo.str(), p.jobs_hi.str()}},
          {"machines", {p.machines_lo.str(), p.machines_hi.str()}},
          {"ops_per_job", {p.ops_per_job_lo.str(), p.ops_per_job_hi.str()}},
          {"options_per_op", {p.options_per_op_lo.str(), p.options_per_op_hi.str()}},
          {"mean_pt", {p.mean_pt_lo, p.mean_pt_hi}},
          {"deviation", p.deviation}};
}

int run_gen(const GenOpts& opts) {
  fjs::GenParams base;
  if (!opts.preset.empty()) {
    if (opts.preset == "bc")
      base = fjs::bc_generation_params(opts.seed);
    else if (opts.preset == "cp")
      base = fjs::cp_generation_params(opts.seed);
    else
      throw std::runtime_error("unknown preset: " + opts.preset);
  } else if (!opts.params_path.empty()) {
    base = params_from_json(load_config_file(opts.params_path), opts.seed);
  } else {
    throw std::runtime_error("gen needs --preset or --params");
  }

  fs::create_directories(opts.out_dir);
  Manifest manifest("gen");
  manifest.config() = params_to_json(base);
  manifest.set("seed", opts.seed);
  manifest.set("count", opts.count);
  if (!opts.params_path.empty()) manifest.input(opts.params_path);

  std::uint64_t chain = opts.seed;
  json hashes = json::object();
  for (int i = 0; i < opts.count; ++i) {
    fjs::GenParams p = base;
    p.seed = fjs::splitmix64(chain);
    const fjs::FjsspInstance instance = fjs::generate_instance(p);
    char name[32];
    std::snprintf(name, sizeof name, "instance_%04d.fjs", i);
    const std::string path = (fs::path(opts.out_dir) / name).string();
    write_file(path, fjs::serialize_fjs(instance));
    manifest.output(path);
    hashes[name] = fjs::to_hex(fjs::instance_hash(instance));
  }
  manifest.set("instance_hashes", hashes);
  manifest.write((fs::path(opts.out_dir) / "manifest.json").string());
  std::cout << "wrote " << opts.count << " instances to " << opts.out_dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------- solve ----

struct SolveOpts {
  std::string instance_path;
  std::string mode = "exact";
  std::string model_path;
  std::string predictor_path;
  std::string out_path;
  std::optional<double> time_limit;
  std::optional<std::int64_t> node_limit;
  std::optional<double> exact_budget;
  std::optional<double> reference;
  double tau = 0.98;
  double om = 0.01;
  bool sample = false;
  std::uint64_t seed = 1;
};

int run_solve(const SolveOpts& opts) {
  const fjs::FjsspInstance instance = load_instance(opts.instance_path);

  json out;
  out["instance"] = opts.instance_path;
  out["instance_hash"] = fjs::to_hex(fjs::instance_hash(instance));
  out["mode"] = opts.mode;

  const auto t0 = std::chrono::steady_clock::now();
  fjs::Schedule schedule;

  if (opts.mode == "exact") {
    fjs::SearchConfig cfg;
    cfg.time_limit_seconds = opts.time_limit;
    cfg.node_limit = opts.node_limit;
    const fjs::BoundedResult result = fjs::solve_exact(instance, cfg);
    out["solver"] = json::parse(fjs::bounded_result_to_json(result));
    if (!result.best.has_value()) throw std::logic_error("exact solve returned no schedule");
    schedule = *result.best;
  } else if (opts.mode == "policy") {
    std::string model = opts.model_path;
    if (model.empty()) model = model_dir_default("policy.fjnm");
    const fjs::nn::HgatParams policy = load_policy(model);
    schedule = fjs::rollout_policy(instance, policy, opts.sample, opts.seed);
  } else if (opts.mode == "hybrid") {
    std::string model = opts.model_path;
    if (model.empty()) model = model_dir_default("policy.fjnm");
    std::string pred = opts.predictor_path;
    if (pred.empty()) pred = model_dir_default("predictor.json");
    const fjs::nn::HgatParams policy = load_policy(model);
    const fjs::GbrModel predictor = load_predictor(pred);

    fjs::HybridConfig cfg;
    cfg.threshold = opts.tau;
    cfg.om = opts.om;
    cfg.exact_budget_override = opts.exact_budget;
    cfg.sample_actions = opts.sample;
    cfg.sample_seed = opts.seed;
    const fjs::HybridResult result = fjs::solve_hybrid(instance, policy, predictor, cfg);
    schedule = result.schedule;

    json steps = json::array();
    for (const auto& s : result.log.steps)
      steps.push_back({{"step", s.step}, {"score", s.score}, {"handoff", s.handoff}});
    out["phase_log"] = {{"steps", std::move(steps)},
                        {"handoff_step", result.log.handoff_step},
                        {"exact_fallback", result.log.exact_fallback},
                        {"policy_seconds", result.log.policy_seconds},
                        {"exact_seconds", result.log.exact_seconds}};
  } else {
    throw std::runtime_error("unknown mode: " + opts.mode);
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!fjs::validate_schedule(instance, schedule).empty())
    throw std::logic_error("solver returned an invalid schedule");

  out["schedule"] = schedule_to_json(schedule);
  out["makespan"] = schedule.makespan;
  out["seconds"] = seconds;
  if (opts.reference.has_value())
    out["gap"] = fjs::optimal_gap(static_cast<double>(schedule.makespan), *opts.reference);

  const std::string text = out.dump(2) + "\n";
  if (opts.out_path.empty()) {
    std::cout << text;
  } else {
    write_file(opts.out_path, text);
    Manifest manifest("solve");
    manifest.config() = {{"mode", opts.mode}, {"tau", opts.tau}, {"om", opts.om},
                         {"sample", opts.sample}};
    manifest.set("seed", opts.seed);
    manifest.input(opts.instance_path);
    manifest.output(opts.out_path);
    manifest.write(opts.out_path + ".manifest.json");
  }
  return kOk;
}

// ---------------------------------------------------------------- dataset --

struct DatasetOpts {
  std::string kind;
  std::string in_dir;
  std::string out_path;
  double time_limit = 60.0;
  double om = 0.01;
};

int run_dataset(const DatasetOpts& opts) {
  const auto files = list_instance_files(opts.in_dir);
  if (files.empty()) std::cerr << "warning: no .fjs files in " << opts.in_dir << "\n";
  ensure_parent_dir(opts.out_path);

  Manifest manifest("dataset");
  manifest.config() = {{"kind", opts.kind}, {"time_limit", opts.time_limit}, {"om", opts.om}};
  for (const auto& f : files) manifest.input(f);

  if (opts.kind == "bc") {
    std::vector<fjs::env::Trajectory> trajectories;
    int skipped = 0;
    for (const auto& file : files) {
      const auto instance = std::make_shared<const fjs::FjsspInstance>(load_instance(file));
      fjs::SearchConfig cfg;
      cfg.time_limit_seconds = opts.time_limit;
      const fjs::BoundedResult result = fjs::solve_exact(*instance, cfg);
      if (!result.proven_optimal || !result.best.has_value()) {
        std::cerr << "skip (not proven optimal in budget): " << file << "\n";
        ++skipped;
        continue;
      }
      trajectories.push_back(fjs::env::solution_to_trajectory(instance, *result.best));
    }
    fjs::env::write_trajectory_file(opts.out_path, trajectories, true);
    manifest.output(opts.out_path);
    manifest.output(opts.out_path + ".meta.json");
    manifest.set("trajectories", trajectories.size());
    manifest.set("skipped", skipped);
    std::cout << "wrote " << trajectories.size() << " trajectories (" << skipped
              << " skipped) to " << opts.out_path << "\n";
  } else if (opts.kind == "cp") {
    std::vector<fjs::CapabilitySample> samples;
    for (const auto& file : files) {
      const fjs::FjsspInstance instance = load_instance(file);
      fjs::SearchConfig cfg;
      cfg.time_limit_seconds = opts.time_limit;
      const fjs::BoundedResult result = fjs::solve_exact(instance, cfg);
      fjs::CapabilitySample s;
      s.features = fjs::extract_features(instance);
      s.target = fjs::build_target(result.trace,
                                   static_cast<int>(instance.total_operations()), opts.om);
      s.instance_hash = fjs::instance_hash(instance);
      samples.push_back(s);
    }
    fjs::write_samples_csv(opts.out_path, samples);
    manifest.output(opts.out_path);
    manifest.set("samples", samples.size());
    std::cout << "wrote " << samples.size() << " samples to " << opts.out_path << "\n";
  } else {
    throw std::runtime_error("unknown dataset kind: " + opts.kind);
  }
  manifest.write(opts.out_path + ".manifest.json");
  return kOk;
}

// ---------------------------------------------------------------- train ----

struct TrainOpts {
  std::string kind;
  std::string data_path;
  std::string out_path;
  std::string curve_path;
  std::string config_path;
  std::optional<int> epochs, batch, hidden, layers, heads;
  std::optional<double> lr;
  std::optional<int> n_trees, max_depth, min_leaf;
  std::optional<double> gbr_rate;
  std::uint64_t seed = 1;
};

int run_train(const TrainOpts& opts) {
  ensure_parent_dir(opts.out_path);
  json cfg = json::object();
  if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path);
  auto pick_int = [&](const std::optional<int>& flag, const char* key, int fallback) {
    if (flag.has_value()) return *flag;
    if (cfg.contains(key)) return cfg.at(key).get<int>();
    return fallback;
  };
  auto pick_double = [&](const std::optional<double>& flag, const char* key, double fallback) {
    if (flag.has_value()) return *flag;
    if (cfg.contains(key)) return cfg.at(key).get<double>();
    return fallback;
  };

  Manifest manifest("train");
  manifest.input(opts.data_path);
  if (!opts.config_path.empty()) manifest.input(opts.config_path);
  manifest.set("seed", opts.seed);
  const std::string curve_path =
      opts.curve_path.empty() ? opts.out_path + ".curve.csv" : opts.curve_path;

  if (opts.kind == "bc") {
    const auto samples = fjs::env::read_trajectory_file(opts.data_path);
    if (samples.empty()) throw std::runtime_error("no training samples in " + opts.data_path);

    fjs::nn::HgatDims dims;
    dims.hidden = pick_int(opts.hidden, "hidden", 128);
    dims.layers = pick_int(opts.layers, "layers", 3);
    dims.heads = pick_int(opts.heads, "heads", 1);
    fjs::nn::TrainConfig tc;
    tc.epochs = pick_int(opts.epochs, "epochs", 25);
    tc.batch_size = pick_int(opts.batch, "batch", 64);
    tc.learning_rate = pick_double(opts.lr, "lr", 0.0002);
    tc.seed = opts.seed;

    manifest.config() = {{"hidden", dims.hidden}, {"layers", dims.layers},
                         {"heads", dims.heads},   {"epochs", tc.epochs},
                         {"batch", tc.batch_size}, {"lr", tc.learning_rate}};

    fjs::nn::HgatParams params = fjs::nn::init_params(dims, opts.seed);
    std::ostringstream curve;
    curve << "epoch,loss\n";
    try {
      fjs::nn::train_bc(params, samples, tc, [&](int epoch, double loss) {
        std::cerr << "epoch " << (epoch + 1) << "/" << tc.epochs << " loss " << loss << "\n";
        curve << (epoch + 1) << ',' << loss << '\n';
      });
    } catch (const std::runtime_error& e) {
      throw ModelError(e.what());
    }
    fjs::nn::save_model(opts.out_path, params);
    write_file(curve_path, curve.str());
  } else if (opts.kind == "predictor") {
    const auto samples = fjs::read_samples_csv(opts.data_path);
    fjs::GbrConfig gc;
    gc.n_trees = pick_int(opts.n_trees, "n_trees", 100);
    gc.max_depth = pick_int(opts.max_depth, "max_depth", 3);
    gc.min_leaf = pick_int(opts.min_leaf, "min_leaf", 2);
    gc.learning_rate = pick_double(opts.gbr_rate, "rate", 0.1);
    gc.seed = opts.seed;

    manifest.config() = {{"n_trees", gc.n_trees}, {"max_depth", gc.max_depth},
                         {"min_leaf", gc.min_leaf}, {"rate", gc.learning_rate}};

    const fjs::GbrModel model = fjs::train_capability_model(samples, gc);
    model.save(opts.out_path);

    std::ostringstream curve;
    curve << "trees,mse\n";
    for (int t = 0; t <= model.tree_count(); ++t) {
      double mse = 0.0;
      for (const auto& s : samples) {
        const double err = model.predict_with(s.features.as_vector(), t) - s.target;
        mse += err * err;
      }
      mse /= static_cast<double>(samples.size());
      curve << t << ',' << mse << '\n';
    }
    write_file(curve_path, curve.str());
  } else {
    throw std::runtime_error("unknown training kind: " + opts.kind);
  }

  manifest.output(opts.out_path);
  manifest.output(curve_path);
  manifest.write(opts.out_path + ".manifest.json");
  std::cout << "wrote " << opts.out_path << " and " << curve_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- bench ----

struct BenchOpts {
  std::string in_dir;
  std::string references_path;
  std::string modes_arg = "exact";
  std::string out_path;
  std::string model_path;
  std::string predictor_path;
  std::optional<double> time_limit;
  std::optional<double> exact_budget;
  double tau = 0.98;
  double om = 0.01;
  std::uint64_t seed = 1;
};

int run_bench(const BenchOpts& opts) {
  std::vector<std::string> modes;
  {
    std::stringstream ss(opts.modes_arg);
    std::string mode;
    while (std::getline(ss, mode, ','))
      if (!mode.empty()) modes.push_back(mode);
  }
  if (modes.empty()) throw std::runtime_error("no modes given");
  for (const auto& m : modes)
    if (m != "exact" && m != "policy" && m != "hybrid")
      throw std::runtime_error("unknown mode: " + m);

  const json refs = json::parse(read_file(opts.references_path));
  const auto files = list_instance_files(opts.in_dir);

  const bool needs_policy =
      std::any_of(modes.begin(), modes.end(), [](const auto& m) { return m != "exact"; });
  const bool needs_predictor =
      std::any_of(modes.begin(), modes.end(), [](const auto& m) { return m == "hybrid"; });
  std::optional<fjs::nn::HgatParams> policy;
  std::optional<fjs::GbrModel> predictor;
  if (needs_policy) {
    std::string model = opts.model_path;
    if (model.empty()) model = model_dir_default("policy.fjnm");
    policy = load_policy(model);
  }
  if (needs_predictor) {
    std::string pred = opts.predictor_path;
    if (pred.empty()) pred = model_dir_default("predictor.json");
    predictor = load_predictor(pred);
  }

  Manifest manifest("bench");
  manifest.config() = {{"modes", modes}, {"tau", opts.tau}, {"om", opts.om}};
  manifest.set("seed", opts.seed);
  manifest.input(opts.references_path);

  std::ostringstream csv;
  csv << "instance,mode,makespan,gap,seconds\n";
  char buf[64];

  struct Agg {
    double gap_sum = 0.0;
    double sec_sum = 0.0;
    int n = 0;
  };
  std::vector<Agg> agg(modes.size());

  for (const auto& file : files) {
    const std::string name = fs::path(file).filename().string();
    if (!refs.contains(name)) {
      std::cerr << "skip (no reference): " << name << "\n";
      continue;
    }
    const double reference = refs.at(name).get<double>();
    const fjs::FjsspInstance instance = load_instance(file);
    manifest.input(file);

    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const std::string& mode = modes[mi];
      const auto t0 = std::chrono::steady_clock::now();
      fjs::Schedule schedule;
      if (mode == "exact") {
        fjs::SearchConfig cfg;
        cfg.time_limit_seconds = opts.time_limit;
        const auto result = fjs::solve_exact(instance, cfg);
        if (!result.best.has_value()) throw std::logic_error("exact solve returned no schedule");
        schedule = *result.best;
      } else if (mode == "policy") {
        schedule = fjs::rollout_policy(instance, *policy);
      } else {
        fjs::HybridConfig cfg;
        cfg.threshold = opts.tau;
        cfg.om = opts.om;
        cfg.exact_budget_override = opts.exact_budget;
        cfg.sample_seed = opts.seed;
        schedule = fjs::solve_hybrid(instance, *policy, *predictor, cfg).schedule;
      }
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!fjs::validate_schedule(instance, schedule).empty())
        throw std::logic_error("solver returned an invalid schedule");

      const double gap = fjs::optimal_gap(static_cast<double>(schedule.makespan), reference);
      agg[mi].gap_sum += gap;
      agg[mi].sec_sum += seconds;
      agg[mi].n += 1;
      std::snprintf(buf, sizeof buf, "%.17g", gap);
      csv << name << ',' << mode << ',' << schedule.makespan << ',' << buf << ',';
      std::snprintf(buf, sizeof buf, "%.6f", seconds);
      csv << buf << '\n';
    }
  }

  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    if (agg[mi].n == 0) continue;
    std::snprintf(buf, sizeof buf, "%.17g", agg[mi].gap_sum / agg[mi].n);
    csv << "mean," << modes[mi] << ",," << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", agg[mi].sec_sum / agg[mi].n);
    csv << buf << '\n';
  }

  write_file(opts.out_path, csv.str());
  manifest.output(opts.out_path);
  manifest.write(opts.out_path + ".manifest.json");
  std::cout << "wrote " << opts.out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- tsp ------

struct TspOpts {
  std::string in_path;
  std::string out_path;
  int n = 10;
  int prefix = 0;
  std::uint64_t seed = 1;
};

int run_tsp(const TspOpts& opts) {
  fjs::tsp::TspInstance instance;
  if (!opts.in_path.empty()) {
    instance = fjs::tsp::read_tsplib(opts.in_path);
  } else {
    fjs::Rng rng(opts.seed);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(opts.n);
    for (int i = 0; i < opts.n; ++i) {
      const double x = rng.next_double();
      const double y = rng.next_double();
      pts.push_back({x, y});
    }
    instance = fjs::tsp::TspInstance::from_points(std::move(pts));
  }

  const int n = instance.size();
  int k = opts.prefix > 0 ? opts.prefix : std::max(2, n / 3);
  k = std::min(k, n - 1);

  const auto prefix = fjs::tsp::greedy_prefix(instance, k);
  const fjs::tsp::Tour completed = fjs::tsp::complete_tour(instance, prefix);

  json out;
  out["n"] = n;
  out["prefix"] = prefix;
  out["completed"] = {{"order", completed.order}, {"length", completed.length}};
  if (n <= 18) {
    const fjs::tsp::Tour optimal = fjs::tsp::held_karp(instance);
    out["optimal"] = {{"order", optimal.order}, {"length", optimal.length}};
    out["gap"] = fjs::optimal_gap(completed.length, optimal.length);
  }

  const std::string text = out.dump(2) + "\n";
  if (opts.out_path.empty())
    std::cout << text;
  else
    write_file(opts.out_path, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexible job-shop scheduling toolkit: generate instances, solve them "
               "exactly / with a learned policy / hybrid, build datasets, train models, "
               "and benchmark. FLEXSCHED_MODEL_DIR provides default model paths."};
  app.require_subcommand(1);

  GenOpts gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate random instances");
  cmd_gen->add_option("--preset", gen.preset, "parameter preset: bc or cp");
  cmd_gen->add_option("--params", gen.params_path, "JSON/flat-TOML generation parameters");
  cmd_gen->add_option("--count", gen.count, "number of instances")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
  cmd_gen->add_option("--seed", gen.seed, "master seed");

  SolveOpts solve;
  auto* cmd_solve = app.add_subcommand("solve", "solve one instance file");
  cmd_solve->add_option("instance", solve.instance_path, "path to a .fjs file")->required();
  cmd_solve->add_option("--mode", solve.mode, "exact, policy, or hybrid");
  cmd_solve->add_option("--model", solve.model_path, "policy model file");
  cmd_solve->add_option("--predictor", solve.predictor_path, "capability model file");
  cmd_solve->add_option("--out", solve.out_path, "result JSON path (default: stdout)");
  cmd_solve->add_option("--time-limit", solve.time_limit, "exact solver wall limit, seconds");
  cmd_solve->add_option("--node-limit", solve.node_limit, "exact solver node limit");
  cmd_solve->add_option("--exact-budget", solve.exact_budget,
                        "fixed hybrid exact-phase budget, seconds");
  cmd_solve->add_option("--reference", solve.reference, "best-known makespan for the gap");
  cmd_solve->add_option("--tau", solve.tau, "hybrid handoff threshold");
  cmd_solve->add_option("--om", solve.om, "hybrid seconds-per-operation budget");
  cmd_solve->add_flag("--sample", solve.sample, "sample policy actions instead of argmax");
  cmd_solve->add_option("--seed", solve.seed, "sampling seed");

  DatasetOpts dataset;
  auto* cmd_dataset = app.add_subcommand("dataset", "build a training dataset");
  cmd_dataset->add_option("--kind", dataset.kind, "bc (trajectories) or cp (capability CSV)")
      ->required();
  cmd_dataset->add_option("--in", dataset.in_dir, "directory of .fjs files")->required();
  cmd_dataset->add_option("--out", dataset.out_path, "output file")->required();
  cmd_dataset->add_option("--time-limit", dataset.time_limit, "solver limit per instance, seconds");
  cmd_dataset->add_option("--om", dataset.om, "capability budget seconds-per-operation");

  TrainOpts train;
  auto* cmd_train = app.add_subcommand("train", "train a model from a dataset");
  cmd_train->add_option("--kind", train.kind, "bc (policy) or predictor")->required();
  cmd_train->add_option("--data", train.data_path, "dataset file")->required();
  cmd_train->add_option("--out", train.out_path, "model output path")->required();
  cmd_train->add_option("--curve", train.curve_path, "loss curve CSV (default: <out>.curve.csv)");
  cmd_train->add_option("--config", train.config_path, "JSON or flat-TOML config file");
  cmd_train->add_option("--epochs", train.epochs, "training epochs");
  cmd_train->add_option("--batch", train.batch, "batch size");
  cmd_train->add_option("--lr", train.lr, "learning rate");
  cmd_train->add_option("--hidden", train.hidden, "embedding width");
  cmd_train->add_option("--layers", train.layers, "attention layers");
  cmd_train->add_option("--heads", train.heads, "attention heads");
  cmd_train->add_option("--n-trees", train.n_trees, "boosting: tree count");
  cmd_train->add_option("--max-depth", train.max_depth, "boosting: tree depth");
  cmd_train->add_option("--min-leaf", train.min_leaf, "boosting: min samples per leaf");
  cmd_train->add_option("--rate", train.gbr_rate, "boosting: learning rate");
  cmd_train->add_option("--seed", train.seed, "training seed");

  BenchOpts bench;
  auto* cmd_bench = app.add_subcommand("bench", "gap table over an instance directory");
  cmd_bench->add_option("--in", bench.in_dir, "directory of .fjs files")->required();
  cmd_bench->add_option("--references", bench.references_path,
                        "JSON file: instance file name -> best-known makespan")
      ->required();
  cmd_bench->add_option("--modes", bench.modes_arg, "comma-separated: exact,policy,hybrid");
  cmd_bench->add_option("--out", bench.out_path, "output CSV")->required();
  cmd_bench->add_option("--model", bench.model_path, "policy model file");
  cmd_bench->add_option("--predictor", bench.predictor_path, "capability model file");
  cmd_bench->add_option("--time-limit", bench.time_limit, "exact mode wall limit, seconds");
  cmd_bench->add_option("--exact-budget", bench.exact_budget,
                        "fixed hybrid exact-phase budget, seconds");
  cmd_bench->add_option("--tau", bench.tau, "hybrid handoff threshold");
  cmd_bench->add_option("--om", bench.om, "hybrid seconds-per-operation budget");
  cmd_bench->add_option("--seed", bench.seed, "sampling seed");

  TspOpts tsp;
  auto* cmd_tsp = app.add_subcommand("tsp", "tour-completion demo via the auxiliary-node reduction");
  cmd_tsp->add_option("--in", tsp.in_path, "TSPLIB EUC_2D file (default: random points)");
  cmd_tsp->add_option("--n", tsp.n, "random instance size")->check(CLI::Range(3, 18));
  cmd_tsp->add_option("--prefix", tsp.prefix, "prefix length (default: n/3)");
  cmd_tsp->add_option("--seed", tsp.seed, "random instance seed");
  cmd_tsp->add_option("--out", tsp.out_path, "result JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_solve->parsed()) return run_solve(solve);
    if (cmd_dataset->parsed()) return run_dataset(dataset);
    if (cmd_train->parsed()) return run_train(train);
    if (cmd_bench->parsed()) return run_bench(bench);
    if (cmd_tsp->parsed()) return run_tsp(tsp);
    std::cerr << "no command\n";
    return kInputError;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModelError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
