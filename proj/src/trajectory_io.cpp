#include <cstring>
#include <fstream>

#include "json.hpp"

#include "fjs/env.hpp"
#include "fjs/hash.hpp"

namespace fjs::env {

namespace {

constexpr char kMagic[4] = {'F', 'J', 'T', 'R'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void put_f64(std::string& out, double v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) throw std::runtime_error("trajectory file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, data.data() + pos, 4);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, data.data() + pos, 8);
    pos += 8;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, data.data() + pos, 8);
    pos += 8;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data[pos++]);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

void encode_sample(std::string& out, const TrainingSample& sample) {
  const GraphSnapshot& g = sample.snapshot;
  put_u32(out, static_cast<std::uint32_t>(g.n_ops));
  put_u32(out, static_cast<std::uint32_t>(g.n_jobs));
  put_u32(out, static_cast<std::uint32_t>(g.n_machines));
  put_u32(out, static_cast<std::uint32_t>(g.step));
  for (int i = 0; i < g.n_ops; ++i) out.push_back(static_cast<char>(g.op_scheduled[i]));
  for (const auto& f : g.op_feat)
    for (double v : f) put_f64(out, v);
  for (const auto& f : g.job_feat)
    for (double v : f) put_f64(out, v);
  for (const auto& f : g.mach_feat)
    for (double v : f) put_f64(out, v);

  put_u32(out, static_cast<std::uint32_t>(g.om_edges.size()));
  for (const auto& e : g.om_edges) {
    put_u32(out, static_cast<std::uint32_t>(e.op));
    put_u32(out, static_cast<std::uint32_t>(e.machine));
    for (double v : e.feat) put_f64(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(g.prec_edges.size()));
  for (const auto& e : g.prec_edges) {
    put_u32(out, static_cast<std::uint32_t>(e.pred));
    put_u32(out, static_cast<std::uint32_t>(e.succ));
  }
  put_u32(out, static_cast<std::uint32_t>(g.member_edges.size()));
  for (const auto& e : g.member_edges) {
    put_u32(out, static_cast<std::uint32_t>(e.op));
    put_u32(out, static_cast<std::uint32_t>(e.job));
  }
  put_u32(out, static_cast<std::uint32_t>(g.mj_edges.size()));
  for (const auto& e : g.mj_edges) {
    put_u32(out, static_cast<std::uint32_t>(e.machine));
    put_u32(out, static_cast<std::uint32_t>(e.job));
    for (double v : e.feat) put_f64(out, v);
  }
  put_f64(out, g.time_scale);
  put_f64(out, g.count_scale);
  put_u32(out, static_cast<std::uint32_t>(g.scaling_scheme.size()));
  out += g.scaling_scheme;
  put_u32(out, static_cast<std::uint32_t>(sample.action_index));
}

TrainingSample decode_sample(Reader& r) {
  TrainingSample sample;
  GraphSnapshot& g = sample.snapshot;
  g.n_ops = static_cast<int>(r.u32());
  g.n_jobs = static_cast<int>(r.u32());
  g.n_machines = static_cast<int>(r.u32());
  g.step = static_cast<int>(r.u32());
  g.op_scheduled.resize(g.n_ops);
  for (int i = 0; i < g.n_ops; ++i) g.op_scheduled[i] = r.u8();
  g.op_feat.resize(g.n_ops);
  for (auto& f : g.op_feat)
    for (double& v : f) v = r.f64();
  g.job_feat.resize(g.n_jobs);
  for (auto& f : g.job_feat)
    for (double& v : f) v = r.f64();
  g.mach_feat.resize(g.n_machines);
  for (auto& f : g.mach_feat)
    for (double& v : f) v = r.f64();

  g.om_edges.resize(r.u32());
  for (auto& e : g.om_edges) {
    e.op = static_cast<int>(r.u32());
    e.machine = static_cast<int>(r.u32());
    for (double& v : e.feat) v = r.f64();
  }
  g.prec_edges.resize(r.u32());
  for (auto& e : g.prec_edges) {
    e.pred = static_cast<int>(r.u32());
    e.succ = static_cast<int>(r.u32());
  }
  g.member_edges.resize(r.u32());
  for (auto& e : g.member_edges) {
    e.op = static_cast<int>(r.u32());
    e.job = static_cast<int>(r.u32());
  }
  g.mj_edges.resize(r.u32());
  for (auto& e : g.mj_edges) {
    e.machine = static_cast<int>(r.u32());
    e.job = static_cast<int>(r.u32());
    for (double& v : e.feat) v = r.f64();
  }
  g.time_scale = r.f64();
  g.count_scale = r.f64();
  g.scaling_scheme = r.str(r.u32());
  sample.action_index = static_cast<int>(r.u32());
  return sample;
}

}  // namespace

void write_trajectory_file(const std::string& path, const std::vector<Trajectory>& trajectories,
                           bool proven_optimal_only) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  std::uint64_t n_records = 0;
  for (const auto& t : trajectories) n_records += t.steps.size();
  put_u64(out, n_records);

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["records"] = n_records;
  meta["scaling_scheme"] = kScalingScheme;
  meta["proven_optimal_only"] = proven_optimal_only;
  meta["trajectories"] = nlohmann::json::array();

  for (const auto& t : trajectories) {
    for (const auto& sample : trajectory_samples(t)) encode_sample(out, sample);
    meta["trajectories"].push_back({{"instance_hash", to_hex(t.instance_hash)},
                                    {"length", t.steps.size()},
                                    {"makespan", t.final_makespan}});
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.close();

  std::ofstream side(path + ".meta.json");
  if (!side) throw std::runtime_error("cannot write " + path + ".meta.json");
  side << meta.dump(2) << '\n';
}

std::vector<TrainingSample> read_trajectory_file(const std::string& path,
                                                 TrajectoryFileMeta* meta) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  Reader r{data};
  if (r.str(4) != std::string(kMagic, 4)) throw std::runtime_error("not a trajectory file");
  if (r.u32() != kVersion) throw std::runtime_error("unsupported trajectory file version");
  const std::uint64_t n = r.u64();
  std::vector<TrainingSample> samples;
  samples.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) samples.push_back(decode_sample(r));

  if (meta != nullptr) {
    *meta = {};
    std::ifstream side(path + ".meta.json");
    if (side) {
      nlohmann::json m = nlohmann::json::parse(side);
      meta->scaling_scheme = m.value("scaling_scheme", "");
      meta->proven_optimal_only = m.value("proven_optimal_only", true);
      for (const auto& t : m["trajectories"]) {
        TrajectoryFileMeta::Entry e;
        e.instance_hash = std::stoull(t["instance_hash"].get<std::string>(), nullptr, 16);
        e.length = t["length"].get<int>();
        e.makespan = t["makespan"].get<TimeUnit>();
        meta->trajectories.push_back(e);
      }
    }
  }
  return samples;
}

}  // namespace fjs::env
