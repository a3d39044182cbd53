#include "fjs/nn/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "fjs/env.hpp"
#include "fjs/hash.hpp"

namespace fjs::nn {

namespace {

constexpr std::uint32_t kMagic = 0x4d4e4a46u;  // "FJNM" little-endian
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

struct Reader {
  const char* p;
  const char* end;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n) throw std::runtime_error("model file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    p += 8;
    return v;
  }
};

}  // namespace

void save_model(const std::string& path, const HgatParams& params) {
  const HgatDims& d = params.dims();
  std::string out;
  put_u32(out, kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(d.op_feat));
  put_u32(out, static_cast<std::uint32_t>(d.job_feat));
  put_u32(out, static_cast<std::uint32_t>(d.machine_feat));
  put_u32(out, static_cast<std::uint32_t>(d.om_edge_feat));
  put_u32(out, static_cast<std::uint32_t>(d.mj_edge_feat));
  put_u32(out, static_cast<std::uint32_t>(d.hidden));
  put_u32(out, static_cast<std::uint32_t>(d.layers));
  put_u32(out, static_cast<std::uint32_t>(d.heads));
  put_u64(out, fnv1a64(env::kScalingScheme));
  put_u64(out, static_cast<std::uint64_t>(params.size()));

  const auto& v = params.values();
  std::string raw(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  out += raw;
  put_u64(out, fnv1a64(raw));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

HgatParams load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r{buf.data(), buf.data() + buf.size()};

  if (r.u32() != kMagic) throw std::runtime_error("not a model file: " + path);
  if (r.u32() != kVersion) throw std::runtime_error("unsupported model file version");

  HgatDims d;
  d.op_feat = static_cast<int>(r.u32());
  d.job_feat = static_cast<int>(r.u32());
  d.machine_feat = static_cast<int>(r.u32());
  d.om_edge_feat = static_cast<int>(r.u32());
  d.mj_edge_feat = static_cast<int>(r.u32());
  d.hidden = static_cast<int>(r.u32());
  d.layers = static_cast<int>(r.u32());
  d.heads = static_cast<int>(r.u32());

  if (r.u64() != fnv1a64(env::kScalingScheme))
    throw std::runtime_error("model was trained with a different feature scaling scheme");

  const std::uint64_t count = r.u64();
  HgatParams params(d);
  if (count != static_cast<std::uint64_t>(params.size()))
    throw std::runtime_error("model parameter count does not match its dims");

  r.need(count * sizeof(double));
  std::string raw(r.p, count * sizeof(double));
  std::memcpy(params.values().data(), r.p, count * sizeof(double));
  r.p += count * sizeof(double);

  if (r.u64() != fnv1a64(raw)) throw std::runtime_error("model file checksum mismatch");
  return params;
}

}  // namespace fjs::nn
