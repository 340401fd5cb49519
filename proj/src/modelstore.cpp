#include "veinforge/modelstore.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "veinforge/common.hpp"

namespace vf {
namespace {

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>(v >> (8 * i)));
}

void put_f64(std::string& b, double d) {
  const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>(v >> (8 * i)));
}

struct Cursor {
  const unsigned char* p;
  std::size_t n;
  std::size_t off = 0;

  void need(std::size_t k) const {
    if (off + k > n) raise(Err::CorruptLength, "model file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(p[off + i]) << (8 * i);
    off += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(p[off + i]) << (8 * i);
    off += 8;
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t k) {
    need(k);
    std::string s(reinterpret_cast<const char*>(p + off), k);
    off += k;
    return s;
  }
};

}  // namespace

void save_model(const VeinSpaceModel& model, const std::string& path) {
  const int M = model.dims.M, N = model.dims.N, K = model.K;
  const std::size_t T = model.templates.size();

  std::string buf;
  buf.reserve(64 + model.mean.data.size() * 8 +
              static_cast<std::size_t>(K) * (1 + 2 * N) * 8 + T * (8 + 8 * K));
  buf.append("VQIF");
  put_u32(buf, kModelVersion);
  put_u32(buf, static_cast<std::uint32_t>(M));
  put_u32(buf, static_cast<std::uint32_t>(N));
  put_u32(buf, static_cast<std::uint32_t>(K));
  put_u32(buf, static_cast<std::uint32_t>(T));
  put_f64(buf, model.tau);
  put_f64(buf, model.theta_vein);
  put_f64(buf, model.theta_id);
  for (double d : model.mean.data) put_f64(buf, d);
  for (double d : model.eigenvalues) put_f64(buf, d);
  for (const std::vector<double>& e : model.eigenveins)
    for (double d : e) put_f64(buf, d);
  for (const VeinSpaceModel::Template& t : model.templates) {
    put_u32(buf, static_cast<std::uint32_t>(t.label.size()));
    buf.append(t.label);
    for (double d : t.weights) put_f64(buf, d);
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Err::IoFailure, "save_model: cannot open " + tmp);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out.flush()) raise(Err::IoFailure, "save_model: write failed " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Err::IoFailure, "save_model: rename to " + path);
}

VeinSpaceModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Err::IoFailure, "load_model: cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) raise(Err::IoFailure, "load_model: read failed " + path);

  Cursor c{raw.data(), raw.size()};
  if (c.bytes(4) != "VQIF") raise(Err::BadMagic, path);
  const std::uint32_t version = c.u32();
  if (version != kModelVersion)
    raise(Err::UnsupportedVersion, "version " + std::to_string(version));
  const std::uint32_t M = c.u32(), N = c.u32(), K = c.u32(), T = c.u32();
  if (M < 1 || N < 1 || K < 1 || K > 2 * static_cast<std::uint64_t>(N) ||
      M > (1u << 20) || N > (1u << 20) || T > (1u << 24))
    raise(Err::CorruptLength, "implausible dims in " + path);

  // Everything after the header has a length fixed by (M, N, K, T) except the
  // labels, so the exact-length check happens as the cursor runs out.
  VeinSpaceModel m;
  m.dims = {static_cast<int>(M), static_cast<int>(N), static_cast<int>(T)};
  m.tau = c.f64();
  m.theta_vein = c.f64();
  m.theta_id = c.f64();
  m.K = static_cast<int>(K);

  m.mean = MeanGrid(static_cast<int>(M), static_cast<int>(N));
  for (double& d : m.mean.data) d = c.f64();
  m.eigenvalues.resize(K);
  for (double& d : m.eigenvalues) d = c.f64();
  m.eigenveins.assign(K, std::vector<double>(2 * N));
  for (std::vector<double>& e : m.eigenveins)
    for (double& d : e) d = c.f64();
  m.templates.resize(T);
  for (VeinSpaceModel::Template& t : m.templates) {
    const std::uint32_t len = c.u32();
    if (len > (1u << 20)) raise(Err::CorruptLength, "label length in " + path);
    t.label = c.bytes(len);
    t.weights.resize(K);
    for (double& d : t.weights) d = c.f64();
  }
  if (c.off != raw.size())
    raise(Err::CorruptLength, "trailing bytes in " + path);
  return m;
}

}  // namespace vf
