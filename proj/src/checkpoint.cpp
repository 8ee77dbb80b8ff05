#include "rbd/seg/checkpoint.hpp"

#include "rbd/util/fileio.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace rbd::seg {

namespace {

constexpr char kMagic[4] = {'R', 'B', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::string buf;
  void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  void raw(void* p, size_t n) {
    if (pos + n > buf.size()) throw std::runtime_error("truncated checkpoint");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  std::string str() {
    const auto n = u32();
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
};

void write_cfg(Writer& w, const SegNetConfig& c) {
  for (const SaSpec* sa : {&c.sa1, &c.sa2}) {
    w.u32(sa->n_centroids);
    w.f64(sa->radius);
    w.u32(sa->k);
    for (int x : sa->widths) w.u32(x);
  }
  for (const FpSpec* fp : {&c.fp1, &c.fp2})
    for (int x : fp->widths) w.u32(x);
  w.u32(c.head_hidden);
}

SegNetConfig read_cfg(Reader& r) {
  SegNetConfig c;
  for (SaSpec* sa : {&c.sa1, &c.sa2}) {
    sa->n_centroids = static_cast<int>(r.u32());
    sa->radius = r.f64();
    sa->k = static_cast<int>(r.u32());
    for (int& x : sa->widths) x = static_cast<int>(r.u32());
  }
  for (FpSpec* fp : {&c.fp1, &c.fp2})
    for (int& x : fp->widths) x = static_cast<int>(r.u32());
  c.head_hidden = static_cast<int>(r.u32());
  return c;
}

}  // namespace

void save_model(SegModel& model, const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kVersion);
  write_cfg(w, model.cfg);
  const auto params = model.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const ParamRef& p : params) {
    w.str(p.name);
    w.u64(static_cast<std::uint64_t>(p.rows));
    w.u64(static_cast<std::uint64_t>(p.cols));
    w.raw(p.data, sizeof(double) * p.size());
  }
  atomic_write(path, w.buf);
}

SegModel load_model(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  Reader r{buf};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a model checkpoint");
  if (r.u32() != kVersion) throw std::runtime_error("unsupported checkpoint version");
  SegModel model = SegModel::init(read_cfg(r), 0);
  const auto n = r.u32();
  auto params = model.params();
  if (n != params.size()) throw std::runtime_error("checkpoint tensor count mismatch");
  for (ParamRef& p : params) {
    const std::string name = r.str();
    const auto rows = r.u64(), cols = r.u64();
    if (name != p.name || rows != static_cast<std::uint64_t>(p.rows) ||
        cols != static_cast<std::uint64_t>(p.cols))
      throw std::runtime_error("checkpoint tensor mismatch at " + p.name);
    r.raw(p.data, sizeof(double) * p.size());
  }
  return model;
}

}  // namespace rbd::seg
