#include "qhd/qhdf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace qhd {
namespace {

constexpr char kMagic[4] = {'Q', 'H', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * b);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * b);
    return std::bit_cast<double>(v);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void magic() {
    need(4);
    if (std::memcmp(bytes_.data(), kMagic, 4) != 0) throw PreconditionError("not a QHDF file (bad magic)");
    pos_ = 4;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw PreconditionError("truncated QHDF file");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

std::string header(const Grid& g) {
  std::string out(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.ndim()));
  for (int a = 0; a < g.ndim(); ++a) put_u32(out, static_cast<std::uint32_t>(g.count(a)));
  for (int a = 0; a < g.ndim(); ++a) {
    put_f64(out, g.bounds(a).lower);
    put_f64(out, g.bounds(a).upper);
  }
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Grid grid_from_dump(const QhdfDump& d, Boundary boundary) {
  return Grid::make(d.bounds, d.counts, boundary);
}

}  // namespace

void write_qhdf(const std::filesystem::path& path, const RealField& f) {
  std::string out = header(f.grid());
  out.reserve(out.size() + 8 * f.size());
  for (double v : f.values()) put_f64(out, v);
  write_bytes(path, out);
}

void write_qhdf(const std::filesystem::path& path, const ComplexField& f) {
  std::string out = header(f.grid());
  out.reserve(out.size() + 16 * f.size());
  for (const auto& z : f.values()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  write_bytes(path, out);
}

QhdfDump read_qhdf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(is), {}));
  r.magic();
  if (const auto v = r.u32(); v != kVersion) throw PreconditionError("unsupported QHDF version " + std::to_string(v));
  const auto ndim = r.u32();
  if (ndim < 1 || ndim > 2) throw PreconditionError("QHDF ndim must be 1 or 2");
  QhdfDump d;
  std::size_t points = 1;
  for (std::uint32_t a = 0; a < ndim; ++a) {
    d.counts.push_back(r.u32());
    points *= d.counts.back();
  }
  for (std::uint32_t a = 0; a < ndim; ++a) {
    Interval iv;
    iv.lower = r.f64();
    iv.upper = r.f64();
    d.bounds.push_back(iv);
  }
  const std::size_t rest = r.remaining();
  if (rest == 8 * points)
    d.complex = false;
  else if (rest == 16 * points)
    d.complex = true;
  else
    throw PreconditionError("QHDF payload length does not match grid");
  d.samples.resize(rest / 8);
  for (auto& v : d.samples) v = r.f64();
  return d;
}

ComplexField complex_field_from_dump(const QhdfDump& dump, Boundary boundary) {
  if (!dump.complex) throw PreconditionError("QHDF dump holds a real field");
  ComplexField f(grid_from_dump(dump, boundary));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = Complex(dump.samples[2 * i], dump.samples[2 * i + 1]);
  return f;
}

RealField real_field_from_dump(const QhdfDump& dump, Boundary boundary) {
  if (dump.complex) throw PreconditionError("QHDF dump holds a complex field");
  return RealField(grid_from_dump(dump, boundary), dump.samples);
}

}  // namespace qhd
