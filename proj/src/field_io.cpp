#include "nlsb/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlsb/error.hpp"

namespace nlsb {

namespace {

template <typename T>
void put(std::string& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) fail(ErrorKind::Io, "field file truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, s_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  std::size_t remaining() const { return s_.size() - pos_; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_field(const ScalarField& u, double eps, double p) {
  const TensorGrid& g = u.grid;
  std::string out = "NLSB";
  put<std::uint32_t>(out, kFieldFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.counts()[a]));
  for (int a = 0; a < g.dim(); ++a) put<double>(out, g.lo()[a]);
  for (int a = 0; a < g.dim(); ++a) put<double>(out, g.hi()[a]);
  put<double>(out, eps);
  put<double>(out, p);
  out.reserve(out.size() + 8 * u.size());
  for (double v : u.values) put<double>(out, v);
  return out;
}

FieldFile decode_field(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "NLSB") != 0) fail(ErrorKind::Io, "not a field file (bad magic)");
  const std::string body = bytes.substr(4);
  Cursor c(body);
  const auto version = c.get<std::uint32_t>();
  if (version != kFieldFormatVersion) fail(ErrorKind::Io, "unsupported field file version " + std::to_string(version));
  const auto dim = c.get<std::uint32_t>();
  if (dim < 1 || dim > 3) fail(ErrorKind::Io, "field file dim out of range");
  std::array<int, 3> counts{1, 1, 1};
  Point lo{}, hi{};
  for (std::uint32_t a = 0; a < dim; ++a) counts[a] = static_cast<int>(c.get<std::uint32_t>());
  for (std::uint32_t a = 0; a < dim; ++a) lo[a] = c.get<double>();
  for (std::uint32_t a = 0; a < dim; ++a) hi[a] = c.get<double>();
  FieldFile f{ScalarField(TensorGrid(static_cast<int>(dim), counts, lo, hi)), 0.0, 0.0};
  f.eps = c.get<double>();
  f.p = c.get<double>();
  if (c.remaining() != 8 * f.field.size()) fail(ErrorKind::Io, "field file payload length does not match counts");
  for (std::size_t k = 0; k < f.field.size(); ++k) f.field[k] = c.get<double>();
  return f;
}

void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) fail(ErrorKind::Io, "cannot rename '" + tmp + "': " + ec.message());
}

void write_field(const std::string& path, const ScalarField& u, double eps, double p) {
  write_file(path, encode_field(u, eps, p));
}

FieldFile read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open field file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_field(ss.str());
}

void write_profile(const std::string& path, const RadialProfile& profile) {
  const int n = static_cast<int>(profile.size());
  ScalarField f(TensorGrid(1, {n, 1, 1}, Point{0.0, 0.0, 0.0}, Point{profile.r_max(), 0.0, 0.0}));
  f.values = profile.values();
  write_field(path, f, 1.0, profile.p());
}

}  // namespace nlsb
