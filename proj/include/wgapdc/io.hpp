#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <openssl/evp.h>

#include "wgapdc/correlations.hpp"
#include "wgapdc/errors.hpp"
#include "wgapdc/grid.hpp"
#include "wgapdc/jsa.hpp"

namespace wgapdc::io {

namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return {buf.data(), end};
}

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// Collects every file written during a run and emits manifest.txt
/// (relative path, byte length, SHA-256), sorted by path.
class OutputSink {
 public:
  explicit OutputSink(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("output directory not writable: " + dir_.string());
  }

  const fs::path& dir() const { return dir_; }

  void write(const std::string& relative, const std::string& bytes) {
    const fs::path p = dir_ / relative;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + p.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ConfigError("write failed: " + p.string());
    entries_[relative] = {bytes.size(), sha256_hex(bytes)};
  }

  std::string manifest_text() const {
    std::ostringstream os;
    for (const auto& [path, e] : entries_) os << path << ' ' << e.first << ' ' << e.second << '\n';
    return os.str();
  }

  void finish() {
    const std::string text = manifest_text();
    std::ofstream f(dir_ / "manifest.txt", std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write manifest");
    f << text;
  }

  std::size_t file_count() const { return entries_.size(); }

 private:
  fs::path dir_;
  std::map<std::string, std::pair<std::size_t, std::string>> entries_;
};

// ---- CSV ----------------------------------------------------------------

struct CsvAxis {
  std::string name;  // e.g. "n_s"
  std::string unit;  // e.g. "channel"
  std::vector<double> values;
};

/// Matrix CSV: '#' metadata lines, a header row with the column axis, then
/// one line per row-axis value.
inline std::string matrix_csv(const Array2<double>& m, const CsvAxis& rows, const CsvAxis& cols,
                              const std::string& quantity, const std::vector<std::string>& notes = {}) {
  if (rows.values.size() != m.rows() || cols.values.size() != m.cols())
    throw PreconditionError("matrix_csv: axis length mismatch");
  std::ostringstream os;
  os << "# quantity: " << quantity << '\n';
  os << "# rows: " << rows.name << " [" << rows.unit << "]\n";
  os << "# cols: " << cols.name << " [" << cols.unit << "]\n";
  for (const auto& n : notes) os << "# " << n << '\n';
  os << rows.name << '\\' << cols.name;
  for (double v : cols.values) os << ',' << format_double(v);
  os << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << format_double(rows.values[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) os << ',' << format_double(m(r, c));
    os << '\n';
  }
  return os.str();
}

/// Column table CSV with a header of "name [unit]" cells. Missing values are empty.
struct CsvColumn {
  std::string name;
  std::string unit;
  std::vector<std::optional<double>> values;
};

inline std::string table_csv(const std::vector<CsvColumn>& cols, const std::vector<std::string>& notes = {}) {
  std::ostringstream os;
  for (const auto& n : notes) os << "# " << n << '\n';
  std::size_t rows = 0;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    os << (c ? "," : "") << cols[c].name << " [" << cols[c].unit << ']';
    rows = std::max(rows, cols[c].values.size());
  }
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      if (r < cols[c].values.size() && cols[c].values[r]) os << format_double(*cols[c].values[r]);
    }
    os << '\n';
  }
  return os.str();
}

inline std::vector<double> to_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

// ---- images ---------------------------------------------------------------

/// Fixed dark-to-bright false-colour ramp (black, purple, red, orange, pale yellow).
inline std::array<unsigned char, 3> colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> anchors{{
      {0.0, 0.0, 0.02}, {0.34, 0.06, 0.43}, {0.73, 0.21, 0.33}, {0.98, 0.55, 0.04}, {0.99, 1.0, 0.64}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), anchors.size() - 2);
  const double f = t - static_cast<double>(i);
  std::array<unsigned char, 3> out{};
  for (int c = 0; c < 3; ++c)
    out[c] = static_cast<unsigned char>(std::lround(255.0 * ((1 - f) * anchors[i][c] + f * anchors[i + 1][c])));
  return out;
}

struct ImageFiles {
  std::string pixmap;
  std::string sidecar;
};

/// Binary PPM (P6, false colour) or PGM (P5, grey) of a matrix scaled to its
/// maximum; first matrix row at the top. The sidecar records axis ranges and
/// the scale.
inline ImageFiles heatmap_image(const Array2<double>& m, const CsvAxis& rows, const CsvAxis& cols,
                                const std::string& quantity, bool grey = false) {
  double lo = 0.0, hi = 0.0;
  if (m.size()) {
    lo = *std::min_element(m.data().begin(), m.data().end());
    hi = *std::max_element(m.data().begin(), m.data().end());
  }
  const double scale = hi > 0.0 ? hi : 1.0;
  std::ostringstream img;
  img << (grey ? "P5\n" : "P6\n") << m.cols() << ' ' << m.rows() << "\n255\n";
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double t = std::max(0.0, m(r, c)) / scale;
      if (grey) {
        img.put(static_cast<char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0))));
      } else {
        const auto rgb = colormap(t);
        img.write(reinterpret_cast<const char*>(rgb.data()), 3);
      }
    }
  std::ostringstream side;
  side << "quantity: " << quantity << '\n';
  side << "format: " << (grey ? "P5 grey" : "P6 false colour") << '\n';
  side << "size: " << m.cols() << " x " << m.rows() << '\n';
  auto range = [](const CsvAxis& a) {
    return a.values.empty() ? std::string("-")
                            : format_double(a.values.front()) + " .. " + format_double(a.values.back());
  };
  side << "rows (top to bottom): " << rows.name << " [" << rows.unit << "] " << range(rows) << '\n';
  side << "cols (left to right): " << cols.name << " [" << cols.unit << "] " << range(cols) << '\n';
  side << "normalisation: pixel = value / " << format_double(scale) << '\n';
  side << "min: " << format_double(lo) << '\n' << "max: " << format_double(hi) << '\n';
  return {img.str(), side.str()};
}

// ---- tensor container -------------------------------------------------------
//
// Layout, all little endian:
//   8 bytes  magic "WGAJSA01"
//   u32      version (1)
//   u32      flags (bit 0: normalised)
//   u64 x 4  lengths n_ws, n_wi, n_ks, n_ki
//   f64 x 4  omega_s start, step, omega_i start, step
//   f64 ...  omega_s axis, omega_i axis, k_s axis, k_i axis values
//   f64 ...  re, im pairs in row-major (ws, wi, ks, ki) order

inline constexpr std::array<char, 8> kTensorMagic{'W', 'G', 'A', 'J', 'S', 'A', '0', '1'};
inline constexpr std::uint32_t kTensorVersion = 1;

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  std::array<char, sizeof(T)> b{};
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.append(b.data(), b.size());
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ConfigError("tensor file truncated");
  std::array<char, sizeof(T)> b{};
  std::memcpy(b.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace detail

inline std::string encode_tensor(const JsaTensor& t) {
  const auto& g = t.grid();
  std::string out;
  out.reserve(96 + 16 * t.values().size());
  out.append(kTensorMagic.data(), kTensorMagic.size());
  detail::put_le<std::uint32_t>(out, kTensorVersion);
  detail::put_le<std::uint32_t>(out, t.is_normalized() ? 1u : 0u);
  for (std::uint64_t n : {g.omega_s().count, g.omega_i().count, g.nk(), g.nk()}) detail::put_le(out, n);
  for (double v : {g.omega_s().start, g.omega_s().step, g.omega_i().start, g.omega_i().step}) detail::put_le(out, v);
  for (std::size_t i = 0; i < g.omega_s().count; ++i) detail::put_le(out, g.omega_s()[i]);
  for (std::size_t i = 0; i < g.omega_i().count; ++i) detail::put_le(out, g.omega_i()[i]);
  for (int rep = 0; rep < 2; ++rep)
    for (std::size_t j = 0; j < g.nk(); ++j) detail::put_le(out, g.k(j));
  for (const auto& v : t.values()) {
    detail::put_le(out, v.real());
    detail::put_le(out, v.imag());
  }
  return out;
}

inline JsaTensor decode_tensor(const std::string& bytes) {
  if (bytes.size() < kTensorMagic.size() || !std::equal(kTensorMagic.begin(), kTensorMagic.end(), bytes.begin()))
    throw ConfigError("not a tensor container (bad magic)");
  std::size_t pos = kTensorMagic.size();
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != kTensorVersion) throw ConfigError("unsupported tensor container version " + std::to_string(version));
  const auto flags = detail::get_le<std::uint32_t>(bytes, pos);
  std::array<std::uint64_t, 4> len{};
  for (auto& l : len) l = detail::get_le<std::uint64_t>(bytes, pos);
  if (len[2] != len[3] || len[2] == 0) throw ConfigError("tensor container: momentum axes must be equal and non-empty");
  std::array<double, 4> ax{};
  for (auto& a : ax) a = detail::get_le<double>(bytes, pos);
  const Grid g(UniformAxis{ax[0], ax[1], len[0]}, UniformAxis{ax[2], ax[3], len[1]}, static_cast<int>(len[2]));
  pos += 8 * (len[0] + len[1] + 2 * len[2]);
  const std::size_t count = len[0] * len[1] * len[2] * len[3];
  if (bytes.size() != pos + 16 * count) throw ConfigError("tensor container: payload length mismatch");
  JsaTensor t(g);
  for (auto& v : t.values()) {
    const double re = detail::get_le<double>(bytes, pos);
    const double im = detail::get_le<double>(bytes, pos);
    v = {re, im};
  }
  t.set_normalized(flags & 1u);
  return t;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace wgapdc::io
