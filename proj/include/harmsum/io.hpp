// SPDX-License-Identifier: Apache-2.0
//
// io.hpp
//
// File formats (all little-endian, independent of host byte order):
//
//   FOPB   "FOPB" | u32 version=1 | u32 n_rows | u64 n_chan | f32[n_rows*n_chan] row-major
//   RFOP   "RFOP" | u32 version=1 | u32 n_rows | u64 n_chan | u32 n_hp | u32 n_col
//          | u32 n_p_wi | u32 n_lp_cc | u32 pow2 | u64 demand | u64 n_workgroups
//          | u64 total_slots | f32[total_slots] | {u32 plane, u32 row, u32 col}[total_slots]
//          (plane 0 marks a padding slot)
//   candidates (binary)  {u32 packed word, f32 amplitude}*, planes ascending, ring order
//   candidates (CSV)     filter,plane,bin,amplitude,encoded
//   thresholds (CSV)     n_hp lines of n_rows comma-separated values
//   stats (CSV)          strategy,loads,stores,hits,misses,ratio,analytic_loads,analytic_stores
//
// Plus the synthetic FOP generator and touch-map exports.

#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "harmsum/core.hpp"
#include "harmsum/gma.hpp"
#include "harmsum/reorder.hpp"
#include "harmsum/touch_map.hpp"

namespace harmsum {

/// Malformed or inconsistent file content. `offset` is the byte (binary) or
/// line (text) where the problem was found.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

namespace io_detail {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void magic(std::string_view m) { out_.insert(out_.end(), m.begin(), m.end()); }
  void reserve(std::size_t n) { out_.reserve(n); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(const Bytes& in) : in_(in) {}

  std::uint64_t pos() const { return pos_; }
  std::uint64_t remaining() const { return in_.size() - pos_; }

  void need(std::uint64_t n, const char* what) const {
    if (remaining() < n) throw FormatError(std::string("truncated ") + what, pos_);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t{in_[pos_ + b]} << (8 * b);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t{in_[pos_ + b]} << (8 * b);
    pos_ += 8;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  void magic(std::string_view m) {
    need(m.size(), "magic");
    if (std::memcmp(in_.data() + pos_, m.data(), m.size()) != 0)
      throw FormatError("bad magic, expected \"" + std::string(m) + "\"", pos_);
    pos_ += m.size();
  }

 private:
  const Bytes& in_;
  std::uint64_t pos_ = 0;
};

inline Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for reading");
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const Bytes& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for " + path);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path + " for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

/// Shortest decimal that round-trips a float.
inline std::string format_float(float v) {
  std::array<char, 32> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? p : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::uint64_t line) {
  T v{};
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw FormatError("cannot parse number \"" + std::string(s) + "\"", line);
  return v;
}

}  // namespace io_detail

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kFopHeaderBytes = 20;
inline constexpr std::size_t kRfopHeaderBytes = 64;

// ---------------------------------------------------------------- FOPB

inline Bytes encode_fop(const FopPlane& plane) {
  io_detail::Writer w;
  w.reserve(kFopHeaderBytes + plane.size() * 4);
  w.magic("FOPB");
  w.u32(kFormatVersion);
  w.u32(plane.rows());
  w.u64(plane.cols());
  for (float v : plane.data()) w.f32(v);
  return w.take();
}

inline FopPlane decode_fop(const Bytes& bytes) {
  io_detail::Reader r(bytes);
  r.magic("FOPB");
  const auto version_pos = r.pos();
  if (r.u32("version") != kFormatVersion) throw FormatError("unsupported FOPB version", version_pos);
  const std::uint32_t rows = r.u32("n_rows");
  const std::uint64_t cols = r.u64("n_chan");
  if (rows == 0 || cols == 0) throw FormatError("empty FOP dimensions", 8);
  const std::uint64_t n = std::uint64_t{rows} * cols;
  if (r.remaining() != n * 4) {
    if (r.remaining() < n * 4) throw FormatError("truncated FOP payload", bytes.size());
    throw FormatError("trailing bytes after FOP payload", kFopHeaderBytes + n * 4);
  }
  std::vector<float> data(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    const auto at = r.pos();
    data[idx] = r.f32("payload");
    if (!std::isfinite(data[idx]))
      throw FormatError(
          "non-finite amplitude at row " + std::to_string(idx / cols) + " col " + std::to_string(idx % cols),
          at);
  }
  return FopPlane(rows, cols, std::move(data));
}

inline void write_fop(const std::string& path, const FopPlane& plane) {
  io_detail::write_file(path, encode_fop(plane));
}
inline FopPlane read_fop(const std::string& path) { return decode_fop(io_detail::read_file(path)); }

// ---------------------------------------------------------------- RFOP

inline Bytes encode_rfop(const RfopBuffer& buf) {
  const RfopLayout& l = buf.layout;
  io_detail::Writer w;
  w.reserve(kRfopHeaderBytes + buf.data.size() * 16);
  w.magic("RFOP");
  w.u32(kFormatVersion);
  w.u32(l.n_rows);
  w.u64(l.n_chan);
  w.u32(l.n_hp);
  w.u32(l.n_col);
  w.u32(l.n_p_wi);
  w.u32(l.n_lp_cc);
  w.u32(l.pow2_opt ? 1u : 0u);
  w.u64(l.demand);
  w.u64(l.n_workgroups);
  w.u64(buf.data.size());
  for (float v : buf.data) w.f32(v);
  for (const auto& s : buf.index) {
    w.u32(s.plane);
    w.u32(s.row);
    w.u32(static_cast<std::uint32_t>(s.col));
  }
  return w.take();
}

inline RfopBuffer decode_rfop(const Bytes& bytes) {
  io_detail::Reader r(bytes);
  r.magic("RFOP");
  if (r.u32("version") != kFormatVersion) throw FormatError("unsupported RFOP version", 4);
  RfopBuffer buf;
  RfopLayout& l = buf.layout;
  l.n_rows = r.u32("n_rows");
  l.n_chan = r.u64("n_chan");
  l.n_hp = r.u32("n_hp");
  l.n_col = r.u32("n_col");
  l.n_p_wi = r.u32("n_p_wi");
  l.n_lp_cc = r.u32("n_lp_cc");
  const auto pow2_pos = r.pos();
  const std::uint32_t pow2 = r.u32("pow2");
  if (pow2 > 1) throw FormatError("pow2 flag must be 0 or 1", pow2_pos);
  l.pow2_opt = pow2 == 1;
  l.demand = r.u64("demand");
  l.n_workgroups = r.u64("n_workgroups");
  const auto slots_pos = r.pos();
  const std::uint64_t slots = r.u64("total_slots");
  if (l.n_col == 0 || l.n_p_wi == 0 || l.n_hp == 0 || l.n_hp > kMaxPlanes ||
      l.n_workgroups * l.n_col != l.n_chan)
    throw FormatError("inconsistent RFOP layout", 12);
  if (slots != l.total_slots()) throw FormatError("slot count does not match layout", slots_pos);
  if (r.remaining() != slots * 16) throw FormatError("RFOP payload length mismatch", r.pos());
  buf.data.resize(slots);
  for (auto& v : buf.data) {
    const auto at = r.pos();
    v = r.f32("rfop data");
    if (!std::isfinite(v)) throw FormatError("non-finite rFOP value", at);
  }
  buf.index.resize(slots);
  for (auto& s : buf.index) {
    const auto at = r.pos();
    s.plane = r.u32("index plane");
    s.row = r.u32("index row");
    s.col = r.u32("index col");
    if (s.plane > l.n_hp || s.row >= l.n_rows || s.col >= l.n_chan)
      throw FormatError("index entry out of range", at);
  }
  return buf;
}

inline void write_rfop(const std::string& path, const RfopBuffer& buf) {
  io_detail::write_file(path, encode_rfop(buf));
}
inline RfopBuffer read_rfop(const std::string& path) { return decode_rfop(io_detail::read_file(path)); }

// ---------------------------------------------------------------- candidates

inline Bytes encode_candidates(const std::vector<CandidateRing>& rings) {
  io_detail::Writer w;
  for (const auto& ring : rings)
    for (const auto& c : ring.entries()) {
      w.u32(c.encoded());
      w.f32(c.amplitude);
    }
  return w.take();
}

inline std::vector<CandidateRecord> decode_candidates(const Bytes& bytes) {
  if (bytes.size() % 8 != 0) throw FormatError("candidate file length not a multiple of 8", bytes.size());
  io_detail::Reader r(bytes);
  std::vector<CandidateRecord> out;
  out.reserve(bytes.size() / 8);
  while (r.remaining() > 0) {
    const std::uint32_t word = r.u32("candidate word");
    out.push_back(CandidateRecord::from_packed(word, r.f32("candidate amplitude")));
  }
  return out;
}

inline std::string candidates_csv(const std::vector<CandidateRing>& rings) {
  std::string s = "filter,plane,bin,amplitude,encoded\n";
  for (const auto& ring : rings)
    for (const auto& c : ring.entries())
      s += std::to_string(c.filter) + "," + std::to_string(c.plane) + "," + std::to_string(c.bin) + "," +
           io_detail::format_float(c.amplitude) + "," + std::to_string(c.encoded()) + "\n";
  return s;
}

inline std::vector<CandidateRecord> parse_candidates_csv(std::string_view text) {
  const auto ls = io_detail::lines(text);
  if (ls.empty() || ls[0] != "filter,plane,bin,amplitude,encoded")
    throw FormatError("missing candidate CSV header", 1);
  std::vector<CandidateRecord> out;
  for (std::size_t n = 1; n < ls.size(); ++n) {
    const auto f = io_detail::split(ls[n], ',');
    if (f.size() != 5) throw FormatError("expected 5 candidate fields", n + 1);
    CandidateRecord c{io_detail::parse_number<std::uint32_t>(f[0], n + 1),
                      io_detail::parse_number<std::uint32_t>(f[1], n + 1),
                      io_detail::parse_number<std::uint32_t>(f[2], n + 1),
                      io_detail::parse_number<float>(f[3], n + 1)};
    if (c.plane < 1 || c.plane > kMaxPlanes) throw FormatError("plane out of range", n + 1);
    if (io_detail::parse_number<std::uint32_t>(f[4], n + 1) != c.encoded())
      throw FormatError("encoded column disagrees with fields", n + 1);
    out.push_back(c);
  }
  return out;
}

inline void write_candidates(const std::string& path, const std::vector<CandidateRing>& rings,
                             bool csv = false) {
  if (csv)
    io_detail::write_text(path, candidates_csv(rings));
  else
    io_detail::write_file(path, encode_candidates(rings));
}

inline std::vector<CandidateRecord> read_candidates(const std::string& path, bool csv = false) {
  if (csv) return parse_candidates_csv(io_detail::read_text(path));
  return decode_candidates(io_detail::read_file(path));
}

// ---------------------------------------------------------------- thresholds

inline std::string thresholds_csv(const ThresholdArray& ta) {
  std::string s;
  for (std::uint32_t k = 1; k <= ta.n_hp(); ++k) {
    for (std::uint32_t i = 0; i < ta.n_rows(); ++i) {
      if (i) s += ",";
      s += io_detail::format_float(ta.at(k, i));
    }
    s += "\n";
  }
  return s;
}

inline ThresholdArray parse_thresholds_csv(std::string_view text) {
  const auto ls = io_detail::lines(text);
  if (ls.empty() || ls.size() > kMaxPlanes) throw FormatError("threshold CSV needs 1..8 lines", 1);
  const auto width = io_detail::split(ls[0], ',').size();
  ThresholdArray ta(static_cast<std::uint32_t>(ls.size()), static_cast<std::uint32_t>(width));
  for (std::uint32_t k = 0; k < ls.size(); ++k) {
    const auto f = io_detail::split(ls[k], ',');
    if (f.size() != width) throw FormatError("ragged threshold CSV", k + 1);
    for (std::uint32_t i = 0; i < width; ++i) {
      const float v = io_detail::parse_number<float>(f[i], k + 1);
      if (!std::isfinite(v)) throw FormatError("non-finite threshold", k + 1);
      ta.at(k + 1, i) = v;
    }
  }
  return ta;
}

inline void write_thresholds(const std::string& path, const ThresholdArray& ta) {
  io_detail::write_text(path, thresholds_csv(ta));
}
inline ThresholdArray read_thresholds(const std::string& path) {
  return parse_thresholds_csv(io_detail::read_text(path));
}

// ---------------------------------------------------------------- stats

inline constexpr std::string_view kStatsHeader =
    "strategy,loads,stores,hits,misses,ratio,analytic_loads,analytic_stores";

inline std::string stats_csv_row(Strategy s, const AccessStats& st, const GmaEntry& analytic) {
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.6f", st.ratio());
  return std::string(strategy_name(s)) + "," + std::to_string(st.global_loads) + "," +
         std::to_string(st.global_stores) + "," + std::to_string(st.local_hits) + "," +
         std::to_string(st.local_misses) + "," + ratio + "," + std::to_string(analytic.analytic_loads) + "," +
         std::to_string(analytic.analytic_stores);
}

// ---------------------------------------------------------------- generator

struct InjectionSpec {
  std::uint32_t row = 0;
  std::uint64_t bin = 0;
  float amplitude = 100.0f;
  std::uint64_t seed = 1;
  float noise_scale = 1.0f;
};

/// Seeded uniform noise in [0, noise_scale), then +amplitude at every
/// stretched source of (row, bin) for k = 1..n_hp. Noise uses the top 24 bits
/// of mt19937_64 so the plane is identical on every platform.
inline FopPlane generate_fop(const HsParams& params, const InjectionSpec& spec) {
  params.validate(false);
  if (spec.row >= params.n_rows || spec.bin >= params.n_chan)
    throw std::invalid_argument("injection target outside the plane");
  if (!(spec.amplitude > 0.0f) || !std::isfinite(spec.amplitude))
    throw std::invalid_argument("injection amplitude must be positive and finite");
  if (!(spec.noise_scale >= 0.0f) || !std::isfinite(spec.noise_scale))
    throw std::invalid_argument("noise scale must be non-negative and finite");
  FopPlane plane(params.n_rows, params.n_chan);
  std::mt19937_64 rng(spec.seed);
  for (auto& v : plane.data()) {
    const auto u = static_cast<float>(rng() >> 40);
    v = u * 0x1p-24f * spec.noise_scale;
  }
  for (std::uint32_t k = 1; k <= params.n_hp; ++k) {
    const auto s = stretch_index(spec.row, spec.bin, k);
    plane.at(s.row, s.col) += spec.amplitude;
  }
  return plane;
}

// ---------------------------------------------------------------- touch exports

inline Bytes touch_map_pgm(const TouchMap& map) {
  const std::string header =
      "P5\n" + std::to_string(map.cols()) + " " + std::to_string(map.rows()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  const std::uint64_t mx = std::max<std::uint64_t>(1, map.max());
  out.reserve(out.size() + map.counts().size());
  for (auto c : map.counts())
    out.push_back(static_cast<std::uint8_t>((std::uint64_t{c} * 255 + mx / 2) / mx));
  return out;
}

inline std::string touch_map_csv(const TouchMap& map) {
  std::string s;
  for (std::uint32_t r = 0; r < map.rows(); ++r) {
    for (std::uint64_t c = 0; c < map.cols(); ++c) {
      if (c) s += ",";
      s += std::to_string(map.at(r, c));
    }
    s += "\n";
  }
  return s;
}

inline std::string coverage_csv(const CoverageCurve& curve, std::size_t samples = 1000) {
  std::string s = "point_fraction,touch_fraction\n";
  char line[64];
  for (const auto& p : curve.sample(samples)) {
    std::snprintf(line, sizeof line, "%.8f,%.8f\n", p.point_fraction, p.touch_fraction);
    s += line;
  }
  return s;
}

}  // namespace harmsum
