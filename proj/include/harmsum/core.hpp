// SPDX-License-Identifier: Apache-2.0
//
// core.hpp
//
// Domain types shared by every harmonic-summing engine: problem parameters,
// the filter-output plane, thresholds, candidate records and the last-N
// candidate ring, plus the stretch/sum recurrences.

#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmsum {

inline constexpr std::uint32_t kMaxPlanes = 8;        // 3-bit packed plane field
inline constexpr std::uint32_t kMaxFilter = 1u << 7;  // 7-bit filter field
inline constexpr std::uint32_t kMaxBin = 1u << 21;    // 21-bit bin field
inline constexpr std::uint32_t kMaxRows = 85;

struct HsParams {
  std::uint32_t n_rows = 42;
  std::uint64_t n_chan = 4096;
  std::uint32_t n_hp = 8;
  std::uint32_t n_cand = 200;

  std::uint64_t plane_size() const { return std::uint64_t{n_rows} * n_chan; }

  /// Throws std::invalid_argument naming the first violated bound. The bin
  /// limit only applies when candidates are going to be packed.
  void validate(bool packed_output = true) const {
    if (n_rows < 1 || n_rows > kMaxRows)
      throw std::invalid_argument("n_rows must be in [1, 85], got " + std::to_string(n_rows));
    if (n_chan < 1) throw std::invalid_argument("n_chan must be >= 1");
    if (packed_output && n_chan > kMaxBin)
      throw std::invalid_argument("n_chan must be <= 2^21 for packed candidate output");
    if (n_hp < 1 || n_hp > kMaxPlanes)
      throw std::invalid_argument("n_hp must be in [1, 8], got " + std::to_string(n_hp));
    if (n_cand < 1) throw std::invalid_argument("n_cand must be >= 1");
  }

  friend bool operator==(const HsParams&, const HsParams&) = default;
};

/// Dense row-major 2-D array of 32-bit amplitudes. Used for the FOP itself and
/// for harmonic planes retained in debug mode.
class FopPlane {
 public:
  FopPlane() = default;
  FopPlane(std::uint32_t rows, std::uint64_t cols, float fill = 0.0f)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  FopPlane(std::uint32_t rows, std::uint64_t cols, std::vector<float> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
      throw std::invalid_argument("plane data length does not match dimensions");
  }

  std::uint32_t rows() const { return rows_; }
  std::uint64_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  float& at(std::uint32_t i, std::uint64_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  float at(std::uint32_t i, std::uint64_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& storage() { return data_; }

  bool matches(const HsParams& p) const { return rows_ == p.n_rows && cols_ == p.n_chan; }

  friend bool operator==(const FopPlane&, const FopPlane&) = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint64_t cols_ = 0;
  std::vector<float> data_;
};

/// Per-plane, per-row detection thresholds. Planes are addressed 1-based.
class ThresholdArray {
 public:
  ThresholdArray() = default;
  ThresholdArray(std::uint32_t n_hp, std::uint32_t n_rows, float fill = 0.0f)
      : n_hp_(n_hp), n_rows_(n_rows), data_(static_cast<std::size_t>(n_hp) * n_rows, fill) {}

  std::uint32_t n_hp() const { return n_hp_; }
  std::uint32_t n_rows() const { return n_rows_; }

  float& at(std::uint32_t plane, std::uint32_t row) {
    assert(plane >= 1 && plane <= n_hp_ && row < n_rows_);
    return data_[(plane - 1) * n_rows_ + row];
  }
  float at(std::uint32_t plane, std::uint32_t row) const {
    assert(plane >= 1 && plane <= n_hp_ && row < n_rows_);
    return data_[(plane - 1) * n_rows_ + row];
  }

  void set_plane(std::uint32_t plane, float value) {
    for (std::uint32_t r = 0; r < n_rows_; ++r) at(plane, r) = value;
  }

  bool matches(const HsParams& p) const { return n_hp_ == p.n_hp && n_rows_ == p.n_rows; }

  std::span<const float> data() const { return data_; }

 private:
  std::uint32_t n_hp_ = 0;
  std::uint32_t n_rows_ = 0;
  std::vector<float> data_;
};

struct StretchedIndex {
  std::uint32_t row;
  std::uint64_t col;
  friend bool operator==(const StretchedIndex&, const StretchedIndex&) = default;
};

constexpr StretchedIndex stretch_index(std::uint32_t i, std::uint64_t j, std::uint32_t k) {
  assert(k >= 1);
  return {i / k, j / k};
}

/// HP_1..HP_n_hp at (i, j), accumulated in float in ascending plane order.
/// Every engine uses exactly this order so their planes are bit-identical.
inline std::array<float, kMaxPlanes> harmonic_chain(const FopPlane& fop, std::uint32_t i, std::uint64_t j,
                                                    std::uint32_t n_hp) {
  assert(n_hp >= 1 && n_hp <= kMaxPlanes);
  std::array<float, kMaxPlanes> chain{};
  float acc = 0.0f;
  for (std::uint32_t k = 1; k <= n_hp; ++k) {
    const auto s = stretch_index(i, j, k);
    acc = acc + fop.at(s.row, s.col);
    chain[k - 1] = acc;
  }
  return chain;
}

/// Strict comparison: a value equal to its threshold is not a detection.
constexpr bool detect(float value, float threshold) { return value > threshold; }

inline std::uint32_t encode_candidate(std::uint32_t filter, std::uint32_t packed_plane, std::uint32_t bin) {
  if (filter >= kMaxFilter) throw std::out_of_range("candidate filter index exceeds 7 bits");
  if (packed_plane >= kMaxPlanes) throw std::out_of_range("candidate plane index exceeds 3 bits");
  if (bin >= kMaxBin) throw std::out_of_range("candidate bin index exceeds 21 bits");
  return (filter << 24) | (packed_plane << 21) | bin;
}

struct PackedFields {
  std::uint32_t filter;
  std::uint32_t packed_plane;
  std::uint32_t bin;
  friend bool operator==(const PackedFields&, const PackedFields&) = default;
};

constexpr PackedFields decode_candidate(std::uint32_t word) {
  return {(word >> 24) & 0x7Fu, (word >> 21) & 0x7u, word & (kMaxBin - 1)};
}

struct CandidateRecord {
  std::uint32_t filter = 0;
  std::uint32_t plane = 1;  // 1-based; packed as plane - 1
  std::uint32_t bin = 0;
  float amplitude = 0.0f;

  std::uint32_t encoded() const { return encode_candidate(filter, plane - 1, bin); }

  static CandidateRecord from_packed(std::uint32_t word, float amplitude) {
    const auto f = decode_candidate(word);
    return {f.filter, f.packed_plane + 1, f.bin, amplitude};
  }

  friend bool operator==(const CandidateRecord&, const CandidateRecord&) = default;
};

/// Fixed-capacity buffer holding the most recent detections of one plane.
class CandidateRing {
 public:
  explicit CandidateRing(std::size_t capacity = 200) : slots_(capacity) {
    if (capacity == 0) throw std::invalid_argument("candidate ring capacity must be >= 1");
  }

  void push(const CandidateRecord& c) {
    slots_[next_] = c;
    next_ = (next_ + 1) % slots_.size();
    ++total_pushed_;
  }

  std::size_t capacity() const { return slots_.size(); }
  std::size_t size() const {
    return total_pushed_ < slots_.size() ? static_cast<std::size_t>(total_pushed_) : slots_.size();
  }
  bool empty() const { return total_pushed_ == 0; }
  std::uint64_t total_pushed() const { return total_pushed_; }
  bool overflowed() const { return total_pushed_ > slots_.size(); }

  /// Retained entries, oldest first.
  std::vector<CandidateRecord> entries() const {
    std::vector<CandidateRecord> out;
    out.reserve(size());
    const std::size_t n = size();
    const std::size_t start = (next_ + slots_.size() - n) % slots_.size();
    for (std::size_t t = 0; t < n; ++t) out.push_back(slots_[(start + t) % slots_.size()]);
    return out;
  }

  /// Appends another ring's retained entries as if they had been pushed here.
  /// total_pushed accumulates the other ring's full count.
  void append(const CandidateRing& other) {
    for (const auto& c : other.entries()) {
      slots_[next_] = c;
      next_ = (next_ + 1) % slots_.size();
    }
    total_pushed_ += other.total_pushed_;
  }

 private:
  std::vector<CandidateRecord> slots_;
  std::size_t next_ = 0;
  std::uint64_t total_pushed_ = 0;
};

}  // namespace harmsum
