// SPDX-License-Identifier: Apache-2.0
//
// reorder.hpp
//
// Workgroup geometry for the necessary-points and reordered-FOP strategies.
// A workgroup owns an aligned block of n_col output columns; for each plane k
// it needs the FOP window rows [0, (n_rows-1)/k] x cols [a/k, (a+n_col-1)/k].

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmsum/core.hpp"

namespace harmsum {

constexpr std::uint64_t distinct_rows(std::uint32_t k, std::uint64_t n_rows) {
  return n_rows == 0 ? 0 : (n_rows - 1) / k + 1;
}

/// Stretched-column window needed by plane k for the block starting at column a.
struct ColumnWindow {
  std::uint64_t first;
  std::uint64_t count;
};

constexpr ColumnWindow block_window(std::uint32_t k, std::uint64_t block_start, std::uint64_t n_col) {
  const std::uint64_t first = block_start / k;
  return {first, (block_start + n_col - 1) / k - first + 1};
}

inline void require_divisible(std::uint64_t n_chan, std::uint64_t n_col) {
  if (n_col == 0 || n_chan % n_col != 0)
    throw std::invalid_argument("n_chan (" + std::to_string(n_chan) +
                                ") must be divisible by columns per workgroup (" + std::to_string(n_col) +
                                ")");
}

/// Worst case over all aligned blocks of the distinct stretched columns for plane k.
inline std::uint64_t max_distinct_cols(std::uint32_t k, std::uint64_t n_col, std::uint64_t n_chan) {
  require_divisible(n_chan, n_col);
  std::uint64_t best = 0;
  for (std::uint64_t a = 0; a < n_chan; a += n_col) best = std::max(best, block_window(k, a, n_col).count);
  return best;
}

/// Exact number of points block m loads (sum of per-plane windows).
inline std::uint64_t block_demand(const HsParams& params, std::uint64_t n_col, std::uint64_t block) {
  std::uint64_t d = 0;
  for (std::uint32_t k = 1; k <= params.n_hp; ++k)
    d += distinct_rows(k, params.n_rows) * block_window(k, block * n_col, n_col).count;
  return d;
}

struct DemandSummary {
  std::uint64_t worst;  // planned per-workgroup demand
  std::uint64_t total;  // sum of exact per-block demands
  std::uint64_t n_workgroups;
  double mean_per_column() const {
    return n_workgroups == 0
               ? 0.0
               : static_cast<double>(total) / static_cast<double>(n_workgroups) / static_cast<double>(n_col);
  }
  std::uint64_t n_col;
};

/// Planned demand: per plane, distinct rows times the worst-case column window.
inline std::uint64_t workgroup_demand(const HsParams& params, std::uint64_t n_col) {
  std::uint64_t d = 0;
  for (std::uint32_t k = 1; k <= params.n_hp; ++k)
    d += distinct_rows(k, params.n_rows) * max_distinct_cols(k, n_col, params.n_chan);
  return d;
}

inline DemandSummary demand_summary(const HsParams& params, std::uint64_t n_col) {
  require_divisible(params.n_chan, n_col);
  DemandSummary s{workgroup_demand(params, n_col), 0, params.n_chan / n_col, n_col};
  for (std::uint64_t m = 0; m < s.n_workgroups; ++m) s.total += block_demand(params, n_col, m);
  return s;
}

struct RfopLayout {
  std::uint32_t n_rows = 0;
  std::uint64_t n_chan = 0;
  std::uint32_t n_hp = 0;
  std::uint32_t n_col = 1;
  std::uint32_t n_p_wi = 1;
  std::uint32_t n_lp_cc = 0;
  bool pow2_opt = false;
  std::uint64_t demand = 0;
  std::uint64_t n_workgroups = 0;

  /// Work-items per workgroup, n_col * n_rows / n_p_wi (may be fractional).
  double s_workgroup() const { return static_cast<double>(n_col) * n_rows / static_cast<double>(n_p_wi); }
  std::uint64_t s_workgroup_ceil() const { return (std::uint64_t{n_col} * n_rows + n_p_wi - 1) / n_p_wi; }

  /// First slot of workgroup w. Segments tile the stream at the exact rational
  /// rate n_lp_cc * s_workgroup, so lengths differ by at most one slot when
  /// s_workgroup is fractional.
  std::uint64_t segment_offset(std::uint64_t w) const { return w * n_lp_cc * n_col * n_rows / n_p_wi; }
  std::uint64_t segment_length(std::uint64_t w) const { return segment_offset(w + 1) - segment_offset(w); }
  std::uint64_t total_slots() const { return segment_offset(n_workgroups); }

  double load_ratio() const { return static_cast<double>(n_lp_cc) / n_p_wi; }

  bool matches(const HsParams& p) const { return n_rows == p.n_rows && n_chan == p.n_chan && n_hp == p.n_hp; }

  friend bool operator==(const RfopLayout&, const RfopLayout&) = default;
};

constexpr std::uint32_t next_pow2(std::uint32_t v) { return std::bit_ceil(v); }

inline RfopLayout plan_layout(const HsParams& params, std::uint32_t n_col, std::uint32_t n_p_wi,
                              bool pow2_opt) {
  params.validate(false);
  if (n_p_wi == 0) throw std::invalid_argument("points per work-item must be >= 1");
  require_divisible(params.n_chan, n_col);
  RfopLayout l;
  l.n_rows = params.n_rows;
  l.n_chan = params.n_chan;
  l.n_hp = params.n_hp;
  l.n_col = n_col;
  l.n_p_wi = n_p_wi;
  l.pow2_opt = pow2_opt;
  l.demand = workgroup_demand(params, n_col);
  l.n_workgroups = params.n_chan / n_col;
  const std::uint64_t points = std::uint64_t{n_col} * params.n_rows;
  const std::uint64_t lp = (l.demand * n_p_wi + points - 1) / points;
  l.n_lp_cc = static_cast<std::uint32_t>(lp);
  if (pow2_opt) l.n_lp_cc = next_pow2(l.n_lp_cc);
  return l;
}

/// Source of one rFOP slot. plane == 0 marks padding.
struct SlotSource {
  std::uint32_t plane = 0;
  std::uint32_t row = 0;
  std::uint64_t col = 0;
  bool is_pad() const { return plane == 0; }
  friend bool operator==(const SlotSource&, const SlotSource&) = default;
};

struct RfopBuffer {
  RfopLayout layout;
  std::vector<float> data;
  std::vector<SlotSource> index;
};

inline constexpr float kPadValue = 0.0f;

namespace detail {
template <typename Emit>
void for_each_needed_point(const RfopLayout& l, std::uint64_t block, Emit&& emit) {
  const std::uint64_t a = block * l.n_col;
  for (std::uint32_t k = 1; k <= l.n_hp; ++k) {
    const auto rows = distinct_rows(k, l.n_rows);
    const auto win = block_window(k, a, l.n_col);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint64_t c = win.first; c < win.first + win.count; ++c) emit(k, r, c);
  }
}
}  // namespace detail

/// Lays out every workgroup's needed points contiguously: plane-major, then row,
/// then column, followed by zero padding up to the segment length.
inline RfopBuffer build_rfop(const FopPlane& fop, const RfopLayout& layout) {
  if (fop.rows() != layout.n_rows || fop.cols() != layout.n_chan)
    throw std::invalid_argument("FOP dimensions do not match the rFOP layout");
  RfopBuffer buf;
  buf.layout = layout;
  buf.data.assign(layout.total_slots(), kPadValue);
  buf.index.assign(layout.total_slots(), SlotSource{});
  for (std::uint64_t w = 0; w < layout.n_workgroups; ++w) {
    std::uint64_t slot = layout.segment_offset(w);
    const std::uint64_t end = slot + layout.segment_length(w);
    detail::for_each_needed_point(layout, w, [&](std::uint32_t k, std::uint32_t r, std::uint64_t c) {
      if (slot >= end) throw std::logic_error("workgroup demand exceeds segment length");
      buf.data[slot] = fop.at(r, c);
      buf.index[slot] = {k, r, c};
      ++slot;
    });
  }
  return buf;
}

}  // namespace harmsum
