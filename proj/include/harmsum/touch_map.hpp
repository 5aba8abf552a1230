// SPDX-License-Identifier: Apache-2.0
//
// touch_map.hpp
//
// How often each FOP point is read when computing all harmonic planes, and
// the cumulative coverage curve used to size the MultipleHP-H preload set.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "harmsum/core.hpp"
#include "harmsum/memory.hpp"

namespace harmsum {

class TouchMap {
 public:
  TouchMap() = default;
  TouchMap(std::uint32_t rows, std::uint64_t cols, std::uint32_t n_hp)
      : rows_(rows), cols_(cols), n_hp_(n_hp), counts_(static_cast<std::size_t>(rows) * cols, 0u) {}

  std::uint32_t rows() const { return rows_; }
  std::uint64_t cols() const { return cols_; }
  std::uint32_t n_hp() const { return n_hp_; }

  std::uint32_t at(std::uint32_t i, std::uint64_t j) const { return counts_[i * cols_ + j]; }
  std::uint32_t& at(std::uint32_t i, std::uint64_t j) { return counts_[i * cols_ + j]; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  std::uint64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }
  std::uint32_t max() const {
    return counts_.empty() ? 0u : *std::max_element(counts_.begin(), counts_.end());
  }

  bool matches(const HsParams& p) const { return rows_ == p.n_rows && cols_ == p.n_chan && n_hp_ == p.n_hp; }

  /// The n most-touched points, ordered by descending count with ties broken
  /// by ascending (row, col).
  std::vector<PointIndex> top_points(std::size_t n) const {
    std::vector<std::uint64_t> order(counts_.size());
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    auto before = [&](std::uint64_t a, std::uint64_t b) {
      return counts_[a] != counts_[b] ? counts_[a] > counts_[b] : a < b;
    };
    n = std::min(n, order.size());
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), before);
    order.resize(n);
    std::sort(order.begin(), order.end(), before);
    std::vector<PointIndex> out;
    out.reserve(n);
    for (auto idx : order) out.push_back({static_cast<std::uint32_t>(idx / cols_), idx % cols_});
    return out;
  }

  std::uint64_t touch_sum(std::span<const PointIndex> points) const {
    std::uint64_t s = 0;
    for (const auto& p : points) s += at(p.row, p.col);
    return s;
  }

 private:
  std::uint32_t rows_ = 0;
  std::uint64_t cols_ = 0;
  std::uint32_t n_hp_ = 0;
  std::vector<std::uint32_t> counts_;
};

namespace detail {
// |{x in [0, extent) : floor(x / k) == v}|
constexpr std::uint64_t preimage_size(std::uint64_t v, std::uint64_t k, std::uint64_t extent) {
  const std::uint64_t lo = v * k;
  if (lo >= extent) return 0;
  const std::uint64_t hi = std::min(extent, lo + k);
  return hi - lo;
}
}  // namespace detail

/// Closed-form preimage counting over k = 1..n_hp.
inline TouchMap compute_touch_map(const HsParams& params) {
  params.validate(false);
  TouchMap map(params.n_rows, params.n_chan, params.n_hp);
  for (std::uint32_t k = 1; k <= params.n_hp; ++k) {
    const std::uint32_t src_rows = (params.n_rows - 1) / k + 1;
    const std::uint64_t src_cols = (params.n_chan - 1) / k + 1;
    for (std::uint32_t r = 0; r < src_rows; ++r) {
      const auto rn = detail::preimage_size(r, k, params.n_rows);
      for (std::uint64_t c = 0; c < src_cols; ++c)
        map.at(r, c) += static_cast<std::uint32_t>(rn * detail::preimage_size(c, k, params.n_chan));
    }
  }
  return map;
}

/// Cumulative share of touches captured by the most-touched points.
class CoverageCurve {
 public:
  explicit CoverageCurve(const TouchMap& map) {
    std::vector<std::uint32_t> sorted(map.counts());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    cumulative_.resize(sorted.size());
    std::uint64_t acc = 0;
    for (std::size_t n = 0; n < sorted.size(); ++n) cumulative_[n] = acc += sorted[n];
    total_ = acc;
  }

  std::size_t points() const { return cumulative_.size(); }
  std::uint64_t total() const { return total_; }

  /// Touch share of the n most-touched points.
  double coverage_of(std::size_t n) const {
    if (n == 0 || total_ == 0) return 0.0;
    n = std::min(n, cumulative_.size());
    return static_cast<double>(cumulative_[n - 1]) / static_cast<double>(total_);
  }

  /// Smallest number of points whose touches reach at least share p.
  std::size_t points_for_coverage(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("coverage share must be in (0, 1]");
    const double target = p * static_cast<double>(total_);
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target,
                               [](std::uint64_t c, double t) { return static_cast<double>(c) < t; });
    return static_cast<std::size_t>(it - cumulative_.begin()) + 1;
  }

  double fraction_for_coverage(double p) const {
    return static_cast<double>(points_for_coverage(p)) / static_cast<double>(points());
  }

  struct Sample {
    double point_fraction;
    double touch_fraction;
  };
  /// Up to `n` evenly spaced samples plus the endpoint.
  std::vector<Sample> sample(std::size_t n) const {
    std::vector<Sample> out;
    if (cumulative_.empty() || n == 0) return out;
    const std::size_t step = std::max<std::size_t>(1, cumulative_.size() / n);
    for (std::size_t m = step; m < cumulative_.size(); m += step)
      out.push_back({static_cast<double>(m) / points(), coverage_of(m)});
    out.push_back({1.0, coverage_of(points())});
    return out;
  }

 private:
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

inline CoverageCurve coverage_curve(const TouchMap& map) { return CoverageCurve(map); }

struct IndexRange {
  std::uint64_t begin;
  std::uint64_t end;  // exclusive
};

inline double region_touch_share(const TouchMap& map, IndexRange rows, IndexRange cols) {
  if (rows.begin > rows.end || rows.end > map.rows() || cols.begin > cols.end || cols.end > map.cols())
    throw std::out_of_range("region outside touch map");
  std::uint64_t s = 0;
  for (auto r = rows.begin; r < rows.end; ++r)
    for (auto c = cols.begin; c < cols.end; ++c) s += map.at(static_cast<std::uint32_t>(r), c);
  const auto total = map.total();
  return total == 0 ? 0.0 : static_cast<double>(s) / static_cast<double>(total);
}

}  // namespace harmsum
