// SPDX-License-Identifier: Apache-2.0
//
// memory.hpp
//
// Instrumented stand-ins for off-chip (global) and on-chip (local) memory.
// One access is one 32-bit point.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "harmsum/core.hpp"

namespace harmsum {

struct AccessStats {
  std::uint64_t global_loads = 0;
  std::uint64_t global_stores = 0;
  std::uint64_t local_hits = 0;
  std::uint64_t local_misses = 0;
  // Loads issued by a preload phase; included in global_loads.
  std::uint64_t preload_loads = 0;
  std::uint64_t fop_size = 0;

  std::uint64_t compute_loads() const { return global_loads - preload_loads; }

  double ratio() const {
    if (fop_size == 0) return 0.0;
    return static_cast<double>(global_loads + global_stores) / static_cast<double>(fop_size);
  }

  AccessStats& operator+=(const AccessStats& o) {
    global_loads += o.global_loads;
    global_stores += o.global_stores;
    local_hits += o.local_hits;
    local_misses += o.local_misses;
    preload_loads += o.preload_loads;
    return *this;
  }

  friend bool operator==(const AccessStats&, const AccessStats&) = default;
};

/// Counting wrapper over a 2-D array. Copies made through fork() share the
/// backing data and start with zero counters, so disjoint-range workers can
/// count independently and be summed afterwards.
class GlobalStore {
 public:
  GlobalStore(std::uint32_t rows, std::uint64_t cols)
      : rows_(rows),
        cols_(cols),
        data_(std::make_shared<std::vector<float>>(static_cast<std::size_t>(rows) * cols, 0.0f)) {}

  explicit GlobalStore(const FopPlane& plane)
      : rows_(plane.rows()),
        cols_(plane.cols()),
        data_(std::make_shared<std::vector<float>>(plane.data().begin(), plane.data().end())) {}

  GlobalStore(std::uint32_t rows, std::uint64_t cols, std::vector<float> data)
      : rows_(rows), cols_(cols), data_(std::make_shared<std::vector<float>>(std::move(data))) {
    if (data_->size() != static_cast<std::size_t>(rows) * cols)
      throw std::invalid_argument("global store data length does not match dimensions");
  }

  std::uint32_t rows() const { return rows_; }
  std::uint64_t cols() const { return cols_; }
  std::size_t size() const { return data_->size(); }

  float load(std::uint32_t i, std::uint64_t j) {
    assert(i < rows_ && j < cols_);
    const std::size_t idx = i * cols_ + j;
    ++loads_;
    if (histogram_) ++(*histogram_)[idx];
    return (*data_)[idx];
  }

  /// Flat-address load, used for streamed buffers.
  float load_flat(std::size_t idx) {
    assert(idx < data_->size());
    ++loads_;
    if (histogram_) ++(*histogram_)[idx];
    return (*data_)[idx];
  }

  void store(std::uint32_t i, std::uint64_t j, float v) {
    assert(i < rows_ && j < cols_);
    ++stores_;
    (*data_)[i * cols_ + j] = v;
  }

  std::uint64_t load_count() const { return loads_; }
  std::uint64_t store_count() const { return stores_; }
  void reset_counters() {
    loads_ = 0;
    stores_ = 0;
    if (histogram_) std::fill(histogram_->begin(), histogram_->end(), 0u);
  }

  /// Records a per-cell load count alongside the totals.
  void enable_load_histogram() {
    histogram_ = std::make_shared<std::vector<std::uint32_t>>(data_->size(), 0u);
  }
  const std::vector<std::uint32_t>* load_histogram() const { return histogram_.get(); }

  GlobalStore fork() const {
    GlobalStore g(*this);
    g.loads_ = 0;
    g.stores_ = 0;
    g.histogram_.reset();
    return g;
  }
  void absorb(const GlobalStore& worker) {
    loads_ += worker.loads_;
    stores_ += worker.stores_;
  }

  /// Uncounted view of the backing data (for setup, snapshots and tests).
  std::span<const float> peek() const { return *data_; }
  float peek(std::uint32_t i, std::uint64_t j) const { return (*data_)[i * cols_ + j]; }

 private:
  std::uint32_t rows_;
  std::uint64_t cols_;
  std::shared_ptr<std::vector<float>> data_;
  std::shared_ptr<std::vector<std::uint32_t>> histogram_;
  std::uint64_t loads_ = 0;
  std::uint64_t stores_ = 0;
};

struct PointIndex {
  std::uint32_t row;
  std::uint64_t col;
  friend bool operator==(const PointIndex&, const PointIndex&) = default;
  friend auto operator<=>(const PointIndex&, const PointIndex&) = default;
};

/// Static scratchpad: filled once by preload(), never replaced.
class LocalStore {
 public:
  explicit LocalStore(std::size_t capacity) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t resident_count() const { return resident_ ? resident_->size() : 0; }
  bool is_resident(std::uint32_t i, std::uint64_t j) const {
    return resident_ && resident_->contains(key(i, j));
  }

  void preload(std::span<const PointIndex> points, GlobalStore& source) {
    if (points.size() > capacity_) throw std::length_error("preload set exceeds local store capacity");
    auto table = std::make_shared<Table>();
    table->reserve(points.size());
    for (const auto& p : points) table->emplace(key(p.row, p.col), source.load(p.row, p.col));
    resident_ = std::move(table);
  }

  float cached_load(GlobalStore& global, std::uint32_t i, std::uint64_t j) {
    if (resident_) {
      if (auto it = resident_->find(key(i, j)); it != resident_->end()) {
        ++hits_;
        return it->second;
      }
    }
    ++misses_;
    return global.load(i, j);
  }

  std::uint64_t hit_count() const { return hits_; }
  std::uint64_t miss_count() const { return misses_; }

  LocalStore fork() const {
    LocalStore l(*this);
    l.hits_ = 0;
    l.misses_ = 0;
    return l;
  }
  void absorb(const LocalStore& worker) {
    hits_ += worker.hits_;
    misses_ += worker.misses_;
  }

 private:
  using Table = std::unordered_map<std::uint64_t, float>;
  static std::uint64_t key(std::uint32_t i, std::uint64_t j) { return (std::uint64_t{i} << 40) | j; }

  std::size_t capacity_;
  std::shared_ptr<const Table> resident_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace harmsum
