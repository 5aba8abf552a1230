// SPDX-License-Identifier: Apache-2.0
//
// engines.hpp
//
// The five harmonic-summing strategies. Each one computes the same planes
// HP_1..HP_n_hp (bit-identically) and differs only in how it touches the
// simulated global memory:
//
//   singlehp   one plane at a time, HP_{k-1} and HP_k kept in global memory
//   mhp-naive  all planes per output point, n_hp FOP loads per point
//   mhp-h      as naive, with the most-touched points pinned on chip
//   mhp-n      per workgroup, each needed point loaded once into a buffer
//   mhp-r      as mhp-n, streamed from a reordered, padded FOP

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "harmsum/core.hpp"
#include "harmsum/memory.hpp"
#include "harmsum/reorder.hpp"
#include "harmsum/touch_map.hpp"

namespace harmsum {

enum class Strategy { SingleHp, MhpNaive, MhpH, MhpN, MhpR };

inline constexpr Strategy kAllStrategies[] = {Strategy::SingleHp, Strategy::MhpNaive, Strategy::MhpH,
                                              Strategy::MhpN, Strategy::MhpR};

constexpr std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::SingleHp:
      return "singlehp";
    case Strategy::MhpNaive:
      return "mhp-naive";
    case Strategy::MhpH:
      return "mhp-h";
    case Strategy::MhpN:
      return "mhp-n";
    case Strategy::MhpR:
      return "mhp-r";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  return std::nullopt;
}

struct EngineOutput {
  std::vector<CandidateRing> candidates;  // one per plane, index k-1
  AccessStats stats;
  std::optional<std::vector<FopPlane>> final_planes;
};

struct EngineOptions {
  bool debug_planes = false;
  // Worker count for the MultipleHP engines; 1 is the canonical sequential mode.
  unsigned threads = 1;
};

struct PreloadConfig {
  std::size_t preload_size = 0;
  // Defaults to preload_size.
  std::optional<std::size_t> capacity{};
  // Explicit preload set; replaces the top-touched selection (size must equal preload_size).
  std::optional<std::vector<PointIndex>> points{};
};

namespace detail {

inline void check_inputs(const HsParams& params, std::uint32_t rows, std::uint64_t cols,
                         const ThresholdArray& ta) {
  params.validate();
  if (rows != params.n_rows || cols != params.n_chan)
    throw std::invalid_argument("FOP dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " do not match parameters " + std::to_string(params.n_rows) + "x" +
                                std::to_string(params.n_chan));
  if (!ta.matches(params)) throw std::invalid_argument("threshold array does not match parameters");
}

inline std::vector<CandidateRing> make_rings(const HsParams& params) {
  return std::vector<CandidateRing>(params.n_hp, CandidateRing(params.n_cand));
}

inline std::optional<std::vector<FopPlane>> make_planes(const HsParams& params, bool enabled) {
  if (!enabled) return std::nullopt;
  return std::vector<FopPlane>(params.n_hp, FopPlane(params.n_rows, params.n_chan));
}

struct Sink {
  const ThresholdArray& ta;
  std::vector<CandidateRing>& rings;
  std::vector<FopPlane>* planes;

  void emit(std::uint32_t k, std::uint32_t i, std::uint64_t j, float v) const {
    if (planes) (*planes)[k - 1].at(i, j) = v;
    if (detect(v, ta.at(k, i))) rings[k - 1].push({i, k, static_cast<std::uint32_t>(j), v});
  }
};

inline unsigned resolve_threads(unsigned requested, std::uint64_t units) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(units, 1)));
}

/// Splits [0, units) into contiguous chunks, runs body(begin, end, rings) per
/// chunk and merges the rings in chunk order. Chunk order equals canonical
/// order, so the merged rings match a sequential run.
template <typename Body>
std::vector<CandidateRing> run_chunked(const HsParams& params, std::uint64_t units, unsigned threads,
                                       Body&& body) {
  const unsigned n = resolve_threads(threads, units);
  if (n == 1) {
    auto rings = make_rings(params);
    body(std::uint64_t{0}, units, rings, 0u);
    return rings;
  }
  std::vector<std::vector<CandidateRing>> partial(n, make_rings(params));
  std::vector<std::thread> workers;
  workers.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    const std::uint64_t b = units * w / n;
    const std::uint64_t e = units * (w + 1) / n;
    workers.emplace_back([&, b, e, w] { body(b, e, partial[w], w); });
  }
  for (auto& t : workers) t.join();
  auto rings = make_rings(params);
  for (const auto& p : partial)
    for (std::uint32_t k = 0; k < params.n_hp; ++k) rings[k].append(p[k]);
  return rings;
}

/// Per-plane FOP windows needed by one workgroup.
class WorkgroupBuffer {
 public:
  WorkgroupBuffer(const HsParams& params, std::uint64_t n_col)
      : params_(params), n_col_(n_col), windows_(params.n_hp), values_(params.n_hp) {}

  void reset(std::uint64_t block) {
    block_start_ = block * n_col_;
    for (std::uint32_t k = 1; k <= params_.n_hp; ++k) {
      windows_[k - 1] = block_window(k, block_start_, n_col_);
      values_[k - 1].assign(distinct_rows(k, params_.n_rows) * windows_[k - 1].count, 0.0f);
    }
  }

  std::uint64_t block_start() const { return block_start_; }
  const ColumnWindow& window(std::uint32_t k) const { return windows_[k - 1]; }

  float& slot(std::uint32_t k, std::uint32_t r, std::uint64_t c) {
    const auto& w = windows_[k - 1];
    return values_[k - 1][r * w.count + (c - w.first)];
  }
  bool contains(std::uint32_t k, std::uint32_t r, std::uint64_t c) const {
    if (k < 1 || k > params_.n_hp) return false;
    const auto& w = windows_[k - 1];
    return r < distinct_rows(k, params_.n_rows) && c >= w.first && c < w.first + w.count;
  }

  /// Computes every plane for the block's columns, pushing in (j, i, k) order.
  void compute(const Sink& sink) {
    for (std::uint64_t j = block_start_; j < block_start_ + n_col_; ++j) {
      for (std::uint32_t i = 0; i < params_.n_rows; ++i) {
        float acc = 0.0f;
        for (std::uint32_t k = 1; k <= params_.n_hp; ++k) {
          acc = acc + slot(k, i / k, j / k);
          sink.emit(k, i, j, acc);
        }
      }
    }
  }

 private:
  HsParams params_;
  std::uint64_t n_col_;
  std::uint64_t block_start_ = 0;
  std::vector<ColumnWindow> windows_;
  std::vector<std::vector<float>> values_;
};

}  // namespace detail

/// Plane-at-a-time traversal (k, then rows, then channels). HP_{k-1} is read
/// from and HP_k written to global memory, ping-ponging two plane buffers.
/// With dedup_stretch, each distinct stretched FOP point of a plane is loaded
/// once. Always sequential.
inline EngineOutput run_single_hp(const HsParams& params, GlobalStore& fop, const ThresholdArray& ta,
                                  bool dedup_stretch, const EngineOptions& opts = {}) {
  detail::check_inputs(params, fop.rows(), fop.cols(), ta);
  const std::uint32_t R = params.n_rows;
  const std::uint64_t C = params.n_chan;

  EngineOutput out{detail::make_rings(params), {}, detail::make_planes(params, opts.debug_planes)};
  const detail::Sink sink{ta, out.candidates, out.final_planes ? &*out.final_planes : nullptr};

  const std::uint64_t fop_loads0 = fop.load_count();
  const std::uint64_t fop_stores0 = fop.store_count();

  for (std::uint32_t i = 0; i < R; ++i)
    for (std::uint64_t j = 0; j < C; ++j) sink.emit(1, i, j, fop.load(i, j));

  GlobalStore ping(R, C), pong(R, C);
  GlobalStore* prev = &fop;
  GlobalStore* cur = &ping;
  std::vector<float> dedup_values;
  std::vector<bool> dedup_seen;
  for (std::uint32_t k = 2; k <= params.n_hp; ++k) {
    const std::uint64_t sr = distinct_rows(k, R);
    const std::uint64_t sc = (C - 1) / k + 1;
    if (dedup_stretch) {
      dedup_values.assign(sr * sc, 0.0f);
      dedup_seen.assign(sr * sc, false);
    }
    for (std::uint32_t i = 0; i < R; ++i) {
      for (std::uint64_t j = 0; j < C; ++j) {
        const float h = prev->load(i, j);
        const auto s = stretch_index(i, j, k);
        float sv;
        if (dedup_stretch) {
          const std::size_t d = s.row * sc + s.col;
          if (!dedup_seen[d]) {
            dedup_values[d] = fop.load(s.row, s.col);
            dedup_seen[d] = true;
          }
          sv = dedup_values[d];
        } else {
          sv = fop.load(s.row, s.col);
        }
        const float v = h + sv;
        cur->store(i, j, v);
        sink.emit(k, i, j, v);
      }
    }
    prev = cur;
    cur = (cur == &ping) ? &pong : &ping;
  }

  out.stats.global_loads = fop.load_count() - fop_loads0 + ping.load_count() + pong.load_count();
  out.stats.global_stores = fop.store_count() - fop_stores0 + ping.store_count() + pong.store_count();
  out.stats.fop_size = params.plane_size();
  return out;
}

/// Channels outer, rows inner, planes innermost; every stretched point is
/// fetched from global memory, nothing is stored.
inline EngineOutput run_multiple_hp_naive(const HsParams& params, GlobalStore& fop, const ThresholdArray& ta,
                                          const EngineOptions& opts = {}) {
  detail::check_inputs(params, fop.rows(), fop.cols(), ta);
  EngineOutput out{{}, {}, detail::make_planes(params, opts.debug_planes)};
  auto* planes = out.final_planes ? &*out.final_planes : nullptr;
  const unsigned n = detail::resolve_threads(opts.threads, params.n_chan);
  // Sequential mode counts straight into the caller's store so an attached
  // load histogram sees every access.
  std::vector<GlobalStore> stores;
  if (n > 1)
    for (unsigned w = 0; w < n; ++w) stores.push_back(fop.fork());
  const std::uint64_t before = fop.load_count();

  out.candidates = detail::run_chunked(
      params, params.n_chan, n,
      [&](std::uint64_t b, std::uint64_t e, std::vector<CandidateRing>& rings, unsigned w) {
        GlobalStore& g = n == 1 ? fop : stores[w];
        const detail::Sink sink{ta, rings, planes};
        for (std::uint64_t j = b; j < e; ++j) {
          for (std::uint32_t i = 0; i < params.n_rows; ++i) {
            float acc = 0.0f;
            for (std::uint32_t k = 1; k <= params.n_hp; ++k) {
              const auto s = stretch_index(i, j, k);
              acc = acc + g.load(s.row, s.col);
              sink.emit(k, i, j, acc);
            }
          }
        }
      });

  for (const auto& s : stores) fop.absorb(s);
  out.stats.global_loads = fop.load_count() - before;
  out.stats.fop_size = params.plane_size();
  return out;
}

/// Naive traversal with the preload_size most-touched FOP points pinned in a
/// static local store. The preload phase completes before compute starts.
inline EngineOutput run_multiple_hp_h(const HsParams& params, GlobalStore& fop, const ThresholdArray& ta,
                                      const PreloadConfig& cfg, const TouchMap& touch,
                                      const EngineOptions& opts = {}) {
  detail::check_inputs(params, fop.rows(), fop.cols(), ta);
  if (!touch.matches(params)) throw std::invalid_argument("touch map does not match parameters");
  const std::size_t capacity = cfg.capacity.value_or(cfg.preload_size);
  if (cfg.preload_size > capacity) throw std::length_error("preload size exceeds local store capacity");

  LocalStore local(capacity);
  const std::uint64_t before = fop.load_count();
  if (cfg.points && cfg.points->size() != cfg.preload_size)
    throw std::invalid_argument("explicit preload set size differs from preload_size");
  const auto points = cfg.points ? *cfg.points : touch.top_points(cfg.preload_size);
  local.preload(points, fop);
  const std::uint64_t preload_loads = fop.load_count() - before;

  EngineOutput out{{}, {}, detail::make_planes(params, opts.debug_planes)};
  auto* planes = out.final_planes ? &*out.final_planes : nullptr;
  const unsigned n = detail::resolve_threads(opts.threads, params.n_chan);
  std::vector<GlobalStore> gs;
  std::vector<LocalStore> ls;
  for (unsigned w = 0; w < n; ++w) {
    gs.push_back(fop.fork());
    ls.push_back(local.fork());
  }

  out.candidates = detail::run_chunked(
      params, params.n_chan, n,
      [&](std::uint64_t b, std::uint64_t e, std::vector<CandidateRing>& rings, unsigned w) {
        GlobalStore& g = gs[w];
        LocalStore& l = ls[w];
        const detail::Sink sink{ta, rings, planes};
        for (std::uint64_t j = b; j < e; ++j) {
          for (std::uint32_t i = 0; i < params.n_rows; ++i) {
            float acc = 0.0f;
            for (std::uint32_t k = 1; k <= params.n_hp; ++k) {
              const auto s = stretch_index(i, j, k);
              acc = acc + l.cached_load(g, s.row, s.col);
              sink.emit(k, i, j, acc);
            }
          }
        }
      });

  std::uint64_t compute_loads = 0;
  for (unsigned w = 0; w < n; ++w) {
    compute_loads += gs[w].load_count();
    fop.absorb(gs[w]);
    local.absorb(ls[w]);
  }
  out.stats.global_loads = preload_loads + compute_loads;
  out.stats.preload_loads = preload_loads;
  out.stats.local_hits = local.hit_count();
  out.stats.local_misses = local.miss_count();
  out.stats.fop_size = params.plane_size();
  return out;
}

/// Aligned workgroups of n_col channels; each needed point of each plane
/// window is loaded once into the workgroup buffer.
inline EngineOutput run_multiple_hp_n(const HsParams& params, GlobalStore& fop, const ThresholdArray& ta,
                                      std::uint32_t n_col, const EngineOptions& opts = {}) {
  detail::check_inputs(params, fop.rows(), fop.cols(), ta);
  require_divisible(params.n_chan, n_col);
  const std::uint64_t n_blocks = params.n_chan / n_col;

  EngineOutput out{{}, {}, detail::make_planes(params, opts.debug_planes)};
  auto* planes = out.final_planes ? &*out.final_planes : nullptr;
  const unsigned n = detail::resolve_threads(opts.threads, n_blocks);
  std::vector<GlobalStore> gs;
  for (unsigned w = 0; w < n; ++w) gs.push_back(fop.fork());

  out.candidates = detail::run_chunked(
      params, n_blocks, n,
      [&](std::uint64_t b, std::uint64_t e, std::vector<CandidateRing>& rings, unsigned w) {
        GlobalStore& g = gs[w];
        const detail::Sink sink{ta, rings, planes};
        detail::WorkgroupBuffer buf(params, n_col);
        for (std::uint64_t m = b; m < e; ++m) {
          buf.reset(m);
          for (std::uint32_t k = 1; k <= params.n_hp; ++k) {
            const auto& win = buf.window(k);
            const auto rows = distinct_rows(k, params.n_rows);
            for (std::uint32_t r = 0; r < rows; ++r)
              for (std::uint64_t c = win.first; c < win.first + win.count; ++c)
                buf.slot(k, r, c) = g.load(r, c);
          }
          buf.compute(sink);
        }
      });

  for (const auto& g : gs) {
    out.stats.global_loads += g.load_count();
    fop.absorb(g);
  }
  out.stats.fop_size = params.plane_size();
  return out;
}

/// Streams each workgroup's contiguous rFOP segment, padding included, and
/// scatters the non-padding slots into the workgroup buffer via the index table.
inline EngineOutput run_multiple_hp_r(const HsParams& params, const RfopBuffer& rfop,
                                      const ThresholdArray& ta, const EngineOptions& opts = {}) {
  const RfopLayout& layout = rfop.layout;
  detail::check_inputs(params, layout.n_rows, layout.n_chan, ta);
  if (layout.n_hp != params.n_hp)
    throw std::invalid_argument("rFOP layout was planned for a different plane count");
  if (rfop.data.size() != layout.total_slots() || rfop.index.size() != layout.total_slots())
    throw std::invalid_argument("rFOP buffer length does not match its layout");
  require_divisible(params.n_chan, layout.n_col);

  GlobalStore stream(1, rfop.data.size(), rfop.data);
  EngineOutput out{{}, {}, detail::make_planes(params, opts.debug_planes)};
  auto* planes = out.final_planes ? &*out.final_planes : nullptr;
  const unsigned n = detail::resolve_threads(opts.threads, layout.n_workgroups);
  std::vector<GlobalStore> gs;
  for (unsigned w = 0; w < n; ++w) gs.push_back(stream.fork());

  out.candidates = detail::run_chunked(
      params, layout.n_workgroups, n,
      [&](std::uint64_t b, std::uint64_t e, std::vector<CandidateRing>& rings, unsigned w) {
        GlobalStore& g = gs[w];
        const detail::Sink sink{ta, rings, planes};
        detail::WorkgroupBuffer buf(params, layout.n_col);
        for (std::uint64_t m = b; m < e; ++m) {
          buf.reset(m);
          const std::uint64_t first = layout.segment_offset(m);
          const std::uint64_t last = first + layout.segment_length(m);
          std::uint64_t filled = 0;
          for (std::uint64_t s = first; s < last; ++s) {
            const float v = g.load_flat(s);
            const SlotSource& src = rfop.index[s];
            if (src.is_pad()) continue;
            if (!buf.contains(src.plane, src.row, src.col))
              throw std::invalid_argument("rFOP slot " + std::to_string(s) +
                                          " maps outside its workgroup window");
            buf.slot(src.plane, src.row, src.col) = v;
            ++filled;
          }
          if (filled != block_demand(params, layout.n_col, m))
            throw std::invalid_argument("rFOP segment " + std::to_string(m) +
                                        " does not cover its workgroup demand");
          buf.compute(sink);
        }
      });

  for (const auto& g : gs) out.stats.global_loads += g.load_count();
  out.stats.fop_size = params.plane_size();
  return out;
}

}  // namespace harmsum
