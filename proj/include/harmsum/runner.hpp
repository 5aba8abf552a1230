// SPDX-License-Identifier: Apache-2.0
//
// runner.hpp
//
// Uniform dispatch over the five strategies, used by the CLI and the
// verification harness.

#pragma once

#include <cfloat>
#include <cstdint>
#include <optional>

#include "harmsum/core.hpp"
#include "harmsum/engines.hpp"
#include "harmsum/gma.hpp"
#include "harmsum/reorder.hpp"
#include "harmsum/touch_map.hpp"

namespace harmsum {

struct RunKnobs {
  bool dedup_stretch = true;     // singlehp
  std::size_t preload_size = 0;  // mhp-h
  std::uint32_t n_col = 16;      // mhp-n, mhp-r
  std::uint32_t n_p_wi = 4;      // mhp-r
  bool pow2 = true;              // mhp-r
};

struct StrategyRun {
  EngineOutput output;
  GmaEntry analytic;
  std::optional<RfopLayout> layout;
};

/// Runs one strategy on an in-memory FOP. mhp-h computes its own touch map and
/// mhp-r plans and builds its rFOP from the knobs.
inline StrategyRun run_strategy(Strategy s, const HsParams& params, const FopPlane& fop,
                                const ThresholdArray& ta, const RunKnobs& knobs,
                                const EngineOptions& opts = {}) {
  StrategyRun run;
  GlobalStore store(fop);
  switch (s) {
    case Strategy::SingleHp: {
      run.output = run_single_hp(params, store, ta, knobs.dedup_stretch, opts);
      GmaKnobs g;
      g.dedup_stretch = knobs.dedup_stretch;
      run.analytic = analytic_gma(params, s, g);
      break;
    }
    case Strategy::MhpNaive:
      run.output = run_multiple_hp_naive(params, store, ta, opts);
      run.analytic = analytic_gma(params, s);
      break;
    case Strategy::MhpH: {
      const auto touch = compute_touch_map(params);
      run.output = run_multiple_hp_h(params, store, ta, PreloadConfig{.preload_size = knobs.preload_size},
                                     touch, opts);
      run.analytic = analytic_gma(params, s, preload_knobs(touch, knobs.preload_size));
      break;
    }
    case Strategy::MhpN: {
      run.output = run_multiple_hp_n(params, store, ta, knobs.n_col, opts);
      GmaKnobs g;
      g.n_col = knobs.n_col;
      run.analytic = analytic_gma(params, s, g);
      break;
    }
    case Strategy::MhpR: {
      const auto layout = plan_layout(params, knobs.n_col, knobs.n_p_wi, knobs.pow2);
      const auto rfop = build_rfop(fop, layout);
      run.output = run_multiple_hp_r(params, rfop, ta, opts);
      GmaKnobs g;
      g.layout = layout;
      run.analytic = analytic_gma(params, s, g);
      run.layout = layout;
      break;
    }
  }
  run.analytic.measured = run.output.stats;
  return run;
}

/// The planes HP_1..HP_n_hp with no instrumentation or detection.
inline std::vector<FopPlane> reference_planes(const HsParams& params, const FopPlane& fop) {
  std::vector<FopPlane> planes(params.n_hp, FopPlane(params.n_rows, params.n_chan));
  for (std::uint32_t i = 0; i < params.n_rows; ++i)
    for (std::uint64_t j = 0; j < params.n_chan; ++j) {
      const auto chain = harmonic_chain(fop, i, j, params.n_hp);
      for (std::uint32_t k = 0; k < params.n_hp; ++k) planes[k].at(i, j) = chain[k];
    }
  return planes;
}

/// Per-plane thresholds letting through at most `per_plane - 1` detections:
/// each plane's threshold is its per_plane-th largest value (strict > test).
inline ThresholdArray rank_thresholds(const std::vector<FopPlane>& planes, std::uint32_t n_rows,
                                      std::size_t per_plane) {
  ThresholdArray ta(static_cast<std::uint32_t>(planes.size()), n_rows);
  for (std::uint32_t k = 1; k <= planes.size(); ++k) {
    std::vector<float> v(planes[k - 1].data().begin(), planes[k - 1].data().end());
    const std::size_t rank = std::min(std::max<std::size_t>(per_plane, 1), v.size());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end(), std::greater<>());
    ta.set_plane(k, v[rank - 1]);
  }
  return ta;
}

}  // namespace harmsum
