// SPDX-License-Identifier: Apache-2.0
//
// Brute-force references used only by the tests. None of these call into the
// engines, the reorder planner or the touch-map code they are checking.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "harmsum/core.hpp"

namespace harmsum::oracle {

/// Uniform random plane in [0, 1).
inline FopPlane random_plane(std::uint32_t rows, std::uint64_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  FopPlane p(rows, cols);
  for (auto& v : p.data()) v = u(rng);
  return p;
}

/// Materialises every stretched plane SP_k(i, j) = FOP(floor(i/k), floor(j/k))
/// and sums them plane by plane: HP_1 = SP_1, HP_k = HP_{k-1} + SP_k.
inline std::vector<FopPlane> brute_force_planes(const FopPlane& fop, std::uint32_t n_hp) {
  std::vector<FopPlane> hp;
  for (std::uint32_t k = 1; k <= n_hp; ++k) {
    FopPlane sp(fop.rows(), fop.cols());
    for (std::uint32_t i = 0; i < fop.rows(); ++i)
      for (std::uint64_t j = 0; j < fop.cols(); ++j) sp.at(i, j) = fop.at(i / k, j / k);
    if (k == 1) {
      hp.push_back(sp);
      continue;
    }
    FopPlane next(fop.rows(), fop.cols());
    for (std::uint32_t i = 0; i < fop.rows(); ++i)
      for (std::uint64_t j = 0; j < fop.cols(); ++j) next.at(i, j) = hp.back().at(i, j) + sp.at(i, j);
    hp.push_back(std::move(next));
  }
  return hp;
}

/// Touch counts by enumerating every (output point, plane) pair.
inline std::vector<std::uint32_t> enumerate_touches(std::uint32_t rows, std::uint64_t cols,
                                                    std::uint32_t n_hp) {
  std::vector<std::uint32_t> t(static_cast<std::size_t>(rows) * cols, 0);
  for (std::uint32_t k = 1; k <= n_hp; ++k)
    for (std::uint32_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j) ++t[(i / k) * cols + j / k];
  return t;
}

/// Set of distinct stretched indices a block of columns needs for plane k.
inline std::set<std::pair<std::uint32_t, std::uint64_t>> needed_points(std::uint32_t rows,
                                                                       std::uint64_t first_col,
                                                                       std::uint64_t n_col, std::uint32_t k) {
  std::set<std::pair<std::uint32_t, std::uint64_t>> s;
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint64_t j = first_col; j < first_col + n_col; ++j) s.insert({i / k, j / k});
  return s;
}

/// Per-plane-sum demand of one block, by set enumeration.
inline std::uint64_t enumerate_block_demand(std::uint32_t rows, std::uint32_t n_hp, std::uint64_t first_col,
                                            std::uint64_t n_col) {
  std::uint64_t d = 0;
  for (std::uint32_t k = 1; k <= n_hp; ++k) d += needed_points(rows, first_col, n_col, k).size();
  return d;
}

/// Worst-case block demand (per plane worst block, summed) by enumeration.
inline std::uint64_t enumerate_planned_demand(std::uint32_t rows, std::uint32_t n_hp, std::uint64_t n_chan,
                                              std::uint64_t n_col) {
  std::uint64_t d = 0;
  for (std::uint32_t k = 1; k <= n_hp; ++k) {
    std::set<std::uint32_t> rs;
    for (std::uint32_t i = 0; i < rows; ++i) rs.insert(i / k);
    std::uint64_t worst = 0;
    for (std::uint64_t a = 0; a < n_chan; a += n_col) {
      std::set<std::uint64_t> cs;
      for (std::uint64_t j = a; j < a + n_col; ++j) cs.insert(j / k);
      worst = std::max<std::uint64_t>(worst, cs.size());
    }
    d += rs.size() * worst;
  }
  return d;
}

}  // namespace harmsum::oracle
