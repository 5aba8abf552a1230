// SPDX-License-Identifier: Apache-2.0
//
// verify.hpp
//
// Cross-engine equivalence: debug planes must match bit for bit, and when no
// ring overflowed, per-plane candidate multisets must match.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "harmsum/core.hpp"
#include "harmsum/engines.hpp"

namespace harmsum {

struct NamedOutput {
  std::string name;
  const EngineOutput* output;
};

struct Divergence {
  std::string engine;
  std::uint32_t plane = 0;
  std::uint32_t row = 0;
  std::uint64_t col = 0;
  std::string what;
};

struct EquivalenceReport {
  std::vector<Divergence> divergences;  // at most one per engine
  bool passed() const { return divergences.empty(); }

  std::string summary() const {
    if (passed()) return "all engines equivalent";
    std::ostringstream os;
    for (const auto& d : divergences)
      os << d.engine << ": " << d.what << " at plane " << d.plane << " row " << d.row << " col " << d.col
         << "\n";
    return os.str();
  }
};

namespace detail {
inline auto candidate_key(const CandidateRecord& c) {
  return std::make_tuple(c.plane, c.filter, c.bin, std::bit_cast<std::uint32_t>(c.amplitude));
}

inline std::vector<CandidateRecord> sorted_entries(const CandidateRing& ring) {
  auto e = ring.entries();
  std::sort(e.begin(), e.end(),
            [](const auto& a, const auto& b) { return candidate_key(a) < candidate_key(b); });
  return e;
}

inline std::optional<Divergence> compare_planes(const std::vector<FopPlane>& got,
                                                const std::vector<FopPlane>& want) {
  if (got.size() != want.size()) return Divergence{"", 0, 0, 0, "plane count differs"};
  for (std::uint32_t k = 0; k < got.size(); ++k) {
    if (got[k].rows() != want[k].rows() || got[k].cols() != want[k].cols())
      return Divergence{"", k + 1, 0, 0, "plane dimensions differ"};
    for (std::uint32_t i = 0; i < got[k].rows(); ++i)
      for (std::uint64_t j = 0; j < got[k].cols(); ++j)
        if (std::bit_cast<std::uint32_t>(got[k].at(i, j)) != std::bit_cast<std::uint32_t>(want[k].at(i, j))) {
          std::ostringstream os;
          os << "plane value " << got[k].at(i, j) << " != reference " << want[k].at(i, j);
          return Divergence{"", k + 1, i, j, os.str()};
        }
  }
  return std::nullopt;
}
}  // namespace detail

/// Compares every output against the reference. The reference must carry
/// debug planes; outputs without them are checked on candidates only. When a
/// ring overflowed, its entries are instead checked to be genuine detections
/// against the reference planes (requires `ta`).
inline EquivalenceReport verify_equivalence(const std::vector<NamedOutput>& outputs,
                                            const EngineOutput& reference,
                                            const ThresholdArray* ta = nullptr) {
  EquivalenceReport report;
  for (const auto& [name, out] : outputs) {
    if (reference.final_planes && out->final_planes) {
      if (auto d = detail::compare_planes(*out->final_planes, *reference.final_planes)) {
        d->engine = name;
        report.divergences.push_back(*d);
        continue;
      }
    }
    if (out->candidates.size() != reference.candidates.size()) {
      report.divergences.push_back({name, 0, 0, 0, "candidate plane count differs"});
      continue;
    }
    for (std::uint32_t k = 0; k < out->candidates.size(); ++k) {
      const auto& got = out->candidates[k];
      const auto& want = reference.candidates[k];
      if (!got.overflowed() && !want.overflowed()) {
        const auto a = detail::sorted_entries(got);
        const auto b = detail::sorted_entries(want);
        if (a != b) {
          auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
          const CandidateRecord& at = ia != a.end() ? *ia : *ib;
          report.divergences.push_back({name, k + 1, at.filter, at.bin,
                                        "candidate sets differ (" + std::to_string(a.size()) + " vs " +
                                            std::to_string(b.size()) + " entries)"});
          break;
        }
        continue;
      }
      if (got.total_pushed() != want.total_pushed()) {
        report.divergences.push_back({name, k + 1, 0, 0, "detection count differs"});
        break;
      }
      if (got.size() != got.capacity()) {
        report.divergences.push_back({name, k + 1, 0, 0, "overflowed ring is not full"});
        break;
      }
      if (reference.final_planes && ta) {
        bool bad = false;
        for (const auto& c : got.entries()) {
          const float v = (*reference.final_planes)[k].at(c.filter, c.bin);
          if (std::bit_cast<std::uint32_t>(v) != std::bit_cast<std::uint32_t>(c.amplitude) ||
              !detect(v, ta->at(k + 1, c.filter))) {
            report.divergences.push_back({name, k + 1, c.filter, c.bin, "not a true detection"});
            bad = true;
            break;
          }
        }
        if (bad) break;
      }
    }
  }
  return report;
}

}  // namespace harmsum
