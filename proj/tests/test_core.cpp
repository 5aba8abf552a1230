// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "harmsum/core.hpp"
#include "oracle.hpp"

using namespace harmsum;

TEST(StretchIndex, Examples) {
  EXPECT_EQ(stretch_index(5, 9, 2), (StretchedIndex{2, 4}));
  EXPECT_EQ(stretch_index(7, 13, 1), (StretchedIndex{7, 13}));
  EXPECT_EQ(stretch_index(0, 2097151, 3), (StretchedIndex{0, 699050}));
}

TEST(StretchIndex, NeverExceedsInput) {
  std::mt19937 rng(11);
  for (int n = 0; n < 10000; ++n) {
    const std::uint32_t i = rng() % 85;
    const std::uint64_t j = rng() % (1u << 21);
    const std::uint32_t k = 1 + rng() % 8;
    const auto s = stretch_index(i, j, k);
    EXPECT_LE(s.row, i);
    EXPECT_LE(s.col, j);
  }
}

TEST(HarmonicChain, ZeroPlane) {
  FopPlane fop(4, 8);
  const auto c = harmonic_chain(fop, 3, 6, 8);
  for (std::uint32_t k = 0; k < 8; ++k) EXPECT_EQ(c[k], 0.0f);
}

TEST(HarmonicChain, OnesCountPlanes) {
  FopPlane fop(42, 64, 1.0f);
  const auto c = harmonic_chain(fop, 20, 33, 8);
  for (std::uint32_t k = 0; k < 8; ++k) EXPECT_EQ(c[k], static_cast<float>(k + 1));
}

TEST(HarmonicChain, MatchesBruteForceStretchedPlanes) {
  const auto fop = oracle::random_plane(4, 8, 5);
  const auto planes = oracle::brute_force_planes(fop, 3);
  const auto c = harmonic_chain(fop, 3, 6, 3);
  for (std::uint32_t k = 0; k < 3; ++k) EXPECT_EQ(c[k], planes[k].at(3, 6)) << "plane " << k + 1;
}

TEST(HarmonicChain, PrefixDifferenceIsSingleStretchLoad) {
  const auto fop = oracle::random_plane(16, 64, 9);
  for (std::uint32_t i = 0; i < 16; ++i)
    for (std::uint64_t j = 0; j < 64; j += 7) {
      const auto c = harmonic_chain(fop, i, j, 8);
      for (std::uint32_t k = 2; k <= 8; ++k) {
        const float step = fop.at(i / k, j / k);
        EXPECT_EQ(c[k - 2] + step, c[k - 1]);
      }
    }
}

TEST(Detect, StrictComparison) {
  EXPECT_TRUE(detect(5.0f, 4.0f));
  EXPECT_FALSE(detect(4.0f, 4.0f));
  EXPECT_FALSE(detect(-1.0f, 0.0f));
}

TEST(Packing, EncodeExamples) {
  EXPECT_EQ(encode_candidate(1, 0, 0), 16777216u);
  EXPECT_EQ(encode_candidate(0, 7, 0), 14680064u);
  EXPECT_EQ(encode_candidate(84, 7, 2097151), 1426063359u);
}

TEST(Packing, DecodeExamples) {
  EXPECT_EQ(decode_candidate(16777216u), (PackedFields{1, 0, 0}));
  EXPECT_EQ(decode_candidate(0u), (PackedFields{0, 0, 0}));
  EXPECT_EQ(decode_candidate(1426063359u), (PackedFields{84, 7, 2097151}));
}

TEST(Packing, RangeViolationsRejected) {
  EXPECT_THROW(encode_candidate(128, 0, 0), std::out_of_range);
  EXPECT_THROW(encode_candidate(0, 8, 0), std::out_of_range);
  EXPECT_THROW(encode_candidate(0, 0, 1u << 21), std::out_of_range);
}

TEST(Packing, RoundTripProperty) {
  std::mt19937 rng(2024);
  for (int n = 0; n < 20000; ++n) {
    const PackedFields f{static_cast<std::uint32_t>(rng() % 85), static_cast<std::uint32_t>(rng() % 8),
                         static_cast<std::uint32_t>(rng() % (1u << 21))};
    const auto w = encode_candidate(f.filter, f.packed_plane, f.bin);
    EXPECT_LT(w, 1u << 31);
    EXPECT_EQ(decode_candidate(w), f);
    EXPECT_EQ(encode_candidate(decode_candidate(w).filter, decode_candidate(w).packed_plane,
                               decode_candidate(w).bin),
              w);
  }
}

TEST(CandidateRecord, PlaneIsStoredMinusOne) {
  const CandidateRecord c{3, 8, 100, 1.5f};
  EXPECT_EQ(decode_candidate(c.encoded()).packed_plane, 7u);
  EXPECT_EQ(CandidateRecord::from_packed(c.encoded(), 1.5f), c);
}

namespace {
CandidateRecord rec(std::uint32_t bin) { return {0, 1, bin, static_cast<float>(bin)}; }
}  // namespace

TEST(CandidateRing, KeepsLastN) {
  CandidateRing r(2);
  r.push(rec(1));
  r.push(rec(2));
  r.push(rec(3));
  EXPECT_EQ(r.entries(), (std::vector<CandidateRecord>{rec(2), rec(3)}));
  EXPECT_EQ(r.total_pushed(), 3u);
}

TEST(CandidateRing, SinglePush) {
  CandidateRing r(3);
  r.push(rec(7));
  EXPECT_EQ(r.entries(), (std::vector<CandidateRecord>{rec(7)}));
  EXPECT_EQ(r.total_pushed(), 1u);
}

TEST(CandidateRing, FiveHundredIntoTwoHundred) {
  CandidateRing r(200);
  for (std::uint32_t n = 0; n < 500; ++n) r.push(rec(n));
  EXPECT_EQ(r.size(), 200u);
  EXPECT_EQ(r.total_pushed(), 500u);
  EXPECT_EQ(r.entries().front().bin, 300u);
  EXPECT_EQ(r.entries().back().bin, 499u);
}

TEST(CandidateRing, SuffixProperty) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cap = 1 + rng() % 10;
    const std::size_t len = rng() % 40;
    CandidateRing r(cap);
    std::vector<CandidateRecord> seq;
    for (std::size_t n = 0; n < len; ++n) {
      seq.push_back(rec(rng() % 1000));
      r.push(seq.back());
    }
    const std::size_t keep = std::min(len, cap);
    EXPECT_EQ(r.entries(), std::vector<CandidateRecord>(seq.end() - keep, seq.end()));
  }
}

TEST(CandidateRing, AppendEqualsConcatenatedPushes) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cap = 1 + rng() % 6;
    CandidateRing a(cap), b(cap), whole(cap);
    for (std::size_t n = rng() % 12; n > 0; --n) {
      auto c = rec(rng() % 100);
      a.push(c);
      whole.push(c);
    }
    for (std::size_t n = rng() % 12; n > 0; --n) {
      auto c = rec(rng() % 100);
      b.push(c);
      whole.push(c);
    }
    a.append(b);
    EXPECT_EQ(a.entries(), whole.entries());
    EXPECT_EQ(a.total_pushed(), whole.total_pushed());
  }
}

TEST(HsParams, Validation) {
  EXPECT_NO_THROW((HsParams{42, 1u << 21, 8, 200}.validate()));
  EXPECT_THROW((HsParams{0, 16, 8, 200}.validate()), std::invalid_argument);
  EXPECT_THROW((HsParams{86, 16, 8, 200}.validate()), std::invalid_argument);
  EXPECT_THROW((HsParams{42, 16, 9, 200}.validate()), std::invalid_argument);
  EXPECT_THROW((HsParams{42, 16, 0, 200}.validate()), std::invalid_argument);
  EXPECT_THROW((HsParams{42, 16, 8, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((HsParams{42, (1u << 21) + 1, 8, 200}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((HsParams{42, (1u << 21) + 1, 8, 200}.validate(false)));
}
