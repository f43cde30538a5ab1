#pragma once

#include <cstddef>
#include <vector>

#include "mict/candidacy_graph.hpp"
#include "mict/posterior.hpp"

namespace mict {

inline constexpr std::size_t kOracleMaxVertices = 24;
inline constexpr std::size_t kEnumerateMaxVertices = 16;

struct OracleResult {
  Labeling labeling;
  double score = 0.0;
};

/// Exact MAP by enumerating all 2^n labelings. Ties go to the
/// lexicographically smallest labeling (vertex 0 most significant).
OracleResult oracle_map(const CandidacyGraph& g, const PriorParams& p = {});

/// Exact posterior over all labelings, indexed by the bit mask with vertex i
/// at bit i. Forbidden labelings get probability 0.
std::vector<double> enumerate_posterior(const CandidacyGraph& g, const PriorParams& p = {});

Labeling labeling_from_mask(std::size_t n, std::uint64_t mask);
std::uint64_t mask_of(const Labeling& l);

}  // namespace mict
