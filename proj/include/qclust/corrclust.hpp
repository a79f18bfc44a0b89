#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qclust/model.hpp"
#include "qclust/oracle.hpp"
#include "qclust/rng.hpp"
#include "qclust/sdp.hpp"
#include "qclust/thresholds.hpp"

namespace qclust {

// One pivot rounding pass: repeatedly pick a uniform random remaining point v
// and grab each remaining u with probability X_uv. Always yields a valid
// partition of `order`.
Partition round_once(const PairMatrix& X, std::span<const int> order, Rng& rng);

// Query all pairs of T, solve the relaxation, round ceil(log2(1/delta)) + 1
// times and keep the candidate closest to the fractional solution.
Partition approx_correlation_cluster(std::span<const int> T, double delta, FaultyOracle& o,
                                     const ThresholdConfig& cfg, Rng& rng);

// Exhaustive correlation-clustering optimum over all partitions (restricted
// growth string order; first minimum wins). Returns blocks of local indices
// [0, m).
std::pair<Partition, double> brute_force_correlation_clustering(const PairMatrix& F,
                                                                int cap = 10);

// Enumerate all partitions of {0..m-1} in restricted-growth-string order.
void enumerate_partitions(int m, const std::function<void(const std::vector<int>&)>& visit);

}  // namespace qclust
