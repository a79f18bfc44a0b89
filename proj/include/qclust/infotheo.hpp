#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "qclust/oracle.hpp"
#include "qclust/recovery.hpp"
#include "qclust/thresholds.hpp"

namespace qclust {

// ±1 weights over all pairs of an ordered point set, w_uv = 2*oracle(u,v)-1.
struct SignedWeights {
    std::vector<int> points;  // sorted ascending
    Eigen::MatrixXi w;        // |points| x |points|, zero diagonal

    static SignedWeights from_oracle(std::span<const int> points, FaultyOracle& o);

    int local(int point_id) const;
    int weight(int u, int v) const;
};

// Sum of w_uv over u in A, v in S \ A. A must be a nonempty proper subset.
long long cut_value(std::span<const int> S, std::span<const int> A, const SignedWeights& w);

// Minimum cut value over all nonempty proper bipartitions of S (Gray-code
// enumeration of 2^(|S|-1) - 1 cuts). |S| = 1 has no cuts and is treated as
// vacuously positive by callers.
long long min_cut_value(std::span<const int> S, const SignedWeights& w, int cap = 22);

// Maximum-cardinality S with min_cut_value(S) > 0 and |S| >= size_floor;
// ties resolved toward the lexicographically smallest point set.
std::optional<std::vector<int>> largest_no_negative_cut_subset(std::span<const int> T,
                                                               const SignedWeights& w,
                                                               int size_floor, int cap = 22);

// Query all pairs of T and iteratively extract large no-negative-cut subsets.
std::vector<std::vector<int>> find_big_clusters(std::span<const int> T, double p, FaultyOracle& o,
                                                const ThresholdConfig& cfg);

struct EstimationResult {
    std::vector<std::vector<int>> clusters;
    std::vector<int> leftover;
    int64_t sample_phase_queries = 0;
    int64_t sweep_phase_queries = 0;
    std::vector<std::string> warnings;
};

// The information-theoretic driver: grow a sample set until big subclusters
// appear, then recover each full cluster with a degree-test sweep.
EstimationResult estimation(std::vector<int> V, double p, FaultyOracle& o,
                            const ThresholdConfig& cfg, Rng& rng);

// Baseline statistic the semi-random adversary defeats: the subset of size
// >= size_floor maximizing total internal weight. Ties prefer the larger set,
// then the lexicographically smallest.
std::vector<int> heaviest_subgraph(std::span<const int> T, const SignedWeights& w, int size_floor,
                                   int cap = 22);

}  // namespace qclust
