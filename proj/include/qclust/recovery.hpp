#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qclust/model.hpp"
#include "qclust/oracle.hpp"
#include "qclust/rng.hpp"
#include "qclust/thresholds.hpp"

namespace qclust {

// Majority vote of B against v: yes iff sum of answers >= |B|/2 (exact
// integer comparison).
bool degree_test(int v, std::span<const int> B, FaultyOracle& o);

// Yes iff the number of w in T on which u and v disagree is at most |T|/2.
// Queries go (u,w) then (v,w) for each w, in T's order.
bool disagreement_test(int u, int v, std::span<const int> T, FaultyOracle& o);

struct BiclusterStats {
    int rounds_run = 0;
    int64_t disagreement_queries = 0;
    int64_t sweep_queries = 0;
    std::vector<std::string> warnings;
};

struct BiclusterResult {
    Partition partition;
    std::vector<int> unassigned;
    BiclusterStats stats;
};

// Two-cluster recovery: classify points against an anchor via disagreement
// tests, then sweep everyone with a degree test against the larger side.
BiclusterResult bicluster(std::span<const int> points, double p, FaultyOracle& o,
                          const ThresholdConfig& cfg, Rng& rng);

}  // namespace qclust
