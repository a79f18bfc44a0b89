#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qclust/corrclust.hpp"
#include "qclust/oracle.hpp"
#include "qclust/recovery.hpp"
#include "qclust/thresholds.hpp"

namespace qclust {

struct RoundRecord {
    int t = 0;
    int s_t = 0;
    int sample_size = 0;
    int h = 0;
    std::vector<int> sample;
    std::vector<std::vector<int>> big_blocks;
    std::vector<std::vector<int>> biased_sets;  // the B_i actually swept
};

struct RecoveredCluster {
    int cluster_id = 0;  // emission order
    int size = 0;
    int64_t queries_at_emission = 0;
};

struct RoundTrace {
    std::vector<int> t_values;
    std::vector<int> sample_sizes;
    std::vector<int> big_cluster_counts;
    std::vector<RoundRecord> rounds;
    std::vector<RecoveredCluster> recovered;
    std::vector<int> unassigned;
    int64_t sample_phase_queries = 0;
    int64_t sweep_phase_queries = 0;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

struct ClusteringResult {
    std::vector<std::vector<int>> clusters;
    RoundTrace trace;
};

struct NoiseEstimate {
    int64_t min_disagreements = 0;  // M
    double p_bar = 0.0;
    std::vector<int> anchor;
    int64_t queries = 0;
};

// Blocks with size strictly greater than s_t/2, largest first.
std::vector<std::vector<int>> extract_big(const Partition& parts, int s_t);

// The efficient pipeline: doubling sample schedule, approximate correlation
// clustering of each sample, degree-test sweeps from the big blocks.
ClusteringResult clustering(std::vector<int> V, double p, FaultyOracle& o,
                            const ThresholdConfig& cfg, Rng& rng);

// Anchor-pair disagreement counting; p_bar = 1/2 - sqrt(1 - 2M/n)/4.
NoiseEstimate estimate_noise_upper_bound(std::span<const int> V, FaultyOracle& o,
                                         const ThresholdConfig& cfg, Rng& rng);

struct FClusteringResult {
    std::vector<std::vector<int>> clusters;
    RoundTrace trace;
    NoiseEstimate estimate;
};

// Parameter-free wrapper: estimate the noise level, then run the pipeline
// with the estimate. Never reads the oracle's true p.
FClusteringResult fclustering(std::vector<int> V, FaultyOracle& o, const ThresholdConfig& cfg,
                              Rng& rng);

}  // namespace qclust
