#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qclust/model.hpp"
#include "qclust/oracle.hpp"
#include "qclust/pipeline.hpp"
#include "qclust/thresholds.hpp"

namespace qclust {

struct GeneratorSpec {
    enum class Kind { Explicit, Balanced, Geometric };
    Kind kind = Kind::Balanced;
    std::vector<int> cluster_sizes;  // Explicit
    int n = 0;
    int k = 0;
    double ratio = 2.0;  // Geometric

    static GeneratorSpec explicit_sizes(std::vector<int> sizes);
    static GeneratorSpec balanced(int n, int k);
    static GeneratorSpec geometric(int n, int k, double ratio);

    std::vector<int> sizes() const;
};

// Serializable description of a noise model; materialized per trial against
// the trial's instance.
struct NoiseSpec {
    enum class Kind {
        FullyRandom,
        NonAdaptiveUniform,
        NonAdaptiveMaxInZeroOut,  // p_uv = p within clusters, 0 across
        NonAdaptiveInOut,         // explicit p_in / p_out
        AdaptiveAlwaysWrong,
        AdaptiveInClusterTruthCrossClusterLie,
        AdaptiveProbabilityMatcher,  // calibrated to q = r = 1/2
    };
    Kind kind = Kind::FullyRandom;
    double p = 0.0;
    double p_in = 0.0;
    double p_out = 0.0;

    NoiseModel materialize(const Instance& inst) const;
    std::string name() const;
};

enum class AlgorithmKind { Estimation, Clustering, FClustering, Bicluster, BaselineHeaviest };

std::string algorithm_name(AlgorithmKind a);
std::optional<AlgorithmKind> algorithm_from_name(const std::string& name);

struct ExperimentSpec {
    GeneratorSpec generator;
    NoiseSpec noise;
    AlgorithmKind algorithm = AlgorithmKind::Clustering;
    ThresholdConfig cfg;
    int trials = 1;
    uint64_t base_seed = 1;
    // Clusters at or above this size must be recovered verbatim for a trial
    // to succeed; 0 derives it from the algorithm's own threshold.
    int success_min_cluster_size = 0;

    std::string to_json() const;
    static ExperimentSpec from_json(const std::string& text);
};

struct RecoveredReport {
    int size = 0;
    bool exact_match = false;  // equals some ground-truth cluster verbatim
    bool pure = false;         // subset of one ground-truth cluster
};

struct TrialResult {
    int trial = 0;
    uint64_t seed = 0;
    bool success = false;  // exact_large_recovery
    std::vector<RecoveredReport> recovered;
    int64_t distinct_queries = 0;
    int64_t sample_phase_queries = 0;
    int64_t sweep_phase_queries = 0;
    int64_t wall_time_ms = 0;
    std::vector<std::string> warnings;
    RoundTrace trace;

    // Canonical serialization of everything except wall time; the
    // determinism contract excludes timing.
    std::string canonical() const;
};

struct ExperimentSummary {
    ExperimentSpec spec;
    int trials_run = 0;
    double success_rate = 0.0;
    int64_t queries_min = 0;
    int64_t queries_median = 0;
    int64_t queries_max = 0;
    std::vector<TrialResult> results;

    std::string to_json() const;
};

Instance generate_instance(const GeneratorSpec& gen, uint64_t seed);

TrialResult run_trial(const ExperimentSpec& spec, int trial_index);

ExperimentSummary run_experiment(const ExperimentSpec& spec);

// Writes summary.json and trials.csv into out_dir (created if absent).
void write_results(const ExperimentSummary& summary, const std::string& out_dir);

std::string trials_csv(const ExperimentSummary& summary);

}  // namespace qclust
