#include "qclust/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qclust/errors.hpp"

namespace qclust {

namespace {

double scale_of(const ThresholdConfig& cfg) {
    return cfg.mode == ThresholdMode::Theory ? 1.0 : cfg.global_scale;
}

double ln_n(int n) { return std::log(std::max(n, 2)); }

double one_minus_2p(double p) { return 1.0 - 2.0 * p; }

}  // namespace

double pipeline_eta(double p) { return 0.25 + 0.5 * p; }
double pipeline_eta_prime(double p) { return (p + 1.0) / 3.0; }

int effective_size(const ThresholdConfig& cfg, double formula_value, int override_size, int lo,
                   int hi, const char* what) {
    long long want;
    if (override_size > 0) {
        want = override_size;
    } else {
        want = static_cast<long long>(std::ceil(formula_value * scale_of(cfg)));
    }
    want = std::max<long long>(want, lo);
    if (want > hi) {
        if (cfg.mode == ThresholdMode::Theory)
            throw InstanceTooSmallError(std::string(what) + ": needs " + std::to_string(want) +
                                        " points, only " + std::to_string(hi) + " available");
        want = hi;
    }
    return static_cast<int>(want);
}

int find_big_threshold(const ThresholdConfig& cfg, int n, double p, int available) {
    double d = one_minus_2p(p);
    double formula = cfg.estimation_block * 320.0 * ln_n(n) / (d * d);
    return effective_size(cfg, formula, cfg.estimation_block_size, 2, available,
                          "find_big_clusters threshold");
}

int estimation_seed_size(const ThresholdConfig& cfg, int n, double p, int available) {
    double d = one_minus_2p(p);
    double formula = cfg.sample_c * ln_n(n) / (d * d);
    return effective_size(cfg, formula, 0, 1, available, "estimation seed");
}

int biased_block_request(const ThresholdConfig& cfg, int n, double p, int available) {
    double d = one_minus_2p(p);
    double formula = cfg.clustering_biased_block * 720.0 * ln_n(n) / (d * d);
    return effective_size(cfg, formula, cfg.clustering_biased_block_size, 1, available,
                          "clustering biased block");
}

int disagreement_set_size(const ThresholdConfig& cfg, int n, double p, int available) {
    double d = one_minus_2p(p);
    double formula = cfg.disagreement_set * 100.0 * ln_n(n) / (d * d * d * d);
    return effective_size(cfg, formula, cfg.disagreement_set_size, 1, available,
                          "disagreement test set");
}

int bicluster_round_count(const ThresholdConfig& cfg, int n, double p, int available) {
    double d = one_minus_2p(p);
    double formula = cfg.bicluster_rounds * 640.0 * ln_n(n) / (d * d);
    return effective_size(cfg, formula, cfg.bicluster_round_count, 1, available,
                          "bicluster rounds");
}

double sample_block_formula(const ThresholdConfig& cfg, int n, double p, int t) {
    double d = one_minus_2p(p);
    double t3 = static_cast<double>(t) * t * t;
    return cfg.sample_c_prime * t3 * ln_n(n) / std::pow(d, 6);
}

double degree_test_min_size(const ThresholdConfig& cfg, int n, double p, double eta) {
    double d = one_minus_2p(p);
    double a = cfg.degree_test_min_size_a * 80.0 * ln_n(n) / (eta * eta * d * d);
    double b = eta > p
                   ? cfg.degree_test_min_size_b * 5.0 * ln_n(n) / ((eta - p) * (eta - p))
                   : std::numeric_limits<double>::infinity();
    return std::max(a, b) * scale_of(cfg);
}

double solver_tolerance(const ThresholdConfig& cfg, int size) {
    return cfg.solver_tol_coeff * static_cast<double>(size) * size;
}

int rounding_repetitions(const ThresholdConfig& cfg, int n) {
    double delta = cfg.rounding_delta;
    if (delta <= 0.0) delta = 1.0 / (static_cast<double>(n) * n);
    delta = std::clamp(delta, 1e-12, 1.0);
    return static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 1;
}

}  // namespace qclust
