#pragma once

#include <cstdint>

namespace qclust {

enum class ThresholdMode { Theory, Practical };

// Every numeric constant the algorithms use, in one place. The per-field
// coefficients multiply the literal formula; theory mode runs the formulas
// verbatim (coefficient 1, no scaling) and refuses instances that cannot
// honor them, practical mode multiplies block sizes by global_scale and
// clamps to what the instance can supply. Explicit *_size overrides bypass
// the formulas entirely for desk-scale calibration.
struct ThresholdConfig {
    double degree_test_min_size_a = 1.0;   // 80 log n / (eta^2 (1-2p)^2)
    double degree_test_min_size_b = 1.0;   // 5 log n / (eta-p)^2
    double estimation_block = 1.0;         // 320 log n / (1-2p)^2
    double clustering_biased_block = 1.0;  // 720 log n / (1-2p)^2
    double disagreement_set = 1.0;         // 100 log n / (1-2p)^4
    double bicluster_rounds = 1.0;         // 640 log n / (1-2p)^2
    double sample_c = 1.0;                 // seed size c log n / (1-2p)^2
    double sample_c_prime = 1.0;           // c' in s_t = c' t^3 log n / (1-2p)^6
    double rounding_c1 = 4.0;              // empirically calibrated c1
    int fclustering_anchor = 9;
    ThresholdMode mode = ThresholdMode::Practical;
    double global_scale = 0.25;

    // Desk-scale envelopes.
    int enumeration_cap = 22;     // exhaustive subset search on signed weights
    int cc_enumeration_cap = 10;  // Bell-number partition enumeration
    int sdp_envelope = 192;       // largest |T| handed to the SDP solver
    double rounding_delta = 0.0;  // 0 -> 1/n^2

    // Explicit effective sizes; values <= 0 fall back to the formulas.
    int estimation_block_size = 0;
    int clustering_biased_block_size = 0;
    int disagreement_set_size = 0;
    int bicluster_round_count = 0;

    int max_outer_rounds = 12;

    int solver_max_iters = 20000;
    double solver_tol_coeff = 1e-4;  // tol = coeff * |T|^2
};

// eta used by the pipeline's biased-set argument, and the amplified eta' that
// a sampled B inherits.
double pipeline_eta(double p);        // 1/4 + p/2
double pipeline_eta_prime(double p);  // (p+1)/3

// Effective sizes. `n` is the original instance size, `p` the noise cap.
// Everything returns at least `lo` and at most `hi` in practical mode;
// theory mode throws InstanceTooSmallError when hi cannot honor the formula.
int effective_size(const ThresholdConfig& cfg, double formula_value, int override_size, int lo,
                   int hi, const char* what);

int find_big_threshold(const ThresholdConfig& cfg, int n, double p, int available);
int estimation_seed_size(const ThresholdConfig& cfg, int n, double p, int available);
int biased_block_request(const ThresholdConfig& cfg, int n, double p, int available);
int disagreement_set_size(const ThresholdConfig& cfg, int n, double p, int available);
int bicluster_round_count(const ThresholdConfig& cfg, int n, double p, int available);

// Raw s_t formula value (not envelope-capped); may be enormous near p = 1/2.
double sample_block_formula(const ThresholdConfig& cfg, int n, double p, int t);

// Lemma-style minimum DegreeTest panel size for a given eta (used by theory
// mode validation and the Monte-Carlo harness).
double degree_test_min_size(const ThresholdConfig& cfg, int n, double p, double eta);

double solver_tolerance(const ThresholdConfig& cfg, int size);
int rounding_repetitions(const ThresholdConfig& cfg, int n);

}  // namespace qclust
