#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qclust/model.hpp"
#include "qclust/rng.hpp"

namespace qclust {

class QueryLedger;

// Unordered-pair index into a flat array: pairs (u,v) with u < v.
inline uint64_t pair_key(int u, int v) {
    uint64_t lo = static_cast<uint64_t>(std::min(u, v));
    uint64_t hi = static_cast<uint64_t>(std::max(u, v));
    return (hi << 32) | lo;
}

inline size_t pair_index(int u, int v) {
    size_t lo = static_cast<size_t>(std::min(u, v));
    size_t hi = static_cast<size_t>(std::max(u, v));
    return hi * (hi - 1) / 2 + lo;
}

// What an adaptive strategy sees when the oracle hands it a corrupted pair:
// the pair, the ground truth, and the transcript of everything answered so
// far (the current query is not yet committed).
struct AdversaryContext {
    int u;
    int v;
    int true_label;
    const Instance& instance;
    const QueryLedger& ledger;
    Rng& rng;
};

using AdversaryFn = std::function<int(const AdversaryContext&)>;

// Parameters of the transcript-matching adversary: on a corrupted pair whose
// partner query (same test point, other endpoint) was already answered,
// output the truth with probability p_cc / p_nc (partner answer was correct /
// wrong) when the endpoints share a cluster, and pp_cc / pp_nc when they do
// not. Unmatched corrupted pairs are answered wrongly.
struct ProbabilityMatcherParams {
    double p_cc = 0.0;
    double p_nc = 0.0;
    double pp_cc = 0.0;
    double pp_nc = 0.0;
};

struct MatcherMarginals {
    double q;  // P(answers agree) for a same-cluster pair
    double r;  // P(answers agree) for a cross-cluster pair
};

// Forward evaluation of the agreement probabilities induced by the matcher.
MatcherMarginals probability_matcher_marginals(double p, const ProbabilityMatcherParams& params);

// Solve for parameters with q = r = 1/2; requires p >= 1 - sqrt(2)/2.
ProbabilityMatcherParams calibrate_probability_matcher(double p);

struct AdversaryStrategy {
    std::string name;
    AdversaryFn decide;

    static AdversaryStrategy always_wrong();
    static AdversaryStrategy in_cluster_truth_cross_cluster_lie();
    static AdversaryStrategy probability_matcher(ProbabilityMatcherParams params);
    static AdversaryStrategy custom(std::string name, AdversaryFn fn);
};

enum class NoiseKind { FullyRandom, NonAdaptiveSemiRandom, AdaptiveSemiRandom };

struct NoiseModel {
    NoiseKind kind = NoiseKind::FullyRandom;
    double p = 0.0;
    // Non-adaptive per-pair wrong-answer probabilities, indexed by
    // pair_index(u,v); empty means p_uv = p for every pair.
    std::vector<double> pair_probs;
    AdversaryStrategy strategy;

    static NoiseModel fully_random(double p);
    static NoiseModel non_adaptive(double p, std::vector<double> pair_probs = {});
    static NoiseModel adaptive(double p, AdversaryStrategy strategy);

    void validate(int n) const;
};

// Per-pair probability maps for the constructions used in the failure demos.
std::vector<double> pair_probs_in_out(const Instance& inst, double p_in, double p_out);

struct TranscriptEntry {
    int u;
    int v;
    int answer;
    bool first;
};

class QueryLedger {
public:
    int64_t distinct_pairs() const { return static_cast<int64_t>(answers_.size()); }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

    std::optional<int> cached(int u, int v) const;
    void record(int u, int v, int answer, bool first);

private:
    std::unordered_map<uint64_t, int> answers_;
    std::vector<TranscriptEntry> transcript_;
};

// The faulty same-cluster oracle. Answers are persistent per unordered pair:
// repeat queries return the cached label and do not advance any random
// stream or the distinct-pair counter. All coins are keyed on
// (seed, stream, min(u,v), max(u,v)) so answers do not depend on query order
// beyond what the adaptive strategy extracts from the transcript.
class FaultyOracle {
public:
    FaultyOracle(Instance instance, NoiseModel noise, uint64_t seed);

    int query(int u, int v);
    int64_t queries_used() const { return ledger_.distinct_pairs(); }

    const Instance& instance() const { return instance_; }
    const NoiseModel& noise() const { return noise_; }
    const QueryLedger& ledger() const { return ledger_; }

    // JSON lines: {"u":..,"v":..,"answer":0|1,"first":bool}
    void dump_transcript(std::ostream& os) const;

private:
    Instance instance_;
    NoiseModel noise_;
    uint64_t seed_;
    QueryLedger ledger_;
};

}  // namespace qclust
