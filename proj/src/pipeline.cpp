#include "qclust/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "qclust/errors.hpp"

namespace qclust {

namespace {

int effective_sample_block(const ThresholdConfig& cfg, int n0, double p, int t, int avail) {
    double formula = sample_block_formula(cfg, n0, p, t);
    long long want = static_cast<long long>(std::ceil(formula));
    if (cfg.mode == ThresholdMode::Theory) {
        if (want * t > avail)
            throw InstanceTooSmallError("clustering: sample request exceeds available points");
        return static_cast<int>(want);
    }
    long long cap = std::max<long long>(std::min(avail, cfg.sdp_envelope) / t, 1);
    return static_cast<int>(std::min(want, cap));
}

}  // namespace

std::vector<std::vector<int>> extract_big(const Partition& parts, int s_t) {
    std::vector<std::vector<int>> big;
    for (const auto& block : parts.blocks)
        if (2 * static_cast<long long>(block.size()) > s_t) big.push_back(block);
    std::stable_sort(big.begin(), big.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return big;
}

ClusteringResult clustering(std::vector<int> V, double p, FaultyOracle& o,
                            const ThresholdConfig& cfg, Rng& rng) {
    std::sort(V.begin(), V.end());
    const int n0 = static_cast<int>(V.size());
    if (n0 == 0) throw std::invalid_argument("clustering: empty point set");

    ClusteringResult result;
    RoundTrace& trace = result.trace;
    int outer_attempts = 0;

    while (!V.empty()) {
        if (++outer_attempts > cfg.max_outer_rounds) {
            trace.warnings.push_back("outer attempt cap reached with points left");
            break;
        }

        int t = 1;
        std::vector<std::vector<int>> big;
        int prev_sample = -1;
        bool exhausted = false;
        while (true) {
            int s_t = effective_sample_block(cfg, n0, p, t, static_cast<int>(V.size()));
            long long sample_size = static_cast<long long>(t) * s_t;
            if (sample_size > static_cast<long long>(V.size())) break;
            if (static_cast<int>(sample_size) <= prev_sample) {
                // Envelope saturated; growing t further cannot enlarge the
                // sample, it only lowers the block bar toward junk.
                exhausted = true;
                break;
            }
            prev_sample = static_cast<int>(sample_size);

            std::vector<int> T =
                sample_without_replacement(V, static_cast<size_t>(sample_size), rng);
            std::sort(T.begin(), T.end());

            int64_t before = o.queries_used();
            Rng acc_rng = rng.split(0x616363);
            Partition parts = approx_correlation_cluster(T, cfg.rounding_delta > 0
                                                                ? cfg.rounding_delta
                                                                : 1.0 / (static_cast<double>(n0) * n0),
                                                         o, cfg, acc_rng);
            trace.sample_phase_queries += o.queries_used() - before;

            big = extract_big(parts, s_t);
            RoundRecord rec;
            rec.t = t;
            rec.s_t = s_t;
            rec.sample_size = static_cast<int>(sample_size);
            rec.sample = T;
            rec.h = static_cast<int>(big.size());
            rec.big_blocks = big;
            trace.t_values.push_back(t);
            trace.sample_sizes.push_back(rec.sample_size);
            trace.big_cluster_counts.push_back(rec.h);
            trace.rounds.push_back(std::move(rec));

            if (!big.empty()) {
                break;
            }
            t *= 2;
        }

        if (big.empty()) {
            if (exhausted && static_cast<long long>(V.size()) > 0) continue;  // fresh attempt
            break;  // |V| < t * s_t with h = 0
        }

        RoundRecord& rec = trace.rounds.back();
        for (const auto& block : big) {
            // Throws in theory mode when the block cannot supply the request.
            int request = biased_block_request(cfg, n0, p, static_cast<int>(block.size()));
            int want = biased_block_request(cfg, n0, p, std::numeric_limits<int>::max() / 2);
            if (request < want)
                trace.warnings.push_back("guarantee-void: biased block smaller than requested");
            std::vector<int> B = sample_without_replacement(block, static_cast<size_t>(request),
                                                            rng);
            std::sort(B.begin(), B.end());
            rec.biased_sets.push_back(B);

            int64_t before = o.queries_used();
            std::vector<int> cluster, rest, panel;
            std::unordered_set<int> b_set(B.begin(), B.end());
            for (int v : V) {
                bool yes;
                if (b_set.count(v)) {
                    panel.clear();
                    for (int x : B)
                        if (x != v) panel.push_back(x);
                    yes = panel.empty() ? true : degree_test(v, panel, o);
                } else {
                    yes = degree_test(v, B, o);
                }
                (yes ? cluster : rest).push_back(v);
            }
            trace.sweep_phase_queries += o.queries_used() - before;

            if (cluster.empty()) {
                trace.warnings.push_back("empty sweep result for a big block");
                continue;
            }
            V = std::move(rest);
            trace.recovered.push_back({static_cast<int>(result.clusters.size()),
                                       static_cast<int>(cluster.size()), o.queries_used()});
            result.clusters.push_back(std::move(cluster));
        }
    }

    trace.unassigned = V;
    return result;
}

NoiseEstimate estimate_noise_upper_bound(std::span<const int> V, FaultyOracle& o,
                                         const ThresholdConfig& cfg, Rng& rng) {
    const int n = static_cast<int>(V.size());
    if (n < cfg.fclustering_anchor + 1)
        throw InstanceTooSmallError("estimate_noise_upper_bound: need anchor + 1 points");

    std::vector<int> sorted(V.begin(), V.end());
    std::sort(sorted.begin(), sorted.end());

    int64_t before = o.queries_used();
    std::vector<int> anchor =
        sample_without_replacement(sorted, static_cast<size_t>(cfg.fclustering_anchor), rng);
    std::sort(anchor.begin(), anchor.end());

    int64_t best = -1;
    for (size_t i = 0; i < anchor.size(); ++i) {
        for (size_t j = i + 1; j < anchor.size(); ++j) {
            int u = anchor[i], v = anchor[j];
            int64_t count = 0;
            for (int w : sorted) {
                if (w == u || w == v) continue;
                count += (o.query(u, w) != o.query(v, w));
            }
            if (best < 0 || count < best) best = count;
        }
    }

    if (2 * best >= n)
        throw EstimateInvalidError("estimate_noise_upper_bound: M >= n/2, estimate undefined");

    NoiseEstimate est;
    est.min_disagreements = best;
    est.p_bar = 0.5 - 0.25 * std::sqrt(1.0 - 2.0 * static_cast<double>(best) / n);
    est.anchor = std::move(anchor);
    est.queries = o.queries_used() - before;
    return est;
}

FClusteringResult fclustering(std::vector<int> V, FaultyOracle& o, const ThresholdConfig& cfg,
                              Rng& rng) {
    Rng est_rng = rng.split(0x657374);
    NoiseEstimate est = estimate_noise_upper_bound(V, o, cfg, est_rng);
    ClusteringResult cl = clustering(std::move(V), est.p_bar, o, cfg, rng);
    return {std::move(cl.clusters), std::move(cl.trace), std::move(est)};
}

std::string RoundTrace::to_json() const {
    nlohmann::json j;
    j["t_values"] = t_values;
    j["sample_sizes"] = sample_sizes;
    j["big_cluster_counts"] = big_cluster_counts;
    j["sample_phase_queries"] = sample_phase_queries;
    j["sweep_phase_queries"] = sweep_phase_queries;
    j["warnings"] = warnings;
    j["unassigned"] = unassigned;
    nlohmann::json rounds_j = nlohmann::json::array();
    for (const auto& r : rounds) {
        nlohmann::json rj;
        rj["t"] = r.t;
        rj["s_t"] = r.s_t;
        rj["sample_size"] = r.sample_size;
        rj["h"] = r.h;
        rj["sample"] = r.sample;
        rj["big_blocks"] = r.big_blocks;
        rj["biased_sets"] = r.biased_sets;
        rounds_j.push_back(std::move(rj));
    }
    j["rounds"] = std::move(rounds_j);
    nlohmann::json rec_j = nlohmann::json::array();
    for (const auto& r : recovered)
        rec_j.push_back({{"cluster_id", r.cluster_id},
                         {"size", r.size},
                         {"queries_at_emission", r.queries_at_emission}});
    j["recovered"] = std::move(rec_j);
    return j.dump();
}

}  // namespace qclust
