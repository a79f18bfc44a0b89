#include "qclust/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qclust {

namespace {

constexpr uint64_t kStreamCorruption = 0x6f7261636c65ULL;
constexpr uint64_t kStreamAdversary = 0x616476ULL;

int true_label_of(const Instance& inst, int u, int v) {
    return inst.same_cluster(u, v) ? 1 : 0;
}

}  // namespace

MatcherMarginals probability_matcher_marginals(double p, const ProbabilityMatcherParams& params) {
    MatcherMarginals m;
    m.q = (1.0 - p) * (1.0 - p + p * params.p_cc) + p * p * (1.0 - params.p_nc);
    m.r = (1.0 - p) * p * (1.0 - params.pp_cc) + p * (1.0 - p + p * params.pp_nc);
    return m;
}

ProbabilityMatcherParams calibrate_probability_matcher(double p) {
    // Along the segment (p_cc, p_nc) = (t, 1-t) the same-cluster agreement is
    // affine: q(t) = (1-p)^2 + t*p. Likewise (pp_cc, pp_nc) = (1-s, s) gives
    // r(s) = p(1-p) + s*p. Both hit 1/2 inside [0,1] iff p >= 1 - sqrt(2)/2.
    double t = (0.5 - (1.0 - p) * (1.0 - p)) / p;
    double s = (0.5 - p * (1.0 - p)) / p;
    if (t < 0.0 || t > 1.0 || s < 0.0 || s > 1.0)
        throw std::invalid_argument(
            "calibrate_probability_matcher: q = r = 1/2 infeasible at this p");
    ProbabilityMatcherParams params;
    params.p_cc = t;
    params.p_nc = 1.0 - t;
    params.pp_cc = 1.0 - s;
    params.pp_nc = s;
    return params;
}

AdversaryStrategy AdversaryStrategy::always_wrong() {
    return {"always_wrong", [](const AdversaryContext& ctx) { return 1 - ctx.true_label; }};
}

AdversaryStrategy AdversaryStrategy::in_cluster_truth_cross_cluster_lie() {
    return {"in_cluster_truth_cross_cluster_lie", [](const AdversaryContext& ctx) {
                return ctx.instance.same_cluster(ctx.u, ctx.v) ? ctx.true_label
                                                               : 1 - ctx.true_label;
            }};
}

AdversaryStrategy AdversaryStrategy::probability_matcher(ProbabilityMatcherParams params) {
    return {"probability_matcher", [params](const AdversaryContext& ctx) {
                const auto& entries = ctx.ledger.transcript();
                if (!entries.empty()) {
                    const TranscriptEntry& prev = entries.back();
                    int shared = -1, cur_other = -1, prev_other = -1;
                    for (int a : {ctx.u, ctx.v}) {
                        if (a == prev.u || a == prev.v) {
                            shared = a;
                            cur_other = (a == ctx.u) ? ctx.v : ctx.u;
                            prev_other = (a == prev.u) ? prev.v : prev.u;
                        }
                    }
                    if (shared >= 0 && cur_other != prev_other) {
                        bool prev_correct =
                            prev.answer == true_label_of(ctx.instance, prev.u, prev.v);
                        bool same = ctx.instance.same_cluster(cur_other, prev_other);
                        double p_truth = same ? (prev_correct ? params.p_cc : params.p_nc)
                                              : (prev_correct ? params.pp_cc : params.pp_nc);
                        return ctx.rng.bernoulli(p_truth) ? ctx.true_label : 1 - ctx.true_label;
                    }
                }
                return 1 - ctx.true_label;
            }};
}

AdversaryStrategy AdversaryStrategy::custom(std::string name, AdversaryFn fn) {
    return {std::move(name), std::move(fn)};
}

NoiseModel NoiseModel::fully_random(double p) {
    NoiseModel m;
    m.kind = NoiseKind::FullyRandom;
    m.p = p;
    return m;
}

NoiseModel NoiseModel::non_adaptive(double p, std::vector<double> pair_probs) {
    NoiseModel m;
    m.kind = NoiseKind::NonAdaptiveSemiRandom;
    m.p = p;
    m.pair_probs = std::move(pair_probs);
    return m;
}

NoiseModel NoiseModel::adaptive(double p, AdversaryStrategy strategy) {
    NoiseModel m;
    m.kind = NoiseKind::AdaptiveSemiRandom;
    m.p = p;
    m.strategy = std::move(strategy);
    return m;
}

void NoiseModel::validate(int n) const {
    if (kind == NoiseKind::FullyRandom) {
        if (p < 0.0 || p >= 0.5)
            throw std::invalid_argument("NoiseModel: fully-random requires p in [0, 1/2)");
        return;
    }
    if (p <= 0.0 || p >= 0.5)
        throw std::invalid_argument("NoiseModel: semi-random requires p in (0, 1/2)");
    if (kind == NoiseKind::NonAdaptiveSemiRandom && !pair_probs.empty()) {
        size_t want = static_cast<size_t>(n) * (n - 1) / 2;
        if (pair_probs.size() != want)
            throw std::invalid_argument("NoiseModel: pair_probs must cover all unordered pairs");
        for (double q : pair_probs)
            if (q < 0.0 || q > p + kBinaryTol)
                throw std::invalid_argument("NoiseModel: pair probability outside [0, p]");
    }
    if (kind == NoiseKind::AdaptiveSemiRandom && !strategy.decide)
        throw std::invalid_argument("NoiseModel: adaptive model needs a strategy");
}

std::vector<double> pair_probs_in_out(const Instance& inst, double p_in, double p_out) {
    int n = inst.n();
    std::vector<double> probs(static_cast<size_t>(n) * (n - 1) / 2);
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u)
            probs[pair_index(u, v)] = inst.same_cluster(u, v) ? p_in : p_out;
    return probs;
}

std::optional<int> QueryLedger::cached(int u, int v) const {
    auto it = answers_.find(pair_key(u, v));
    if (it == answers_.end()) return std::nullopt;
    return it->second;
}

void QueryLedger::record(int u, int v, int answer, bool first) {
    if (first) answers_.emplace(pair_key(u, v), answer);
    transcript_.push_back({u, v, answer, first});
}

FaultyOracle::FaultyOracle(Instance instance, NoiseModel noise, uint64_t seed)
    : instance_(std::move(instance)), noise_(std::move(noise)), seed_(seed) {
    noise_.validate(instance_.n());
}

int FaultyOracle::query(int u, int v) {
    if (u == v) throw std::invalid_argument("FaultyOracle: self-query");
    if (u < 0 || v < 0 || u >= instance_.n() || v >= instance_.n())
        throw std::invalid_argument("FaultyOracle: point id out of range");

    if (auto hit = ledger_.cached(u, v)) {
        ledger_.record(u, v, *hit, false);
        return *hit;
    }

    int lo = std::min(u, v), hi = std::max(u, v);
    int truth = true_label_of(instance_, u, v);
    int answer = truth;

    Rng coin = Rng::keyed(seed_, kStreamCorruption, static_cast<uint64_t>(lo),
                          static_cast<uint64_t>(hi));
    switch (noise_.kind) {
        case NoiseKind::FullyRandom:
            if (coin.bernoulli(noise_.p)) answer = 1 - truth;
            break;
        case NoiseKind::NonAdaptiveSemiRandom: {
            double p_uv =
                noise_.pair_probs.empty() ? noise_.p : noise_.pair_probs[pair_index(u, v)];
            if (coin.bernoulli(p_uv)) answer = 1 - truth;
            break;
        }
        case NoiseKind::AdaptiveSemiRandom:
            if (coin.bernoulli(noise_.p)) {
                Rng adv = Rng::keyed(seed_, kStreamAdversary, static_cast<uint64_t>(lo),
                                     static_cast<uint64_t>(hi));
                AdversaryContext ctx{u, v, truth, instance_, ledger_, adv};
                answer = noise_.strategy.decide(ctx);
                if (answer != 0 && answer != 1)
                    throw std::invalid_argument("AdversaryStrategy: label must be 0 or 1");
            }
            break;
    }

    ledger_.record(u, v, answer, true);
    return answer;
}

void FaultyOracle::dump_transcript(std::ostream& os) const {
    for (const auto& e : ledger_.transcript()) {
        os << "{\"u\": " << e.u << ", \"v\": " << e.v << ", \"answer\": " << e.answer
           << ", \"first\": " << (e.first ? "true" : "false") << "}\n";
    }
}

}  // namespace qclust
