#include "qclust/infotheo.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "qclust/errors.hpp"

namespace qclust {

namespace {

// Local-index view of a candidate set inside a SignedWeights matrix.
std::vector<int> locals_of(std::span<const int> pts, const SignedWeights& w) {
    std::vector<int> loc;
    loc.reserve(pts.size());
    for (int p : pts) loc.push_back(w.local(p));
    std::sort(loc.begin(), loc.end());
    return loc;
}

// Minimum cut over nonempty proper bipartitions, Gray-code walk with O(s)
// updates. `loc` holds local indices; loc[0] is pinned to the A side.
long long min_cut_locals(const std::vector<int>& loc, const Eigen::MatrixXi& w) {
    const int s = static_cast<int>(loc.size());
    std::vector<uint8_t> side(s, 0);
    side[0] = 1;
    long long cut = 0;
    for (int j = 1; j < s; ++j) cut += w(loc[0], loc[j]);
    long long best = cut;
    int in_a = 1;

    const uint64_t total = 1ULL << (s - 1);
    uint64_t prev_gray = 0;
    for (uint64_t i = 1; i < total; ++i) {
        uint64_t gray = i ^ (i >> 1);
        int bit = std::countr_zero(prev_gray ^ gray);
        prev_gray = gray;
        int x = bit + 1;
        long long delta = 0;
        for (int y = 0; y < s; ++y) {
            if (y == x) continue;
            int wxy = w(loc[x], loc[y]);
            delta += (side[y] == side[x]) ? wxy : -wxy;
        }
        cut += delta;
        in_a += side[x] ? -1 : 1;
        side[x] ^= 1;
        if (in_a < s) best = std::min(best, cut);
    }
    return best;
}

// Like min_cut_locals but bails out as soon as any nonpositive cut shows up.
bool all_cuts_positive(const std::vector<int>& loc, const Eigen::MatrixXi& w) {
    const int s = static_cast<int>(loc.size());
    std::vector<uint8_t> side(s, 0);
    side[0] = 1;
    long long cut = 0;
    for (int j = 1; j < s; ++j) cut += w(loc[0], loc[j]);
    if (cut <= 0) return false;
    int in_a = 1;

    const uint64_t total = 1ULL << (s - 1);
    uint64_t prev_gray = 0;
    for (uint64_t i = 1; i < total; ++i) {
        uint64_t gray = i ^ (i >> 1);
        int bit = std::countr_zero(prev_gray ^ gray);
        prev_gray = gray;
        int x = bit + 1;
        long long delta = 0;
        for (int y = 0; y < s; ++y) {
            if (y == x) continue;
            int wxy = w(loc[x], loc[y]);
            delta += (side[y] == side[x]) ? wxy : -wxy;
        }
        cut += delta;
        in_a += side[x] ? -1 : 1;
        side[x] ^= 1;
        if (in_a < s && cut <= 0) return false;
    }
    return true;
}

// Cheap necessary conditions for min_cut > 0: every singleton and pair cut
// must already be positive, and a greedy descent from the weakest vertex must
// not reach a nonpositive cut. Kills almost all mixed candidates before the
// exponential walk.
bool precheck_positive(const std::vector<int>& loc, const Eigen::MatrixXi& w) {
    const int s = static_cast<int>(loc.size());
    if (s < 2) return true;
    std::vector<long long> rowsum(s, 0);
    int weakest = 0;
    for (int i = 0; i < s; ++i) {
        long long r = 0;
        for (int j = 0; j < s; ++j)
            if (j != i) r += w(loc[i], loc[j]);
        if (r <= 0) return false;
        rowsum[i] = r;
        if (r < rowsum[weakest]) weakest = i;
    }
    if (s < 3) return true;
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j)
            if (rowsum[i] + rowsum[j] - 2 * w(loc[i], loc[j]) <= 0) return false;

    // Greedy descent: move the best vertex across while the cut shrinks.
    std::vector<uint8_t> side(s, 0);
    side[weakest] = 1;
    long long cut = rowsum[weakest];
    int in_a = 1;
    for (int sweep = 0; sweep < 2 * s; ++sweep) {
        long long best_delta = 0;
        int best_x = -1;
        for (int x = 0; x < s; ++x) {
            if (side[x] && in_a == 1) continue;      // would empty A
            if (!side[x] && in_a == s - 1) continue;  // would make A == S
            long long delta = 0;
            for (int y = 0; y < s; ++y) {
                if (y == x) continue;
                int wxy = w(loc[x], loc[y]);
                delta += (side[y] == side[x]) ? wxy : -wxy;
            }
            if (delta < best_delta) {
                best_delta = delta;
                best_x = x;
            }
        }
        if (best_x < 0) break;
        cut += best_delta;
        in_a += side[best_x] ? -1 : 1;
        side[best_x] ^= 1;
        if (cut <= 0) return false;
    }
    return true;
}

}  // namespace

SignedWeights SignedWeights::from_oracle(std::span<const int> points, FaultyOracle& o) {
    SignedWeights sw;
    sw.points.assign(points.begin(), points.end());
    std::sort(sw.points.begin(), sw.points.end());
    const int m = static_cast<int>(sw.points.size());
    sw.w = Eigen::MatrixXi::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            int wij = 2 * o.query(sw.points[i], sw.points[j]) - 1;
            sw.w(i, j) = wij;
            sw.w(j, i) = wij;
        }
    return sw;
}

int SignedWeights::local(int point_id) const {
    auto it = std::lower_bound(points.begin(), points.end(), point_id);
    if (it == points.end() || *it != point_id)
        throw std::invalid_argument("SignedWeights: point not covered");
    return static_cast<int>(it - points.begin());
}

int SignedWeights::weight(int u, int v) const { return w(local(u), local(v)); }

long long cut_value(std::span<const int> S, std::span<const int> A, const SignedWeights& w) {
    if (A.empty()) throw std::invalid_argument("cut_value: A must be nonempty");
    if (A.size() >= S.size()) throw std::invalid_argument("cut_value: A must be a proper subset");
    std::unordered_set<int> s_set(S.begin(), S.end());
    std::unordered_set<int> a_set(A.begin(), A.end());
    for (int a : A)
        if (!s_set.count(a)) throw std::invalid_argument("cut_value: A must be inside S");
    long long total = 0;
    for (int u : A)
        for (int v : S) {
            if (a_set.count(v)) continue;
            total += w.weight(u, v);
        }
    return total;
}

long long min_cut_value(std::span<const int> S, const SignedWeights& w, int cap) {
    if (S.size() < 2) throw std::invalid_argument("min_cut_value: |S| must be at least 2");
    if (static_cast<int>(S.size()) > cap)
        throw ResourceError("min_cut_value: set exceeds enumeration cap");
    return min_cut_locals(locals_of(S, w), w.w);
}

std::optional<std::vector<int>> largest_no_negative_cut_subset(std::span<const int> T,
                                                               const SignedWeights& w,
                                                               int size_floor, int cap) {
    if (static_cast<int>(T.size()) > cap)
        throw ResourceError("largest_no_negative_cut_subset: set exceeds enumeration cap");
    std::vector<int> base = locals_of(T, w);
    const int m = static_cast<int>(base.size());
    size_floor = std::max(size_floor, 1);
    if (m == 0) return std::nullopt;

    // sufdeg(x, i): number of +1 edges from base[x] into base[i..m).
    std::vector<std::vector<int>> sufdeg(m, std::vector<int>(m + 1, 0));
    for (int x = 0; x < m; ++x)
        for (int i = m - 1; i >= 0; --i)
            sufdeg[x][i] = sufdeg[x][i + 1] + (i != x && w.w(base[x], base[i]) > 0 ? 1 : 0);

    std::vector<int> chosen, chosen_posdeg, cand;
    std::optional<std::vector<int>> found;

    // DFS over sorted local indices, include-branch first (lexicographic
    // order, so the first full candidate that survives is the
    // lexicographically smallest point set of the target size). Prune a
    // branch when some chosen vertex can no longer reach a positive
    // singleton cut even if every remaining +1 neighbor joins.
    auto dfs = [&](auto&& self, int idx, int target) -> bool {
        int have = static_cast<int>(chosen.size());
        if (have == target) {
            cand.clear();
            for (int i : chosen) cand.push_back(base[i]);
            if (target >= 2 && !precheck_positive(cand, w.w)) return false;
            if (target >= 2 && !all_cuts_positive(cand, w.w)) return false;
            std::vector<int> out;
            for (int loc : cand) out.push_back(w.points[loc]);
            found = std::move(out);
            return true;
        }
        if (idx == m || have + (m - idx) < target) return false;
        const int need = (target - 1) / 2 + 1;  // in-S +degree each member needs

        // Include base[idx].
        bool feasible = true;
        int new_posdeg = 0;
        for (int c = 0; c < have; ++c) {
            bool plus = w.w(base[chosen[c]], base[idx]) > 0;
            int deg = chosen_posdeg[c] + (plus ? 1 : 0);
            if (deg + sufdeg[chosen[c]][idx + 1] < need) {
                feasible = false;
                break;
            }
            new_posdeg += plus ? 1 : 0;
        }
        if (feasible && new_posdeg + sufdeg[idx][idx + 1] >= need) {
            std::vector<int> saved = chosen_posdeg;
            for (int c = 0; c < have; ++c)
                chosen_posdeg[c] += w.w(base[chosen[c]], base[idx]) > 0 ? 1 : 0;
            chosen.push_back(idx);
            chosen_posdeg.push_back(new_posdeg);
            if (self(self, idx + 1, target)) return true;
            chosen.pop_back();
            chosen_posdeg = std::move(saved);
        }

        // Exclude base[idx]: every chosen vertex loses idx's potential.
        for (int c = 0; c < have; ++c)
            if (chosen_posdeg[c] + sufdeg[chosen[c]][idx + 1] < need) return false;
        return self(self, idx + 1, target);
    };

    for (int s = m; s >= size_floor; --s) {
        if (s == 1) {
            return std::vector<int>{w.points[base[0]]};
        }
        chosen.clear();
        chosen_posdeg.clear();
        if (dfs(dfs, 0, s)) return found;
    }
    return std::nullopt;
}

std::vector<std::vector<int>> find_big_clusters(std::span<const int> T, double p, FaultyOracle& o,
                                                const ThresholdConfig& cfg) {
    if (static_cast<int>(T.size()) > cfg.enumeration_cap)
        throw ResourceError("find_big_clusters: sample exceeds enumeration cap");
    SignedWeights w = SignedWeights::from_oracle(T, o);
    const int thr = find_big_threshold(cfg, o.instance().n(), p,
                                       std::numeric_limits<int>::max() / 2);

    std::vector<std::vector<int>> out;
    std::vector<int> work = w.points;
    while (static_cast<int>(work.size()) >= thr) {
        auto s = largest_no_negative_cut_subset(work, w, thr, cfg.enumeration_cap);
        if (!s) break;
        std::unordered_set<int> taken(s->begin(), s->end());
        std::vector<int> rest;
        for (int v : work)
            if (!taken.count(v)) rest.push_back(v);
        work = std::move(rest);
        out.push_back(std::move(*s));
    }
    return out;
}

EstimationResult estimation(std::vector<int> V, double p, FaultyOracle& o,
                            const ThresholdConfig& cfg, Rng& rng) {
    const int n = o.instance().n();
    EstimationResult result;
    std::sort(V.begin(), V.end());

    // The seed only primes the sample set; cap it well below the enumeration
    // limit so the exponential search stays runnable even when the formula
    // blows up near p = 1/2.
    int seed_cap = std::max(1, cfg.enumeration_cap / 4);
    int seed_size =
        estimation_seed_size(cfg, n, p, std::min(static_cast<int>(V.size()), seed_cap));
    std::vector<int> T = sample_without_replacement(V, static_cast<size_t>(seed_size), rng);
    {
        std::unordered_set<int> t_set(T.begin(), T.end());
        std::erase_if(V, [&](int v) { return t_set.count(v) > 0; });
    }
    std::sort(T.begin(), T.end());

    int64_t sample_q = 0, sweep_q = 0;
    for (;;) {
        int64_t before = o.queries_used();
        auto big = find_big_clusters(T, p, o, cfg);
        while (big.empty() && !V.empty()) {
            int idx = static_cast<int>(rng.below(V.size()));
            T.insert(std::lower_bound(T.begin(), T.end(), V[idx]), V[idx]);
            V.erase(V.begin() + idx);
            big = find_big_clusters(T, p, o, cfg);
        }
        sample_q += o.queries_used() - before;
        if (big.empty()) break;

        for (auto& A : big) {
            int bsize = find_big_threshold(cfg, n, p, static_cast<int>(A.size()));
            std::vector<int> B = sample_without_replacement(A, static_cast<size_t>(bsize), rng);

            before = o.queries_used();
            std::vector<int> cluster = A;
            std::vector<int> still;
            for (int v : V) {
                if (degree_test(v, B, o))
                    cluster.push_back(v);
                else
                    still.push_back(v);
            }
            sweep_q += o.queries_used() - before;
            V = std::move(still);

            std::unordered_set<int> a_set(A.begin(), A.end());
            std::erase_if(T, [&](int v) { return a_set.count(v) > 0; });
            std::sort(cluster.begin(), cluster.end());
            result.clusters.push_back(std::move(cluster));
        }
        if (V.empty() && T.empty()) break;
        if (V.empty()) {
            // One more extraction pass may still pull full clusters out of T;
            // the loop above handles it because find_big_clusters is re-run.
            int64_t b2 = o.queries_used();
            if (find_big_clusters(T, p, o, cfg).empty()) {
                sample_q += o.queries_used() - b2;
                break;
            }
            sample_q += o.queries_used() - b2;
        }
    }
    result.leftover = T;
    result.sample_phase_queries = sample_q;
    result.sweep_phase_queries = sweep_q;
    return result;
}

std::vector<int> heaviest_subgraph(std::span<const int> T, const SignedWeights& w, int size_floor,
                                   int cap) {
    if (static_cast<int>(T.size()) > cap)
        throw ResourceError("heaviest_subgraph: set exceeds enumeration cap");
    if (size_floor > static_cast<int>(T.size()))
        throw std::invalid_argument("heaviest_subgraph: size_floor exceeds |T|");
    std::vector<int> base = locals_of(T, w);
    const int m = static_cast<int>(base.size());
    size_floor = std::max(size_floor, 0);

    std::vector<int> current;
    std::vector<int> best_set;
    long long best_weight = std::numeric_limits<long long>::min();

    auto consider = [&](long long weight) {
        if (static_cast<int>(current.size()) < std::max(size_floor, 1)) return;
        if (weight > best_weight ||
            (weight == best_weight && (current.size() > best_set.size() ||
                                       (current.size() == best_set.size() && current < best_set)))) {
            best_weight = weight;
            best_set = current;
        }
    };

    // DFS over sorted local indices with an incrementally maintained internal
    // weight.
    auto dfs = [&](auto&& self, int idx, long long weight) -> void {
        if (idx == m) {
            consider(weight);
            return;
        }
        long long gain = 0;
        for (int c : current) gain += w.w(base[c], base[idx]);
        current.push_back(idx);
        self(self, idx + 1, weight + gain);
        current.pop_back();
        self(self, idx + 1, weight);
    };
    dfs(dfs, 0, 0);

    std::vector<int> out;
    for (int loc : best_set) out.push_back(w.points[base[loc]]);
    return out;
}

}  // namespace qclust
