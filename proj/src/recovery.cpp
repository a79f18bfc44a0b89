#include "qclust/recovery.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "qclust/errors.hpp"

namespace qclust {

bool degree_test(int v, std::span<const int> B, FaultyOracle& o) {
    if (B.empty()) throw std::invalid_argument("degree_test: B must be nonempty");
    int64_t sum = 0;
    for (int u : B) {
        if (u == v) throw std::invalid_argument("degree_test: v must not be in B");
        sum += o.query(u, v);
    }
    return 2 * sum >= static_cast<int64_t>(B.size());
}

bool disagreement_test(int u, int v, std::span<const int> T, FaultyOracle& o) {
    if (T.empty()) throw std::invalid_argument("disagreement_test: T must be nonempty");
    if (u == v) throw std::invalid_argument("disagreement_test: u and v must differ");
    int64_t count = 0;
    for (int w : T) {
        if (w == u || w == v)
            throw std::invalid_argument("disagreement_test: u, v must not be in T");
        int a = o.query(u, w);
        int b = o.query(v, w);
        count += (a != b);
    }
    return 2 * count <= static_cast<int64_t>(T.size());
}

BiclusterResult bicluster(std::span<const int> points, double p, FaultyOracle& o,
                          const ThresholdConfig& cfg, Rng& rng) {
    if (points.size() < 3) throw InstanceTooSmallError("bicluster: needs at least 3 points");
    if (o.instance().k() != 2)
        throw std::invalid_argument("bicluster: instance must have exactly 2 clusters");

    const int n = o.instance().n();
    BiclusterStats stats;
    std::vector<int> sorted_points(points.begin(), points.end());
    std::sort(sorted_points.begin(), sorted_points.end());

    int u = sorted_points[rng.below(sorted_points.size())];
    std::vector<int> side_a{u};
    std::vector<int> side_b;
    std::unordered_set<int> classified{u};

    int rounds =
        bicluster_round_count(cfg, n, p, static_cast<int>(sorted_points.size()) - 1);

    int64_t before = o.queries_used();
    for (int round = 0; round < rounds; ++round) {
        std::vector<int> unclassified;
        for (int x : sorted_points)
            if (!classified.count(x)) unclassified.push_back(x);
        if (unclassified.size() < 2) break;

        int v = unclassified[rng.below(unclassified.size())];
        std::vector<int> pool;
        for (int x : unclassified)
            if (x != v) pool.push_back(x);

        int tsize = disagreement_set_size(cfg, n, p, static_cast<int>(pool.size()));
        std::vector<int> T = sample_without_replacement(pool, tsize, rng);
        if (disagreement_test(u, v, T, o))
            side_a.push_back(v);
        else
            side_b.push_back(v);
        classified.insert(v);
        ++stats.rounds_run;
    }
    stats.disagreement_queries = o.queries_used() - before;

    // The proof of the recovery guarantee reasons about the larger side, so
    // the sweep uses it (ties go to the anchor's side).
    const std::vector<int>& B = side_a.size() >= side_b.size() ? side_a : side_b;
    if (cfg.mode == ThresholdMode::Theory) {
        double needed = degree_test_min_size(cfg, n, p, 0.5);
        if (static_cast<double>(B.size()) < needed)
            throw InstanceTooSmallError("bicluster: biased set below the degree-test minimum");
    }

    before = o.queries_used();
    std::vector<int> block1, block2;
    std::vector<int> panel;
    for (int v : sorted_points) {
        panel.clear();
        for (int x : B)
            if (x != v) panel.push_back(x);
        if (degree_test(v, panel, o))
            block1.push_back(v);
        else
            block2.push_back(v);
    }
    stats.sweep_queries = o.queries_used() - before;

    std::vector<std::vector<int>> blocks;
    if (!block1.empty()) blocks.push_back(std::move(block1));
    if (!block2.empty()) blocks.push_back(std::move(block2));
    return BiclusterResult{Partition(std::move(blocks)), {}, std::move(stats)};
}

}  // namespace qclust
