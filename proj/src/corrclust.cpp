#include "qclust/corrclust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qclust/errors.hpp"

namespace qclust {

Partition round_once(const PairMatrix& X, std::span<const int> order, Rng& rng) {
    const int m = static_cast<int>(order.size());
    if (X.rows() != m || X.cols() != m)
        throw std::invalid_argument("round_once: X size does not match point set");
    std::vector<int> remaining(m);
    for (int i = 0; i < m; ++i) remaining[i] = i;
    std::vector<std::vector<int>> blocks;
    while (!remaining.empty()) {
        size_t pick = rng.below(remaining.size());
        int pivot = remaining[pick];
        std::vector<int> block{order[pivot]};
        std::vector<int> rest;
        rest.reserve(remaining.size());
        for (int idx : remaining) {
            if (idx == pivot) continue;
            if (rng.bernoulli(std::clamp(X(pivot, idx), 0.0, 1.0)))
                block.push_back(order[idx]);
            else
                rest.push_back(idx);
        }
        blocks.push_back(std::move(block));
        remaining = std::move(rest);
    }
    return Partition(std::move(blocks));
}

Partition approx_correlation_cluster(std::span<const int> T, double delta, FaultyOracle& o,
                                     const ThresholdConfig& cfg, Rng& rng) {
    if (static_cast<int>(T.size()) > cfg.sdp_envelope)
        throw ResourceError("approx_correlation_cluster: sample exceeds the solver envelope");
    if (T.size() < 1) throw std::invalid_argument("approx_correlation_cluster: empty sample");

    std::vector<int> order(T.begin(), T.end());
    std::sort(order.begin(), order.end());
    const int m = static_cast<int>(order.size());

    PairMatrix F = PairMatrix::Identity(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double a = static_cast<double>(o.query(order[i], order[j]));
            F(i, j) = a;
            F(j, i) = a;
        }
    if (m == 1) return Partition(std::vector<std::vector<int>>{{order[0]}});

    SdpSolution sol = solve_sdp(F, solver_tolerance(cfg, m), cfg.solver_max_iters);

    delta = std::clamp(delta, 1e-12, 1.0);
    int repetitions = static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 1;

    Partition best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repetitions; ++r) {
        Rng round_rng = rng.split(static_cast<uint64_t>(r) + 1);
        Partition cand = round_once(sol.X, order, round_rng);
        double d = distance(partition_to_matrix(cand, order), sol.X);
        if (d < best_d) {
            best_d = d;
            best = std::move(cand);
        }
    }
    return best;
}

void enumerate_partitions(int m, const std::function<void(const std::vector<int>&)>& visit) {
    if (m <= 0) return;
    std::vector<int> rgs(m, 0);
    std::vector<int> maxima(m, 0);  // maxima[i] = max(rgs[0..i])
    for (;;) {
        visit(rgs);
        int i = m - 1;
        while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
        if (i == 0) return;
        ++rgs[i];
        maxima[i] = std::max(maxima[i - 1], rgs[i]);
        for (int j = i + 1; j < m; ++j) {
            rgs[j] = 0;
            maxima[j] = maxima[i];
        }
    }
}

std::pair<Partition, double> brute_force_correlation_clustering(const PairMatrix& F, int cap) {
    const int m = static_cast<int>(F.rows());
    if (m == 0 || F.cols() != m)
        throw std::invalid_argument("brute_force_correlation_clustering: F must be square");
    if (m > cap)
        throw ResourceError("brute_force_correlation_clustering: size above enumeration cap");
    if (!is_binary_matrix(F))
        throw std::invalid_argument("brute_force_correlation_clustering: F must be binary");

    std::vector<int> best_rgs;
    double best_cost = std::numeric_limits<double>::infinity();
    enumerate_partitions(m, [&](const std::vector<int>& rgs) {
        double cost = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                bool same = rgs[i] == rgs[j];
                cost += same ? 1.0 - F(i, j) : F(i, j);
            }
        if (cost < best_cost) {
            best_cost = cost;
            best_rgs = rgs;
        }
    });

    int blocks_count = *std::max_element(best_rgs.begin(), best_rgs.end()) + 1;
    std::vector<std::vector<int>> blocks(blocks_count);
    for (int i = 0; i < m; ++i) blocks[best_rgs[i]].push_back(i);
    return {Partition(std::move(blocks)), best_cost};
}

}  // namespace qclust
