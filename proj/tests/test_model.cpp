#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "qclust/corrclust.hpp"
#include "qclust/model.hpp"
#include "qclust/rng.hpp"

using namespace qclust;

namespace {

// Independent oracle for the distance: plain double loop over the upper
// triangle including the diagonal.
double distance_by_loop(const PairMatrix& a, const PairMatrix& b) {
    double total = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j) total += std::abs(a(i, j) - b(i, j));
    return total;
}

PairMatrix random_binary_symmetric(int m, Rng& rng) {
    PairMatrix x = PairMatrix::Identity(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) x(i, j) = x(j, i) = rng.below(2) ? 1.0 : 0.0;
    return x;
}

}  // namespace

TEST_CASE("distance on forced examples") {
    PairMatrix ones = PairMatrix::Ones(3, 3);
    PairMatrix idm = PairMatrix::Identity(3, 3);
    CHECK(distance(ones, ones) == doctest::Approx(0.0));
    CHECK(distance(ones, idm) == doctest::Approx(3.0));
    CHECK_THROWS_AS(distance(ones, PairMatrix::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("distance matches a direct double loop on random matrices") {
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        PairMatrix a = random_binary_symmetric(6, rng);
        PairMatrix b = random_binary_symmetric(6, rng);
        CHECK(distance(a, b) == doctest::Approx(distance_by_loop(a, b)));
    }
}

TEST_CASE("distance is a metric on 4-point binary symmetric matrices") {
    // All 2^6 = 64 unit-diagonal symmetric binary matrices.
    std::vector<PairMatrix> all;
    for (int mask = 0; mask < 64; ++mask) {
        PairMatrix m = PairMatrix::Identity(4, 4);
        int bit = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                m(i, j) = m(j, i) = (mask >> bit & 1) ? 1.0 : 0.0;
                ++bit;
            }
        all.push_back(std::move(m));
    }
    for (size_t a = 0; a < all.size(); ++a) {
        CHECK(distance(all[a], all[a]) == doctest::Approx(0.0));
        for (size_t b = a + 1; b < all.size(); ++b) {
            double dab = distance(all[a], all[b]);
            CHECK(dab == doctest::Approx(distance(all[b], all[a])));
            CHECK(dab > 0.0);
        }
    }
    Rng rng(7);
    for (int rep = 0; rep < 3000; ++rep) {
        const PairMatrix& x = all[rng.below(64)];
        const PairMatrix& y = all[rng.below(64)];
        const PairMatrix& z = all[rng.below(64)];
        CHECK(distance(x, z) <= distance(x, y) + distance(y, z) + 1e-12);
    }
}

TEST_CASE("partition_to_matrix forced examples") {
    CHECK(partition_to_matrix(Partition({{0, 1, 2}})).isApprox(PairMatrix::Ones(3, 3)));
    CHECK(partition_to_matrix(Partition({{0}, {1}, {2}})).isApprox(PairMatrix::Identity(3, 3)));
    PairMatrix m = partition_to_matrix(Partition({{0, 1}, {2}}));
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
    CHECK(m(1, 2) == 0.0);
}

TEST_CASE("partition_to_matrix is injective over all partitions of 5 points") {
    std::set<std::vector<double>> seen;
    int count = 0;
    enumerate_partitions(5, [&](const std::vector<int>& rgs) {
        int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<int>> bl(blocks);
        for (int i = 0; i < 5; ++i) bl[rgs[i]].push_back(i);
        PairMatrix m = partition_to_matrix(Partition(std::move(bl)));
        std::vector<double> flat(m.data(), m.data() + m.size());
        CHECK(seen.insert(flat).second);
        ++count;
    });
    CHECK(count == 52);  // Bell(5)
}

TEST_CASE("biased-set predicate boundary arithmetic") {
    std::vector<int> B{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> C7{0, 1, 2, 3, 4, 5, 6};
    std::vector<int> C6{0, 1, 2, 3, 4, 5};
    CHECK(is_biased_set(B, B, 0.5));             // B inside C
    CHECK(is_biased_set(B, C7, 0.2));            // 7 >= 7
    CHECK_FALSE(is_biased_set(B, C6, 0.2));      // 6 < 7
    CHECK_THROWS_AS(is_biased_set({}, B, 0.1), std::invalid_argument);
}

TEST_CASE("biased-set predicate is monotone non-increasing in eta") {
    Rng rng(99);
    for (int rep = 0; rep < 200; ++rep) {
        int bsize = 1 + static_cast<int>(rng.below(12));
        std::vector<int> B, C;
        for (int i = 0; i < bsize; ++i) B.push_back(static_cast<int>(rng.below(20)));
        std::sort(B.begin(), B.end());
        B.erase(std::unique(B.begin(), B.end()), B.end());
        for (int i = 0; i < 10; ++i) C.push_back(static_cast<int>(rng.below(20)));
        bool prev = true;
        for (double eta : {0.01, 0.1, 0.2, 0.3, 0.4, 0.5}) {
            bool cur = is_biased_set(B, C, eta);
            if (!prev) CHECK_FALSE(cur);
            prev = cur;
        }
    }
}

TEST_CASE("a set cannot be biased toward two clusters at once for eta > 0") {
    Rng rng(123);
    std::vector<int> labels(30);
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    labels[0] = 0;
    labels[1] = 1;
    labels[2] = 2;
    Instance inst = Instance::from_labels(labels);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<int> B;
        for (int v = 0; v < inst.n(); ++v)
            if (rng.below(2)) B.push_back(v);
        if (B.empty()) continue;
        for (double eta : {0.05, 0.2, 0.45}) {
            int biased_count = 0;
            for (int c = 0; c < inst.k(); ++c) {
                const auto& mem = inst.cluster_members(c);
                biased_count += is_biased_set(B, std::span<const int>(mem), eta) ? 1 : 0;
            }
            CHECK(biased_count <= 1);
        }
    }
}

TEST_CASE("bad-set predicate matches a direct per-cluster evaluation") {
    Rng rng(321);
    std::vector<int> labels(24);
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    labels[0] = 0;
    labels[1] = 1;
    labels[2] = 2;
    Instance inst = Instance::from_labels(labels);

    // Forced cases first: a subcluster is never bad; an even split is bad.
    std::vector<int> sub(inst.cluster_members(0).begin(),
                         inst.cluster_members(0).begin() +
                             std::min<size_t>(4, inst.cluster_members(0).size()));
    CHECK_FALSE(is_bad_set(sub, inst, 0.3));

    for (int rep = 0; rep < 200; ++rep) {
        std::vector<int> B;
        for (int v = 0; v < inst.n(); ++v)
            if (rng.below(2)) B.push_back(v);
        if (B.empty()) continue;
        double eta = 0.1 + 0.35 * rng.uniform01();
        bool expect = true;
        for (int c = 0; c < inst.k(); ++c) {
            size_t inter = 0;
            for (int v : B) inter += inst.label_of(v) == c ? 1 : 0;
            if (static_cast<double>(inter) >= (0.5 + eta) * B.size() - 1e-9) expect = false;
        }
        CHECK(is_bad_set(B, inst, eta) == expect);
    }
}

TEST_CASE("five-five split across two clusters is bad for small eta") {
    std::vector<int> labels(20, 0);
    for (int i = 10; i < 20; ++i) labels[i] = 1;
    Instance inst = Instance::from_labels(labels);
    std::vector<int> B{0, 1, 2, 3, 4, 10, 11, 12, 13, 14};
    CHECK(is_bad_set(B, inst, 0.1));
}

TEST_CASE("instance JSON round trip") {
    Instance inst = Instance::from_labels({0, 1, 0, 2, 1, 2});
    Instance back = instance_from_json(instance_to_json(inst));
    CHECK(back.n() == inst.n());
    CHECK(back.k() == inst.k());
    CHECK(back.labels() == inst.labels());
}

TEST_CASE("instance invariants are enforced") {
    CHECK_THROWS_AS(Instance::from_labels({0, 2}), std::invalid_argument);  // gap in ids
    CHECK_THROWS_AS(Instance::from_labels({}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(std::vector<std::vector<int>>{{0, 1}, {1, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Partition(std::vector<std::vector<int>>{{}}), std::invalid_argument);
}
