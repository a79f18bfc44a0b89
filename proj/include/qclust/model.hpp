#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace qclust {

// Shared numeric tolerance for binary-ness / matrix validity checks.
inline constexpr double kBinaryTol = 1e-9;

// Symmetric matrix over an ordered point set, entries in [0,1]. Binary for
// clustering functions, fractional for SDP solutions.
using PairMatrix = Eigen::MatrixXd;

// Ground-truth instance: n points with dense labels in [0, k).
class Instance {
public:
    Instance(int n, std::vector<int> labels);

    static Instance from_labels(std::vector<int> labels);

    int n() const { return n_; }
    int k() const { return k_; }
    int label_of(int v) const;
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<int>& cluster_members(int c) const;
    std::vector<int> cluster_sizes() const;
    bool same_cluster(int u, int v) const { return label_of(u) == label_of(v); }

private:
    int n_ = 0;
    int k_ = 0;
    std::vector<int> labels_;
    std::vector<std::vector<int>> members_;
};

// A partition of an arbitrary point set into disjoint nonempty blocks.
// Canonical form: each block sorted ascending, blocks ordered by smallest
// element.
struct Partition {
    std::vector<std::vector<int>> blocks;

    Partition() = default;
    explicit Partition(std::vector<std::vector<int>> blocks_in);

    // All points covered, sorted ascending.
    std::vector<int> points() const;
    size_t size() const { return blocks.size(); }

    bool operator==(const Partition& other) const = default;
};

// Upper-triangle (including diagonal) entrywise L1 distance.
double distance(const PairMatrix& a, const PairMatrix& b);

// 0/1 same-block indicator matrix, rows/cols ordered by the partition's own
// sorted point set.
PairMatrix partition_to_matrix(const Partition& p);

// Same, but over an explicit point order (points not in the partition are not
// allowed).
PairMatrix partition_to_matrix(const Partition& p, std::span<const int> order);

bool is_binary_matrix(const PairMatrix& m, double tol = kBinaryTol);
bool is_valid_pair_matrix(const PairMatrix& m, double tol = kBinaryTol);

// |B ∩ C| >= (1/2 + eta) |B|, compared with a small tolerance so exact
// boundary cases land on the inclusive side.
bool is_biased_set(std::span<const int> B, std::span<const int> C, double eta);

// True iff B is biased toward no ground-truth cluster.
bool is_bad_set(std::span<const int> B, const Instance& inst, double eta);

// JSON round-trip used by the harness: {"n": int, "labels": [int; n]}.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace qclust
