#include "qclust/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace qclust {

Instance::Instance(int n, std::vector<int> labels) : n_(n), labels_(std::move(labels)) {
    if (n_ <= 0) throw std::invalid_argument("Instance: n must be positive");
    if (static_cast<int>(labels_.size()) != n_)
        throw std::invalid_argument("Instance: labels must have length n");
    int max_label = -1;
    for (int l : labels_) {
        if (l < 0) throw std::invalid_argument("Instance: negative cluster id");
        max_label = std::max(max_label, l);
    }
    k_ = max_label + 1;
    members_.resize(k_);
    for (int v = 0; v < n_; ++v) members_[labels_[v]].push_back(v);
    for (const auto& m : members_)
        if (m.empty()) throw std::invalid_argument("Instance: cluster ids must be dense");
}

Instance Instance::from_labels(std::vector<int> labels) {
    int n = static_cast<int>(labels.size());
    return Instance(n, std::move(labels));
}

int Instance::label_of(int v) const {
    if (v < 0 || v >= n_) throw std::invalid_argument("Instance: point id out of range");
    return labels_[v];
}

const std::vector<int>& Instance::cluster_members(int c) const {
    if (c < 0 || c >= k_) throw std::invalid_argument("Instance: cluster id out of range");
    return members_[c];
}

std::vector<int> Instance::cluster_sizes() const {
    std::vector<int> sizes(k_);
    for (int c = 0; c < k_; ++c) sizes[c] = static_cast<int>(members_[c].size());
    return sizes;
}

Partition::Partition(std::vector<std::vector<int>> blocks_in) : blocks(std::move(blocks_in)) {
    std::unordered_set<int> seen;
    for (auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("Partition: empty block");
        std::sort(b.begin(), b.end());
        for (int v : b)
            if (!seen.insert(v).second)
                throw std::invalid_argument("Partition: blocks are not disjoint");
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::vector<int> Partition::points() const {
    std::vector<int> all;
    for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    return all;
}

double distance(const PairMatrix& a, const PairMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw std::invalid_argument("distance: dimension mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i; j < a.cols(); ++j) total += std::abs(a(i, j) - b(i, j));
    return total;
}

PairMatrix partition_to_matrix(const Partition& p) {
    std::vector<int> order = p.points();
    return partition_to_matrix(p, order);
}

PairMatrix partition_to_matrix(const Partition& p, std::span<const int> order) {
    std::unordered_map<int, int> pos;
    pos.reserve(order.size());
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    PairMatrix m = PairMatrix::Zero(order.size(), order.size());
    for (size_t i = 0; i < order.size(); ++i) m(i, i) = 1.0;
    for (const auto& block : p.blocks) {
        for (size_t i = 0; i < block.size(); ++i) {
            auto it_i = pos.find(block[i]);
            if (it_i == pos.end())
                throw std::invalid_argument("partition_to_matrix: point missing from order");
            for (size_t j = i + 1; j < block.size(); ++j) {
                auto it_j = pos.find(block[j]);
                if (it_j == pos.end())
                    throw std::invalid_argument("partition_to_matrix: point missing from order");
                m(it_i->second, it_j->second) = 1.0;
                m(it_j->second, it_i->second) = 1.0;
            }
        }
    }
    return m;
}

bool is_binary_matrix(const PairMatrix& m, double tol) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
        }
    return true;
}

bool is_valid_pair_matrix(const PairMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::abs(m(i, i) - 1.0) > tol) return false;
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
            if (m(i, j) < -tol || m(i, j) > 1.0 + tol) return false;
        }
    }
    return true;
}

bool is_biased_set(std::span<const int> B, std::span<const int> C, double eta) {
    if (B.empty()) throw std::invalid_argument("is_biased_set: B must be nonempty");
    std::unordered_set<int> c_set(C.begin(), C.end());
    size_t inter = 0;
    for (int v : B) inter += c_set.count(v);
    double needed = (0.5 + eta) * static_cast<double>(B.size());
    return static_cast<double>(inter) >= needed - kBinaryTol;
}

bool is_bad_set(std::span<const int> B, const Instance& inst, double eta) {
    if (B.empty()) throw std::invalid_argument("is_bad_set: B must be nonempty");
    for (int v : B)
        if (v < 0 || v >= inst.n())
            throw std::invalid_argument("is_bad_set: point id out of range");
    for (int c = 0; c < inst.k(); ++c) {
        const auto& members = inst.cluster_members(c);
        if (is_biased_set(B, std::span<const int>(members), eta)) return false;
    }
    return true;
}

std::string instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["n"] = inst.n();
    j["labels"] = inst.labels();
    return j.dump();
}

Instance instance_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    std::vector<int> labels = j.at("labels").get<std::vector<int>>();
    return Instance(n, std::move(labels));
}

}  // namespace qclust
