#include "qclust/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "qclust/errors.hpp"
#include "qclust/infotheo.hpp"

namespace qclust {

namespace {

constexpr uint64_t kInstanceStream = 0x696e7374ULL;
constexpr uint64_t kOracleStream = 0x6f72636cULL;
constexpr uint64_t kAlgoStream = 0x616c676fULL;

nlohmann::json cfg_to_json(const ThresholdConfig& cfg) {
    nlohmann::json j;
    j["degree_test_min_size_a"] = cfg.degree_test_min_size_a;
    j["degree_test_min_size_b"] = cfg.degree_test_min_size_b;
    j["estimation_block"] = cfg.estimation_block;
    j["clustering_biased_block"] = cfg.clustering_biased_block;
    j["disagreement_set"] = cfg.disagreement_set;
    j["bicluster_rounds"] = cfg.bicluster_rounds;
    j["sample_c"] = cfg.sample_c;
    j["sample_c_prime"] = cfg.sample_c_prime;
    j["rounding_c1"] = cfg.rounding_c1;
    j["fclustering_anchor"] = cfg.fclustering_anchor;
    j["mode"] = cfg.mode == ThresholdMode::Theory ? "theory" : "practical";
    j["global_scale"] = cfg.global_scale;
    j["enumeration_cap"] = cfg.enumeration_cap;
    j["cc_enumeration_cap"] = cfg.cc_enumeration_cap;
    j["sdp_envelope"] = cfg.sdp_envelope;
    j["rounding_delta"] = cfg.rounding_delta;
    j["estimation_block_size"] = cfg.estimation_block_size;
    j["clustering_biased_block_size"] = cfg.clustering_biased_block_size;
    j["disagreement_set_size"] = cfg.disagreement_set_size;
    j["bicluster_round_count"] = cfg.bicluster_round_count;
    j["max_outer_rounds"] = cfg.max_outer_rounds;
    j["solver_max_iters"] = cfg.solver_max_iters;
    j["solver_tol_coeff"] = cfg.solver_tol_coeff;
    return j;
}

ThresholdConfig cfg_from_json(const nlohmann::json& j) {
    ThresholdConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("degree_test_min_size_a", cfg.degree_test_min_size_a);
    get("degree_test_min_size_b", cfg.degree_test_min_size_b);
    get("estimation_block", cfg.estimation_block);
    get("clustering_biased_block", cfg.clustering_biased_block);
    get("disagreement_set", cfg.disagreement_set);
    get("bicluster_rounds", cfg.bicluster_rounds);
    get("sample_c", cfg.sample_c);
    get("sample_c_prime", cfg.sample_c_prime);
    get("rounding_c1", cfg.rounding_c1);
    get("fclustering_anchor", cfg.fclustering_anchor);
    if (j.contains("mode"))
        cfg.mode = j.at("mode").get<std::string>() == "theory" ? ThresholdMode::Theory
                                                               : ThresholdMode::Practical;
    get("global_scale", cfg.global_scale);
    get("enumeration_cap", cfg.enumeration_cap);
    get("cc_enumeration_cap", cfg.cc_enumeration_cap);
    get("sdp_envelope", cfg.sdp_envelope);
    get("rounding_delta", cfg.rounding_delta);
    get("estimation_block_size", cfg.estimation_block_size);
    get("clustering_biased_block_size", cfg.clustering_biased_block_size);
    get("disagreement_set_size", cfg.disagreement_set_size);
    get("bicluster_round_count", cfg.bicluster_round_count);
    get("max_outer_rounds", cfg.max_outer_rounds);
    get("solver_max_iters", cfg.solver_max_iters);
    get("solver_tol_coeff", cfg.solver_tol_coeff);
    return cfg;
}

std::string noise_kind_name(NoiseSpec::Kind k) {
    switch (k) {
        case NoiseSpec::Kind::FullyRandom: return "fully_random";
        case NoiseSpec::Kind::NonAdaptiveUniform: return "nonadaptive_uniform";
        case NoiseSpec::Kind::NonAdaptiveMaxInZeroOut: return "nonadaptive_max_in_zero_out";
        case NoiseSpec::Kind::NonAdaptiveInOut: return "nonadaptive_in_out";
        case NoiseSpec::Kind::AdaptiveAlwaysWrong: return "adaptive_always_wrong";
        case NoiseSpec::Kind::AdaptiveInClusterTruthCrossClusterLie:
            return "adaptive_in_cluster_truth_cross_cluster_lie";
        case NoiseSpec::Kind::AdaptiveProbabilityMatcher: return "adaptive_probability_matcher";
    }
    return "unknown";
}

NoiseSpec::Kind noise_kind_from_name(const std::string& s) {
    if (s == "fully_random") return NoiseSpec::Kind::FullyRandom;
    if (s == "nonadaptive_uniform") return NoiseSpec::Kind::NonAdaptiveUniform;
    if (s == "nonadaptive_max_in_zero_out") return NoiseSpec::Kind::NonAdaptiveMaxInZeroOut;
    if (s == "nonadaptive_in_out") return NoiseSpec::Kind::NonAdaptiveInOut;
    if (s == "adaptive_always_wrong") return NoiseSpec::Kind::AdaptiveAlwaysWrong;
    if (s == "adaptive_in_cluster_truth_cross_cluster_lie")
        return NoiseSpec::Kind::AdaptiveInClusterTruthCrossClusterLie;
    if (s == "adaptive_probability_matcher") return NoiseSpec::Kind::AdaptiveProbabilityMatcher;
    throw std::invalid_argument("unknown noise kind: " + s);
}

}  // namespace

GeneratorSpec GeneratorSpec::explicit_sizes(std::vector<int> sizes) {
    GeneratorSpec g;
    g.kind = Kind::Explicit;
    g.cluster_sizes = std::move(sizes);
    return g;
}

GeneratorSpec GeneratorSpec::balanced(int n, int k) {
    GeneratorSpec g;
    g.kind = Kind::Balanced;
    g.n = n;
    g.k = k;
    return g;
}

GeneratorSpec GeneratorSpec::geometric(int n, int k, double ratio) {
    GeneratorSpec g;
    g.kind = Kind::Geometric;
    g.n = n;
    g.k = k;
    g.ratio = ratio;
    return g;
}

std::vector<int> GeneratorSpec::sizes() const {
    std::vector<int> out;
    switch (kind) {
        case Kind::Explicit:
            out = cluster_sizes;
            break;
        case Kind::Balanced: {
            if (k <= 0 || n < k) throw std::invalid_argument("balanced: need n >= k >= 1");
            out.assign(k, n / k);
            for (int i = 0; i < n % k; ++i) ++out[i];
            break;
        }
        case Kind::Geometric: {
            if (k <= 0 || n < k || ratio <= 0.0)
                throw std::invalid_argument("geometric: need n >= k >= 1 and ratio > 0");
            // Weights ratio^(k-1), ..., ratio, 1; floor shares, remainder to
            // the largest cluster.
            double total_w = 0.0;
            std::vector<double> w(k);
            for (int i = 0; i < k; ++i) {
                w[i] = std::pow(ratio, k - 1 - i);
                total_w += w[i];
            }
            int assigned = 0;
            out.resize(k);
            for (int i = 0; i < k; ++i) {
                out[i] = static_cast<int>(std::floor(n * w[i] / total_w));
                assigned += out[i];
            }
            out[0] += n - assigned;
            break;
        }
    }
    for (int s : out)
        if (s <= 0) throw std::invalid_argument("generator: zero-size cluster");
    return out;
}

NoiseModel NoiseSpec::materialize(const Instance& inst) const {
    switch (kind) {
        case Kind::FullyRandom:
            return NoiseModel::fully_random(p);
        case Kind::NonAdaptiveUniform:
            return NoiseModel::non_adaptive(p);
        case Kind::NonAdaptiveMaxInZeroOut:
            return NoiseModel::non_adaptive(p, pair_probs_in_out(inst, p, 0.0));
        case Kind::NonAdaptiveInOut:
            return NoiseModel::non_adaptive(p, pair_probs_in_out(inst, p_in, p_out));
        case Kind::AdaptiveAlwaysWrong:
            return NoiseModel::adaptive(p, AdversaryStrategy::always_wrong());
        case Kind::AdaptiveInClusterTruthCrossClusterLie:
            return NoiseModel::adaptive(p,
                                        AdversaryStrategy::in_cluster_truth_cross_cluster_lie());
        case Kind::AdaptiveProbabilityMatcher:
            return NoiseModel::adaptive(
                p, AdversaryStrategy::probability_matcher(calibrate_probability_matcher(p)));
    }
    throw std::invalid_argument("NoiseSpec: unknown kind");
}

std::string NoiseSpec::name() const { return noise_kind_name(kind); }

std::string algorithm_name(AlgorithmKind a) {
    switch (a) {
        case AlgorithmKind::Estimation: return "estimation";
        case AlgorithmKind::Clustering: return "clustering";
        case AlgorithmKind::FClustering: return "fclustering";
        case AlgorithmKind::Bicluster: return "bicluster";
        case AlgorithmKind::BaselineHeaviest: return "baseline_heaviest";
    }
    return "unknown";
}

std::optional<AlgorithmKind> algorithm_from_name(const std::string& name) {
    if (name == "estimation") return AlgorithmKind::Estimation;
    if (name == "clustering") return AlgorithmKind::Clustering;
    if (name == "fclustering") return AlgorithmKind::FClustering;
    if (name == "bicluster") return AlgorithmKind::Bicluster;
    if (name == "baseline_heaviest") return AlgorithmKind::BaselineHeaviest;
    return std::nullopt;
}

std::string ExperimentSpec::to_json() const {
    nlohmann::json j;
    nlohmann::json g;
    switch (generator.kind) {
        case GeneratorSpec::Kind::Explicit:
            g["kind"] = "explicit";
            g["cluster_sizes"] = generator.cluster_sizes;
            break;
        case GeneratorSpec::Kind::Balanced:
            g["kind"] = "balanced";
            g["n"] = generator.n;
            g["k"] = generator.k;
            break;
        case GeneratorSpec::Kind::Geometric:
            g["kind"] = "geometric";
            g["n"] = generator.n;
            g["k"] = generator.k;
            g["ratio"] = generator.ratio;
            break;
    }
    j["generator"] = std::move(g);
    j["noise"] = {{"kind", noise.name()}, {"p", noise.p}, {"p_in", noise.p_in},
                  {"p_out", noise.p_out}};
    j["algorithm"] = algorithm_name(algorithm);
    j["cfg"] = cfg_to_json(cfg);
    j["trials"] = trials;
    j["base_seed"] = base_seed;
    j["success_min_cluster_size"] = success_min_cluster_size;
    return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentSpec spec;
    const auto& g = j.at("generator");
    std::string gk = g.at("kind").get<std::string>();
    if (gk == "explicit")
        spec.generator = GeneratorSpec::explicit_sizes(g.at("cluster_sizes").get<std::vector<int>>());
    else if (gk == "balanced")
        spec.generator = GeneratorSpec::balanced(g.at("n").get<int>(), g.at("k").get<int>());
    else if (gk == "geometric")
        spec.generator = GeneratorSpec::geometric(g.at("n").get<int>(), g.at("k").get<int>(),
                                                  g.at("ratio").get<double>());
    else
        throw std::invalid_argument("unknown generator kind: " + gk);

    const auto& nj = j.at("noise");
    spec.noise.kind = noise_kind_from_name(nj.at("kind").get<std::string>());
    spec.noise.p = nj.value("p", 0.0);
    spec.noise.p_in = nj.value("p_in", 0.0);
    spec.noise.p_out = nj.value("p_out", 0.0);

    auto algo = algorithm_from_name(j.at("algorithm").get<std::string>());
    if (!algo) throw std::invalid_argument("unknown algorithm");
    spec.algorithm = *algo;
    if (j.contains("cfg")) spec.cfg = cfg_from_json(j.at("cfg"));
    spec.trials = j.value("trials", 1);
    spec.base_seed = j.value("base_seed", uint64_t{1});
    spec.success_min_cluster_size = j.value("success_min_cluster_size", 0);
    return spec;
}

Instance generate_instance(const GeneratorSpec& gen, uint64_t seed) {
    std::vector<int> sizes = gen.sizes();
    int n = std::accumulate(sizes.begin(), sizes.end(), 0);
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng = Rng::keyed(seed, kInstanceStream);
    shuffle_inplace(ids, rng);
    std::vector<int> labels(n);
    int at = 0;
    for (size_t c = 0; c < sizes.size(); ++c)
        for (int i = 0; i < sizes[c]; ++i) labels[ids[at++]] = static_cast<int>(c);
    return Instance(n, std::move(labels));
}

namespace {

RecoveredReport report_for(const std::vector<int>& cluster, const Instance& inst) {
    RecoveredReport rep;
    rep.size = static_cast<int>(cluster.size());
    if (cluster.empty()) return rep;
    int label = inst.label_of(cluster.front());
    rep.pure = std::all_of(cluster.begin(), cluster.end(),
                           [&](int v) { return inst.label_of(v) == label; });
    if (rep.pure) {
        const auto& truth = inst.cluster_members(label);
        rep.exact_match = truth.size() == cluster.size() &&
                          std::is_permutation(cluster.begin(), cluster.end(), truth.begin());
    }
    return rep;
}

bool exact_large_recovery(const std::vector<std::vector<int>>& clusters, const Instance& inst,
                          int min_size) {
    for (const auto& c : clusters) {
        RecoveredReport rep = report_for(c, inst);
        if (!rep.pure || !rep.exact_match) return false;
    }
    std::unordered_set<int> matched_labels;
    for (const auto& c : clusters)
        if (!c.empty()) matched_labels.insert(inst.label_of(c.front()));
    for (int label = 0; label < inst.k(); ++label) {
        if (static_cast<int>(inst.cluster_members(label).size()) < std::max(min_size, 1)) continue;
        if (!matched_labels.count(label)) return false;
    }
    return true;
}

}  // namespace

TrialResult run_trial(const ExperimentSpec& spec, int trial_index) {
    TrialResult result;
    result.trial = trial_index;
    result.seed = mix64(spec.base_seed, static_cast<uint64_t>(trial_index));

    Instance inst = generate_instance(spec.generator, mix64(result.seed, kInstanceStream));
    FaultyOracle oracle(inst, spec.noise.materialize(inst), mix64(result.seed, kOracleStream));
    Rng rng(mix64(result.seed, kAlgoStream));

    std::vector<int> V(inst.n());
    std::iota(V.begin(), V.end(), 0);

    auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<int>> clusters;
    int min_size = spec.success_min_cluster_size;
    bool baseline_success = false;
    try {
        switch (spec.algorithm) {
            case AlgorithmKind::Estimation: {
                auto res = estimation(V, spec.noise.p, oracle, spec.cfg, rng);
                clusters = std::move(res.clusters);
                result.trace.unassigned = std::move(res.leftover);
                result.sample_phase_queries = res.sample_phase_queries;
                result.sweep_phase_queries = res.sweep_phase_queries;
                result.warnings = std::move(res.warnings);
                if (min_size <= 0)
                    min_size = find_big_threshold(spec.cfg, inst.n(), spec.noise.p,
                                                  std::numeric_limits<int>::max() / 2);
                break;
            }
            case AlgorithmKind::Clustering: {
                auto res = clustering(V, spec.noise.p, oracle, spec.cfg, rng);
                clusters = std::move(res.clusters);
                result.trace = std::move(res.trace);
                result.sample_phase_queries = result.trace.sample_phase_queries;
                result.sweep_phase_queries = result.trace.sweep_phase_queries;
                result.warnings = result.trace.warnings;
                if (min_size <= 0) min_size = 1;
                break;
            }
            case AlgorithmKind::FClustering: {
                auto res = fclustering(V, oracle, spec.cfg, rng);
                clusters = std::move(res.clusters);
                result.trace = std::move(res.trace);
                result.sample_phase_queries = result.trace.sample_phase_queries;
                result.sweep_phase_queries = result.trace.sweep_phase_queries;
                result.warnings = result.trace.warnings;
                if (min_size <= 0) min_size = 1;
                break;
            }
            case AlgorithmKind::Bicluster: {
                auto res = bicluster(V, spec.noise.p, oracle, spec.cfg, rng);
                for (auto& b : res.partition.blocks) clusters.push_back(b);
                result.sweep_phase_queries = res.stats.sweep_queries;
                result.sample_phase_queries = res.stats.disagreement_queries;
                result.warnings = std::move(res.stats.warnings);
                if (min_size <= 0) min_size = 1;
                break;
            }
            case AlgorithmKind::BaselineHeaviest: {
                SignedWeights w = SignedWeights::from_oracle(V, oracle);
                int floor_size = find_big_threshold(spec.cfg, inst.n(), spec.noise.p,
                                                    std::numeric_limits<int>::max() / 2);
                floor_size = std::min<int>(floor_size, inst.n());
                auto set = heaviest_subgraph(V, w, floor_size, spec.cfg.enumeration_cap);
                RecoveredReport rep = report_for(set, inst);
                baseline_success = rep.pure;
                clusters.push_back(std::move(set));
                break;
            }
        }
        result.success = spec.algorithm == AlgorithmKind::BaselineHeaviest
                             ? baseline_success
                             : exact_large_recovery(clusters, inst, min_size);
    } catch (const std::exception& e) {
        result.success = false;
        result.warnings.push_back(std::string("trial failed: ") + e.what());
    }
    auto stop = std::chrono::steady_clock::now();
    result.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();

    for (const auto& c : clusters) result.recovered.push_back(report_for(c, inst));
    result.distinct_queries = oracle.queries_used();
    return result;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
    ExperimentSummary summary;
    summary.spec = spec;
    std::vector<int64_t> queries;
    int successes = 0;
    for (int i = 0; i < spec.trials; ++i) {
        TrialResult r = run_trial(spec, i);
        successes += r.success ? 1 : 0;
        queries.push_back(r.distinct_queries);
        summary.results.push_back(std::move(r));
    }
    summary.trials_run = spec.trials;
    summary.success_rate = static_cast<double>(successes) / spec.trials;
    std::sort(queries.begin(), queries.end());
    summary.queries_min = queries.front();
    summary.queries_max = queries.back();
    summary.queries_median = queries[(queries.size() - 1) / 2];
    return summary;
}

std::string TrialResult::canonical() const {
    nlohmann::json j;
    j["trial"] = trial;
    j["seed"] = seed;
    j["success"] = success;
    j["distinct_queries"] = distinct_queries;
    j["sample_phase_queries"] = sample_phase_queries;
    j["sweep_phase_queries"] = sweep_phase_queries;
    j["warnings"] = warnings;
    nlohmann::json rec = nlohmann::json::array();
    for (const auto& r : recovered)
        rec.push_back({{"size", r.size}, {"exact", r.exact_match}, {"pure", r.pure}});
    j["recovered"] = std::move(rec);
    return j.dump();
}

std::string ExperimentSummary::to_json() const {
    nlohmann::json j;
    j["spec"] = nlohmann::json::parse(spec.to_json());
    j["trials_run"] = trials_run;
    j["success_rate"] = success_rate;
    j["queries_min"] = queries_min;
    j["queries_median"] = queries_median;
    j["queries_max"] = queries_max;
    nlohmann::json per_trial = nlohmann::json::array();
    for (const auto& r : results) {
        per_trial.push_back({{"trial", r.trial},
                             {"seed", r.seed},
                             {"success", r.success},
                             {"distinct_queries", r.distinct_queries},
                             {"wall_time_ms", r.wall_time_ms}});
    }
    j["trials"] = std::move(per_trial);
    return j.dump(2);
}

std::string trials_csv(const ExperimentSummary& summary) {
    std::ostringstream os;
    os << "trial,seed,success,distinct_queries,wall_time_ms,warnings\n";
    for (const auto& r : summary.results) {
        std::string joined;
        for (size_t i = 0; i < r.warnings.size(); ++i) {
            if (i) joined += ';';
            joined += r.warnings[i];
        }
        std::string escaped;
        for (char c : joined) {
            escaped += c;
            if (c == '"') escaped += '"';
        }
        os << r.trial << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
           << r.distinct_queries << ',' << r.wall_time_ms << ",\"" << escaped << "\"\n";
    }
    return os.str();
}

void write_results(const ExperimentSummary& summary, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(std::filesystem::path(out_dir) / "summary.json");
        if (!f) throw std::runtime_error("write_results: cannot open summary.json");
        f << summary.to_json() << "\n";
    }
    {
        std::ofstream f(std::filesystem::path(out_dir) / "trials.csv");
        if (!f) throw std::runtime_error("write_results: cannot open trials.csv");
        f << trials_csv(summary);
    }
}

}  // namespace qclust
