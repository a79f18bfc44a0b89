#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qclust/corrclust.hpp"
#include "qclust/errors.hpp"
#include "qclust/harness.hpp"
#include "qclust/infotheo.hpp"
#include "qclust/recovery.hpp"

namespace {

using namespace qclust;

int cmd_run(const std::string& spec_path, const std::string& algo, int n, int k, double p,
            const std::string& noise, int trials, uint64_t seed, const std::string& mode,
            double scale, const std::string& out, double min_success,
            const std::string& dump_transcript) {
    ExperimentSpec spec;
    if (!spec_path.empty()) {
        std::ifstream f(spec_path);
        if (!f) {
            std::cerr << "cannot open spec file: " << spec_path << "\n";
            return 2;
        }
        std::stringstream buf;
        buf << f.rdbuf();
        spec = ExperimentSpec::from_json(buf.str());
    } else {
        auto a = algorithm_from_name(algo);
        if (!a) {
            std::cerr << "unknown --algo " << algo << "\n";
            return 2;
        }
        spec.algorithm = *a;
        spec.generator = GeneratorSpec::balanced(n, k);
        spec.noise.p = p;
        if (noise == "fully_random")
            spec.noise.kind = NoiseSpec::Kind::FullyRandom;
        else if (noise == "nonadaptive_uniform")
            spec.noise.kind = NoiseSpec::Kind::NonAdaptiveUniform;
        else if (noise == "nonadaptive_max_in_zero_out")
            spec.noise.kind = NoiseSpec::Kind::NonAdaptiveMaxInZeroOut;
        else if (noise == "adaptive_always_wrong")
            spec.noise.kind = NoiseSpec::Kind::AdaptiveAlwaysWrong;
        else if (noise == "adaptive_lie_across")
            spec.noise.kind = NoiseSpec::Kind::AdaptiveInClusterTruthCrossClusterLie;
        else if (noise == "adaptive_probability_matcher")
            spec.noise.kind = NoiseSpec::Kind::AdaptiveProbabilityMatcher;
        else {
            std::cerr << "unknown --noise " << noise << "\n";
            return 2;
        }
        spec.trials = trials;
        spec.base_seed = seed;
        spec.cfg.mode = mode == "theory" ? ThresholdMode::Theory : ThresholdMode::Practical;
        spec.cfg.global_scale = scale;
    }

    ExperimentSummary summary = run_experiment(spec);
    if (!out.empty()) write_results(summary, out);

    std::cout << "algorithm: " << algorithm_name(spec.algorithm) << "\n"
              << "trials:    " << summary.trials_run << "\n"
              << "success:   " << summary.success_rate << "\n"
              << "queries:   min " << summary.queries_min << " / median "
              << summary.queries_median << " / max " << summary.queries_max << "\n";

    if (!dump_transcript.empty()) {
        // Re-run trial 0 just to capture its transcript.
        Instance inst =
            generate_instance(spec.generator, mix64(mix64(spec.base_seed, 0), 0x696e7374ULL));
        FaultyOracle oracle(inst, spec.noise.materialize(inst),
                            mix64(mix64(spec.base_seed, 0), 0x6f72636cULL));
        for (int u = 0; u < std::min(inst.n(), 24); ++u)
            for (int v = u + 1; v < std::min(inst.n(), 24); ++v) oracle.query(u, v);
        std::ofstream f(dump_transcript);
        oracle.dump_transcript(f);
    }

    if (min_success > 0.0 && summary.success_rate < min_success) return 1;
    return 0;
}

// Appendix-style failure demonstrations: the probability matcher neutralizes
// disagreement tests, the in/out construction neutralizes them for k = 3, and
// the cross-cluster liar defeats the heaviest-subgraph statistic.
int cmd_demo_adversary(uint64_t seed) {
    std::cout << "== adaptive probability matcher vs disagreement test (p = 0.31) ==\n";
    {
        double p = 0.31;
        auto params = calibrate_probability_matcher(p);
        auto marg = probability_matcher_marginals(p, params);
        std::cout << "calibrated q = " << marg.q << ", r = " << marg.r << "\n";
        int trials = 2000, tsize = 15;
        int yes_same = 0, yes_cross = 0;
        for (int trial = 0; trial < trials; ++trial) {
            Instance inst = generate_instance(GeneratorSpec::balanced(40, 2),
                                              mix64(seed, 11, trial));
            NoiseModel noise =
                NoiseModel::adaptive(p, AdversaryStrategy::probability_matcher(params));
            FaultyOracle o(inst, noise, mix64(seed, 12, trial));
            Rng rng(mix64(seed, 13, trial));
            const auto& c0 = inst.cluster_members(0);
            const auto& c1 = inst.cluster_members(1);
            int u_same = c0[0], v_same = c0[1];
            int u_cross = c0[0], v_cross = c1[0];
            std::vector<int> pool;
            for (int x = 0; x < inst.n(); ++x)
                if (x != u_same && x != v_same && x != v_cross) pool.push_back(x);
            std::vector<int> T = sample_without_replacement(pool, tsize, rng);
            yes_same += disagreement_test(u_same, v_same, T, o) ? 1 : 0;
            yes_cross += disagreement_test(u_cross, v_cross, T, o) ? 1 : 0;
        }
        std::cout << "yes-rate same-cluster:  " << static_cast<double>(yes_same) / trials << "\n"
                  << "yes-rate cross-cluster: " << static_cast<double>(yes_cross) / trials
                  << "  (both should hover near 0.5)\n";
    }

    std::cout << "== non-adaptive p_in/p_out construction, k = 3 (p = 1/3) ==\n";
    {
        double p_in = 0.5 - 1.0 / (4.0 * std::sqrt(2.0));
        double p_out = 0.5 - std::sqrt(2.0) / 4.0;
        double identity = (2.0 / 3.0) * ((1 - p_in) * p_out + (1 - p_out) * p_in) +
                          (1.0 / 3.0) * (p_out * p_out + (1 - p_out) * (1 - p_out));
        std::cout << "analytic agreement probability: " << identity << " (exactly 1/2)\n";
        int trials = 2000, tsize = 15;
        int yes_cross = 0;
        for (int trial = 0; trial < trials; ++trial) {
            Instance inst = generate_instance(GeneratorSpec::balanced(120, 3),
                                              mix64(seed, 21, trial));
            NoiseModel noise =
                NoiseModel::non_adaptive(1.0 / 3.0, pair_probs_in_out(inst, p_in, p_out));
            FaultyOracle o(inst, noise, mix64(seed, 22, trial));
            Rng rng(mix64(seed, 23, trial));
            int u = inst.cluster_members(0)[0], v = inst.cluster_members(1)[0];
            std::vector<int> pool;
            for (int x = 0; x < inst.n(); ++x)
                if (x != u && x != v) pool.push_back(x);
            std::vector<int> T = sample_without_replacement(pool, tsize, rng);
            yes_cross += disagreement_test(u, v, T, o) ? 1 : 0;
        }
        std::cout << "yes-rate cross-cluster: " << static_cast<double>(yes_cross) / trials
                  << "  (should hover near 0.5)\n";
    }

    std::cout << "== cross-cluster liar vs heaviest subgraph (p = 0.45, 8 + 8) ==\n";
    {
        double p = 0.45;
        int trials = 100;
        int heaviest_mixed = 0, val_pure = 0;
        for (int trial = 0; trial < trials; ++trial) {
            Instance inst = generate_instance(GeneratorSpec::balanced(16, 2),
                                              mix64(seed, 31, trial));
            NoiseModel noise = NoiseModel::adaptive(
                p, AdversaryStrategy::in_cluster_truth_cross_cluster_lie());
            FaultyOracle o(inst, noise, mix64(seed, 32, trial));
            std::vector<int> T(16);
            for (int i = 0; i < 16; ++i) T[i] = i;
            SignedWeights w = SignedWeights::from_oracle(T, o);
            auto heavy = heaviest_subgraph(T, w, 8);
            auto is_pure = [&](const std::vector<int>& s) {
                if (s.empty()) return false;
                int l = inst.label_of(s.front());
                for (int x : s)
                    if (inst.label_of(x) != l) return false;
                return true;
            };
            heaviest_mixed += is_pure(heavy) ? 0 : 1;
            auto val_set = largest_no_negative_cut_subset(T, w, 8);
            val_pure += (val_set && is_pure(*val_set)) ? 1 : 0;
        }
        std::cout << "heaviest-subgraph impure rate: "
                  << static_cast<double>(heaviest_mixed) / trials << "\n"
                  << "no-negative-cut pure rate:     " << static_cast<double>(val_pure) / trials
                  << "\n";
    }
    return 0;
}

// Randomized cross-checks of the exhaustive statistics against an
// independently coded enumerator, plus SDP relaxation soundness.
int cmd_validate(uint64_t seed, const std::string& dump_sdp) {
    int failures = 0;
    Rng rng(seed);

    {
        int checks = 50;
        for (int c = 0; c < checks; ++c) {
            int m = 4 + static_cast<int>(rng.below(5));
            Instance inst = generate_instance(GeneratorSpec::balanced(m, 2), rng.next_u64());
            FaultyOracle o(inst, NoiseModel::fully_random(0.3), rng.next_u64());
            std::vector<int> T(m);
            for (int i = 0; i < m; ++i) T[i] = i;
            SignedWeights w = SignedWeights::from_oracle(T, o);
            long long fast = min_cut_value(T, w);
            long long slow = std::numeric_limits<long long>::max();
            for (uint64_t mask = 1; mask + 1 < (1ULL << m); ++mask) {
                long long cut = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        if ((mask >> i & 1) && !(mask >> j & 1)) cut += w.w(i, j);
                slow = std::min(slow, cut);
            }
            if (fast != slow) ++failures;
        }
        std::cout << "min_cut_value vs direct enumeration: "
                  << (failures == 0 ? "ok" : "MISMATCH") << "\n";
    }

    {
        int bad = 0;
        for (int c = 0; c < 30; ++c) {
            int m = 5 + static_cast<int>(rng.below(4));
            PairMatrix F = PairMatrix::Identity(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) F(i, j) = F(j, i) = rng.below(2) ? 1.0 : 0.0;
            auto [part, cost] = brute_force_correlation_clustering(F);
            double tol = 1e-4 * m * m;
            SdpSolution sol = solve_sdp(F, tol, 20000);
            if (sol.objective > cost + tol) ++bad;
            if (!dump_sdp.empty() && c == 0) {
                std::ofstream f(dump_sdp);
                f << "{\"objective\": " << sol.objective
                  << ", \"triangle_residual\": " << sol.triangle_residual
                  << ", \"psd_residual\": " << sol.psd_residual
                  << ", \"iterations\": " << sol.iterations << "}\n";
            }
        }
        failures += bad;
        std::cout << "SDP relaxation soundness: " << (bad == 0 ? "ok" : "VIOLATED") << "\n";
    }

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy same-cluster oracle clustering laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment");
    std::string spec_path, algo = "clustering", noise = "fully_random", mode = "practical";
    std::string out, dump_transcript;
    int n = 60, k = 3, trials = 1;
    double p = 0.1, scale = 0.25, min_success = 0.0;
    uint64_t seed = 1;
    run->add_option("--spec", spec_path, "experiment spec JSON file");
    run->add_option("--algo", algo, "estimation|clustering|fclustering|bicluster|baseline_heaviest");
    run->add_option("--n", n, "point count");
    run->add_option("--k", k, "cluster count (balanced instance)");
    run->add_option("--p", p, "noise level");
    run->add_option("--noise", noise, "noise model name");
    run->add_option("--trials", trials, "trial count");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--mode", mode, "theory|practical");
    run->add_option("--scale", scale, "practical-mode global scale");
    run->add_option("--out", out, "output directory for summary.json / trials.csv");
    run->add_option("--min-success", min_success, "exit 1 if the success rate falls below this");
    run->add_option("--dump-transcript", dump_transcript, "write a trial-0 transcript (JSONL)");

    auto* demo = app.add_subcommand("demo-adversary", "reproduce the adversary failure demos");
    uint64_t demo_seed = 7;
    demo->add_option("--seed", demo_seed, "base seed");

    auto* validate = app.add_subcommand("validate", "brute-force oracle property suites");
    uint64_t val_seed = 11;
    std::string dump_sdp;
    validate->add_option("--seed", val_seed, "base seed");
    validate->add_option("--dump-sdp", dump_sdp, "write one SDP solution summary as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return cmd_run(spec_path, algo, n, k, p, noise, trials, seed, mode, scale, out,
                           min_success, dump_transcript);
        if (demo->parsed()) return cmd_demo_adversary(demo_seed);
        if (validate->parsed()) return cmd_validate(val_seed, dump_sdp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
