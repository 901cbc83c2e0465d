#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "missfci/bench.hpp"
#include "missfci/metrics.hpp"
#include "missfci/rng.hpp"
#include "missfci/synth.hpp"

namespace mf = missfci;

namespace {

struct ConfigFlags {
    std::string config_path;
    int p = -1;
    double expected_neighbors = -1;
    std::vector<int> latent_confounders, missingness_drivers, vars_per_driver;
    double r_lo = -1, r_hi = -1;
    std::uint64_t seed = 0;
    std::vector<int> sample_sizes;
    int n_replicates = -1;
    std::string missingness;
    std::vector<std::string> algorithms, strategies;
    double alpha = -1;
    std::string output_dir;
    int jobs = -1;
    bool emit_manifests = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override");
    cmd->add_option("--p", f.p, "number of variables");
    cmd->add_option("--expected-neighbors", f.expected_neighbors,
                    "expected neighborhood size E(N)");
    cmd->add_option("--latent-confounders", f.latent_confounders,
                    "lo hi range of latent confounder count")->expected(2);
    cmd->add_option("--missingness-drivers", f.missingness_drivers,
                    "lo hi range of missingness driver count")->expected(2);
    cmd->add_option("--vars-per-driver", f.vars_per_driver,
                    "lo hi range of variables governed per driver")->expected(2);
    cmd->add_option("--r-lo", f.r_lo, "lower removal-quantile bound");
    cmd->add_option("--r-hi", f.r_hi, "upper removal-quantile bound");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--sample-sizes", f.sample_sizes, "sample sizes per replicate");
    cmd->add_option("--n-replicates", f.n_replicates, "replicate count");
    cmd->add_option("--missingness", f.missingness, "mnar | mar | mcar | none");
    cmd->add_option("--algorithms", f.algorithms, "fci rfci");
    cmd->add_option("--strategies", f.strategies,
                    "testwise listwise wrapper heuristic oracle");
    cmd->add_option("--alpha", f.alpha, "test significance level");
    cmd->add_option("--output-dir", f.output_dir, "directory for CSV outputs");
    cmd->add_option("--jobs", f.jobs, "parallel replicate workers");
    cmd->add_flag("--emit-manifests", f.emit_manifests,
                  "write one JSON manifest per replicate");
}

mf::Missingness parse_missingness(const std::string& s) {
    for (mf::Missingness m : {mf::Missingness::MNAR, mf::Missingness::MAR,
                              mf::Missingness::MCAR, mf::Missingness::None})
        if (s == mf::missingness_name(m)) return m;
    throw CLI::ValidationError("--missingness", "unknown value: " + s);
}

mf::ExperimentConfig build_config(const CLI::App* cmd, const ConfigFlags& f) {
    mf::ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = mf::config_from_json_file(f.config_path);

    auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--p")) cfg.gen.p = f.p;
    if (given("--expected-neighbors")) cfg.gen.expected_neighbors = f.expected_neighbors;
    if (given("--latent-confounders"))
        cfg.gen.latent_confounders = {f.latent_confounders[0], f.latent_confounders[1]};
    if (given("--missingness-drivers"))
        cfg.gen.missingness_drivers = {f.missingness_drivers[0], f.missingness_drivers[1]};
    if (given("--vars-per-driver"))
        cfg.gen.vars_per_driver = {f.vars_per_driver[0], f.vars_per_driver[1]};
    if (given("--r-lo")) cfg.gen.r_lo = f.r_lo;
    if (given("--r-hi")) cfg.gen.r_hi = f.r_hi;
    if (given("--seed")) cfg.gen.seed = f.seed;
    if (given("--sample-sizes")) cfg.sample_sizes = f.sample_sizes;
    if (given("--n-replicates")) cfg.n_replicates = f.n_replicates;
    if (given("--missingness")) cfg.missingness = parse_missingness(f.missingness);
    if (given("--algorithms")) {
        cfg.algorithms.clear();
        for (const std::string& a : f.algorithms) {
            if (a == "fci") cfg.algorithms.push_back(mf::Algo::FCI);
            else if (a == "rfci") cfg.algorithms.push_back(mf::Algo::RFCI);
            else throw CLI::ValidationError("--algorithms", "unknown value: " + a);
        }
    }
    if (given("--strategies")) {
        cfg.strategies.clear();
        for (const std::string& s : f.strategies) {
            bool found = false;
            for (mf::Strategy st : {mf::Strategy::TestWise, mf::Strategy::ListWise,
                                    mf::Strategy::Wrapper, mf::Strategy::Heuristic,
                                    mf::Strategy::Oracle})
                if (s == mf::strategy_name(st)) {
                    cfg.strategies.push_back(st);
                    found = true;
                }
            if (!found) throw CLI::ValidationError("--strategies", "unknown value: " + s);
        }
    }
    if (given("--alpha")) cfg.alpha = f.alpha;
    if (given("--output-dir")) cfg.output_dir = f.output_dir;
    if (given("--jobs")) cfg.jobs = f.jobs;
    if (given("--emit-manifests")) cfg.emit_manifests = true;
    mf::validate(cfg);
    return cfg;
}

int cmd_generate(const CLI::App* cmd, const ConfigFlags& f, int n,
                 const std::string& out_path, const std::string& truth_path) {
    mf::ExperimentConfig cfg = build_config(cmd, f);
    mf::Rng rng(cfg.gen.seed);
    mf::SemModel model = mf::generate_dag(cfg.gen, rng);
    mf::Dataset data = mf::sample_sem(model, n, rng);

    mf::Injected inj = [&] {
        switch (cfg.missingness) {
            case mf::Missingness::MNAR: return mf::inject_mnar(model, data, cfg.gen, rng);
            case mf::Missingness::MAR: return mf::inject_mar(model, data, cfg.gen, rng);
            case mf::Missingness::MCAR: return mf::inject_mcar(model, data, cfg.gen, rng);
            case mf::Missingness::None: return mf::no_injection(model, data);
        }
        throw std::logic_error("bad missingness");
    }();

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << '\n';
        return 1;
    }
    mf::write_dataset_csv(out, inj.data);
    std::cout << "wrote " << inj.data.rows() << " rows x " << inj.data.cols()
              << " columns to " << out_path << '\n';

    if (!truth_path.empty()) {
        std::ofstream tout(truth_path);
        if (!tout) {
            std::cerr << "cannot write " << truth_path << '\n';
            return 1;
        }
        tout << mf::write_graph(inj.system.dag(), inj.system.role_chars());
        tout << "# columns:";
        for (int v : inj.columns) tout << ' ' << v;
        tout << '\n';
        std::cout << "wrote ground truth to " << truth_path << '\n';
    }
    return 0;
}

int cmd_run(const CLI::App* cmd, const ConfigFlags& f) {
    mf::ExperimentConfig cfg = build_config(cmd, f);
    if (cfg.output_dir.empty())
        throw CLI::ValidationError("--output-dir", "required for run");
    std::vector<mf::RunRecord> records = mf::run_experiment(cfg);

    long failed = 0, total = 0;
    for (const mf::RunRecord& r : records)
        for (const mf::StrategyResult& sr : r.results) {
            ++total;
            if (sr.failed) ++failed;
        }
    std::cout << "ran " << records.size() << " replicates (" << total
              << " scored runs, " << failed << " failed); results in "
              << cfg.output_dir << '\n';
    return 0;
}

int cmd_verify(const CLI::App* cmd, const ConfigFlags& f) {
    mf::ExperimentConfig cfg = build_config(cmd, f);
    mf::SoundnessReport rep = mf::verify_soundness(cfg);
    std::cout << "mnar wrapper-vs-union oracle: " << rep.n_mnar_mismatch
              << " mismatches / " << rep.n_mnar_checked << " checks\n";
    std::cout << "mcar heuristic-vs-selection oracle: " << rep.n_mcar_mismatch
              << " mismatches / " << rep.n_mcar_checked << " checks\n";
    if (rep.passed()) {
        std::cout << "soundness: PASS\n";
        return 0;
    }
    std::cout << "soundness: FAIL\n";
    for (std::uint64_t s : rep.counterexample_seeds)
        std::cout << "counterexample seed: " << s << '\n';
    // Serialize the first offending system so the failure is reproducible
    // without rerunning the sweep.
    std::uint64_t seed = rep.counterexample_seeds.front();
    mf::Rng rng(mf::split_seed(seed, 0));
    mf::SemModel model = mf::generate_dag(cfg.gen, rng);
    std::cout << "ground-truth graph for seed " << seed << ":\n"
              << mf::write_graph(mf::sem_dag(model));
    return 2;
}

int cmd_score(const std::string& learned_path, const std::string& target_path) {
    auto load = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open graph file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return mf::parse_graph(ss.str());
    };
    mf::MixedGraph learned = load(learned_path), target = load(target_path);
    std::cout << "shd," << mf::shd(learned, target) << '\n';
    std::cout << "skeleton_shd," << mf::skeleton_shd(learned, target) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery benchmark harness for incomplete data"};
    app.require_subcommand(1);

    ConfigFlags gen_flags, run_flags, verify_flags;
    int gen_n = 500;
    std::string gen_out = "dataset.csv", gen_truth;

    CLI::App* generate = app.add_subcommand("generate", "emit one synthetic dataset");
    add_config_flags(generate, gen_flags);
    generate->add_option("--n", gen_n, "number of samples");
    generate->add_option("--out", gen_out, "dataset CSV path");
    generate->add_option("--emit-truth", gen_truth,
                         "also write the ground-truth graph to this path");

    CLI::App* run = app.add_subcommand("run", "run a full scored experiment");
    add_config_flags(run, run_flags);

    CLI::App* verify = app.add_subcommand("verify", "oracle-level soundness sweep");
    add_config_flags(verify, verify_flags);

    std::string score_learned, score_target;
    CLI::App* score = app.add_subcommand("score", "compare two graph files");
    score->add_option("--learned", score_learned, "learned graph file")->required();
    score->add_option("--target", score_target, "target graph file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(generate, gen_flags, gen_n, gen_out, gen_truth);
        if (run->parsed()) return cmd_run(run, run_flags);
        if (verify->parsed()) return cmd_verify(verify, verify_flags);
        if (score->parsed()) return cmd_score(score_learned, score_target);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
