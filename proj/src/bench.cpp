#include "missfci/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "missfci/rng.hpp"

namespace missfci {

namespace {

using nlohmann::json;

Algo algo_from_name(const std::string& s) {
    if (s == "fci") return Algo::FCI;
    if (s == "rfci") return Algo::RFCI;
    throw std::invalid_argument("unknown algorithm: " + s);
}

Strategy strategy_from_name(const std::string& s) {
    for (Strategy st : {Strategy::TestWise, Strategy::ListWise, Strategy::Wrapper,
                        Strategy::Heuristic, Strategy::Oracle})
        if (s == strategy_name(st)) return st;
    throw std::invalid_argument("unknown strategy: " + s);
}

Missingness missingness_from_name(const std::string& s) {
    for (Missingness m : {Missingness::MNAR, Missingness::MAR, Missingness::MCAR,
                          Missingness::None})
        if (s == missingness_name(m)) return m;
    throw std::invalid_argument("unknown missingness: " + s);
}

std::string fmt_double(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

/// Selection set the scoring oracle conditions on: everything the estimand
/// graph should absorb as selection — the full indicator union under MNAR,
/// nothing otherwise.
std::vector<int> scoring_sel(const CausalSystem& sys, Missingness m) {
    if (m == Missingness::MNAR) return sys.indicator_union();
    return {};
}

Injected inject(const SemModel& model, const Dataset& data, const GenConfig& gen,
                Missingness m, Rng& rng) {
    switch (m) {
        case Missingness::MNAR: return inject_mnar(model, data, gen, rng);
        case Missingness::MAR: return inject_mar(model, data, gen, rng);
        case Missingness::MCAR: return inject_mcar(model, data, gen, rng);
        case Missingness::None: return no_injection(model, data);
    }
    throw std::logic_error("bad missingness");
}

Pag run_search(Algo algo, CITester& ci) {
    SearchOptions opts;
    opts.mode = algo;
    return algo == Algo::FCI ? fci(ci, opts) : rfci(ci, opts);
}

RunRecord run_replicate(const ExperimentConfig& cfg, int rep, const std::string& hash,
                        json* manifest) {
    RunRecord rec;
    rec.replicate = rep;
    rec.seed = split_seed(cfg.gen.seed, static_cast<std::uint64_t>(rep));
    rec.config_hash = hash;

    Rng model_rng(split_seed(rec.seed, 0));
    SemModel model = generate_dag(cfg.gen, model_rng);

    for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
        const int n = cfg.sample_sizes[ni];
        Rng rng(split_seed(rec.seed, 1 + ni));
        Dataset data = sample_sem(model, n, rng);
        std::optional<Injected> injected;
        try {
            injected.emplace(inject(model, data, cfg.gen, cfg.missingness, rng));
        } catch (const std::exception&) {
            // Infeasible injection draw for this graph: emit failed rows so
            // the replicate stays visible in the CSV.
            for (Algo algo : cfg.algorithms)
                for (Strategy strat : cfg.strategies) {
                    StrategyResult sr;
                    sr.algo = algo;
                    sr.strategy = strat;
                    sr.n = n;
                    sr.sample_gain_vs_listwise = std::nan("");
                    sr.failed = true;
                    rec.results.push_back(sr);
                }
            continue;
        }
        Injected& inj = *injected;
        std::vector<int> sel = scoring_sel(inj.system, cfg.missingness);

        if (manifest) {
            json entry;
            entry["n"] = n;
            entry["columns"] = inj.columns;
            entry["truth"] = write_graph(inj.system.dag(), inj.system.role_chars());
            (*manifest)["datasets"].push_back(entry);
        }

        for (Algo algo : cfg.algorithms) {
            OracleCITester target_ci(inj.system, OracleCITester::Mode::FixedSel, sel,
                                     inj.columns);
            Pag target = run_search(algo, target_ci);

            std::vector<StrategyResult> batch;
            for (Strategy strat : cfg.strategies) {
                StrategyResult sr;
                sr.algo = algo;
                sr.strategy = strat;
                sr.n = n;
                sr.sample_gain_vs_listwise = std::nan("");
                try {
                    std::unique_ptr<CITester> ci;
                    if (strat == Strategy::Oracle)
                        ci = std::make_unique<OracleCITester>(
                            inj.system, OracleCITester::Mode::FixedSel, sel,
                            inj.columns);
                    else
                        ci = std::make_unique<DataCITester>(inj.data, strat,
                                                            cfg.alpha);
                    Pag learned = run_search(algo, *ci);
                    sr.report = score(learned.graph, target.graph, ci->log());
                } catch (const std::exception&) {
                    sr.failed = true;
                }
                batch.push_back(sr);
            }

            // Effective-sample gain relative to the list-wise arm of the same
            // algorithm and sample size.
            double lw = std::nan("");
            for (const StrategyResult& sr : batch)
                if (sr.strategy == Strategy::ListWise && !sr.failed &&
                    sr.report.avg_effective_n > 0)
                    lw = sr.report.avg_effective_n;
            for (StrategyResult& sr : batch) {
                if (sr.failed || std::isnan(lw) || sr.report.avg_effective_n <= 0 ||
                    sr.strategy == Strategy::Oracle)
                    continue;
                sr.sample_gain_vs_listwise =
                    100.0 * (sr.report.avg_effective_n - lw) / lw;
            }
            rec.results.insert(rec.results.end(), batch.begin(), batch.end());
        }
    }
    return rec;
}

}  // namespace

const char* missingness_name(Missingness m) {
    switch (m) {
        case Missingness::MNAR: return "mnar";
        case Missingness::MAR: return "mar";
        case Missingness::MCAR: return "mcar";
        case Missingness::None: return "none";
    }
    throw std::logic_error("bad missingness");
}

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::FCI: return "fci";
        case Algo::RFCI: return "rfci";
    }
    throw std::logic_error("bad algorithm");
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.gen);
    if (cfg.sample_sizes.empty())
        throw std::invalid_argument("sample_sizes must be non-empty");
    for (int n : cfg.sample_sizes)
        if (n < 2) throw std::invalid_argument("sample sizes must be >= 2");
    if (cfg.n_replicates < 1)
        throw std::invalid_argument("n_replicates must be >= 1");
    if (cfg.algorithms.empty())
        throw std::invalid_argument("algorithms must be non-empty");
    if (cfg.strategies.empty())
        throw std::invalid_argument("strategies must be non-empty");
    if (cfg.alpha <= 0 || cfg.alpha >= 1)
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);

    ExperimentConfig cfg;
    auto range = [&](const char* key, IntRange dflt) {
        if (!j.contains(key)) return dflt;
        auto v = j.at(key);
        return IntRange{v.at(0).get<int>(), v.at(1).get<int>()};
    };
    cfg.gen.p = j.value("p", cfg.gen.p);
    cfg.gen.expected_neighbors = j.value("expected_neighbors", cfg.gen.expected_neighbors);
    cfg.gen.latent_confounders = range("latent_confounders", cfg.gen.latent_confounders);
    cfg.gen.missingness_drivers = range("missingness_drivers", cfg.gen.missingness_drivers);
    cfg.gen.vars_per_driver = range("vars_per_driver", cfg.gen.vars_per_driver);
    cfg.gen.r_lo = j.value("r_lo", cfg.gen.r_lo);
    cfg.gen.r_hi = j.value("r_hi", cfg.gen.r_hi);
    cfg.gen.seed = j.value("seed", cfg.gen.seed);
    if (j.contains("sample_sizes"))
        cfg.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    cfg.n_replicates = j.value("n_replicates", cfg.n_replicates);
    if (j.contains("missingness"))
        cfg.missingness = missingness_from_name(j.at("missingness").get<std::string>());
    if (j.contains("algorithms")) {
        cfg.algorithms.clear();
        for (const auto& a : j.at("algorithms"))
            cfg.algorithms.push_back(algo_from_name(a.get<std::string>()));
    }
    if (j.contains("strategies")) {
        cfg.strategies.clear();
        for (const auto& s : j.at("strategies"))
            cfg.strategies.push_back(strategy_from_name(s.get<std::string>()));
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.emit_manifests = j.value("emit_manifests", cfg.emit_manifests);
    validate(cfg);
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["p"] = cfg.gen.p;
    j["expected_neighbors"] = cfg.gen.expected_neighbors;
    j["latent_confounders"] = {cfg.gen.latent_confounders.lo, cfg.gen.latent_confounders.hi};
    j["missingness_drivers"] = {cfg.gen.missingness_drivers.lo, cfg.gen.missingness_drivers.hi};
    j["vars_per_driver"] = {cfg.gen.vars_per_driver.lo, cfg.gen.vars_per_driver.hi};
    j["r_lo"] = cfg.gen.r_lo;
    j["r_hi"] = cfg.gen.r_hi;
    j["seed"] = cfg.gen.seed;
    j["sample_sizes"] = cfg.sample_sizes;
    j["n_replicates"] = cfg.n_replicates;
    j["missingness"] = missingness_name(cfg.missingness);
    json algos = json::array(), strats = json::array();
    for (Algo a : cfg.algorithms) algos.push_back(algo_name(a));
    for (Strategy s : cfg.strategies) strats.push_back(strategy_name(s));
    j["algorithms"] = algos;
    j["strategies"] = strats;
    j["alpha"] = cfg.alpha;
    return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical JSON form; stable across runs and platforms.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : config_to_json(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::string hash = config_hash(cfg);
    const bool manifests = cfg.emit_manifests && !cfg.output_dir.empty();

    std::vector<RunRecord> records(cfg.n_replicates);
    std::vector<json> manifest_bodies(manifests ? cfg.n_replicates : 0);

    auto work = [&](int rep) {
        json* m = manifests ? &manifest_bodies[rep] : nullptr;
        records[rep] = run_replicate(cfg, rep, hash, m);
    };

    if (cfg.jobs <= 1) {
        for (int rep = 0; rep < cfg.n_replicates; ++rep) work(rep);
    } else {
        // Bounded work pool: launch at most `jobs` replicates at a time.
        for (int base = 0; base < cfg.n_replicates; base += cfg.jobs) {
            std::vector<std::future<void>> batch;
            int hi = std::min(base + cfg.jobs, cfg.n_replicates);
            for (int rep = base; rep < hi; ++rep)
                batch.push_back(std::async(std::launch::async, work, rep));
            for (auto& f : batch) f.get();
        }
    }

    if (!cfg.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output_dir);
        {
            std::ofstream out(fs::path(cfg.output_dir) / "results.csv");
            if (!out) throw std::runtime_error("cannot write results.csv");
            write_results_csv(out, records);
        }
        {
            std::ofstream out(fs::path(cfg.output_dir) / "summary.csv");
            if (!out) throw std::runtime_error("cannot write summary.csv");
            write_summary_csv(out, records);
        }
        if (manifests) {
            for (int rep = 0; rep < cfg.n_replicates; ++rep) {
                json m = manifest_bodies[rep];
                m["replicate"] = rep;
                m["seed"] = records[rep].seed;
                m["config_hash"] = hash;
                std::ofstream out(fs::path(cfg.output_dir) /
                                  ("replicate_" + std::to_string(rep) + ".json"));
                out << m.dump(2) << '\n';
            }
        }
    }
    return records;
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "replicate,seed,n,algorithm,strategy,shd,skeleton_shd,n_queries,"
           "avg_effective_n,n_degenerate,sample_gain_vs_listwise,failed\n";
    for (const RunRecord& rec : records)
        for (const StrategyResult& sr : rec.results) {
            out << rec.replicate << ',' << rec.seed << ',' << sr.n << ','
                << algo_name(sr.algo) << ',' << strategy_name(sr.strategy) << ',';
            if (sr.failed) {
                out << ",,,,,";
            } else {
                out << sr.report.shd << ',' << sr.report.skeleton_shd << ','
                    << sr.report.n_queries << ','
                    << fmt_double(sr.report.avg_effective_n) << ','
                    << sr.report.n_degenerate << ','
                    << fmt_double(sr.sample_gain_vs_listwise);
            }
            out << ',' << (sr.failed ? 1 : 0) << '\n';
        }
}

void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    struct Acc {
        int n_ok = 0, n_failed = 0, gain_count = 0;
        double shd = 0, skel = 0, eff = 0, gain = 0;
    };
    // Key: (algorithm name, strategy name, n); string keys keep the rows in a
    // stable, human-scannable order.
    std::map<std::tuple<std::string, std::string, int>, Acc> groups;
    for (const RunRecord& rec : records)
        for (const StrategyResult& sr : rec.results) {
            Acc& a = groups[{algo_name(sr.algo), strategy_name(sr.strategy), sr.n}];
            if (sr.failed) {
                ++a.n_failed;
                continue;
            }
            ++a.n_ok;
            a.shd += sr.report.shd;
            a.skel += sr.report.skeleton_shd;
            a.eff += sr.report.avg_effective_n;
            if (!std::isnan(sr.sample_gain_vs_listwise)) {
                ++a.gain_count;
                a.gain += sr.sample_gain_vs_listwise;
            }
        }

    out << "algorithm,strategy,n,replicates,failed,mean_shd,mean_skeleton_shd,"
           "mean_avg_effective_n,mean_sample_gain_vs_listwise\n";
    for (const auto& [key, a] : groups) {
        const auto& [algo, strat, n] = key;
        out << algo << ',' << strat << ',' << n << ',' << a.n_ok << ','
            << a.n_failed << ',';
        if (a.n_ok == 0) {
            out << ",,,";
        } else {
            out << fmt_double(a.shd / a.n_ok) << ',' << fmt_double(a.skel / a.n_ok)
                << ',' << fmt_double(a.eff / a.n_ok) << ',';
            out << (a.gain_count ? fmt_double(a.gain / a.gain_count) : "");
        }
        out << '\n';
    }
}

SoundnessReport verify_soundness(const ExperimentConfig& cfg) {
    validate(cfg);
    SoundnessReport rep;

    for (int r = 0; r < cfg.n_replicates; ++r) {
        std::uint64_t seed = split_seed(cfg.gen.seed, static_cast<std::uint64_t>(r));
        Rng model_rng(split_seed(seed, 0));
        SemModel model = generate_dag(cfg.gen, model_rng);

        // MNAR arm: the test-wise wrapper oracle must reproduce the graph the
        // search finds under the full indicator union S_l.
        try {
            Rng rng(split_seed(seed, 1));
            Dataset data = sample_sem(model, 100, rng);
            Injected inj = inject_mnar(model, data, cfg.gen, rng);
            if (check_assumption1(inj.system)) {
                for (Algo algo : cfg.algorithms) {
                    OracleCITester wrapped(inj.system, OracleCITester::Mode::Wrapper,
                                           {}, inj.columns);
                    OracleCITester fixed(inj.system, OracleCITester::Mode::FixedSel,
                                         inj.system.indicator_union(), inj.columns);
                    ++rep.n_mnar_checked;
                    if (shd(run_search(algo, wrapped).graph,
                            run_search(algo, fixed).graph) != 0) {
                        ++rep.n_mnar_mismatch;
                        rep.counterexample_seeds.push_back(seed);
                    }
                }
            }
        } catch (const std::exception&) {
            // Infeasible injection draw for this graph; skip the arm.
        }

        // MCAR arm: the per-query heuristic oracle must match conditioning on
        // the (empty) selection set alone.
        try {
            Rng rng(split_seed(seed, 2));
            Dataset data = sample_sem(model, 100, rng);
            Injected inj = inject_mcar(model, data, cfg.gen, rng);
            for (Algo algo : cfg.algorithms) {
                OracleCITester heur(inj.system, OracleCITester::Mode::TestWise, {},
                                    inj.columns);
                OracleCITester fixed(inj.system, OracleCITester::Mode::FixedSel,
                                     inj.system.selection(), inj.columns);
                ++rep.n_mcar_checked;
                if (shd(run_search(algo, heur).graph,
                        run_search(algo, fixed).graph) != 0) {
                    ++rep.n_mcar_mismatch;
                    rep.counterexample_seeds.push_back(seed);
                }
            }
        } catch (const std::exception&) {
            // Infeasible injection draw for this graph; skip the arm.
        }
    }

    std::sort(rep.counterexample_seeds.begin(), rep.counterexample_seeds.end());
    rep.counterexample_seeds.erase(
        std::unique(rep.counterexample_seeds.begin(), rep.counterexample_seeds.end()),
        rep.counterexample_seeds.end());
    return rep;
}

}  // namespace missfci
