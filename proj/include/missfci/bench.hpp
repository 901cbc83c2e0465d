#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "missfci/citest.hpp"
#include "missfci/discovery.hpp"
#include "missfci/metrics.hpp"
#include "missfci/synth.hpp"

namespace missfci {

enum class Missingness { MNAR, MAR, MCAR, None };

const char* missingness_name(Missingness m);
const char* algo_name(Algo a);

struct ExperimentConfig {
    GenConfig gen;                       // gen.seed is the master seed
    std::vector<int> sample_sizes{100, 500};
    int n_replicates = 50;
    Missingness missingness = Missingness::MNAR;
    std::vector<Algo> algorithms{Algo::FCI, Algo::RFCI};
    std::vector<Strategy> strategies{Strategy::TestWise, Strategy::ListWise,
                                     Strategy::Wrapper};
    double alpha = 0.01;
    std::string output_dir;
    int jobs = 1;
    bool emit_manifests = false;
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct StrategyResult {
    Algo algo = Algo::FCI;
    Strategy strategy = Strategy::TestWise;
    int n = 0;
    ScoreReport report;
    double sample_gain_vs_listwise = 0.0;  // NaN when undefined
    bool failed = false;
};

struct RunRecord {
    int replicate = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<StrategyResult> results;
    double wall_seconds = 0.0;  // kept out of the CSVs
};

/// Per replicate: generate system, sample, inject missingness, compute the
/// oracle target graph, run each algorithm x strategy, and score. Writes
/// results.csv and summary.csv into cfg.output_dir when set.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct SoundnessReport {
    int n_mnar_checked = 0, n_mnar_mismatch = 0;
    int n_mcar_checked = 0, n_mcar_mismatch = 0;
    std::vector<std::uint64_t> counterexample_seeds;
    bool passed() const { return n_mnar_mismatch == 0 && n_mcar_mismatch == 0; }
};

/// Oracle-level soundness sweep: FCI/RFCI with the wrapper oracle vs. the
/// S_l oracle on MNAR systems, and with the test-wise-selection oracle vs.
/// the S oracle on MCAR systems. Any mismatch is reported with its seed.
SoundnessReport verify_soundness(const ExperimentConfig& cfg);

}  // namespace missfci
