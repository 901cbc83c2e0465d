#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "missfci/causal_system.hpp"
#include "missfci/dataset.hpp"
#include "missfci/rng.hpp"

namespace missfci {

/// Linear-Gaussian structural model: X = A X + eps, eps ~ N(0, I), shifted by
/// `mean`. `coef` is strictly lower triangular, so index order is a
/// topological order.
struct SemModel {
    Eigen::MatrixXd coef;   // p x p, strictly lower triangular
    Eigen::VectorXd mean;   // length p

    int p() const { return static_cast<int>(coef.rows()); }
};

struct IntRange {
    int lo = 0, hi = 0;
    bool valid() const { return lo <= hi && lo >= 0; }
};

struct GenConfig {
    int p = 20;
    double expected_neighbors = 2.0;
    IntRange latent_confounders{0, 4};
    IntRange missingness_drivers{1, 2};
    IntRange vars_per_driver{3, 6};
    double r_lo = 0.1, r_hi = 0.5;   // removal quantile range
    std::uint64_t seed = 1;
};

void validate(const GenConfig& cfg);

/// Random lower-triangular coefficient matrix: Bernoulli(E(N)/(p-1)) edge
/// indicators with Uniform([-1,-0.1] u [0.1,1]) weights, means iid N(0, 4).
SemModel generate_dag(const GenConfig& cfg, Rng& rng);

/// The model's DAG as a graph: edge r -> i for each nonzero coef(i, r).
MixedGraph sem_dag(const SemModel& m);

/// Exact covariance (I - A)^{-1} (I - A)^{-T}.
Eigen::MatrixXd analytic_cov(const SemModel& m);

/// n iid rows by forward substitution in index order; mask all-true.
Dataset sample_sem(const SemModel& m, int n, Rng& rng);

/// Result of a missingness-injection pass. `columns[c]` is the DAG vertex id
/// behind dataset column c (latent columns are dropped, not masked).
struct Injected {
    Dataset data;
    CausalSystem system;
    std::vector<int> columns;
};

/// MNAR: latent drivers; each governs 3-6 observables, masking the rows where
/// the driver falls strictly below its empirical r-quantile. Driver and
/// confounder columns are removed from the dataset. The returned system adds
/// one sink indicator vertex per driver, so check_assumption1 holds.
Injected inject_mnar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                     Rng& rng);

/// MAR: drivers are observed variables (kept, never masked themselves);
/// latent confounders are restricted to vertices with at least two children.
Injected inject_mar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                    Rng& rng);

/// MCAR: each mechanism is an isolated indicator; rows are masked by an
/// independent coin with probability r, unrelated to any variable.
Injected inject_mcar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                     Rng& rng);

/// Fully observed system over the model's DAG (no latents, no indicators).
Injected no_injection(const SemModel& m, const Dataset& data);

}  // namespace missfci
