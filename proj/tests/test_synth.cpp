#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "missfci/dsep.hpp"
#include "missfci/synth.hpp"

using namespace missfci;

TEST_SUITE_BEGIN("synth");

TEST_CASE("config validation") {
    GenConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.p = 1;
    CHECK_THROWS(validate(cfg));
    cfg = GenConfig{};
    cfg.expected_neighbors = cfg.p;  // must stay below p
    CHECK_THROWS(validate(cfg));
    cfg = GenConfig{};
    cfg.r_lo = 0.6;
    cfg.r_hi = 0.4;
    CHECK_THROWS(validate(cfg));
    cfg = GenConfig{};
    cfg.vars_per_driver = {4, 3};
    CHECK_THROWS(validate(cfg));
}

TEST_CASE("generate_dag: zero expected neighbors yields the empty model") {
    GenConfig cfg;
    cfg.p = 6;
    cfg.expected_neighbors = 0.0;
    Rng rng(1);
    SemModel m = generate_dag(cfg, rng);
    CHECK(m.coef.isZero(0.0));
}

TEST_CASE("generate_dag: coefficient magnitudes and strict lower triangle") {
    GenConfig cfg;
    cfg.p = 10;
    Rng rng(2);
    for (int it = 0; it < 50; ++it) {
        SemModel m = generate_dag(cfg, rng);
        for (int i = 0; i < cfg.p; ++i)
            for (int j = i; j < cfg.p; ++j) REQUIRE(m.coef(i, j) == 0.0);
        for (int i = 0; i < cfg.p; ++i)
            for (int j = 0; j < i; ++j)
                if (m.coef(i, j) != 0.0) {
                    REQUIRE(std::abs(m.coef(i, j)) >= 0.1);
                    REQUIRE(std::abs(m.coef(i, j)) <= 1.0);
                }
    }
}

TEST_CASE("generate_dag: mean edge count matches the Bernoulli design") {
    // p=20, two expected neighbors per vertex: p(p-1)/2 pairs each present
    // with probability 2/19, so 20 edges on average.
    GenConfig cfg;
    cfg.p = 20;
    cfg.expected_neighbors = 2.0;
    Rng rng(3);
    const int reps = 1000;
    double total = 0;
    for (int it = 0; it < reps; ++it) {
        SemModel m = generate_dag(cfg, rng);
        total += (m.coef.array() != 0.0).count();
    }
    double mean = total / reps;
    // Binomial(190, 2/19): sd of the mean over 1000 draws ~ 0.134.
    CHECK(mean == doctest::Approx(20.0).epsilon(0.025));
}

TEST_CASE("generate_dag: determinism per seed") {
    GenConfig cfg;
    cfg.p = 12;
    Rng r1(42), r2(42);
    SemModel a = generate_dag(cfg, r1), b = generate_dag(cfg, r2);
    CHECK(a.coef == b.coef);
    CHECK(a.mean == b.mean);
}

TEST_CASE("analytic_cov: identity and hand-computed 2x2 case") {
    SemModel m;
    m.coef = Eigen::MatrixXd::Zero(3, 3);
    m.mean = Eigen::VectorXd::Zero(3);
    CHECK(analytic_cov(m).isApprox(Eigen::MatrixXd::Identity(3, 3)));

    SemModel m2;
    m2.coef = Eigen::MatrixXd::Zero(2, 2);
    m2.coef(1, 0) = 0.5;
    m2.mean = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd sigma = analytic_cov(m2);
    CHECK(sigma(0, 0) == doctest::Approx(1.0));
    CHECK(sigma(0, 1) == doctest::Approx(0.5));
    CHECK(sigma(1, 0) == doctest::Approx(0.5));
    CHECK(sigma(1, 1) == doctest::Approx(1.25));
}

TEST_CASE("analytic_cov is symmetric positive definite for generated models") {
    GenConfig cfg;
    cfg.p = 12;
    Rng rng(8);
    for (int it = 0; it < 100; ++it) {
        SemModel m = generate_dag(cfg, rng);
        Eigen::MatrixXd sigma = analytic_cov(m);
        REQUIRE(sigma.isApprox(sigma.transpose()));
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        REQUIRE(llt.info() == Eigen::Success);
    }
}

TEST_CASE("sample_sem: pure-noise moments") {
    SemModel m;
    m.coef = Eigen::MatrixXd::Zero(3, 3);
    m.mean = Eigen::VectorXd::Zero(3);
    Rng rng(4);
    const int n = 20000;
    Dataset d = sample_sem(m, n, rng);
    REQUIRE(d.rows() == n);
    REQUIRE(d.fully_observed());
    for (int c = 0; c < 3; ++c) {
        double mean = d.values.col(c).mean();
        double var = (d.values.col(c).array() - mean).square().sum() / (n - 1);
        CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
        CHECK(var == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("sample_sem: chain correlation approaches the analytic value") {
    SemModel m;
    m.coef = Eigen::MatrixXd::Zero(2, 2);
    m.coef(1, 0) = 1.0;
    m.mean = Eigen::VectorXd::Zero(2);
    Rng rng(5);
    const int n = 10000;
    Dataset d = sample_sem(m, n, rng);
    Eigen::VectorXd x = d.values.col(0), y = d.values.col(1);
    double cx = x.mean(), cy = y.mean();
    double cov = ((x.array() - cx) * (y.array() - cy)).sum() / (n - 1);
    double sx = std::sqrt((x.array() - cx).square().sum() / (n - 1));
    double sy = std::sqrt((y.array() - cy).square().sum() / (n - 1));
    CHECK(cov / (sx * sy) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.03 * std::sqrt(2.0)));
}

TEST_CASE("sample_sem: empirical covariance matches the closed form") {
    GenConfig cfg;
    cfg.p = 6;
    Rng rng(6);
    SemModel m = generate_dag(cfg, rng);
    Eigen::MatrixXd sigma = analytic_cov(m);
    const int n = 100000;
    Dataset d = sample_sem(m, n, rng);
    Eigen::MatrixXd centered = d.values.rowwise() - d.values.colwise().mean();
    Eigen::MatrixXd emp = centered.transpose() * centered / (n - 1);
    CHECK((emp - sigma).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample_sem: determinism per seed") {
    GenConfig cfg;
    cfg.p = 5;
    Rng r1(9), r2(9);
    SemModel m = generate_dag(cfg, r1);
    Rng s1(10), s2(10);
    Dataset a = sample_sem(m, 50, s1), b = sample_sem(m, 50, s2);
    CHECK(a.values == b.values);
}

TEST_CASE("inject_mnar: masked fraction tracks the removal quantile") {
    GenConfig cfg;
    cfg.p = 10;
    cfg.latent_confounders = {0, 0};
    cfg.missingness_drivers = {1, 1};
    cfg.vars_per_driver = {4, 4};
    cfg.r_lo = cfg.r_hi = 0.3;
    Rng rng(11);
    SemModel m = generate_dag(cfg, rng);
    const int n = 2000;
    Dataset d = sample_sem(m, n, rng);
    Injected inj = inject_mnar(m, d, cfg, rng);

    REQUIRE(inj.data.cols() == 9);  // one driver column dropped
    int masked_cols = 0;
    for (int c = 0; c < inj.data.cols(); ++c) {
        int masked = 0;
        for (int r = 0; r < n; ++r)
            if (!inj.data.observed(r, c)) ++masked;
        double frac = static_cast<double>(masked) / n;
        if (masked > 0) {
            ++masked_cols;
            CHECK(frac == doctest::Approx(0.3).epsilon(1.0 / std::sqrt(n) / 0.3));
        }
    }
    CHECK(masked_cols == 4);
}

TEST_CASE("inject_mnar: degenerate zero quantile masks nothing") {
    GenConfig cfg;
    cfg.p = 10;
    cfg.latent_confounders = {0, 0};
    cfg.missingness_drivers = {1, 1};
    cfg.vars_per_driver = {3, 3};
    cfg.r_lo = cfg.r_hi = 1e-9;  // bottom percentile is empty
    Rng rng(12);
    SemModel m = generate_dag(cfg, rng);
    Dataset d = sample_sem(m, 200, rng);
    Injected inj = inject_mnar(m, d, cfg, rng);
    CHECK(inj.data.fully_observed());
}

TEST_CASE("inject_mnar: systems satisfy the indicator-sink condition") {
    GenConfig cfg;
    cfg.p = 10;
    cfg.latent_confounders = {0, 2};
    cfg.missingness_drivers = {1, 2};
    cfg.vars_per_driver = {3, 4};
    for (int it = 0; it < 1000; ++it) {
        Rng rng(20000 + it);
        SemModel m = generate_dag(cfg, rng);
        Dataset d = sample_sem(m, 50, rng);
        Injected inj = inject_mnar(m, d, cfg, rng);
        REQUIRE(check_assumption1(inj.system));
        // Latent columns are dropped, not masked.
        REQUIRE(inj.data.cols() == static_cast<int>(inj.columns.size()));
        for (int v : inj.columns)
            REQUIRE(inj.system.role(v) == Role::Observed);
    }
}

TEST_CASE("inject_mar: drivers stay fully observed and masking is recomputable") {
    GenConfig cfg;
    cfg.p = 10;
    cfg.latent_confounders = {0, 1};
    cfg.missingness_drivers = {1, 2};
    cfg.vars_per_driver = {2, 3};
    cfg.r_lo = cfg.r_hi = 0.25;
    Rng rng(13);
    SemModel m = generate_dag(cfg, rng);
    const int n = 1000;
    Dataset d = sample_sem(m, n, rng);
    Injected inj = inject_mar(m, d, cfg, rng);
    REQUIRE(check_assumption1(inj.system));

    // Drivers are the observed parents of indicator vertices; their columns
    // carry no missing cells.
    for (int ind : inj.system.indicators())
        for (int drv : inj.system.dag().parents(ind)) {
            REQUIRE(inj.system.role(drv) == Role::Observed);
            auto it = std::find(inj.columns.begin(), inj.columns.end(), drv);
            REQUIRE(it != inj.columns.end());
            int col = static_cast<int>(it - inj.columns.begin());
            for (int r = 0; r < n; ++r) REQUIRE(inj.data.observed(r, col));
        }

    // The mask is a deterministic function of the visible driver values:
    // recompute each driver's empirical quantile threshold and compare.
    for (int ind : inj.system.indicators()) {
        std::vector<int> drivers = inj.system.dag().parents(ind);
        REQUIRE(drivers.size() == 1);
        auto it = std::find(inj.columns.begin(), inj.columns.end(), drivers[0]);
        int dcol = static_cast<int>(it - inj.columns.begin());
        std::vector<double> vals(n);
        for (int r = 0; r < n; ++r) vals[r] = inj.data.values(r, dcol);
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        int rank = static_cast<int>(std::ceil(0.25 * n));
        double threshold = sorted[rank - 1];
        // Governed columns: masked exactly on rows strictly below threshold
        // (unless another driver also governs the column).
        for (std::size_t c = 0; c < inj.columns.size(); ++c) {
            const std::vector<int>& iset = inj.system.indicator_set(inj.columns[c]);
            if (iset != std::vector<int>{ind}) continue;
            for (int r = 0; r < n; ++r)
                REQUIRE(inj.data.observed(r, static_cast<int>(c)) ==
                        !(vals[r] < threshold));
        }
    }
}

TEST_CASE("inject_mcar: coin-flip masking, isolated indicators") {
    GenConfig cfg;
    cfg.p = 10;
    cfg.latent_confounders = {0, 0};
    cfg.missingness_drivers = {1, 1};
    cfg.vars_per_driver = {4, 4};
    cfg.r_lo = cfg.r_hi = 0.2;
    Rng rng(14);
    SemModel m = generate_dag(cfg, rng);
    const int n = 4000;
    Dataset d = sample_sem(m, n, rng);
    Injected inj = inject_mcar(m, d, cfg, rng);
    REQUIRE(check_assumption1(inj.system));
    for (int ind : inj.system.indicators()) {
        CHECK(inj.system.dag().adjacent(ind).empty());
    }
    long masked = 0;
    for (int c = 0; c < inj.data.cols(); ++c)
        for (int r = 0; r < n; ++r)
            if (!inj.data.observed(r, c)) ++masked;
    double frac = static_cast<double>(masked) / (4.0 * n);  // 4 governed columns
    CHECK(frac == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("injection requests exceeding p fail loudly") {
    GenConfig cfg;
    cfg.p = 5;
    cfg.latent_confounders = {4, 4};
    cfg.missingness_drivers = {2, 2};
    cfg.vars_per_driver = {3, 3};
    Rng rng(15);
    SemModel m = generate_dag(cfg, rng);
    Dataset d = sample_sem(m, 50, rng);
    CHECK_THROWS(inject_mnar(m, d, cfg, rng));
}

TEST_SUITE_END();
