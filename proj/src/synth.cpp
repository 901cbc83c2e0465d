#include "missfci/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace missfci {

namespace {

int draw_int(Rng& rng, IntRange r) {
    return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
}

std::vector<int> draw_without_replacement(Rng& rng, std::vector<int> pool, int k) {
    if (k > static_cast<int>(pool.size()))
        throw std::invalid_argument("p too small for requested counts");
    std::vector<int> out;
    out.reserve(k);
    for (int t = 0; t < k; ++t) {
        std::size_t idx =
            std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
        out.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> remove_all(std::vector<int> pool, const std::vector<int>& gone) {
    std::erase_if(pool, [&](int v) {
        return std::binary_search(gone.begin(), gone.end(), v);
    });
    return pool;
}

/// Rows whose value lies strictly below the nearest-rank r-quantile.
std::vector<int> rows_below_quantile(const Eigen::VectorXd& col, double r) {
    const int n = static_cast<int>(col.size());
    int k = static_cast<int>(std::ceil(r * n));
    if (k < 1) return {};
    k = std::min(k, n);
    std::vector<double> sorted(col.data(), col.data() + n);
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    double threshold = sorted[k - 1];
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
        if (col(i) < threshold) rows.push_back(i);
    return rows;
}

struct DriverPlan {
    int driver = -1;               // SEM vertex; -1 for the MCAR coin
    std::vector<int> targets;      // governed observables
    std::vector<int> masked_rows;
};

enum class DriverKind { Latent, ObservedDriver, Isolated };

Injected assemble(const SemModel& m, const Dataset& data,
                  const std::vector<int>& latents,
                  const std::vector<DriverPlan>& plans, DriverKind kind) {
    const int p = m.p();
    const int n_drv = static_cast<int>(plans.size());
    MixedGraph g(p + n_drv);
    for (int i = 0; i < p; ++i)
        for (int r = 0; r < i; ++r)
            if (m.coef(i, r) != 0.0) g.add_edge(r, i, Mark::Tail, Mark::Arrow);

    std::vector<Role> roles(p + n_drv, Role::Observed);
    for (int v : latents) roles[v] = Role::Latent;
    std::vector<std::vector<int>> ind_sets(p + n_drv);
    for (int k = 0; k < n_drv; ++k) {
        int ind = p + k;
        roles[ind] = Role::Indicator;
        if (kind != DriverKind::Isolated)
            g.add_edge(plans[k].driver, ind, Mark::Tail, Mark::Arrow);
        if (kind == DriverKind::Latent) roles[plans[k].driver] = Role::Latent;
        for (int t : plans[k].targets) ind_sets[t].push_back(ind);
    }

    std::vector<int> columns;
    for (int v = 0; v < p; ++v)
        if (roles[v] == Role::Observed) columns.push_back(v);

    Dataset out(data.rows(), static_cast<int>(columns.size()));
    for (int c = 0; c < out.cols(); ++c) {
        out.values.col(c) = data.values.col(columns[c]);
        out.column_names[c] = data.column_names[columns[c]];
    }
    for (int k = 0; k < n_drv; ++k) {
        for (int t : plans[k].targets) {
            auto it = std::lower_bound(columns.begin(), columns.end(), t);
            int c = static_cast<int>(it - columns.begin());
            for (int r : plans[k].masked_rows) out.mask_out(r, c);
        }
    }

    return Injected{std::move(out),
                    CausalSystem(std::move(g), std::move(roles), std::move(ind_sets)),
                    std::move(columns)};
}

void check_inputs(const SemModel& m, const Dataset& data, const GenConfig& cfg) {
    validate(cfg);
    if (data.cols() != m.p())
        throw std::invalid_argument("dataset does not match model dimension");
    if (!data.fully_observed())
        throw std::invalid_argument("injection requires fully observed input data");
}

}  // namespace

void validate(const GenConfig& cfg) {
    if (cfg.p < 2) throw std::invalid_argument("config: p must be >= 2");
    if (cfg.expected_neighbors < 0 || cfg.expected_neighbors >= cfg.p)
        throw std::invalid_argument("config: expected_neighbors must lie in [0, p-1)");
    if (!cfg.latent_confounders.valid() || !cfg.missingness_drivers.valid() ||
        !cfg.vars_per_driver.valid())
        throw std::invalid_argument("config: empty integer range");
    if (cfg.missingness_drivers.lo < 1)
        throw std::invalid_argument("config: need at least one missingness driver");
    if (cfg.r_lo < 0 || cfg.r_hi >= 1 || cfg.r_lo > cfg.r_hi)
        throw std::invalid_argument("config: r range must lie within [0, 1)");
}

SemModel generate_dag(const GenConfig& cfg, Rng& rng) {
    validate(cfg);
    const int p = cfg.p;
    SemModel m;
    m.coef.setZero(p, p);
    const double edge_prob = cfg.expected_neighbors / (p - 1);
    std::bernoulli_distribution edge(edge_prob);
    std::uniform_real_distribution<double> mag(0.1, 1.0);
    std::bernoulli_distribution flip(0.5);
    for (int i = 1; i < p; ++i)
        for (int r = 0; r < i; ++r)
            if (edge(rng)) m.coef(i, r) = (flip(rng) ? -1.0 : 1.0) * mag(rng);
    m.mean.resize(p);
    std::normal_distribution<double> mu(0.0, 2.0);  // N(0, 4): variance four
    for (int i = 0; i < p; ++i) m.mean(i) = mu(rng);
    return m;
}

MixedGraph sem_dag(const SemModel& m) {
    MixedGraph g(m.p());
    for (int i = 0; i < m.p(); ++i)
        for (int r = 0; r < i; ++r)
            if (m.coef(i, r) != 0.0) g.add_edge(r, i, Mark::Tail, Mark::Arrow);
    return g;
}

Eigen::MatrixXd analytic_cov(const SemModel& m) {
    const int p = m.p();
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j)
            if (m.coef(i, j) != 0.0)
                throw std::invalid_argument("coef must be strictly lower triangular");
    Eigen::MatrixXd ima = Eigen::MatrixXd::Identity(p, p) - m.coef;
    // (I - A) is unit lower triangular, hence always invertible.
    Eigen::MatrixXd b =
        ima.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
    return b * b.transpose();
}

Dataset sample_sem(const SemModel& m, int n, Rng& rng) {
    const int p = m.p();
    Dataset data(n, p);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < p; ++i) {
            double x = noise(rng);
            for (int j = 0; j < i; ++j)
                if (m.coef(i, j) != 0.0) x += m.coef(i, j) * data.values(r, j);
            data.values(r, i) = x;
        }
    }
    data.values.rowwise() += m.mean.transpose();
    return data;
}

Injected inject_mnar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                     Rng& rng) {
    check_inputs(m, data, cfg);
    std::vector<int> all(m.p());
    for (int v = 0; v < m.p(); ++v) all[v] = v;

    int n_conf = draw_int(rng, cfg.latent_confounders);
    std::vector<int> confounders = draw_without_replacement(rng, all, n_conf);
    int n_drv = draw_int(rng, cfg.missingness_drivers);
    std::vector<int> drivers =
        draw_without_replacement(rng, remove_all(all, confounders), n_drv);
    std::vector<int> obs_pool = remove_all(remove_all(all, confounders), drivers);

    std::uniform_real_distribution<double> rdist(cfg.r_lo, cfg.r_hi);
    std::vector<DriverPlan> plans;
    for (int d : drivers) {
        DriverPlan plan;
        plan.driver = d;
        plan.targets = draw_without_replacement(rng, obs_pool, draw_int(rng, cfg.vars_per_driver));
        double r = cfg.r_lo == cfg.r_hi ? cfg.r_lo : rdist(rng);
        plan.masked_rows = rows_below_quantile(data.values.col(d), r);
        plans.push_back(std::move(plan));
    }
    return assemble(m, data, confounders, plans, DriverKind::Latent);
}

Injected inject_mar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                    Rng& rng) {
    check_inputs(m, data, cfg);
    MixedGraph g = sem_dag(m);
    // Latent confounders must have at least two children; restricting the
    // pool realizes the rejection of invalid draws.
    std::vector<int> conf_pool;
    for (int v = 0; v < m.p(); ++v)
        if (g.children(v).size() >= 2) conf_pool.push_back(v);
    int n_conf = std::min(draw_int(rng, cfg.latent_confounders),
                          static_cast<int>(conf_pool.size()));
    std::vector<int> confounders = draw_without_replacement(rng, conf_pool, n_conf);

    std::vector<int> all(m.p());
    for (int v = 0; v < m.p(); ++v) all[v] = v;
    std::vector<int> observables = remove_all(all, confounders);
    int n_drv = draw_int(rng, cfg.missingness_drivers);
    std::vector<int> drivers = draw_without_replacement(rng, observables, n_drv);
    std::vector<int> target_pool = remove_all(observables, drivers);

    std::uniform_real_distribution<double> rdist(cfg.r_lo, cfg.r_hi);
    std::vector<DriverPlan> plans;
    for (int d : drivers) {
        DriverPlan plan;
        plan.driver = d;
        plan.targets =
            draw_without_replacement(rng, target_pool, draw_int(rng, cfg.vars_per_driver));
        double r = cfg.r_lo == cfg.r_hi ? cfg.r_lo : rdist(rng);
        plan.masked_rows = rows_below_quantile(data.values.col(d), r);
        plans.push_back(std::move(plan));
    }
    return assemble(m, data, confounders, plans, DriverKind::ObservedDriver);
}

Injected inject_mcar(const SemModel& m, const Dataset& data, const GenConfig& cfg,
                     Rng& rng) {
    check_inputs(m, data, cfg);
    std::vector<int> all(m.p());
    for (int v = 0; v < m.p(); ++v) all[v] = v;

    int n_conf = draw_int(rng, cfg.latent_confounders);
    std::vector<int> confounders = draw_without_replacement(rng, all, n_conf);
    std::vector<int> observables = remove_all(all, confounders);
    int n_mech = draw_int(rng, cfg.missingness_drivers);

    std::uniform_real_distribution<double> rdist(cfg.r_lo, cfg.r_hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<DriverPlan> plans;
    for (int k = 0; k < n_mech; ++k) {
        DriverPlan plan;
        plan.targets =
            draw_without_replacement(rng, observables, draw_int(rng, cfg.vars_per_driver));
        double r = cfg.r_lo == cfg.r_hi ? cfg.r_lo : rdist(rng);
        for (int row = 0; row < data.rows(); ++row)
            if (coin(rng) < r) plan.masked_rows.push_back(row);
        plans.push_back(std::move(plan));
    }
    return assemble(m, data, confounders, plans, DriverKind::Isolated);
}

Injected no_injection(const SemModel& m, const Dataset& data) {
    if (data.cols() != m.p())
        throw std::invalid_argument("dataset does not match model dimension");
    std::vector<DriverPlan> none;
    return assemble(m, data, {}, none, DriverKind::Isolated);
}

}  // namespace missfci
