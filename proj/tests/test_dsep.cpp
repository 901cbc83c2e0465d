#include <doctest.h>

#include <algorithm>

#include "missfci/dsep.hpp"
#include "missfci/synth.hpp"
#include "support/oracles.hpp"

using namespace missfci;
namespace ts = missfci::testsupport;

namespace {

// The five-variable example system: 0 -> 1, 3 -> 4, 0 -> 4 (vertex 2
// isolated). Vertex 1 acts as a selection variable, vertex 4 doubles as a
// missingness indicator in the second variant.
MixedGraph example_dag() {
    MixedGraph g(5);
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    g.add_edge(3, 4, Mark::Tail, Mark::Arrow);
    g.add_edge(0, 4, Mark::Tail, Mark::Arrow);
    return g;
}

CausalSystem random_system(int p, double q, int n_latent, Rng& rng) {
    MixedGraph dag = ts::random_dag(p, q, rng);
    std::vector<Role> roles(p, Role::Observed);
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 0; k < n_latent; ++k) roles[order[k]] = Role::Latent;
    return CausalSystem(dag, roles, std::vector<std::vector<int>>(p));
}

}  // namespace

TEST_SUITE_BEGIN("dsep");

TEST_CASE("ancestors: chain, reflexivity, example graph") {
    MixedGraph chain(3);
    chain.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    chain.add_edge(1, 2, Mark::Tail, Mark::Arrow);
    CHECK(ancestors(chain, {2}) == std::vector<int>{0, 1, 2});

    MixedGraph empty(3);
    CHECK(ancestors(empty, {1}) == std::vector<int>{1});

    CHECK(ancestors(example_dag(), {4}) == std::vector<int>{0, 3, 4});
}

TEST_CASE("d-separation: canonical collider") {
    MixedGraph g(3);
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    g.add_edge(2, 1, Mark::Tail, Mark::Arrow);
    CHECK(d_separated(g, {0}, {2}, {}));
    CHECK_FALSE(d_separated(g, {0}, {2}, {1}));
}

TEST_CASE("d-separation: conditioning on a collider's vertex opens the path") {
    MixedGraph g = example_dag();
    CHECK(d_separated(g, {0}, {3}, {}));
    CHECK_FALSE(d_separated(g, {0}, {3}, {4}));
}

TEST_CASE("d-separation argument validation") {
    MixedGraph g(3);
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    CHECK_THROWS(d_separated(g, {0}, {0}, {}));   // overlap A/B
    CHECK_THROWS(d_separated(g, {0}, {1}, {0}));  // overlap A/C

    MixedGraph not_dag(2);
    not_dag.add_edge(0, 1, Mark::Arrow, Mark::Arrow);
    CHECK_THROWS(d_separated(not_dag, {0}, {1}, {}));
}

TEST_CASE("d-separation agrees with the path-enumeration oracle") {
    Rng rng(2024);
    std::uniform_real_distribution<double> unif(0.2, 0.7);
    for (int it = 0; it < 600; ++it) {
        int p = 3 + static_cast<int>(it % 3);  // 3..5
        MixedGraph dag = ts::random_dag(p, unif(rng), rng);
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) {
                std::vector<int> rest;
                for (int v = 0; v < p; ++v)
                    if (v != a && v != b) rest.push_back(v);
                for (const std::vector<int>& c : ts::subsets_up_to(rest, -1)) {
                    bool fast = d_separated(dag, {a}, {b}, c);
                    bool slow = ts::d_separated_bruteforce(dag, {a}, {b}, c);
                    REQUIRE(fast == slow);
                }
            }
    }
    // A few larger instances with random set-valued queries.
    for (int it = 0; it < 50; ++it) {
        MixedGraph dag = ts::random_dag(8, 0.3, rng);
        std::vector<int> perm(8);
        for (int i = 0; i < 8; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> a{perm[0], perm[1]}, b{perm[2]}, c{perm[3], perm[4]};
        REQUIRE(d_separated(dag, a, b, c) == ts::d_separated_bruteforce(dag, a, b, c));
    }
}

TEST_CASE("d-separation is symmetric in A and B") {
    Rng rng(5);
    for (int it = 0; it < 100; ++it) {
        MixedGraph dag = ts::random_dag(6, 0.4, rng);
        CHECK(d_separated(dag, {0, 1}, {2}, {3}) == d_separated(dag, {2}, {0, 1}, {3}));
    }
}

TEST_CASE("inducing paths: direct edge and latent mediator") {
    MixedGraph g(3);
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);  // 0 -> 1 (latent)
    g.add_edge(1, 2, Mark::Tail, Mark::Arrow);  // 1 -> 2
    CausalSystem sys(g, {Role::Observed, Role::Latent, Role::Observed},
                     {{}, {}, {}});
    CHECK(has_inducing_path(sys, 0, 2));  // lone non-collider is latent

    MixedGraph direct(2);
    direct.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    CausalSystem dsys(direct, {Role::Observed, Role::Observed}, {{}, {}});
    CHECK(has_inducing_path(dsys, 0, 1));

    CHECK_THROWS(has_inducing_path(sys, 0, 1));  // endpoint not observed
}

TEST_CASE("inducing path iff no conditioning set over observables separates") {
    Rng rng(77);
    for (int it = 0; it < 150; ++it) {
        CausalSystem sys = random_system(6, 0.4, it % 3, rng);
        const std::vector<int>& obs = sys.observed();
        for (std::size_t x = 0; x < obs.size(); ++x)
            for (std::size_t y = x + 1; y < obs.size(); ++y) {
                int oi = obs[x], oj = obs[y];
                std::vector<int> others;
                for (int v : obs)
                    if (v != oi && v != oj) others.push_back(v);
                bool always_connected = true;
                for (const std::vector<int>& w : ts::subsets_up_to(others, -1))
                    if (d_separated(sys.dag(), {oi}, {oj}, w)) {
                        always_connected = false;
                        break;
                    }
                REQUIRE(has_inducing_path(sys, oi, oj) == always_connected);
            }
    }
}

TEST_CASE("dag_to_mag: fully observed DAG maps to itself") {
    MixedGraph g = example_dag();
    CausalSystem sys(g, std::vector<Role>(5, Role::Observed),
                     std::vector<std::vector<int>>(5));
    CHECK(dag_to_mag(sys) == g);
}

TEST_CASE("dag_to_mag: latent confounder becomes a bidirected edge") {
    MixedGraph g(3);
    g.add_edge(1, 0, Mark::Tail, Mark::Arrow);  // 1 -> 0, 1 latent
    g.add_edge(1, 2, Mark::Tail, Mark::Arrow);  // 1 -> 2
    CausalSystem sys(g, {Role::Observed, Role::Latent, Role::Observed},
                     {{}, {}, {}});
    MixedGraph mag = dag_to_mag(sys);
    CHECK(mag.vertex_count() == 2);  // observed vertices 0 and 2
    CHECK(mag.has_edge(0, 1));
    CHECK(mag.mark_at(1, 0) == Mark::Arrow);
    CHECK(mag.mark_at(0, 1) == Mark::Arrow);
}

TEST_CASE("dag_to_mag output is ancestral, circle-free, and separation-equivalent") {
    Rng rng(31);
    for (int it = 0; it < 120; ++it) {
        CausalSystem sys = random_system(6, 0.4, 1 + (it % 2), rng);
        MixedGraph mag = dag_to_mag(sys);
        REQUIRE(mag.is_ancestral());
        for (const MixedGraph::Edge& e : mag.edges()) {
            REQUIRE(e.at_i != Mark::Circle);
            REQUIRE(e.at_j != Mark::Circle);
        }
        // Same separation relation over the observed margin: m-separation in
        // the MAG versus d-separation in the DAG.
        const std::vector<int>& obs = sys.observed();
        const int m = static_cast<int>(obs.size());
        for (int x = 0; x < m; ++x)
            for (int y = x + 1; y < m; ++y) {
                std::vector<int> rest;
                for (int k = 0; k < m; ++k)
                    if (k != x && k != y) rest.push_back(k);
                for (const std::vector<int>& c : ts::subsets_up_to(rest, -1)) {
                    std::vector<int> c_dag;
                    for (int k : c) c_dag.push_back(obs[k]);
                    REQUIRE(ts::m_separated_bruteforce(mag, x, y, c) ==
                            d_separated(sys.dag(), {obs[x]}, {obs[y]}, c_dag));
                }
            }
    }
}

TEST_CASE("oracle_ci: empty selection reduces to d-separation") {
    MixedGraph g = example_dag();
    CausalSystem sys(g, std::vector<Role>(5, Role::Observed),
                     std::vector<std::vector<int>>(5));
    CHECK(oracle_ci(sys, 0, 3, {}, {}) == d_separated(g, {0}, {3}, {}));
    CHECK(oracle_ci(sys, 0, 3, {4}, {}) == d_separated(g, {0}, {3}, {4}));
}

TEST_CASE("oracle_ci: conditioning on an indicator can activate paths") {
    // Vertex 4 is an indicator (a collider child of 0 and 3); adding it to
    // the selection set opens the 0-3 path.
    MixedGraph g = example_dag();
    std::vector<Role> roles{Role::Observed, Role::Selection, Role::Observed,
                            Role::Observed, Role::Indicator};
    CausalSystem sys(g, roles, {{}, {}, {4}, {}, {}});
    CHECK(oracle_ci(sys, 0, 3, {}, {1}));            // sel = S only
    CHECK_FALSE(oracle_ci(sys, 0, 3, {}, {1, 4}));   // indicator opens collider
}

TEST_CASE("check_assumption1: hand cases") {
    // Childless indicator: fine.
    {
        MixedGraph g(3);
        g.add_edge(0, 2, Mark::Tail, Mark::Arrow);  // 0 -> M
        CausalSystem sys(g, {Role::Observed, Role::Observed, Role::Indicator},
                         {{2}, {2}, {}});
        CHECK(check_assumption1(sys));
    }
    // Indicator with an observed child: violation.
    {
        MixedGraph g(3);
        g.add_edge(2, 1, Mark::Tail, Mark::Arrow);  // M -> O
        CausalSystem sys(g, {Role::Observed, Role::Observed, Role::Indicator},
                         {{2}, {2}, {}});
        CHECK_FALSE(check_assumption1(sys));
    }
    // Indicator ancestral to an indicator with a different governed set.
    {
        MixedGraph g(4);
        g.add_edge(2, 3, Mark::Tail, Mark::Arrow);  // M2 -> M3
        CausalSystem sys(
            g, {Role::Observed, Role::Observed, Role::Indicator, Role::Indicator},
            {{2}, {3}, {}, {}});
        CHECK_FALSE(check_assumption1(sys));
    }
    // Indicator ancestral to an indicator with the same governed set: allowed.
    {
        MixedGraph g(4);
        g.add_edge(2, 3, Mark::Tail, Mark::Arrow);
        CausalSystem sys(
            g, {Role::Observed, Role::Observed, Role::Indicator, Role::Indicator},
            {{2, 3}, {}, {}, {}});
        CHECK(check_assumption1(sys));
    }
}

TEST_CASE("test-wise-selection d-connection implies union-selection d-connection") {
    // On generated systems: dependence given W plus the per-query indicator
    // set survives widening to the full indicator union.
    GenConfig cfg;
    cfg.p = 8;
    cfg.latent_confounders = {0, 1};
    cfg.missingness_drivers = {1, 2};
    cfg.vars_per_driver = {2, 3};
    for (int it = 0; it < 60; ++it) {
        cfg.seed = 9000 + it;
        Rng rng(cfg.seed);
        SemModel model = generate_dag(cfg, rng);
        Dataset data = sample_sem(model, 60, rng);
        Injected inj = [&]() -> Injected {
            return inject_mnar(model, data, cfg, rng);
        }();
        const CausalSystem& sys = inj.system;
        REQUIRE(check_assumption1(sys));
        const std::vector<int>& obs = sys.observed();
        const std::vector<int>& sl = sys.indicator_union();
        for (std::size_t x = 0; x < obs.size(); ++x)
            for (std::size_t y = x + 1; y < obs.size(); ++y) {
                int oi = obs[x], oj = obs[y];
                std::vector<int> others;
                for (int v : obs)
                    if (v != oi && v != oj) others.push_back(v);
                for (const std::vector<int>& w : ts::subsets_up_to(others, 2)) {
                    std::vector<int> used{oi, oj};
                    used.insert(used.end(), w.begin(), w.end());
                    std::vector<int> s_q = sys.indicator_set_for(used);
                    bool dep_testwise = !oracle_ci(sys, oi, oj, w, s_q);
                    if (dep_testwise) REQUIRE_FALSE(oracle_ci(sys, oi, oj, w, sl));
                }
            }
    }
}

TEST_CASE("minimal separating sets stay minimal under union selection") {
    // If W is minimal for separation under the per-query indicator set and
    // separation also holds under the full union, no proper subset of W
    // separates under the union either.
    GenConfig cfg;
    cfg.p = 8;
    cfg.latent_confounders = {0, 1};
    cfg.missingness_drivers = {1, 2};
    cfg.vars_per_driver = {2, 3};
    int checked = 0;
    for (int it = 0; it < 60; ++it) {
        cfg.seed = 4100 + it;
        Rng rng(cfg.seed);
        SemModel model = generate_dag(cfg, rng);
        Dataset data = sample_sem(model, 60, rng);
        Injected inj = inject_mnar(model, data, cfg, rng);
        const CausalSystem& sys = inj.system;
        const std::vector<int>& obs = sys.observed();
        const std::vector<int>& sl = sys.indicator_union();
        for (std::size_t x = 0; x < obs.size(); ++x)
            for (std::size_t y = x + 1; y < obs.size(); ++y) {
                int oi = obs[x], oj = obs[y];
                std::vector<int> others;
                for (int v : obs)
                    if (v != oi && v != oj) others.push_back(v);
                for (const std::vector<int>& w : ts::subsets_up_to(others, 2)) {
                    std::vector<int> used{oi, oj};
                    used.insert(used.end(), w.begin(), w.end());
                    std::vector<int> s_q = sys.indicator_set_for(used);
                    if (!oracle_ci(sys, oi, oj, w, s_q)) continue;
                    bool minimal = true;
                    for (const std::vector<int>& sub : ts::subsets_up_to(w, -1)) {
                        if (sub.size() == w.size()) continue;
                        std::vector<int> sub_used{oi, oj};
                        sub_used.insert(sub_used.end(), sub.begin(), sub.end());
                        if (oracle_ci(sys, oi, oj, sub,
                                      sys.indicator_set_for(sub_used))) {
                            minimal = false;
                            break;
                        }
                    }
                    if (!minimal || !oracle_ci(sys, oi, oj, w, sl)) continue;
                    ++checked;
                    for (const std::vector<int>& sub : ts::subsets_up_to(w, -1)) {
                        if (sub.size() == w.size()) continue;
                        REQUIRE_FALSE(oracle_ci(sys, oi, oj, sub, sl));
                    }
                }
            }
    }
    CHECK(checked > 0);
}

TEST_SUITE_END();
