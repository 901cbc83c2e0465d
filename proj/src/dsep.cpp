#include "missfci/dsep.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace missfci {

namespace {

std::vector<char> member_mask(int p, const std::vector<int>& xs) {
    std::vector<char> m(p, 0);
    for (int x : xs) {
        if (x < 0 || x >= p) throw std::out_of_range("vertex index out of range");
        m[x] = 1;
    }
    return m;
}

void require_disjoint(const std::vector<char>& a, const std::vector<char>& b,
                      const char* what) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && b[i]) throw std::invalid_argument(what);
}

}  // namespace

std::vector<int> ancestors(const MixedGraph& dag, const std::vector<int>& seed) {
    if (!dag.is_dag()) throw std::invalid_argument("ancestors: graph is not a DAG");
    const int p = dag.vertex_count();
    std::vector<char> in = member_mask(p, seed);
    std::vector<int> stack(seed.begin(), seed.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : dag.parents(v))
            if (!in[u]) {
                in[u] = 1;
                stack.push_back(u);
            }
    }
    std::vector<int> out;
    for (int v = 0; v < p; ++v)
        if (in[v]) out.push_back(v);
    return out;
}

bool d_separated(const MixedGraph& dag, const std::vector<int>& a,
                 const std::vector<int>& b, const std::vector<int>& c) {
    if (!dag.is_dag()) throw std::invalid_argument("d_separated: graph is not a DAG");
    const int p = dag.vertex_count();
    std::vector<char> in_a = member_mask(p, a);
    std::vector<char> in_b = member_mask(p, b);
    std::vector<char> in_c = member_mask(p, c);
    require_disjoint(in_a, in_b, "d_separated: A and B overlap");
    require_disjoint(in_a, in_c, "d_separated: A and C overlap");
    require_disjoint(in_b, in_c, "d_separated: B and C overlap");

    // anc_c: vertices with a descendant in C (colliders may be passed there).
    std::vector<char> anc_c = member_mask(p, ancestors(dag, c));

    // Reachability over (vertex, direction) states. "Up" means the trail
    // arrived at the vertex against an edge (from a child); "down" means it
    // arrived along an edge (from a parent).
    enum { kUp = 0, kDown = 1 };
    std::vector<char> visited(static_cast<std::size_t>(p) * 2, 0);
    std::deque<std::pair<int, int>> queue;
    for (int s : a) queue.emplace_back(s, kUp);
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        std::size_t id = static_cast<std::size_t>(v) * 2 + dir;
        if (visited[id]) continue;
        visited[id] = 1;
        if (in_b[v]) return false;
        if (dir == kUp) {
            if (!in_c[v]) {
                for (int u : dag.parents(v)) queue.emplace_back(u, kUp);
                for (int u : dag.children(v)) queue.emplace_back(u, kDown);
            }
        } else {
            if (!in_c[v])
                for (int u : dag.children(v)) queue.emplace_back(u, kDown);
            if (anc_c[v])
                for (int u : dag.parents(v)) queue.emplace_back(u, kUp);
        }
    }
    return true;
}

namespace {

// Simple-path DFS for inducing paths. `path` holds the vertices so far; the
// status of path.back() as collider/non-collider is only known once the next
// vertex is chosen, so the constraint check lags one step behind.
bool inducing_dfs(const MixedGraph& g, const std::vector<char>& latent,
                  const std::vector<char>& anc_end, int target,
                  std::vector<int>& path, std::vector<char>& on_path) {
    int cur = path.back();
    for (int next = 0; next < g.vertex_count(); ++next) {
        if (on_path[next] || !g.has_edge(cur, next)) continue;
        if (path.size() >= 2) {
            int prev = path[path.size() - 2];
            bool collider = g.mark_at(prev, cur) == Mark::Arrow &&
                            g.mark_at(next, cur) == Mark::Arrow;
            if (collider ? !anc_end[cur] : !latent[cur]) continue;
        }
        if (next == target) return true;
        path.push_back(next);
        on_path[next] = 1;
        if (inducing_dfs(g, latent, anc_end, target, path, on_path)) return true;
        on_path[next] = 0;
        path.pop_back();
    }
    return false;
}

}  // namespace

bool has_inducing_path(const CausalSystem& sys, int oi, int oj) {
    if (oi == oj) throw std::invalid_argument("has_inducing_path: endpoints must differ");
    if (sys.role(oi) != Role::Observed || sys.role(oj) != Role::Observed)
        throw std::invalid_argument("has_inducing_path: endpoints must be observed");
    const MixedGraph& g = sys.dag();
    const int p = g.vertex_count();
    std::vector<char> latent(p, 0);
    for (int v = 0; v < p; ++v)
        if (sys.role(v) == Role::Latent) latent[v] = 1;
    std::vector<int> ends{oi, oj};
    ends.insert(ends.end(), sys.selection().begin(), sys.selection().end());
    std::vector<char> anc_end = member_mask(p, ancestors(g, ends));

    std::vector<int> path{oi};
    std::vector<char> on_path(p, 0);
    on_path[oi] = 1;
    return inducing_dfs(g, latent, anc_end, oj, path, on_path);
}

MixedGraph dag_to_mag(const CausalSystem& sys) {
    const std::vector<int>& obs = sys.observed();
    const int k = static_cast<int>(obs.size());
    if (k == 0) throw std::invalid_argument("dag_to_mag: no observed vertices");
    MixedGraph mag(k);
    // Per-endpoint ancestry: arrowhead at O_i iff O_i is not an ancestor of
    // the other endpoint union S.
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            if (!has_inducing_path(sys, obs[a], obs[b])) continue;
            std::vector<int> tb{obs[b]};
            tb.insert(tb.end(), sys.selection().begin(), sys.selection().end());
            std::vector<int> ta{obs[a]};
            ta.insert(ta.end(), sys.selection().begin(), sys.selection().end());
            std::vector<int> anc_b = ancestors(sys.dag(), tb);
            std::vector<int> anc_a = ancestors(sys.dag(), ta);
            bool a_anc = std::binary_search(anc_b.begin(), anc_b.end(), obs[a]);
            bool b_anc = std::binary_search(anc_a.begin(), anc_a.end(), obs[b]);
            mag.add_edge(a, b, a_anc ? Mark::Tail : Mark::Arrow,
                         b_anc ? Mark::Tail : Mark::Arrow);
        }
    }
    return mag;
}

bool oracle_ci(const CausalSystem& sys, int oi, int oj, const std::vector<int>& w,
               const std::vector<int>& sel) {
    for (int v : w)
        if (sys.role(v) != Role::Observed)
            throw std::invalid_argument("oracle_ci: conditioning set must be observed");
    for (int v : sel) {
        Role r = sys.role(v);
        if (r != Role::Selection && r != Role::Indicator)
            throw std::invalid_argument(
                "oracle_ci: sel must contain only selection or indicator vertices");
    }
    std::vector<int> cond = w;
    cond.insert(cond.end(), sel.begin(), sel.end());
    std::sort(cond.begin(), cond.end());
    cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
    return d_separated(sys.dag(), {oi}, {oj}, cond);
}

}  // namespace missfci
