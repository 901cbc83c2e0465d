#include "missfci/discovery.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <stdexcept>

namespace missfci {

namespace {

// Visit k-subsets of `cand` in lexicographic order; stop when fn returns true.
bool for_each_subset(const std::vector<int>& cand, int k,
                     const std::function<bool(const std::vector<int>&)>& fn) {
    const int n = static_cast<int>(cand.size());
    if (k > n) return false;
    std::vector<int> idx(k);
    for (int t = 0; t < k; ++t) idx[t] = t;
    std::vector<int> subset(k);
    while (true) {
        for (int t = 0; t < k; ++t) subset[t] = cand[idx[t]];
        if (fn(subset)) return true;
        int t = k - 1;
        while (t >= 0 && idx[t] == n - k + t) --t;
        if (t < 0) return false;
        ++idx[t];
        for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
    }
}

bool arrow_at(const MixedGraph& g, int from, int at) {
    return g.mark_at(from, at) == Mark::Arrow;
}

void erase_value(std::vector<int>& v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

void reset_marks_to_circles(MixedGraph& g) {
    for (const MixedGraph::Edge& e : g.edges()) {
        g.set_mark(e.j, e.i, Mark::Circle);
        g.set_mark(e.i, e.j, Mark::Circle);
    }
}

// Unshielded triples (i, k, j) with i < j, both adjacent to k, i-j absent.
std::vector<std::array<int, 3>> unshielded_triples(const MixedGraph& g) {
    std::vector<std::array<int, 3>> out;
    const int p = g.vertex_count();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (g.has_edge(i, j)) continue;
            for (int k = 0; k < p; ++k) {
                if (k == i || k == j) continue;
                if (g.has_edge(i, k) && g.has_edge(j, k)) out.push_back({i, k, j});
            }
        }
    return out;
}

// Smallest separating subset of `pool` for (i, j), lexicographic within each
// size; falls back to `pool` itself (the set known to separate).
std::vector<int> minimal_sepset_within(CITester& ci, int i, int j,
                                       const std::vector<int>& pool) {
    for (int k = 0; k < static_cast<int>(pool.size()); ++k) {
        std::vector<int> found;
        bool hit = for_each_subset(pool, k, [&](const std::vector<int>& sub) {
            if (ci.decide(i, j, sub).independent) {
                found = sub;
                return true;
            }
            return false;
        });
        if (hit) return found;
    }
    return pool;
}

}  // namespace

std::pair<MixedGraph, SepsetMap> skeleton(CITester& ci, const SearchOptions& opts) {
    const int p = ci.variable_count();
    if (p < 2) throw std::invalid_argument("skeleton: need at least two variables");
    MixedGraph g = MixedGraph::complete_circle(p);
    SepsetMap sepsets;

    for (int k = 0;; ++k) {
        if (opts.max_cond_size >= 0 && k > opts.max_cond_size) break;
        std::vector<std::vector<int>> frozen(p);
        if (opts.stable_skeleton)
            for (int i = 0; i < p; ++i) frozen[i] = g.adjacent(i);

        bool any_candidate = false;
        for (int i = 0; i < p; ++i) {
            std::vector<int> partners = opts.stable_skeleton ? frozen[i] : g.adjacent(i);
            for (int j : partners) {
                if (!g.has_edge(i, j)) continue;
                std::vector<int> cand =
                    opts.stable_skeleton ? frozen[i] : g.adjacent(i);
                erase_value(cand, j);
                if (static_cast<int>(cand.size()) < k) continue;
                any_candidate = true;
                for_each_subset(cand, k, [&](const std::vector<int>& sub) {
                    if (ci.decide(i, j, sub).independent) {
                        g.remove_edge(i, j);
                        sepsets.set(i, j, sub);
                        return true;
                    }
                    return false;
                });
            }
        }
        if (!any_candidate) break;
    }
    return {std::move(g), std::move(sepsets)};
}

void orient_vstructures(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                        const SearchOptions& opts) {
    if (opts.mode == Algo::RFCI) {
        // Proposition-1 precondition: both pairs of each unshielded triple
        // must stay dependent given the recorded sepset; otherwise the edge
        // is spurious and removed with a fresh minimal sepset.
        bool removed = true;
        while (removed) {
            removed = false;
            for (const auto& [i, k, j] : unshielded_triples(g)) {
                if (!sepsets.has(i, j)) continue;
                std::vector<int> base = sepsets.get(i, j);
                erase_value(base, k);
                for (auto [x, y] : {std::pair{i, k}, std::pair{j, k}}) {
                    if (!g.has_edge(x, y)) continue;
                    if (ci.decide(x, y, base).independent) {
                        g.remove_edge(x, y);
                        sepsets.set(x, y, minimal_sepset_within(ci, x, y, base));
                        removed = true;
                    }
                }
                if (removed) break;  // triple list is stale; recompute
            }
        }
    }
    for (const auto& [i, k, j] : unshielded_triples(g)) {
        if (!sepsets.has(i, j)) continue;
        const std::vector<int>& s = sepsets.get(i, j);
        if (std::binary_search(s.begin(), s.end(), k)) continue;
        g.set_mark(i, k, Mark::Arrow);
        g.set_mark(j, k, Mark::Arrow);
    }
}

std::vector<int> possible_dsep(const MixedGraph& g, int x) {
    // v is in Possible-D-SEP(x) iff there is a path x ... v on which every
    // internal vertex is a collider or the flanking pair is adjacent.
    const int p = g.vertex_count();
    std::vector<char> visited(static_cast<std::size_t>(p) * p, 0);
    std::vector<std::pair<int, int>> stack;
    std::vector<char> member(p, 0);
    for (int y : g.adjacent(x)) {
        stack.emplace_back(x, y);
        visited[static_cast<std::size_t>(x) * p + y] = 1;
        member[y] = 1;
    }
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        for (int c : g.adjacent(b)) {
            if (c == a || visited[static_cast<std::size_t>(b) * p + c]) continue;
            bool collider = arrow_at(g, a, b) && arrow_at(g, c, b);
            if (!collider && !g.has_edge(a, c)) continue;
            visited[static_cast<std::size_t>(b) * p + c] = 1;
            if (c != x) member[c] = 1;
            stack.emplace_back(b, c);
        }
    }
    std::vector<int> out;
    for (int v = 0; v < p; ++v)
        if (member[v]) out.push_back(v);
    return out;
}

void possible_dsep_stage(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                         const SearchOptions& opts) {
    if (opts.mode == Algo::RFCI) return;
    const int p = g.vertex_count();
    for (int i = 0; i < p; ++i) {
        for (int j : g.adjacent(i)) {
            if (!g.has_edge(i, j)) continue;
            std::vector<int> cand = possible_dsep(g, i);
            erase_value(cand, i);
            erase_value(cand, j);
            int top = static_cast<int>(cand.size());
            if (opts.max_cond_size >= 0) top = std::min(top, opts.max_cond_size);
            for (int k = 0; k <= top && g.has_edge(i, j); ++k) {
                for_each_subset(cand, k, [&](const std::vector<int>& sub) {
                    if (ci.decide(i, j, sub).independent) {
                        g.remove_edge(i, j);
                        sepsets.set(i, j, sub);
                        return true;
                    }
                    return false;
                });
            }
        }
    }
    reset_marks_to_circles(g);
    orient_vstructures(g, sepsets, ci, opts);
}

namespace {

// ---- Zhang orientation rules -------------------------------------------

// R1: a*->b o-* c, a and c non-adjacent  =>  b -> c.
bool rule1(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int a = 0; a < p; ++a)
        for (int b : g.adjacent(a)) {
            if (!arrow_at(g, a, b)) continue;
            for (int c : g.adjacent(b)) {
                if (c == a || g.has_edge(a, c)) continue;
                if (g.mark_at(c, b) != Mark::Circle) continue;
                g.set_mark(c, b, Mark::Tail);
                g.set_mark(b, c, Mark::Arrow);
                changed = true;
            }
        }
    return changed;
}

// R2: (a -> b *-> c) or (a *-> b -> c), a *-o c  =>  arrowhead at c on a-c.
bool rule2(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int a = 0; a < p; ++a)
        for (int c : g.adjacent(a)) {
            if (g.mark_at(a, c) != Mark::Circle) continue;
            for (int b : g.adjacent(a)) {
                if (b == c || !g.has_edge(b, c)) continue;
                bool first = g.mark_at(b, a) == Mark::Tail && arrow_at(g, a, b) &&
                             arrow_at(g, b, c);
                bool second = arrow_at(g, a, b) && g.mark_at(c, b) == Mark::Tail &&
                              arrow_at(g, b, c);
                if (first || second) {
                    g.set_mark(a, c, Mark::Arrow);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

// R3: a*->b<-*c, a*-o d o-*c, a and c non-adjacent, d*-o b  =>  d*->b.
bool rule3(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int d = 0; d < p; ++d)
        for (int b : g.adjacent(d)) {
            if (g.mark_at(d, b) != Mark::Circle) continue;
            bool fired = false;
            for (int a : g.adjacent(b)) {
                if (fired) break;
                if (a == d || !arrow_at(g, a, b)) continue;
                if (!g.has_edge(a, d) || g.mark_at(a, d) != Mark::Circle) continue;
                for (int c : g.adjacent(b)) {
                    if (c == a || c == d || g.has_edge(a, c)) continue;
                    if (!arrow_at(g, c, b)) continue;
                    if (!g.has_edge(c, d) || g.mark_at(c, d) != Mark::Circle) continue;
                    g.set_mark(d, b, Mark::Arrow);
                    changed = true;
                    fired = true;
                    break;
                }
            }
        }
    return changed;
}

// Discriminating path <theta, ..., l, b, c> for b: theta non-adjacent to c,
// every vertex strictly between theta and b a collider on the path and a
// parent of c.
std::optional<std::vector<int>> find_discriminating_path(const MixedGraph& g, int b,
                                                         int c) {
    const int p = g.vertex_count();
    std::vector<int> path{b};  // grows leftward at the front
    std::vector<char> on_path(p, 0);
    on_path[b] = 1;
    on_path[c] = 1;

    std::function<std::optional<std::vector<int>>()> dfs =
        [&]() -> std::optional<std::vector<int>> {
        int cur = path.front();
        for (int u = 0; u < p; ++u) {
            if (on_path[u] || !g.has_edge(u, cur)) continue;
            // Inner vertices must be colliders on the path: the edge towards
            // u completes cur's collider (no constraint at b itself).
            if (path.size() >= 2 && !arrow_at(g, u, cur)) continue;
            if (!g.has_edge(u, c)) {
                std::vector<int> full{u};
                full.insert(full.end(), path.begin(), path.end());
                full.push_back(c);
                if (full.size() >= 4) return full;
                continue;
            }
            bool parent = g.mark_at(c, u) == Mark::Tail && arrow_at(g, u, c);
            if (!parent || !arrow_at(g, cur, u)) continue;
            path.insert(path.begin(), u);
            on_path[u] = 1;
            if (auto found = dfs()) return found;
            on_path[u] = 0;
            path.erase(path.begin());
        }
        return std::nullopt;
    };

    return dfs();
}

enum class R4Outcome { None, Oriented, EdgeRemoved };

R4Outcome rule4(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                const SearchOptions& opts, bool& truncated) {
    const int p = g.vertex_count();
    for (int b = 0; b < p; ++b) {
        for (int c : g.adjacent(b)) {
            if (g.mark_at(c, b) != Mark::Circle) continue;
            auto path = find_discriminating_path(g, b, c);
            if (!path) continue;
            int theta = path->front();
            if (!sepsets.has(theta, c)) continue;
            std::vector<int> w = sepsets.get(theta, c);

            if (opts.mode == Algo::RFCI) {
                // Proposition-2 precondition: every edge along the path must
                // stay dependent given each subset of sepset(theta, c).
                int cap = static_cast<int>(w.size());
                if (opts.max_cond_size >= 0 && opts.max_cond_size < cap) {
                    cap = opts.max_cond_size;
                    truncated = true;
                }
                for (std::size_t e = 0; e + 1 < path->size(); ++e) {
                    int u = (*path)[e], v = (*path)[e + 1];
                    for (int k = 0; k <= cap; ++k) {
                        std::vector<int> found;
                        bool hit = for_each_subset(w, k, [&](const std::vector<int>& y) {
                            std::vector<int> cond = y;
                            erase_value(cond, u);
                            erase_value(cond, v);
                            if (ci.decide(u, v, cond).independent) {
                                found = cond;
                                return true;
                            }
                            return false;
                        });
                        if (hit) {
                            g.remove_edge(u, v);
                            sepsets.set(u, v, found);
                            return R4Outcome::EdgeRemoved;
                        }
                    }
                }
            }

            int l = (*path)[path->size() - 3];
            if (std::binary_search(w.begin(), w.end(), b)) {
                g.set_mark(c, b, Mark::Tail);
                g.set_mark(b, c, Mark::Arrow);
            } else {
                g.set_mark(l, b, Mark::Arrow);
                g.set_mark(c, b, Mark::Arrow);
                g.set_mark(b, c, Mark::Arrow);
            }
            return R4Outcome::Oriented;
        }
    }
    return R4Outcome::None;
}

// Potentially directed edge from u to v: no arrowhead at u, no tail at v.
bool pd_edge(const MixedGraph& g, int u, int v) {
    return g.has_edge(u, v) && g.mark_at(v, u) != Mark::Arrow &&
           g.mark_at(u, v) != Mark::Tail;
}

// Uncovered potentially-directed path from `from` through `first` to `to`,
// not using the edge from-to directly (first != to). `avoid` is excluded as
// an intermediate vertex.
bool uncovered_pd_path(const MixedGraph& g, int from, int first, int to,
                       int avoid = -1) {
    if (first == to || first == avoid || !pd_edge(g, from, first)) return false;
    const int p = g.vertex_count();
    std::vector<char> on_path(p, 0);
    on_path[from] = 1;
    if (avoid >= 0) on_path[avoid] = 1;
    std::function<bool(int, int)> dfs = [&](int prev, int cur) -> bool {
        if (cur == to) return true;
        on_path[cur] = 1;
        for (int nxt = 0; nxt < p; ++nxt) {
            if (on_path[nxt] || !pd_edge(g, cur, nxt)) continue;
            if (g.has_edge(prev, nxt)) continue;  // uncovered
            if (dfs(cur, nxt)) {
                on_path[cur] = 0;
                return true;
            }
        }
        on_path[cur] = 0;
        return false;
    };
    return dfs(from, first);
}

// R5: a o-o b with an uncovered circle path <a, u, ..., v, b>, u non-adjacent
// to b and v non-adjacent to a  =>  orient a-b and the whole path undirected.
bool rule5(MixedGraph& g) {
    const int p = g.vertex_count();
    auto circle_edge = [&](int u, int v) {
        return g.has_edge(u, v) && g.mark_at(u, v) == Mark::Circle &&
               g.mark_at(v, u) == Mark::Circle;
    };
    for (int a = 0; a < p; ++a)
        for (int b : g.adjacent(a)) {
            if (b < a || !circle_edge(a, b)) continue;
            // DFS over circle paths from a to b avoiding the direct edge.
            std::vector<int> path{a};
            std::vector<char> on_path(p, 0);
            on_path[a] = 1;
            std::function<bool()> dfs = [&]() -> bool {
                int cur = path.back();
                for (int nxt = 0; nxt < p; ++nxt) {
                    if (on_path[nxt] || !circle_edge(cur, nxt)) continue;
                    if (path.size() >= 2 && g.has_edge(path[path.size() - 2], nxt))
                        continue;  // uncovered
                    if (nxt == b) {
                        if (path.size() < 3) continue;  // need u and v distinct
                        if (g.has_edge(path[1], b) || g.has_edge(path.back(), a))
                            continue;
                        path.push_back(b);
                        return true;
                    }
                    path.push_back(nxt);
                    on_path[nxt] = 1;
                    if (dfs()) return true;
                    on_path[nxt] = 0;
                    path.pop_back();
                }
                return false;
            };
            if (!dfs()) continue;
            g.set_mark(a, b, Mark::Tail);
            g.set_mark(b, a, Mark::Tail);
            for (std::size_t e = 0; e + 1 < path.size(); ++e) {
                g.set_mark(path[e], path[e + 1], Mark::Tail);
                g.set_mark(path[e + 1], path[e], Mark::Tail);
            }
            return true;
        }
    return false;
}

// R6: a - b o-* c  =>  tail at b on b-c.
bool rule6(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int b = 0; b < p; ++b) {
        bool undirected = false;
        for (int a : g.adjacent(b))
            if (g.mark_at(b, a) == Mark::Tail && g.mark_at(a, b) == Mark::Tail) {
                undirected = true;
                break;
            }
        if (!undirected) continue;
        for (int c : g.adjacent(b))
            if (g.mark_at(c, b) == Mark::Circle) {
                g.set_mark(c, b, Mark::Tail);
                changed = true;
            }
    }
    return changed;
}

// R7: a -o b o-* c, a and c non-adjacent  =>  tail at b on b-c.
bool rule7(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int b = 0; b < p; ++b)
        for (int a : g.adjacent(b)) {
            if (g.mark_at(b, a) != Mark::Tail || g.mark_at(a, b) != Mark::Circle)
                continue;
            for (int c : g.adjacent(b)) {
                if (c == a || g.has_edge(a, c)) continue;
                if (g.mark_at(c, b) == Mark::Circle) {
                    g.set_mark(c, b, Mark::Tail);
                    changed = true;
                }
            }
        }
    return changed;
}

// R8: a -> b -> c or a -o b -> c, with a o-> c  =>  a -> c.
bool rule8(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int a = 0; a < p; ++a)
        for (int c : g.adjacent(a)) {
            if (g.mark_at(c, a) != Mark::Circle || !arrow_at(g, a, c)) continue;
            for (int b : g.adjacent(a)) {
                if (b == c || !g.has_edge(b, c)) continue;
                bool b_to_c = g.mark_at(c, b) == Mark::Tail && arrow_at(g, b, c);
                if (!b_to_c) continue;
                bool a_to_b = g.mark_at(b, a) == Mark::Tail && arrow_at(g, a, b);
                bool a_co_b = g.mark_at(b, a) == Mark::Tail &&
                              g.mark_at(a, b) == Mark::Circle;
                if (a_to_b || a_co_b) {
                    g.set_mark(c, a, Mark::Tail);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

// R9: a o-> c with an uncovered p.d. path <a, b, ..., c>, b non-adjacent to c
//  =>  a -> c.
bool rule9(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int a = 0; a < p; ++a)
        for (int c : g.adjacent(a)) {
            if (g.mark_at(c, a) != Mark::Circle || !arrow_at(g, a, c)) continue;
            for (int b : g.adjacent(a)) {
                if (b == c || g.has_edge(b, c)) continue;
                if (uncovered_pd_path(g, a, b, c)) {
                    g.set_mark(c, a, Mark::Tail);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

// R10: a o-> c, b -> c <- d along two uncovered p.d. paths from a whose first
// vertices differ and are non-adjacent  =>  a -> c.
bool rule10(MixedGraph& g) {
    bool changed = false;
    const int p = g.vertex_count();
    for (int a = 0; a < p; ++a)
        for (int c : g.adjacent(a)) {
            if (g.mark_at(c, a) != Mark::Circle || !arrow_at(g, a, c)) continue;
            std::vector<int> pars;
            for (int x : g.adjacent(c))
                if (x != a && g.mark_at(c, x) == Mark::Tail && arrow_at(g, x, c))
                    pars.push_back(x);
            bool fired = false;
            for (int m : g.adjacent(a)) {
                if (fired) break;
                for (int wv : g.adjacent(a)) {
                    if (fired) break;
                    if (m == wv || g.has_edge(m, wv)) continue;
                    for (int bb : pars) {
                        if (fired) break;
                        for (int dd : pars) {
                            if (bb == dd) continue;
                            bool p1 = (m == bb && pd_edge(g, a, m)) ||
                                      uncovered_pd_path(g, a, m, bb, c);
                            if (!p1) continue;
                            bool p2 = (wv == dd && pd_edge(g, a, wv)) ||
                                      uncovered_pd_path(g, a, wv, dd, c);
                            if (!p2) continue;
                            g.set_mark(c, a, Mark::Tail);
                            changed = true;
                            fired = true;
                            break;
                        }
                    }
                }
            }
        }
    return changed;
}

}  // namespace

bool apply_orientation_rules(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                             const SearchOptions& opts, bool& truncated) {
    while (true) {
        bool changed = false;
        changed |= rule1(g);
        changed |= rule2(g);
        changed |= rule3(g);
        switch (rule4(g, sepsets, ci, opts, truncated)) {
            case R4Outcome::EdgeRemoved: return true;
            case R4Outcome::Oriented: changed = true; break;
            case R4Outcome::None: break;
        }
        if (opts.selection_rules) {
            changed |= rule5(g);
            changed |= rule6(g);
            changed |= rule7(g);
        }
        changed |= rule8(g);
        changed |= rule9(g);
        changed |= rule10(g);
        if (!changed) return false;
    }
}

Pag fci(CITester& ci, SearchOptions opts) {
    opts.mode = Algo::FCI;
    auto [g, sepsets] = skeleton(ci, opts);
    orient_vstructures(g, sepsets, ci, opts);
    if (opts.possible_dsep) possible_dsep_stage(g, sepsets, ci, opts);
    bool truncated = false;
    apply_orientation_rules(g, sepsets, ci, opts, truncated);
    return {std::move(g), std::move(sepsets), truncated};
}

Pag rfci(CITester& ci, SearchOptions opts) {
    opts.mode = Algo::RFCI;
    auto [g, sepsets] = skeleton(ci, opts);
    bool truncated = false;
    while (true) {
        reset_marks_to_circles(g);
        orient_vstructures(g, sepsets, ci, opts);
        if (!apply_orientation_rules(g, sepsets, ci, opts, truncated)) break;
        // R4's dependence check removed an edge; re-derive orientations.
    }
    return {std::move(g), std::move(sepsets), truncated};
}

}  // namespace missfci
