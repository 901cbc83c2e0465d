#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace missfci {

/// Endpoint mark on a mixed-graph edge. Circle only appears in PAGs.
enum class Mark : std::uint8_t { Tail = 1, Arrow = 2, Circle = 3 };

char mark_char(Mark m);
Mark mark_from_char(char c);

/// Endpoint-marked graph. A single structure covers DAGs (tail->arrow edges
/// only), MAGs (tails and arrows) and PAGs (circles allowed); the stricter
/// invariants are checked on demand via is_dag() / is_ancestral().
///
/// Immutable-after-construction usage is the norm for query paths; all const
/// methods are safe for concurrent readers.
class MixedGraph {
public:
    explicit MixedGraph(int vertex_count);

    int vertex_count() const { return p_; }
    int edge_count() const { return n_edges_; }

    bool has_edge(int i, int j) const;

    /// Endpoint mark at vertex `at` on the edge {other, at}. Edge must exist.
    Mark mark_at(int other, int at) const;

    void add_edge(int i, int j, Mark at_i, Mark at_j);
    void remove_edge(int i, int j);
    void set_mark(int other, int at, Mark m);

    std::vector<int> adjacent(int i) const;
    /// j such that j -> i (tail at j, arrowhead at i).
    std::vector<int> parents(int i) const;
    std::vector<int> children(int i) const;

    struct Edge {
        int i, j;          // i < j
        Mark at_i, at_j;
        bool operator==(const Edge&) const = default;
    };
    std::vector<Edge> edges() const;

    /// True iff every edge is tail->arrow and there is no directed cycle.
    bool is_dag() const;
    bool has_directed_cycle() const;
    bool has_almost_directed_cycle() const;
    /// The three ancestral-graph conditions: no directed cycle, no almost
    /// directed cycle, and no undirected edge at a vertex with a parent or
    /// spouse.
    bool is_ancestral() const;

    bool operator==(const MixedGraph&) const = default;

    /// Complete graph with circle-circle edges (skeleton-search start state).
    static MixedGraph complete_circle(int p);

private:
    void check_vertex(int v) const;

    int p_;
    int n_edges_ = 0;
    // mark_[i * p_ + j] is the mark at j on edge {i, j}; 0 means no edge.
    std::vector<std::uint8_t> mark_;
};

/// Line-oriented text serialization:
///   p <n>
///   edge i j <mark_at_i> <mark_at_j>     marks in {t,a,c}, i < j
///   role i {O|L|S|M}                     optional, ascending
/// Edges are emitted sorted by (i, j), so the format round-trips
/// byte-identically.
std::string write_graph(const MixedGraph& g, const std::vector<char>& roles = {});
MixedGraph read_graph(std::istream& in, std::vector<char>* roles = nullptr);
MixedGraph parse_graph(const std::string& text, std::vector<char>* roles = nullptr);

}  // namespace missfci
