#include "missfci/graph.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace missfci {

char mark_char(Mark m) {
    switch (m) {
        case Mark::Tail: return 't';
        case Mark::Arrow: return 'a';
        case Mark::Circle: return 'c';
    }
    throw std::logic_error("bad mark");
}

Mark mark_from_char(char c) {
    switch (c) {
        case 't': return Mark::Tail;
        case 'a': return Mark::Arrow;
        case 'c': return Mark::Circle;
    }
    throw std::invalid_argument(std::string("unknown mark character: ") + c);
}

MixedGraph::MixedGraph(int vertex_count) : p_(vertex_count) {
    if (vertex_count <= 0)
        throw std::invalid_argument("vertex_count must be positive");
    mark_.assign(static_cast<std::size_t>(p_) * p_, 0);
}

void MixedGraph::check_vertex(int v) const {
    if (v < 0 || v >= p_)
        throw std::out_of_range("vertex index out of range");
}

bool MixedGraph::has_edge(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return i != j && mark_[static_cast<std::size_t>(i) * p_ + j] != 0;
}

Mark MixedGraph::mark_at(int other, int at) const {
    if (!has_edge(other, at))
        throw std::invalid_argument("mark_at: no such edge");
    return static_cast<Mark>(mark_[static_cast<std::size_t>(other) * p_ + at]);
}

void MixedGraph::add_edge(int i, int j, Mark at_i, Mark at_j) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw std::invalid_argument("self-loops are not allowed");
    if (has_edge(i, j)) throw std::invalid_argument("edge already present");
    mark_[static_cast<std::size_t>(j) * p_ + i] = static_cast<std::uint8_t>(at_i);
    mark_[static_cast<std::size_t>(i) * p_ + j] = static_cast<std::uint8_t>(at_j);
    ++n_edges_;
}

void MixedGraph::remove_edge(int i, int j) {
    if (!has_edge(i, j)) throw std::invalid_argument("remove_edge: no such edge");
    mark_[static_cast<std::size_t>(j) * p_ + i] = 0;
    mark_[static_cast<std::size_t>(i) * p_ + j] = 0;
    --n_edges_;
}

void MixedGraph::set_mark(int other, int at, Mark m) {
    if (!has_edge(other, at)) throw std::invalid_argument("set_mark: no such edge");
    mark_[static_cast<std::size_t>(other) * p_ + at] = static_cast<std::uint8_t>(m);
}

std::vector<int> MixedGraph::adjacent(int i) const {
    check_vertex(i);
    std::vector<int> out;
    for (int j = 0; j < p_; ++j)
        if (j != i && mark_[static_cast<std::size_t>(i) * p_ + j] != 0) out.push_back(j);
    return out;
}

std::vector<int> MixedGraph::parents(int i) const {
    check_vertex(i);
    std::vector<int> out;
    for (int j = 0; j < p_; ++j) {
        if (j == i || mark_[static_cast<std::size_t>(i) * p_ + j] == 0) continue;
        if (mark_at(i, j) == Mark::Tail && mark_at(j, i) == Mark::Arrow) out.push_back(j);
    }
    return out;
}

std::vector<int> MixedGraph::children(int i) const {
    check_vertex(i);
    std::vector<int> out;
    for (int j = 0; j < p_; ++j) {
        if (j == i || mark_[static_cast<std::size_t>(i) * p_ + j] == 0) continue;
        if (mark_at(j, i) == Mark::Tail && mark_at(i, j) == Mark::Arrow) out.push_back(j);
    }
    return out;
}

std::vector<MixedGraph::Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(n_edges_);
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j)
            if (mark_[static_cast<std::size_t>(i) * p_ + j] != 0)
                out.push_back({i, j, mark_at(j, i), mark_at(i, j)});
    return out;
}

bool MixedGraph::has_directed_cycle() const {
    // DFS over strictly directed edges (tail -> arrow).
    std::vector<int> state(p_, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<int> stack;
    for (int s = 0; s < p_; ++s) {
        if (state[s] != 0) continue;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            if (state[v] == 0) {
                state[v] = 1;
                for (int c : children(v)) {
                    if (state[c] == 1) return true;
                    if (state[c] == 0) stack.push_back(c);
                }
            } else {
                if (state[v] == 1) state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

bool MixedGraph::has_almost_directed_cycle() const {
    // x <-> y where additionally x is an ancestor of y (or vice versa).
    std::vector<std::vector<char>> reach(p_, std::vector<char>(p_, 0));
    for (int s = 0; s < p_; ++s) {
        std::vector<int> stack{s};
        reach[s][s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int c : children(v))
                if (!reach[s][c]) {
                    reach[s][c] = 1;
                    stack.push_back(c);
                }
        }
    }
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j) {
            if (mark_[static_cast<std::size_t>(i) * p_ + j] == 0) continue;
            if (mark_at(j, i) == Mark::Arrow && mark_at(i, j) == Mark::Arrow &&
                (reach[i][j] || reach[j][i]))
                return true;
        }
    return false;
}

bool MixedGraph::is_ancestral() const {
    if (has_directed_cycle() || has_almost_directed_cycle()) return false;
    for (int i = 0; i < p_; ++i)
        for (int j = i + 1; j < p_; ++j) {
            if (mark_[static_cast<std::size_t>(i) * p_ + j] == 0) continue;
            if (mark_at(j, i) != Mark::Tail || mark_at(i, j) != Mark::Tail) continue;
            // Undirected edge: neither endpoint may have a parent or spouse.
            for (int v : {i, j}) {
                for (int k : adjacent(v)) {
                    if (mark_at(k, v) == Mark::Arrow) return false;
                }
            }
        }
    return true;
}

bool MixedGraph::is_dag() const {
    for (const Edge& e : edges()) {
        bool fwd = e.at_i == Mark::Tail && e.at_j == Mark::Arrow;
        bool bwd = e.at_i == Mark::Arrow && e.at_j == Mark::Tail;
        if (!fwd && !bwd) return false;
    }
    return !has_directed_cycle();
}

MixedGraph MixedGraph::complete_circle(int p) {
    MixedGraph g(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) g.add_edge(i, j, Mark::Circle, Mark::Circle);
    return g;
}

std::string write_graph(const MixedGraph& g, const std::vector<char>& roles) {
    if (!roles.empty() && static_cast<int>(roles.size()) != g.vertex_count())
        throw std::invalid_argument("roles size must match vertex count");
    std::ostringstream out;
    out << "p " << g.vertex_count() << '\n';
    for (const MixedGraph::Edge& e : g.edges())
        out << "edge " << e.i << ' ' << e.j << ' ' << mark_char(e.at_i) << ' '
            << mark_char(e.at_j) << '\n';
    for (std::size_t i = 0; i < roles.size(); ++i)
        out << "role " << i << ' ' << roles[i] << '\n';
    return out.str();
}

MixedGraph read_graph(std::istream& in, std::vector<char>* roles) {
    std::string line;
    int p = -1;
    std::vector<MixedGraph::Edge> edges;
    std::vector<char> role_buf;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "p") {
            if (!(ls >> p) || p <= 0) throw std::invalid_argument("bad 'p' header line");
        } else if (tag == "edge") {
            int i, j;
            char mi, mj;
            if (!(ls >> i >> j >> mi >> mj))
                throw std::invalid_argument("bad edge line: " + line);
            edges.push_back({i, j, mark_from_char(mi), mark_from_char(mj)});
        } else if (tag == "role") {
            int i;
            char r;
            if (!(ls >> i >> r)) throw std::invalid_argument("bad role line: " + line);
            if (static_cast<int>(role_buf.size()) <= i) role_buf.resize(i + 1, '?');
            role_buf[i] = r;
        } else {
            throw std::invalid_argument("unknown line tag: " + tag);
        }
    }
    if (p < 0) throw std::invalid_argument("missing 'p' header");
    MixedGraph g(p);
    for (const auto& e : edges) g.add_edge(e.i, e.j, e.at_i, e.at_j);
    if (roles) *roles = std::move(role_buf);
    return g;
}

MixedGraph parse_graph(const std::string& text, std::vector<char>* roles) {
    std::istringstream in(text);
    return read_graph(in, roles);
}

}  // namespace missfci
