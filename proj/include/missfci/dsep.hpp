#pragma once

#include <vector>

#include "missfci/causal_system.hpp"
#include "missfci/graph.hpp"

namespace missfci {

/// An(seed) in a DAG, reflexively including the seed. Sorted output.
std::vector<int> ancestors(const MixedGraph& dag, const std::vector<int>& seed);

/// d-separation of A and B given C, decided by the linear-time reachability
/// traversal. A, B, C must be pairwise disjoint; the graph must be a DAG.
bool d_separated(const MixedGraph& dag, const std::vector<int>& a,
                 const std::vector<int>& b, const std::vector<int>& c);

/// Inducing path between two observed vertices with respect to the system's
/// latent and selection sets: a path whose every collider is an ancestor of
/// {oi, oj} union S and whose every intermediate non-collider is latent.
bool has_inducing_path(const CausalSystem& sys, int oi, int oj);

/// DAG -> MAG projection over sys.observed(). Vertex k of the result is
/// sys.observed()[k]. Adjacency iff an inducing path exists; arrowhead at an
/// endpoint iff it is not an ancestor of the other endpoint union S.
MixedGraph dag_to_mag(const CausalSystem& sys);

/// d-separation CI oracle: independence of {oi} and {oj} given w plus the
/// extra selection-style conditioning set `sel`. Returns true = independent.
bool oracle_ci(const CausalSystem& sys, int oi, int oj, const std::vector<int>& w,
               const std::vector<int>& sel);

}  // namespace missfci
