#pragma once

#include <utility>

#include "missfci/citest.hpp"
#include "missfci/graph.hpp"
#include "missfci/sepset.hpp"

namespace missfci {

enum class Algo { FCI, RFCI };

struct SearchOptions {
    Algo mode = Algo::FCI;
    int max_cond_size = -1;        // < 0: unlimited
    bool stable_skeleton = true;   // freeze adjacency sets per level
    bool selection_rules = false;  // R5-R7 (undirected-edge rules)
    bool possible_dsep = true;     // FCI only; ignored in RFCI mode
};

/// Discovery output: endpoint-marked graph with circles plus the separating
/// sets found during search.
struct Pag {
    MixedGraph graph;
    SepsetMap sepsets;
    bool truncated = false;  // a quantified CI check was cut off by max_cond_size
};

/// Level-wise adjacency search. Starts from the complete circle graph; at
/// level k each ordered adjacent pair is tested against k-subsets of the
/// current adjacency set, and the first separating set found is recorded.
std::pair<MixedGraph, SepsetMap> skeleton(CITester& ci, const SearchOptions& opts);

/// Orient unshielded colliders. In RFCI mode the Proposition-1 precondition
/// runs first: both pairs of each triple are re-tested against the recorded
/// sepset, and edges failing the dependence check are removed (with a fresh
/// minimal sepset) before any collider is oriented.
void orient_vstructures(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                        const SearchOptions& opts);

/// FCI's extra removal stage: conditioning sets drawn from Possible-D-SEP.
/// Removes edges, then resets all marks to circles and re-runs v-structure
/// orientation. No-op in RFCI mode.
void possible_dsep_stage(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                         const SearchOptions& opts);

std::vector<int> possible_dsep(const MixedGraph& g, int x);

/// Zhang's orientation rules (R1-R4, R8-R10; R5-R7 when enabled) applied to a
/// fixpoint. In RFCI mode R4 runs the Proposition-2 dependence checks along
/// each discriminating path; returns true if that removed an edge, in which
/// case the caller must re-derive orientations from scratch.
bool apply_orientation_rules(MixedGraph& g, SepsetMap& sepsets, CITester& ci,
                             const SearchOptions& opts, bool& truncated);

Pag fci(CITester& ci, SearchOptions opts = {});
Pag rfci(CITester& ci, SearchOptions opts = {});

}  // namespace missfci
