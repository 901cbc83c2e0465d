#pragma once

#include <vector>

#include "missfci/graph.hpp"

namespace missfci {

enum class Role : std::uint8_t { Observed, Latent, Selection, Indicator };

char role_char(Role r);
Role role_from_char(char c);

/// Ground-truth DAG together with the observability partition and, per
/// observed vertex, the set of selection/indicator vertices that govern its
/// measurement. Immutable after construction.
class CausalSystem {
public:
    /// `indicator_sets[v]` lists the indicator vertices governing observed
    /// vertex v (may be empty; ignored for non-observed v). Every selection
    /// vertex is implicitly part of every observable's set and is added here.
    CausalSystem(MixedGraph dag, std::vector<Role> roles,
                 std::vector<std::vector<int>> indicator_sets);

    const MixedGraph& dag() const { return dag_; }
    int vertex_count() const { return dag_.vertex_count(); }
    Role role(int v) const { return roles_.at(v); }
    const std::vector<Role>& roles() const { return roles_; }
    std::vector<char> role_chars() const;

    const std::vector<int>& observed() const { return observed_; }
    const std::vector<int>& latent() const { return latent_; }
    const std::vector<int>& selection() const { return selection_; }
    const std::vector<int>& indicators() const { return indicators_; }

    /// S_{O_v}: selection vertices plus the indicators governing v. Sorted.
    const std::vector<int>& indicator_set(int v) const;

    /// S_l: union of all per-observable indicator sets. Sorted.
    const std::vector<int>& indicator_union() const { return s_l_; }

    /// S_{O_i O_j W}: union of indicator sets over the given observables.
    std::vector<int> indicator_set_for(const std::vector<int>& vars) const;

private:
    MixedGraph dag_;
    std::vector<Role> roles_;
    std::vector<std::vector<int>> indicator_sets_;
    std::vector<int> observed_, latent_, selection_, indicators_, s_l_;
};

/// True iff no indicator vertex has a directed path (of length >= 1) to an
/// observed or selection vertex, or to an indicator governing a different
/// set of observables.
bool check_assumption1(const CausalSystem& sys);

}  // namespace missfci
