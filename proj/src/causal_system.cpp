#include "missfci/causal_system.hpp"

#include <algorithm>
#include <stdexcept>

#include "missfci/dsep.hpp"

namespace missfci {

char role_char(Role r) {
    switch (r) {
        case Role::Observed: return 'O';
        case Role::Latent: return 'L';
        case Role::Selection: return 'S';
        case Role::Indicator: return 'M';
    }
    throw std::logic_error("bad role");
}

Role role_from_char(char c) {
    switch (c) {
        case 'O': return Role::Observed;
        case 'L': return Role::Latent;
        case 'S': return Role::Selection;
        case 'M': return Role::Indicator;
    }
    throw std::invalid_argument(std::string("unknown role character: ") + c);
}

CausalSystem::CausalSystem(MixedGraph dag, std::vector<Role> roles,
                           std::vector<std::vector<int>> indicator_sets)
    : dag_(std::move(dag)), roles_(std::move(roles)) {
    const int p = dag_.vertex_count();
    if (static_cast<int>(roles_.size()) != p)
        throw std::invalid_argument("roles size must match vertex count");
    if (!dag_.is_dag()) throw std::invalid_argument("CausalSystem requires a DAG");
    indicator_sets.resize(p);

    for (int v = 0; v < p; ++v) {
        switch (roles_[v]) {
            case Role::Observed: observed_.push_back(v); break;
            case Role::Latent: latent_.push_back(v); break;
            case Role::Selection: selection_.push_back(v); break;
            case Role::Indicator: indicators_.push_back(v); break;
        }
    }

    indicator_sets_.assign(p, {});
    for (int v : observed_) {
        std::vector<int> s = indicator_sets[v];
        for (int x : s) {
            Role r = roles_.at(x);
            if (r != Role::Indicator && r != Role::Selection)
                throw std::invalid_argument(
                    "indicator set may only contain selection or indicator vertices");
        }
        // Every selection vertex governs every observable.
        s.insert(s.end(), selection_.begin(), selection_.end());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        indicator_sets_[v] = std::move(s);
        for (int x : indicator_sets_[v]) s_l_.push_back(x);
    }
    std::sort(s_l_.begin(), s_l_.end());
    s_l_.erase(std::unique(s_l_.begin(), s_l_.end()), s_l_.end());

    // Every indicator vertex must govern at least one observable.
    std::vector<int> covered;
    for (int x : s_l_)
        if (roles_[x] == Role::Indicator) covered.push_back(x);
    if (covered != indicators_)
        throw std::invalid_argument(
            "every indicator vertex must appear in some observable's indicator set");
}

std::vector<char> CausalSystem::role_chars() const {
    std::vector<char> out;
    out.reserve(roles_.size());
    for (Role r : roles_) out.push_back(role_char(r));
    return out;
}

const std::vector<int>& CausalSystem::indicator_set(int v) const {
    if (role(v) != Role::Observed)
        throw std::invalid_argument("indicator_set: vertex is not observed");
    return indicator_sets_[v];
}

std::vector<int> CausalSystem::indicator_set_for(const std::vector<int>& vars) const {
    std::vector<int> out;
    for (int v : vars) {
        const std::vector<int>& s = indicator_set(v);
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool check_assumption1(const CausalSystem& sys) {
    const MixedGraph& g = sys.dag();
    // governed[m]: the observables whose measurement indicator set contains m.
    auto governed = [&](int m) {
        std::vector<int> out;
        for (int o : sys.observed()) {
            const std::vector<int>& s = sys.indicator_set(o);
            if (std::binary_search(s.begin(), s.end(), m)) out.push_back(o);
        }
        return out;
    };
    for (int m : sys.indicators()) {
        std::vector<int> desc;  // strict descendants of m
        std::vector<int> stack{m};
        std::vector<char> seen(g.vertex_count(), 0);
        seen[m] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int c : g.children(v))
                if (!seen[c]) {
                    seen[c] = 1;
                    desc.push_back(c);
                    stack.push_back(c);
                }
        }
        std::vector<int> gov_m = governed(m);
        for (int d : desc) {
            Role r = sys.role(d);
            if (r == Role::Observed || r == Role::Selection) return false;
            if (r == Role::Indicator && governed(d) != gov_m) return false;
        }
    }
    return true;
}

}  // namespace missfci
