#pragma once

#include <map>
#include <utility>
#include <vector>

namespace missfci {

/// Separating sets discovered during skeleton search, keyed by unordered
/// vertex pair. A stored set never contains either endpoint.
class SepsetMap {
public:
    void set(int i, int j, std::vector<int> sepset);
    bool has(int i, int j) const;
    /// Throws if no sepset was recorded for the pair.
    const std::vector<int>& get(int i, int j) const;

    const std::map<std::pair<int, int>, std::vector<int>>& entries() const {
        return map_;
    }

private:
    static std::pair<int, int> key(int i, int j);
    std::map<std::pair<int, int>, std::vector<int>> map_;
};

}  // namespace missfci
