#include "missfci/sepset.hpp"

#include <algorithm>
#include <stdexcept>

namespace missfci {

std::pair<int, int> SepsetMap::key(int i, int j) {
    if (i == j) throw std::invalid_argument("sepset pair must be distinct");
    return {std::min(i, j), std::max(i, j)};
}

void SepsetMap::set(int i, int j, std::vector<int> sepset) {
    for (int v : sepset)
        if (v == i || v == j)
            throw std::invalid_argument("sepset must not contain an endpoint");
    std::sort(sepset.begin(), sepset.end());
    map_[key(i, j)] = std::move(sepset);
}

bool SepsetMap::has(int i, int j) const { return map_.count(key(i, j)) != 0; }

const std::vector<int>& SepsetMap::get(int i, int j) const {
    auto it = map_.find(key(i, j));
    if (it == map_.end()) throw std::out_of_range("no sepset recorded for pair");
    return it->second;
}

}  // namespace missfci
