#include "missfci/metrics.hpp"

#include <stdexcept>

namespace missfci {

int shd(const MixedGraph& g1, const MixedGraph& g2) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("shd: vertex counts differ");
    int total = 0;
    const int p = g1.vertex_count();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            bool e1 = g1.has_edge(i, j), e2 = g2.has_edge(i, j);
            if (e1 != e2) {
                ++total;
            } else if (e1) {
                if (g1.mark_at(j, i) != g2.mark_at(j, i)) ++total;
                if (g1.mark_at(i, j) != g2.mark_at(i, j)) ++total;
            }
        }
    return total;
}

int skeleton_shd(const MixedGraph& g1, const MixedGraph& g2) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("skeleton_shd: vertex counts differ");
    int total = 0;
    const int p = g1.vertex_count();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (g1.has_edge(i, j) != g2.has_edge(i, j)) ++total;
    return total;
}

double mean_effective_n(const std::vector<CIDecision>& log) {
    if (log.empty()) throw std::invalid_argument("mean_effective_n: empty log");
    double sum = 0.0;
    for (const CIDecision& d : log) sum += static_cast<double>(d.effective_n);
    return sum / static_cast<double>(log.size());
}

double sample_gain(const std::vector<CIDecision>& log_a,
                   const std::vector<CIDecision>& log_b) {
    double ma = mean_effective_n(log_a);
    double mb = mean_effective_n(log_b);
    if (mb == 0.0) throw std::invalid_argument("sample_gain: zero baseline mean");
    return 100.0 * (ma - mb) / mb;
}

ScoreReport score(const MixedGraph& learned, const MixedGraph& target,
                  const std::vector<CIDecision>& log) {
    ScoreReport r;
    r.shd = shd(learned, target);
    r.skeleton_shd = skeleton_shd(learned, target);
    r.n_queries = static_cast<long>(log.size());
    r.avg_effective_n = log.empty() ? 0.0 : mean_effective_n(log);
    for (const CIDecision& d : log)
        if (d.degenerate) ++r.n_degenerate;
    return r;
}

}  // namespace missfci
