#pragma once

#include <vector>

#include "missfci/citest.hpp"
#include "missfci/graph.hpp"

namespace missfci {

/// Structural Hamming distance on labeled endpoint-marked graphs: +1 per
/// edge present in exactly one graph; for shared edges, +1 per endpoint
/// whose marks differ.
int shd(const MixedGraph& g1, const MixedGraph& g2);

/// Adjacency-only symmetric difference count.
int skeleton_shd(const MixedGraph& g1, const MixedGraph& g2);

/// Percentage increase of a's mean effective sample size per CI test over
/// b's: 100 * (mean_a - mean_b) / mean_b. Throws on an empty log.
double sample_gain(const std::vector<CIDecision>& log_a,
                   const std::vector<CIDecision>& log_b);

double mean_effective_n(const std::vector<CIDecision>& log);

/// Scores and sample accounting for one (dataset, algorithm, strategy) run.
struct ScoreReport {
    int shd = 0;
    int skeleton_shd = 0;
    long n_queries = 0;
    double avg_effective_n = 0.0;
    long n_degenerate = 0;
};

ScoreReport score(const MixedGraph& learned, const MixedGraph& target,
                  const std::vector<CIDecision>& log);

}  // namespace missfci
