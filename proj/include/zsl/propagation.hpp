#pragma once

#include <string>
#include <utility>
#include <vector>

#include "zsl/graph.hpp"

namespace zsl {

/// One-hot supervision: row `seeds[s].first` carries class `seeds[s].second`;
/// every other row is zero.
struct SeedMatrix {
    Matrix y0;
    std::vector<std::pair<Index, Index>> seeds;

    SeedMatrix(Index n, Index n_classes, std::vector<std::pair<Index, Index>> seeds);

    Index n() const { return y0.rows(); }
    Index n_classes() const { return y0.cols(); }
};

struct PropagateOptions {
    double alpha = 0.85;
    double tol = 1e-9;
    int max_iter = 1000;
};

struct LabelScores {
    Matrix f;  // n x C
    std::vector<std::string> class_names;
    bool converged = true;
    int iterations = 0;
    /// Per-graph posterior weights when produced by model averaging.
    std::vector<double> graph_weights;
    std::vector<std::string> warnings;

    /// Row argmax; ties go to the lowest class index.
    std::vector<Index> argmax() const;
    std::vector<std::string> predicted_names() const;
};

/// Iterates F <- alpha S F + (1 - alpha) Y0 from F = Y0 until the largest
/// absolute update falls below tol. A run that hits max_iter returns the last
/// iterate with converged = false.
LabelScores propagate(const PropagationOperator& op, const SeedMatrix& seeds, const PropagateOptions& options = {});

/// Bayesian model averaging over graphs with a uniform prior. The evidence of
/// a graph is the product over seed rows of the share of alpha S F that the
/// graph routes back to the seed's own class.
LabelScores bma_combine(const std::vector<PropagationOperator>& ops, const SeedMatrix& seeds,
                        const PropagateOptions& options = {});

struct TmvHlpOptions {
    Index k = 10;
    Bandwidth sigma;
    PropagateOptions propagation;
};

/// Multi-view hypergraph label propagation. Prototypes are appended after
/// the data rows in every view, homogeneous and heterogeneous hypergraphs are
/// built for every ordered view pair, and their propagations are combined by
/// bma_combine. Returns scores for the data rows only, one class per
/// prototype.
LabelScores tmv_hlp(const std::vector<FeatureMatrix>& views, const std::vector<PrototypeSet>& prototypes,
                    const TmvHlpOptions& options = {});

/// CSV with a header row of class names.
std::string format_scores_csv(const LabelScores& scores);

}  // namespace zsl
