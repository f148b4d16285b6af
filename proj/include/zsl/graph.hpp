#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "zsl/dataset.hpp"

namespace zsl {

/// Heat-kernel bandwidth; std::nullopt selects the median of the distances
/// the construction uses.
using Bandwidth = std::optional<double>;

struct WeightedEdge {
    Index i = 0;  // i < j
    Index j = 0;
    double weight = 0.0;
};

/// Undirected weighted graph without self-loops; edges sorted by (i, j).
struct AffinityGraph {
    Index n = 0;
    std::vector<WeightedEdge> edges;
    double sigma = 1.0;
};

struct Hyperedge {
    std::vector<Index> vertices;  // ascending
    double weight = 0.0;
};

struct Hypergraph {
    Index n = 0;
    std::vector<Hyperedge> edges;
    std::string query_view;
    std::string neighbor_view;
    double sigma = 1.0;

    bool homogeneous() const { return query_view == neighbor_view; }
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric normalized operator consumed by label propagation.
struct PropagationOperator {
    enum class Kind { graph, hypergraph };

    Index n = 0;
    SparseMatrix s;
    Kind kind = Kind::graph;
    std::vector<std::string> warnings;

    Matrix dense() const { return Matrix(s); }
};

double heat_kernel(double distance, double sigma);

/// Indices of the k rows of `candidates` closest to `query` (Euclidean),
/// skipping `exclude`; distance ties go to the lower index.
std::vector<Index> nearest_rows(const Eigen::Ref<const Vector>& query, const Matrix& candidates, Index k,
                                Index exclude = -1);

AffinityGraph knn_graph(const Matrix& x, Index k, Bandwidth sigma = std::nullopt);
AffinityGraph knn_graph(const FeatureMatrix& x, Index k, Bandwidth sigma = std::nullopt);

Hypergraph hypergraph_homogeneous(const FeatureMatrix& x, Index k, Bandwidth sigma = std::nullopt);
Hypergraph hypergraph_heterogeneous(const FeatureMatrix& query, const FeatureMatrix& neighbor, Index k,
                                    Bandwidth sigma = std::nullopt);
Hypergraph hypergraph_homogeneous(const Matrix& x, Index k, Bandwidth sigma = std::nullopt);
Hypergraph hypergraph_heterogeneous(const Matrix& query, const Matrix& neighbor, Index k,
                                    Bandwidth sigma = std::nullopt);

PropagationOperator propagation_operator(const AffinityGraph& g);
PropagationOperator propagation_operator(const Hypergraph& h);

/// One line per hyperedge: `weight: v1 v2 ...`.
std::string format_hypergraph(const Hypergraph& h);
Hypergraph parse_hypergraph(std::string_view text, Index n);

}  // namespace zsl
