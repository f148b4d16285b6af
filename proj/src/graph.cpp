#include "zsl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "zsl/error.hpp"

namespace zsl {

namespace {

void check_k(Index k, Index n) {
    if (k < 1 || k >= n)
        throw InvalidParameter("k=" + std::to_string(k) + " must satisfy 1 <= k < n=" + std::to_string(n));
}

void check_sigma(const Bandwidth& sigma) {
    if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma)))
        throw InvalidParameter("sigma must be positive and finite");
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + std::ptrdiff_t(mid));
    return 0.5 * (lower + upper);
}

// Median of the distances, falling back to the mean positive distance (and
// then 1) when more than half of them are zero.
double auto_sigma(const std::vector<double>& distances) {
    const double med = median(distances);
    if (med > 0.0) return med;
    double sum = 0.0;
    std::size_t count = 0;
    for (double d : distances)
        if (d > 0.0) {
            sum += d;
            ++count;
        }
    return count ? sum / double(count) : 1.0;
}

Hypergraph build_hypergraph(const Matrix& query, const Matrix& neighbor, Index k, const Bandwidth& sigma) {
    const Index n = query.rows();
    if (neighbor.rows() != n)
        throw ShapeError("hypergraph: query view has " + std::to_string(n) + " rows, neighbor view has " +
                         std::to_string(neighbor.rows()));
    check_k(k, n);
    check_sigma(sigma);

    Hypergraph h;
    h.n = n;
    std::vector<double> pair_distances;
    std::vector<std::vector<double>> edge_distances(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        auto members = nearest_rows(query.row(i).transpose(), neighbor, k, i);
        members.push_back(i);
        std::sort(members.begin(), members.end());
        auto& dists = edge_distances[static_cast<std::size_t>(i)];
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                dists.push_back((neighbor.row(members[a]) - neighbor.row(members[b])).norm());
        pair_distances.insert(pair_distances.end(), dists.begin(), dists.end());
        h.edges.push_back({std::move(members), 0.0});
    }
    h.sigma = sigma ? *sigma : auto_sigma(pair_distances);
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        const auto& dists = edge_distances[e];
        double sum = 0.0;
        for (double d : dists) sum += heat_kernel(d, h.sigma);
        h.edges[e].weight = sum / double(dists.size());
    }
    return h;
}

// Mirrors an upper-triangular triplet list into a full symmetric matrix whose
// (i, j) and (j, i) entries are bitwise equal.
SparseMatrix symmetric_from_upper(Index n, const std::vector<Eigen::Triplet<double>>& upper) {
    SparseMatrix up(n, n);
    up.setFromTriplets(upper.begin(), upper.end());
    std::vector<Eigen::Triplet<double>> full;
    full.reserve(static_cast<std::size_t>(2 * up.nonZeros()));
    for (Index r = 0; r < up.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(up, r); it; ++it) {
            full.emplace_back(it.row(), it.col(), it.value());
            if (it.row() != it.col()) full.emplace_back(it.col(), it.row(), it.value());
        }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(full.begin(), full.end());
    s.makeCompressed();
    return s;
}

std::vector<double> inv_sqrt_degrees(const Vector& degree, std::vector<std::string>& warnings) {
    std::vector<double> out(static_cast<std::size_t>(degree.size()), 0.0);
    for (Index v = 0; v < degree.size(); ++v) {
        if (degree(v) > 0.0) {
            out[static_cast<std::size_t>(v)] = 1.0 / std::sqrt(degree(v));
        } else {
            warnings.push_back("vertex " + std::to_string(v) + " has zero degree; its operator row is zero");
        }
    }
    return out;
}

}  // namespace

double heat_kernel(double distance, double sigma) {
    return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

std::vector<Index> nearest_rows(const Eigen::Ref<const Vector>& query, const Matrix& candidates, Index k,
                                Index exclude) {
    std::vector<std::pair<double, Index>> scored;
    scored.reserve(static_cast<std::size_t>(candidates.rows()));
    for (Index j = 0; j < candidates.rows(); ++j)
        if (j != exclude) scored.emplace_back((candidates.row(j).transpose() - query).squaredNorm(), j);
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + std::ptrdiff_t(take), scored.end());
    std::vector<Index> out;
    out.reserve(take);
    for (std::size_t t = 0; t < take; ++t) out.push_back(scored[t].second);
    return out;
}

AffinityGraph knn_graph(const Matrix& x, Index k, Bandwidth sigma) {
    const Index n = x.rows();
    check_k(k, n);
    check_sigma(sigma);

    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < n; ++i)
        for (Index j : nearest_rows(x.row(i).transpose(), x, k, i)) pairs.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    AffinityGraph g;
    g.n = n;
    std::vector<double> distances;
    distances.reserve(pairs.size());
    for (const auto& [i, j] : pairs) distances.push_back((x.row(i) - x.row(j)).norm());
    g.sigma = sigma ? *sigma : auto_sigma(distances);
    g.edges.reserve(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e)
        g.edges.push_back({pairs[e].first, pairs[e].second, heat_kernel(distances[e], g.sigma)});
    return g;
}

AffinityGraph knn_graph(const FeatureMatrix& x, Index k, Bandwidth sigma) {
    return knn_graph(x.values(), k, sigma);
}

Hypergraph hypergraph_homogeneous(const Matrix& x, Index k, Bandwidth sigma) {
    return build_hypergraph(x, x, k, sigma);
}

Hypergraph hypergraph_heterogeneous(const Matrix& query, const Matrix& neighbor, Index k, Bandwidth sigma) {
    return build_hypergraph(query, neighbor, k, sigma);
}

Hypergraph hypergraph_homogeneous(const FeatureMatrix& x, Index k, Bandwidth sigma) {
    auto h = build_hypergraph(x.values(), x.values(), k, sigma);
    h.query_view = h.neighbor_view = x.view_name();
    return h;
}

Hypergraph hypergraph_heterogeneous(const FeatureMatrix& query, const FeatureMatrix& neighbor, Index k,
                                    Bandwidth sigma) {
    auto h = build_hypergraph(query.values(), neighbor.values(), k, sigma);
    h.query_view = query.view_name();
    h.neighbor_view = neighbor.view_name();
    return h;
}

PropagationOperator propagation_operator(const AffinityGraph& g) {
    if (g.n < 1) throw InvalidInput("propagation operator: empty graph");
    PropagationOperator op;
    op.n = g.n;
    op.kind = PropagationOperator::Kind::graph;

    Vector degree = Vector::Zero(g.n);
    for (const auto& e : g.edges) {
        if (e.i == e.j || e.i < 0 || e.j >= g.n || e.i > e.j)
            throw InvalidInput("propagation operator: edges must satisfy 0 <= i < j < n");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
            throw InvalidInput("propagation operator: edge weights must be finite and >= 0");
        degree(e.i) += e.weight;
        degree(e.j) += e.weight;
    }
    const auto scale = inv_sqrt_degrees(degree, op.warnings);

    std::vector<Eigen::Triplet<double>> upper;
    upper.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        const double v = e.weight * scale[std::size_t(e.i)] * scale[std::size_t(e.j)];
        if (v != 0.0) upper.emplace_back(e.i, e.j, v);
    }
    op.s = symmetric_from_upper(g.n, upper);
    return op;
}

PropagationOperator propagation_operator(const Hypergraph& h) {
    if (h.n < 1) throw InvalidInput("propagation operator: empty hypergraph");
    PropagationOperator op;
    op.n = h.n;
    op.kind = PropagationOperator::Kind::hypergraph;

    Vector degree = Vector::Zero(h.n);
    for (const auto& e : h.edges) {
        if (e.vertices.empty()) throw InvalidInput("propagation operator: empty hyperedge");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
            throw InvalidInput("propagation operator: hyperedge weights must be finite and >= 0");
        for (Index v : e.vertices) {
            if (v < 0 || v >= h.n) throw InvalidInput("propagation operator: hyperedge vertex out of range");
            degree(v) += e.weight;
        }
    }
    const auto scale = inv_sqrt_degrees(degree, op.warnings);

    // Accumulate H We De^-1 H^T on the upper triangle.
    std::vector<Eigen::Triplet<double>> upper;
    for (const auto& e : h.edges) {
        const double w = e.weight / double(e.vertices.size());
        if (w == 0.0) continue;
        for (std::size_t a = 0; a < e.vertices.size(); ++a)
            for (std::size_t b = a; b < e.vertices.size(); ++b) {
                const Index u = std::min(e.vertices[a], e.vertices[b]);
                const Index v = std::max(e.vertices[a], e.vertices[b]);
                upper.emplace_back(u, v, w);
            }
    }
    SparseMatrix acc(h.n, h.n);
    acc.setFromTriplets(upper.begin(), upper.end());
    upper.clear();
    for (Index r = 0; r < acc.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(acc, r); it; ++it) {
            const double v = it.value() * scale[std::size_t(it.row())] * scale[std::size_t(it.col())];
            if (v != 0.0) upper.emplace_back(it.row(), it.col(), v);
        }
    op.s = symmetric_from_upper(h.n, upper);
    return op;
}

std::string format_hypergraph(const Hypergraph& h) {
    std::string out;
    for (const auto& e : h.edges) {
        out += format_double(e.weight) + ':';
        for (Index v : e.vertices) out += ' ' + std::to_string(v);
        out += '\n';
    }
    return out;
}

Hypergraph parse_hypergraph(std::string_view text, Index n) {
    Hypergraph h;
    h.n = n;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto pos = text.find('\n');
        auto line = text.substr(0, pos);
        text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw FormatError("hypergraph line " + std::to_string(line_no) + ": missing ':'");
        Hyperedge e;
        e.weight = parse_double(line.substr(0, colon));
        auto rest = line.substr(colon + 1);
        while (!rest.empty()) {
            while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\r')) rest.remove_prefix(1);
            std::size_t len = 0;
            while (len < rest.size() && rest[len] != ' ' && rest[len] != '\r') ++len;
            if (len == 0) break;
            const double v = parse_double(rest.substr(0, len));
            if (v != std::floor(v) || v < 0 || v >= double(n))
                throw FormatError("hypergraph line " + std::to_string(line_no) + ": bad vertex index");
            e.vertices.push_back(static_cast<Index>(v));
            rest.remove_prefix(len);
        }
        if (e.vertices.empty()) throw FormatError("hypergraph line " + std::to_string(line_no) + ": empty hyperedge");
        std::sort(e.vertices.begin(), e.vertices.end());
        h.edges.push_back(std::move(e));
    }
    return h;
}

}  // namespace zsl
