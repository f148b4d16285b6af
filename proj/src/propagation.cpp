#include "zsl/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zsl/error.hpp"

namespace zsl {

SeedMatrix::SeedMatrix(Index n, Index n_classes, std::vector<std::pair<Index, Index>> seed_list)
    : y0(Matrix::Zero(n, n_classes)), seeds(std::move(seed_list)) {
    if (n < 1 || n_classes < 1) throw InvalidParameter("seed matrix needs n >= 1 and at least one class");
    for (const auto& [row, cls] : seeds) {
        if (row < 0 || row >= n || cls < 0 || cls >= n_classes)
            throw InvalidParameter("seed (" + std::to_string(row) + ", " + std::to_string(cls) + ") out of range");
        if (y0.row(row).any()) throw InvalidParameter("row " + std::to_string(row) + " seeded twice");
        y0(row, cls) = 1.0;
    }
}

std::vector<Index> LabelScores::argmax() const {
    std::vector<Index> out(static_cast<std::size_t>(f.rows()), 0);
    for (Index r = 0; r < f.rows(); ++r) {
        Index best = 0;
        for (Index c = 1; c < f.cols(); ++c)
            if (f(r, c) > f(r, best)) best = c;
        out[static_cast<std::size_t>(r)] = best;
    }
    return out;
}

std::vector<std::string> LabelScores::predicted_names() const {
    std::vector<std::string> out;
    for (Index c : argmax())
        out.push_back(static_cast<std::size_t>(c) < class_names.size() ? class_names[std::size_t(c)]
                                                                        : std::to_string(c));
    return out;
}

namespace {

std::vector<std::string> default_names(Index c) {
    std::vector<std::string> out;
    for (Index i = 0; i < c; ++i) out.push_back(std::to_string(i));
    return out;
}

void check_options(const PropagateOptions& o) {
    if (!(o.alpha >= 0.0 && o.alpha < 1.0)) throw InvalidParameter("alpha must lie in [0, 1)");
    if (!(o.tol > 0.0)) throw InvalidParameter("tol must be > 0");
    if (o.max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
}

// log of the evidence product; -inf when some seed gets no support.
double log_evidence(const PropagationOperator& op, const Matrix& f, const SeedMatrix& seeds, double alpha) {
    double total = 0.0;
    for (const auto& [row, cls] : seeds.seeds) {
        const Vector routed = alpha * (op.s.row(row) * f).transpose();
        const double sum = routed.sum();
        const double share = sum > 0.0 ? routed(cls) / sum : 0.0;
        if (!(share > 0.0)) return -std::numeric_limits<double>::infinity();
        total += std::log(share);
    }
    return total;
}

}  // namespace

LabelScores propagate(const PropagationOperator& op, const SeedMatrix& seeds, const PropagateOptions& options) {
    check_options(options);
    if (op.n != seeds.n())
        throw ShapeError("propagate: operator has " + std::to_string(op.n) + " vertices, seeds have " +
                         std::to_string(seeds.n()) + " rows");
    const double a = options.alpha;
    const Matrix base = (1.0 - a) * seeds.y0;

    LabelScores out;
    out.class_names = default_names(seeds.n_classes());
    out.warnings = op.warnings;
    out.converged = false;
    Matrix f = seeds.y0;
    for (int it = 1; it <= options.max_iter; ++it) {
        Matrix next = a * (op.s * f) + base;
        const double change = (next - f).cwiseAbs().maxCoeff();
        f = std::move(next);
        out.iterations = it;
        if (change < options.tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged)
        out.warnings.push_back("propagation did not converge within " + std::to_string(options.max_iter) +
                               " iterations");
    out.f = std::move(f);
    return out;
}

LabelScores bma_combine(const std::vector<PropagationOperator>& ops, const SeedMatrix& seeds,
                        const PropagateOptions& options) {
    if (ops.empty()) throw InvalidParameter("bma_combine needs at least one operator");
    for (const auto& op : ops)
        if (op.n != ops.front().n) throw ShapeError("bma_combine: operators differ in size");

    std::vector<LabelScores> runs;
    std::vector<double> log_ev;
    runs.reserve(ops.size());
    for (const auto& op : ops) {
        runs.push_back(propagate(op, seeds, options));
        log_ev.push_back(log_evidence(op, runs.back().f, seeds, options.alpha));
    }

    LabelScores out;
    out.class_names = runs.front().class_names;
    const double best = *std::max_element(log_ev.begin(), log_ev.end());
    std::vector<double> weights(ops.size());
    if (!std::isfinite(best)) {
        std::fill(weights.begin(), weights.end(), 1.0 / double(ops.size()));
        out.warnings.push_back("all graph evidences are zero; averaging graphs uniformly");
    } else {
        double norm = 0.0;
        for (std::size_t g = 0; g < ops.size(); ++g) norm += weights[g] = std::exp(log_ev[g] - best);
        for (auto& w : weights) w /= norm;
    }

    out.f = Matrix::Zero(seeds.n(), seeds.n_classes());
    for (std::size_t g = 0; g < runs.size(); ++g) {
        if (weights[g] != 0.0) out.f += weights[g] * runs[g].f;
        out.converged = out.converged && runs[g].converged;
        out.iterations = std::max(out.iterations, runs[g].iterations);
        for (const auto& w : runs[g].warnings) out.warnings.push_back("graph " + std::to_string(g) + ": " + w);
    }
    out.graph_weights = std::move(weights);
    return out;
}

LabelScores tmv_hlp(const std::vector<FeatureMatrix>& views, const std::vector<PrototypeSet>& prototypes,
                    const TmvHlpOptions& options) {
    if (views.empty()) throw InvalidParameter("tmv_hlp needs at least one view");
    if (prototypes.size() != views.size())
        throw ShapeError("tmv_hlp: one prototype set per view is required");
    const Index n = views.front().rows();
    const auto n_protos = static_cast<Index>(prototypes.front().size());
    if (n_protos < 1) throw InvalidInput("tmv_hlp: no prototypes");
    for (std::size_t v = 0; v < views.size(); ++v) {
        if (views[v].rows() != n) throw ShapeError("tmv_hlp: views are not row-aligned");
        if (prototypes[v].space_dim() != views[v].cols())
            throw ShapeError("tmv_hlp: prototypes of view " + std::to_string(v) + " have dimension " +
                             std::to_string(prototypes[v].space_dim()) + ", view has " +
                             std::to_string(views[v].cols()));
        if (static_cast<Index>(prototypes[v].size()) != n_protos)
            throw ShapeError("tmv_hlp: prototype sets differ in size across views");
        for (Index c = 0; c < n_protos; ++c)
            if (!same_label_set(prototypes[v][std::size_t(c)].labels, prototypes.front()[std::size_t(c)].labels))
                throw InvalidInput("tmv_hlp: prototype order differs across views");
    }

    std::vector<FeatureMatrix> augmented;
    for (std::size_t v = 0; v < views.size(); ++v) {
        Matrix m(n + n_protos, views[v].cols());
        m.topRows(n) = views[v].values();
        m.bottomRows(n_protos) = prototypes[v].matrix();
        augmented.emplace_back(std::move(m), views[v].view_name().empty() ? "view" + std::to_string(v)
                                                                          : views[v].view_name());
    }

    std::vector<PropagationOperator> ops;
    for (std::size_t q = 0; q < augmented.size(); ++q)
        for (std::size_t r = 0; r < augmented.size(); ++r) {
            const auto h = q == r ? hypergraph_homogeneous(augmented[q], options.k, options.sigma)
                                  : hypergraph_heterogeneous(augmented[q], augmented[r], options.k, options.sigma);
            ops.push_back(propagation_operator(h));
        }

    std::vector<std::pair<Index, Index>> seed_list;
    for (Index c = 0; c < n_protos; ++c) seed_list.emplace_back(n + c, c);
    const SeedMatrix seeds(n + n_protos, n_protos, std::move(seed_list));

    auto combined = bma_combine(ops, seeds, options.propagation);
    combined.f = combined.f.topRows(n).eval();
    combined.class_names.clear();
    for (const auto& p : prototypes.front().items()) combined.class_names.push_back(join_labels(p.labels));
    return combined;
}

std::string format_scores_csv(const LabelScores& scores) {
    std::string out;
    for (std::size_t c = 0; c < scores.class_names.size(); ++c) {
        if (c) out += ',';
        out += scores.class_names[c];
    }
    out += '\n';
    out += format_matrix(scores.f);
    return out;
}

}  // namespace zsl
