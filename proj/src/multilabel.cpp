#include "zsl/multilabel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "zsl/error.hpp"

namespace zsl {

std::string to_string(SynthesisMode m) { return m == SynthesisMode::sum ? "sum" : "mean"; }
std::string to_string(Metric m) { return m == Metric::cosine ? "cosine" : "euclidean"; }

SynthesisMode parse_synthesis_mode(std::string_view text) {
    if (text == "sum") return SynthesisMode::sum;
    if (text == "mean") return SynthesisMode::mean;
    throw InvalidParameter("unknown synthesis mode '" + std::string(text) + "' (sum|mean)");
}

Metric parse_metric(std::string_view text) {
    if (text == "cosine") return Metric::cosine;
    if (text == "euclidean") return Metric::euclidean;
    throw InvalidParameter("unknown metric '" + std::string(text) + "' (cosine|euclidean)");
}

std::uint64_t power_set_size(std::size_t n, std::size_t max_cardinality) {
    constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0;
    std::uint64_t binom = 1;  // C(n, 0)
    for (std::size_t i = 1; i <= std::min(n, max_cardinality); ++i) {
        // C(n, i) = C(n, i-1) * (n - i + 1) / i, exact at every step.
        const std::uint64_t num = n - i + 1;
        const std::uint64_t g = std::gcd(binom, std::uint64_t(i));
        const std::uint64_t reduced = binom / g;
        const std::uint64_t factor = num / (i / g);
        if (reduced != 0 && factor > cap / reduced) return cap;
        binom = reduced * factor;
        if (total > cap - binom) return cap;
        total += binom;
    }
    return total;
}

LabelPowerSet::LabelPowerSet(const LabelVocabulary& vocab, std::size_t max_cardinality, std::uint64_t size_cap) {
    const std::size_t n = vocab.size();
    if (max_cardinality < 1 || max_cardinality > n)
        throw InvalidParameter("max_cardinality=" + std::to_string(max_cardinality) + " must lie in [1, " +
                               std::to_string(n) + "]");
    const auto count = power_set_size(n, max_cardinality);
    if (count > size_cap)
        throw SizeLimitError("power set has " + std::to_string(count) + " subsets, above the cap of " +
                             std::to_string(size_cap));
    subsets.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> idx;
    for (std::size_t size = 1; size <= max_cardinality; ++size) {
        idx.resize(size);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            LabelSet s;
            for (auto i : idx) s.push_back(vocab.names()[i]);
            subsets.push_back(std::move(s));
            // Advance to the next combination in lexicographic order.
            std::size_t pos = size;
            while (pos > 0 && idx[pos - 1] == n - size + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

Vector synth_prototype(const LabelSet& labels, const WordVectorTable& wv, SynthesisMode mode) {
    if (labels.empty()) throw InvalidInput("cannot synthesize a prototype for an empty label set");
    Vector out = Vector::Zero(wv.dim);
    for (const auto& l : labels) {
        const Vector* v = wv.find(l);
        if (!v) throw MissingVectorError("no word vector for label '" + l + "'");
        out += *v;
    }
    if (mode == SynthesisMode::mean) out /= double(labels.size());
    return out;
}

PrototypeSet power_set_prototypes(const LabelVocabulary& vocab, const WordVectorTable& wv,
                                  std::size_t max_cardinality, SynthesisMode mode, std::uint64_t size_cap) {
    for (const auto& name : vocab.names())
        if (!wv.find(name)) throw MissingVectorError("no word vector for label '" + name + "'");
    const LabelPowerSet power(vocab, max_cardinality, size_cap);
    std::vector<Prototype> items;
    items.reserve(power.subsets.size());
    for (const auto& s : power.subsets) items.push_back({s, synth_prototype(s, wv, mode)});
    return PrototypeSet(std::move(items));
}

double distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, Metric metric) {
    if (metric == Metric::euclidean) return (a - b).norm();
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - a.dot(b) / (na * nb);
}

NearestPrototypes nearest_prototypes(const Matrix& x, const PrototypeSet& protos, Metric metric) {
    if (protos.empty()) throw InvalidInput("no prototypes");
    if (x.cols() != protos.space_dim())
        throw ShapeError("data has " + std::to_string(x.cols()) + " columns, prototypes have " +
                         std::to_string(protos.space_dim()));
    NearestPrototypes out;
    out.index.resize(static_cast<std::size_t>(x.rows()));
    out.distance.resize(static_cast<std::size_t>(x.rows()));
    for (Index r = 0; r < x.rows(); ++r) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < protos.size(); ++p) {
            const double d = distance(x.row(r).transpose(), protos[p].vector, metric);
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        out.index[std::size_t(r)] = best;
        out.distance[std::size_t(r)] = best_d;
    }
    return out;
}

std::vector<LabelSet> dmp_predict(const Matrix& x, const PrototypeSet& protos, Metric metric) {
    const auto nearest = nearest_prototypes(x, protos, metric);
    std::vector<LabelSet> out;
    out.reserve(nearest.index.size());
    for (auto p : nearest.index) out.push_back(protos[p].labels);
    return out;
}

TrampResult tramp_predict(const Matrix& x, const PrototypeSet& protos, Index k, double alpha, Bandwidth sigma,
                          const PropagateOptions& base) {
    if (protos.empty()) throw InvalidInput("no prototypes");
    if (x.cols() != protos.space_dim())
        throw ShapeError("data has " + std::to_string(x.cols()) + " columns, prototypes have " +
                         std::to_string(protos.space_dim()));
    const Index n = x.rows();
    const auto n_protos = static_cast<Index>(protos.size());
    Matrix all(n + n_protos, x.cols());
    all.topRows(n) = x;
    all.bottomRows(n_protos) = protos.matrix();

    const auto op = propagation_operator(knn_graph(all, k, sigma));
    std::vector<std::pair<Index, Index>> seed_list;
    for (Index p = 0; p < n_protos; ++p) seed_list.emplace_back(n + p, p);
    PropagateOptions options = base;
    options.alpha = alpha;

    TrampResult out;
    out.scores = propagate(op, SeedMatrix(n + n_protos, n_protos, std::move(seed_list)), options);
    out.scores.f = out.scores.f.topRows(n).eval();
    out.scores.class_names.clear();
    for (const auto& p : protos.items()) out.scores.class_names.push_back(join_labels(p.labels));
    for (Index c : out.scores.argmax()) out.labels.push_back(protos[std::size_t(c)].labels);
    return out;
}

SelfTrainResult self_train_adapt(const ProjectionModel& model, const Matrix& x_target, const PrototypeSet& protos,
                                 const SelfTrainOptions& options) {
    if (!(options.keep_fraction > 0.0 && options.keep_fraction <= 1.0))
        throw InvalidParameter("keep_fraction must lie in (0, 1]");
    if (!(options.augmentation_weight >= 0.0)) throw InvalidParameter("augmentation weight must be >= 0");

    SelfTrainResult out{model, {}};
    if (options.rounds == 0) return out;
    if (x_target.cols() != model.d_in())
        throw ShapeError("self-training: target has " + std::to_string(x_target.cols()) + " columns, model expects " +
                         std::to_string(model.d_in()));
    if (protos.space_dim() != model.d_out())
        throw ShapeError("self-training: prototypes do not live in the model's output space");
    if (x_target.rows() == 0) {
        out.warnings.push_back("self-training kept no instances; model unchanged");
        return out;
    }

    const Matrix xn = model.normalize(x_target);
    const Index n = xn.rows();
    const double a = options.augmentation_weight;
    for (std::size_t round = 0; round < options.rounds; ++round) {
        const Matrix projected = apply(out.model, x_target);
        const auto nearest = nearest_prototypes(projected, protos, options.metric);

        // Most confident rows first; each prototype keeps its own share.
        std::vector<Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) {
            return nearest.distance[std::size_t(l)] < nearest.distance[std::size_t(r)];
        });
        std::vector<Index> assigned(protos.size(), 0);
        for (auto p : nearest.index) ++assigned[p];
        std::vector<Index> quota(protos.size());
        for (std::size_t p = 0; p < protos.size(); ++p)
            quota[p] = static_cast<Index>(std::ceil(options.keep_fraction * double(assigned[p])));
        std::vector<Index> kept;
        for (Index r : order) {
            auto& q = quota[nearest.index[std::size_t(r)]];
            if (q > 0) {
                --q;
                kept.push_back(r);
            }
        }
        const auto keep = static_cast<Index>(kept.size());

        Matrix xk(keep, xn.cols());
        Matrix tk(keep, model.d_out());
        for (Index i = 0; i < keep; ++i) {
            const Index r = kept[std::size_t(i)];
            xk.row(i) = xn.row(r);
            tk.row(i) = (protos[nearest.index[std::size_t(r)]].vector.transpose() + a * projected.row(r)) / (1.0 + a);
        }

        ProjectionModel next = out.model;
        if (model.normalization == Normalization::none) {
            next.weights = solve_ridge(xk, tk.rowwise() - out.model.bias.transpose(), model.lambda, out.model.weights);
        } else {
            const Vector x_mean = xk.colwise().mean().transpose();
            const Vector t_mean = tk.colwise().mean().transpose();
            next.weights = solve_ridge(xk.rowwise() - x_mean.transpose(), tk.rowwise() - t_mean.transpose(),
                                       model.lambda, out.model.weights);
            next.bias = t_mean - next.weights.transpose() * x_mean;
        }
        out.model = std::move(next);
    }
    return out;
}

Matrix label_scores_from_prototypes(const Matrix& prototype_scores, const PrototypeSet& protos,
                                    const LabelVocabulary& vocab) {
    if (prototype_scores.cols() != static_cast<Index>(protos.size()))
        throw ShapeError("score matrix has " + std::to_string(prototype_scores.cols()) + " columns for " +
                         std::to_string(protos.size()) + " prototypes");
    const auto n_labels = static_cast<Index>(vocab.size());
    Matrix out = Matrix::Constant(prototype_scores.rows(), n_labels, -std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < protos.size(); ++p)
        for (const auto& label : protos[p].labels) {
            const auto idx = vocab.index_of(label);
            if (!idx) throw InvalidInput("prototype label '" + label + "' is not in the vocabulary");
            const auto col = static_cast<Index>(*idx);
            out.col(col) = out.col(col).cwiseMax(prototype_scores.col(static_cast<Index>(p)));
        }
    for (Index c = 0; c < n_labels; ++c)
        if (std::isinf(out(0, c)) && out.rows() > 0)
            throw InvalidInput("label '" + vocab.names()[std::size_t(c)] + "' has no prototype");
    return out;
}

}  // namespace zsl
