#include "zsl/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "zsl/error.hpp"

namespace zsl {

MulticlassReport multiclass_accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth) {
    if (pred.size() != truth.size())
        throw ShapeError("accuracy: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(truth.size()) + " labels");
    if (truth.empty()) throw InvalidInput("accuracy: no instances");

    std::set<std::string> names(truth.begin(), truth.end());
    names.insert(pred.begin(), pred.end());

    MulticlassReport r;
    r.classes.assign(names.begin(), names.end());
    const auto index = [&](const std::string& s) {
        return static_cast<Index>(std::lower_bound(r.classes.begin(), r.classes.end(), s) - r.classes.begin());
    };
    const auto c = static_cast<Index>(r.classes.size());
    r.confusion = Eigen::MatrixXi::Zero(c, c);
    for (std::size_t i = 0; i < truth.size(); ++i) ++r.confusion(index(truth[i]), index(pred[i]));

    r.accuracy = double(r.confusion.trace()) / double(truth.size());
    for (Index k = 0; k < c; ++k) {
        const int total = r.confusion.row(k).sum();
        if (total > 0) r.per_class_accuracy[r.classes[std::size_t(k)]] = double(r.confusion(k, k)) / total;
    }
    return r;
}

namespace {

std::vector<std::vector<bool>> truth_masks(const std::vector<LabelSet>& truth, const LabelVocabulary& vocab) {
    std::vector<std::vector<bool>> out;
    out.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].empty()) throw InvalidInput("instance " + std::to_string(i) + " has an empty truth set");
        std::vector<bool> mask(vocab.size(), false);
        for (const auto& l : truth[i]) {
            const auto idx = vocab.index_of(l);
            if (!idx) throw InvalidInput("truth label '" + l + "' is not in the vocabulary");
            mask[*idx] = true;
        }
        out.push_back(std::move(mask));
    }
    return out;
}

std::vector<bool> set_mask(const LabelSet& s, const LabelVocabulary& vocab) {
    std::vector<bool> mask(vocab.size(), false);
    for (const auto& l : s) {
        const auto idx = vocab.index_of(l);
        if (!idx) throw InvalidInput("label '" + l + "' is not in the vocabulary");
        mask[*idx] = true;
    }
    return mask;
}

}  // namespace

MultilabelReport multilabel_losses(const Matrix& scores, const std::vector<LabelSet>& truth,
                                   const LabelVocabulary& vocab, ThresholdMode mode) {
    if (scores.rows() != static_cast<Index>(truth.size()))
        throw ShapeError("multilabel losses: " + std::to_string(scores.rows()) + " score rows for " +
                         std::to_string(truth.size()) + " truth sets");
    if (scores.cols() != static_cast<Index>(vocab.size()))
        throw ShapeError("multilabel losses: score columns do not match the vocabulary");
    if (truth.empty()) throw InvalidInput("multilabel losses: no instances");

    const auto masks = truth_masks(truth, vocab);
    const Index n = scores.rows();
    const Index labels = scores.cols();
    const Vector column_mean = scores.colwise().mean().transpose();

    MultilabelReport r;
    std::size_t hamming_errors = 0;
    for (Index i = 0; i < n; ++i) {
        const auto& rel = masks[std::size_t(i)];
        const auto s = scores.row(i);

        // Thresholded prediction.
        std::vector<bool> predicted(static_cast<std::size_t>(labels), false);
        if (mode == ThresholdMode::centered_zero) {
            for (Index l = 0; l < labels; ++l) predicted[std::size_t(l)] = s(l) - column_mean(l) > 0.0;
        } else {
            std::vector<Index> order(static_cast<std::size_t>(labels));
            std::iota(order.begin(), order.end(), Index{0});
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });
            const auto k = std::count(rel.begin(), rel.end(), true);
            for (std::ptrdiff_t t = 0; t < k; ++t) predicted[std::size_t(order[std::size_t(t)])] = true;
        }
        for (Index l = 0; l < labels; ++l) hamming_errors += predicted[std::size_t(l)] != rel[std::size_t(l)];

        // Ranking loss over (relevant, irrelevant) pairs.
        std::size_t wrong = 0;
        std::size_t n_rel = 0;
        std::size_t n_irr = 0;
        for (Index a = 0; a < labels; ++a) {
            if (!rel[std::size_t(a)]) {
                ++n_irr;
                continue;
            }
            ++n_rel;
            for (Index b = 0; b < labels; ++b)
                if (!rel[std::size_t(b)] && s(a) <= s(b)) ++wrong;
        }
        if (n_irr > 0) r.ranking_loss += double(wrong) / double(n_rel * n_irr);

        Index top = 0;
        for (Index l = 1; l < labels; ++l)
            if (s(l) > s(top)) top = l;
        if (!rel[std::size_t(top)]) r.one_error += 1.0;

        // Rank of label l = number of labels scoring at least s(l).
        Index depth = 0;
        for (Index l = 0; l < labels; ++l) {
            if (!rel[std::size_t(l)]) continue;
            Index rank = 0;
            for (Index m = 0; m < labels; ++m) rank += s(m) >= s(l);
            depth = std::max(depth, rank - 1);
        }
        r.coverage += double(depth);
    }
    r.hamming_loss = double(hamming_errors) / double(n * labels);
    r.ranking_loss /= double(n);
    r.one_error /= double(n);
    r.coverage /= double(n);
    r.normalized_coverage = labels > 1 ? r.coverage / double(labels - 1) : 0.0;
    return r;
}

double hamming_loss(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& truth,
                    const LabelVocabulary& vocab) {
    if (pred.size() != truth.size()) throw ShapeError("hamming loss: prediction and truth lengths differ");
    if (truth.empty()) throw InvalidInput("hamming loss: no instances");
    const auto masks = truth_masks(truth, vocab);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto p = set_mask(pred[i], vocab);
        for (std::size_t l = 0; l < vocab.size(); ++l) errors += p[l] != masks[i][l];
    }
    return double(errors) / double(pred.size() * vocab.size());
}

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string format_multiclass_table(const MulticlassReport& r) {
    std::string out = "accuracy  " + fixed(r.accuracy) + "\n";
    for (const auto& [name, acc] : r.per_class_accuracy) out += "  " + name + "  " + fixed(acc) + "\n";
    return out;
}

std::string format_multiclass_csv(const MulticlassReport& r) {
    std::string out = "metric,class,value\naccuracy,," + format_double(r.accuracy) + "\n";
    for (const auto& [name, acc] : r.per_class_accuracy)
        out += "class_accuracy," + name + "," + format_double(acc) + "\n";
    return out;
}

std::string format_multilabel_table(const MultilabelReport& r) {
    return "hamming_loss         " + fixed(r.hamming_loss) + "\n" +
           "ranking_loss         " + fixed(r.ranking_loss) + "\n" +
           "one_error            " + fixed(r.one_error) + "\n" +
           "coverage             " + fixed(r.coverage) + "\n" +
           "normalized_coverage  " + fixed(r.normalized_coverage) + "\n" +
           "(standard definitions; lower is better)\n";
}

std::string format_multilabel_csv(const MultilabelReport& r) {
    return "metric,value\nhamming_loss," + format_double(r.hamming_loss) + "\nranking_loss," +
           format_double(r.ranking_loss) + "\none_error," + format_double(r.one_error) + "\ncoverage," +
           format_double(r.coverage) + "\nnormalized_coverage," + format_double(r.normalized_coverage) + "\n";
}

}  // namespace zsl
