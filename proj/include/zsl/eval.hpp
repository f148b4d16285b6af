#pragma once

#include <map>
#include <string>
#include <vector>

#include "zsl/dataset.hpp"

namespace zsl {

struct MulticlassReport {
    double accuracy = 0.0;
    std::vector<std::string> classes;  // sorted union of truth and prediction names
    std::map<std::string, double> per_class_accuracy;  // over true classes
    Eigen::MatrixXi confusion;  // rows: truth, cols: prediction, in `classes` order
};

MulticlassReport multiclass_accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth);

enum class ThresholdMode {
    /// Label predicted when its score exceeds that label's mean score over
    /// all instances.
    centered_zero,
    /// The |truth| highest-scored labels are predicted. Uses the truth, so
    /// only meant for ablations.
    top_k,
};

struct MultilabelReport {
    double hamming_loss = 0.0;
    double ranking_loss = 0.0;
    double one_error = 0.0;
    double coverage = 0.0;
    double normalized_coverage = 0.0;
};

/// `scores` is n x L with columns in `vocab` order; higher means more
/// relevant. Ties in ranking count against the relevant label.
MultilabelReport multilabel_losses(const Matrix& scores, const std::vector<LabelSet>& truth,
                                   const LabelVocabulary& vocab, ThresholdMode mode = ThresholdMode::centered_zero);

/// Hamming loss of explicit label-set predictions.
double hamming_loss(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& truth,
                    const LabelVocabulary& vocab);

std::string format_multiclass_table(const MulticlassReport& r);
std::string format_multiclass_csv(const MulticlassReport& r);
std::string format_multilabel_table(const MultilabelReport& r);
std::string format_multilabel_csv(const MultilabelReport& r);

}  // namespace zsl
