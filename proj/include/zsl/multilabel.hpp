#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zsl/dataset.hpp"
#include "zsl/projection.hpp"
#include "zsl/propagation.hpp"

namespace zsl {

enum class SynthesisMode { sum, mean };
enum class Metric { cosine, euclidean };

std::string to_string(SynthesisMode m);
std::string to_string(Metric m);
SynthesisMode parse_synthesis_mode(std::string_view text);
Metric parse_metric(std::string_view text);

/// Nonempty label subsets of a vocabulary with at most max_cardinality
/// members, ordered by size and then lexicographically by vocabulary index.
struct LabelPowerSet {
    std::vector<LabelSet> subsets;

    LabelPowerSet(const LabelVocabulary& vocab, std::size_t max_cardinality,
                  std::uint64_t size_cap = 1'000'000);
};

/// sum_{i=1..max_cardinality} C(n, i), saturating at UINT64_MAX.
std::uint64_t power_set_size(std::size_t n, std::size_t max_cardinality);

Vector synth_prototype(const LabelSet& labels, const WordVectorTable& wv, SynthesisMode mode = SynthesisMode::mean);

PrototypeSet power_set_prototypes(const LabelVocabulary& vocab, const WordVectorTable& wv,
                                  std::size_t max_cardinality, SynthesisMode mode = SynthesisMode::mean,
                                  std::uint64_t size_cap = 1'000'000);

/// Distance under `metric`; cosine distance is 1 - cos and treats a zero
/// vector as orthogonal to everything.
double distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, Metric metric);

struct NearestPrototypes {
    std::vector<std::size_t> index;  // per row
    std::vector<double> distance;
};

/// Exhaustive nearest prototype per row; ties go to the earlier prototype.
NearestPrototypes nearest_prototypes(const Matrix& x, const PrototypeSet& protos, Metric metric);

std::vector<LabelSet> dmp_predict(const Matrix& x, const PrototypeSet& protos, Metric metric = Metric::cosine);

struct TrampResult {
    std::vector<LabelSet> labels;
    LabelScores scores;  // data rows x subsets
};

/// kNN graph over data rows followed by prototypes; each prototype seeds its
/// own class and the propagated argmax picks the row's label subset.
TrampResult tramp_predict(const Matrix& x, const PrototypeSet& protos, Index k, double alpha,
                          Bandwidth sigma = std::nullopt, const PropagateOptions& base = {});

struct SelfTrainOptions {
    std::size_t rounds = 3;
    double keep_fraction = 0.5;
    double augmentation_weight = 1.0;
    Metric metric = Metric::cosine;
};

struct SelfTrainResult {
    ProjectionModel model;
    std::vector<std::string> warnings;
};

/// Confidence-filtered pseudo-label refitting. Each round assigns every row
/// its nearest prototype, keeps for each prototype the keep_fraction of its
/// rows that lie closest to it, and solves
///   min |Xk W + b - T|^2 + lambda |W - W_prev|^2,
///   T = (P_assigned + a * P_prev) / (1 + a),
/// where P_prev are the current projections of the kept rows and a the
/// augmentation weight. Normalization statistics are left unchanged.
SelfTrainResult self_train_adapt(const ProjectionModel& model, const Matrix& x_target, const PrototypeSet& protos,
                                 const SelfTrainOptions& options = {});

/// Per-label scores from per-prototype similarities: each label takes the
/// best score among the prototypes containing it.
Matrix label_scores_from_prototypes(const Matrix& prototype_scores, const PrototypeSet& protos,
                                    const LabelVocabulary& vocab);

}  // namespace zsl
