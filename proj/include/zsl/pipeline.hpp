#pragma once

#include <vector>

#include "zsl/dataset.hpp"
#include "zsl/embedding.hpp"
#include "zsl/projection.hpp"
#include "zsl/propagation.hpp"

namespace zsl {

struct ZslOptions {
    double lambda = 1.0;
    Normalization normalization = Normalization::zscore;
    CcaOptions cca;
    TmvHlpOptions hlp;
};

/// Everything the multi-class pipeline produces, kept for export.
struct ZslResult {
    std::vector<ProjectionModel> projections;     // one per semantic view
    std::vector<FeatureMatrix> views;             // target features, then projections
    CcaModel cca;
    std::vector<FeatureMatrix> embedded;          // per view
    std::vector<PrototypeSet> embedded_prototypes;  // per view
    LabelScores scores;
    std::vector<std::string> predictions;
};

/// Semantic projections fitted on auxiliary data, CCA fitted on the target
/// views, and TMV-HLP over the embedded views. Semantic view s uses
/// prototypes[s]; the low-level view uses the mean of the embedded prototypes
/// of all semantic views.
ZslResult run_zsl(const FeatureMatrix& aux_features, const std::vector<FeatureMatrix>& aux_semantics,
                  const FeatureMatrix& target_features, const std::vector<PrototypeSet>& prototypes,
                  const ZslOptions& options = {});

/// Projections and CCA only (no propagation).
ZslResult fit_zsl_embedding(const FeatureMatrix& aux_features, const std::vector<FeatureMatrix>& aux_semantics,
                            const FeatureMatrix& target_features, const std::vector<PrototypeSet>& prototypes,
                            const ZslOptions& options = {});

}  // namespace zsl
