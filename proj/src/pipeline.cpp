#include "zsl/pipeline.hpp"

#include "zsl/error.hpp"

namespace zsl {

ZslResult fit_zsl_embedding(const FeatureMatrix& aux_features, const std::vector<FeatureMatrix>& aux_semantics,
                            const FeatureMatrix& target_features, const std::vector<PrototypeSet>& prototypes,
                            const ZslOptions& options) {
    if (aux_semantics.empty()) throw InvalidParameter("at least one semantic view is required");
    if (prototypes.size() != aux_semantics.size())
        throw ShapeError("one prototype set per semantic view is required");

    ZslResult r;
    r.views.push_back(target_features);
    for (std::size_t s = 0; s < aux_semantics.size(); ++s) {
        r.projections.push_back(fit_ridge(aux_features, aux_semantics[s], options.lambda, options.normalization));
        r.views.push_back(apply(r.projections.back(), target_features, "semantic" + std::to_string(s)));
    }
    r.cca = fit_mvcca(r.views, options.cca);
    for (std::size_t v = 0; v < r.views.size(); ++v) r.embedded.push_back(embed(r.cca, r.views[v], v));

    std::vector<PrototypeSet> semantic;
    for (std::size_t s = 0; s < prototypes.size(); ++s) semantic.push_back(embed_prototypes(r.cca, prototypes[s], s + 1));
    std::vector<Prototype> pooled;
    for (std::size_t p = 0; p < semantic.front().size(); ++p) {
        Vector sum = Vector::Zero(r.cca.m());
        for (const auto& set : semantic) {
            if (set.size() != semantic.front().size() || !same_label_set(set[p].labels, semantic.front()[p].labels))
                throw InvalidInput("prototype sets of the semantic views must list the same classes in order");
            sum += set[p].vector;
        }
        pooled.push_back({semantic.front()[p].labels, sum / double(semantic.size())});
    }
    r.embedded_prototypes.emplace_back(std::move(pooled));
    for (auto& set : semantic) r.embedded_prototypes.push_back(std::move(set));
    return r;
}

ZslResult run_zsl(const FeatureMatrix& aux_features, const std::vector<FeatureMatrix>& aux_semantics,
                  const FeatureMatrix& target_features, const std::vector<PrototypeSet>& prototypes,
                  const ZslOptions& options) {
    auto r = fit_zsl_embedding(aux_features, aux_semantics, target_features, prototypes, options);
    r.scores = tmv_hlp(r.embedded, r.embedded_prototypes, options.hlp);
    r.predictions = r.scores.predicted_names();
    return r;
}

}  // namespace zsl
