#include <cmath>
#include <limits>

#include "zsl/dataset.hpp"
#include "zsl/error.hpp"
#include "zsl/rng.hpp"

namespace zsl {

namespace {

Matrix gaussian(CounterRng rng, Index rows, Index cols, double scale) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
    return m;
}

std::string class_name(std::string_view prefix, std::size_t i) {
    return std::string(prefix) + std::to_string(i);
}

}  // namespace

SynthBenchmark synth_benchmark(const SynthParams& p) {
    if (p.n_aux_classes < 1 || p.n_target_classes < 1 || p.per_class < 1 || p.feat_dim < 1 || p.sem_dim < 1)
        throw InvalidParameter("synthetic benchmark counts must all be >= 1");
    if (!(p.shift_magnitude >= 0.0) || !std::isfinite(p.shift_magnitude))
        throw InvalidParameter("shift_magnitude must be finite and >= 0");
    if (!(p.center_spread > 0.0) || !(p.cluster_std >= 0.0) || !(p.center_offset >= 0.0))
        throw InvalidParameter("center_spread must be > 0; cluster_std and center_offset >= 0");

    const auto feat = static_cast<Index>(p.feat_dim);
    const auto sem = static_cast<Index>(p.sem_dim);
    const auto n_aux = static_cast<Index>(p.n_aux_classes);
    const auto n_tgt = static_cast<Index>(p.n_target_classes);
    const auto per = static_cast<Index>(p.per_class);

    const CounterRng root(p.seed);

    // Row c of `centers`: auxiliary classes first, then target classes.
    const Vector offset = gaussian(root.split("offset"), feat, 1, p.center_offset);
    Matrix centers = gaussian(root.split("centers"), n_aux + n_tgt, feat, p.center_spread);
    centers.rowwise() += offset.transpose();

    const Matrix map = gaussian(root.split("semantic_map"), sem, feat, 1.0 / std::sqrt(double(feat)));

    Matrix shift = Matrix::Zero(sem, feat);
    if (p.shift_magnitude > 0.0) {
        const Matrix raw = gaussian(root.split("shift"), sem, feat, 1.0);
        const Matrix displaced = centers.bottomRows(n_tgt) * raw.transpose();
        const double rms = std::sqrt(displaced.rowwise().squaredNorm().mean());
        if (rms > 0.0) shift = raw * (p.shift_magnitude / rms);
    }

    SynthBenchmark b;
    b.shift_magnitude = p.shift_magnitude;
    b.seed = p.seed;

    std::vector<Prototype> aux_protos;
    for (Index c = 0; c < n_aux; ++c)
        aux_protos.push_back({{class_name("aux", std::size_t(c))}, map * centers.row(c).transpose()});
    std::vector<Prototype> tgt_protos;
    for (Index c = 0; c < n_tgt; ++c)
        tgt_protos.push_back(
            {{class_name("target", std::size_t(c))}, (map + shift) * centers.row(n_aux + c).transpose()});

    Matrix aux_x = gaussian(root.split("aux_instances"), n_aux * per, feat, p.cluster_std);
    Matrix aux_y(n_aux * per, sem);
    for (Index c = 0; c < n_aux; ++c) {
        for (Index i = 0; i < per; ++i) {
            const Index r = c * per + i;
            aux_x.row(r) += centers.row(c);
            aux_y.row(r) = aux_protos[std::size_t(c)].vector.transpose();
            b.aux_labels.push_back(aux_protos[std::size_t(c)].labels.front());
        }
    }

    Matrix tgt_x = gaussian(root.split("target_instances"), n_tgt * per, feat, p.cluster_std);
    for (Index c = 0; c < n_tgt; ++c) {
        for (Index i = 0; i < per; ++i) {
            tgt_x.row(c * per + i) += centers.row(n_aux + c);
            b.target_true_labels.push_back(tgt_protos[std::size_t(c)].labels.front());
        }
    }

    b.target_word_vectors.dim = sem;
    for (const auto& proto : tgt_protos) b.target_word_vectors.entries.emplace(proto.labels.front(), proto.vector);

    b.aux_features = FeatureMatrix(std::move(aux_x), "aux_features");
    b.aux_semantics = FeatureMatrix(std::move(aux_y), "aux_semantics");
    b.aux_prototypes = PrototypeSet(std::move(aux_protos));
    b.target_features = FeatureMatrix(std::move(tgt_x), "target_features");
    b.target_prototypes = PrototypeSet(std::move(tgt_protos));
    return b;
}

}  // namespace zsl
