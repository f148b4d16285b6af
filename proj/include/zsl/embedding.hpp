#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "zsl/dataset.hpp"

namespace zsl {

struct CcaOptions {
    /// Embedding dimensionality; 0 selects min_i d_i.
    Index m = 0;
    /// Absolute ridge added to every view covariance. When unset, view i gets
    /// relative_reg * trace(C_ii) / d_i.
    std::optional<double> reg;
    double relative_reg = 1e-4;
    double weight_power = 4.0;
};

/// Shared latent space for several row-aligned views.
///
/// Column j of every view's weight matrix is one canonical direction;
/// directions are ordered by decreasing mean pairwise correlation `rho` and
/// each view satisfies W_i^T (C_ii + reg_i I) W_i = I.
struct CcaModel {
    std::vector<Matrix> weights;  // d_i x m
    std::vector<Vector> means;    // d_i
    std::vector<double> regs;
    Vector rho;                   // m, non-increasing
    double weight_power = 4.0;

    std::size_t n_views() const { return weights.size(); }
    Index m() const { return rho.size(); }
    Index view_dim(std::size_t view) const { return weights.at(view).rows(); }
};

CcaModel fit_mvcca(const std::vector<FeatureMatrix>& views, const CcaOptions& options = {});
CcaModel fit_mvcca(const std::vector<FeatureMatrix>& views, Index m, double reg);

/// Column j is ((x - mean_i) W_i)[:, j] * rho_j^weight_power.
Matrix embed(const CcaModel& model, const Matrix& x, std::size_t view_index);
FeatureMatrix embed(const CcaModel& model, const FeatureMatrix& x, std::size_t view_index);
PrototypeSet embed_prototypes(const CcaModel& model, const PrototypeSet& protos, std::size_t view_index);

/// Largest |W_i^T (C_ii + reg_i I) W_i - I| entry over all views, with the
/// covariances recomputed from `views`.
double cca_constraint_residual(const CcaModel& model, const std::vector<FeatureMatrix>& views);

void save_cca_model(const std::filesystem::path& dir, const CcaModel& model);
CcaModel load_cca_model(const std::filesystem::path& dir);

}  // namespace zsl
