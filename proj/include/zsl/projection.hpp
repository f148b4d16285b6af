#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "zsl/dataset.hpp"

namespace zsl {

enum class Normalization { none, zscore, l2 };

std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view text);

/// Linear map from low-level features to one semantic view.
///
/// `none` fits through the origin with no intercept. `zscore` standardizes
/// each input dimension with statistics of the fitting data; `l2` scales each
/// row to unit norm. Both of the latter fit an intercept.
struct ProjectionModel {
    Matrix weights;      // d_in x d_out
    Vector bias;         // d_out
    Vector input_mean;   // d_in
    Vector input_scale;  // d_in
    double lambda = 1.0;
    Normalization normalization = Normalization::zscore;

    Index d_in() const { return weights.rows(); }
    Index d_out() const { return weights.cols(); }

    /// Inputs mapped into the space the weights act on.
    Matrix normalize(const Matrix& x) const;
};

ProjectionModel fit_ridge(const FeatureMatrix& x, const FeatureMatrix& y, double lambda,
                          Normalization normalization = Normalization::zscore);

/// Minimizes |Xc W - Tc|^2 + lambda |W - prior|^2 by column-pivoted QR on the
/// stacked system. `xc` and `tc` must already be centered if an intercept is
/// wanted. Throws SingularSystemError when the system is rank deficient.
Matrix solve_ridge(const Matrix& xc, const Matrix& tc, double lambda, const Matrix& prior);
Matrix solve_ridge(const Matrix& xc, const Matrix& tc, double lambda);

Matrix apply(const ProjectionModel& model, const Matrix& x);
FeatureMatrix apply(const ProjectionModel& model, const FeatureMatrix& x, std::string view_name = {});

std::string format_projection_model(const ProjectionModel& model);
ProjectionModel parse_projection_model(std::string_view text);
void save_projection_model(const std::filesystem::path& path, const ProjectionModel& model);
ProjectionModel load_projection_model(const std::filesystem::path& path);

}  // namespace zsl
