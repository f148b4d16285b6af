// Test-only helpers and independent oracles. Nothing here calls the library
// routine it is used to check.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "zsl/dataset.hpp"
#include "zsl/graph.hpp"
#include "zsl/rng.hpp"

namespace zsl::test {

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed, std::string_view tag = "matrix") {
    CounterRng rng = CounterRng(seed).split(tag);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("zsl_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Matrix naive_multiply(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

/// (1 - alpha) (I - alpha S)^{-1} Y0 by dense LU.
inline Matrix closed_form_propagation(const Matrix& s, const Matrix& y0, double alpha) {
    const Index n = s.rows();
    const Matrix a = Matrix::Identity(n, n) - alpha * s;
    return (1.0 - alpha) * a.partialPivLu().solve(y0);
}

/// Indices of the k candidates closest to `query`, by full sort of
/// (squared distance, index) pairs.
inline std::vector<Index> brute_knn(const Vector& query, const Matrix& candidates, Index k, Index exclude) {
    std::vector<std::pair<double, Index>> all;
    for (Index j = 0; j < candidates.rows(); ++j) {
        if (j == exclude) continue;
        double d = 0.0;
        for (Index c = 0; c < candidates.cols(); ++c) d += std::pow(query(c) - candidates(j, c), 2);
        all.emplace_back(d, j);
    }
    std::sort(all.begin(), all.end());
    std::vector<Index> out;
    for (Index t = 0; t < k; ++t) out.push_back(all[std::size_t(t)].second);
    return out;
}

/// D^{-1/2} W D^{-1/2} from a dense weight matrix; zero-degree rows stay zero.
inline Matrix dense_graph_operator(const Matrix& w) {
    const Vector deg = w.rowwise().sum();
    Matrix s = Matrix::Zero(w.rows(), w.cols());
    for (Index i = 0; i < w.rows(); ++i)
        for (Index j = 0; j < w.cols(); ++j)
            if (deg(i) > 0 && deg(j) > 0) s(i, j) = w(i, j) / std::sqrt(deg(i) * deg(j));
    return s;
}

/// Dv^{-1/2} H We De^{-1} H^T Dv^{-1/2} with an explicit incidence matrix.
inline Matrix dense_hypergraph_operator(const Hypergraph& h) {
    const Index e = static_cast<Index>(h.edges.size());
    Matrix inc = Matrix::Zero(h.n, e);
    Vector we(e);
    for (Index c = 0; c < e; ++c) {
        for (Index v : h.edges[std::size_t(c)].vertices) inc(v, c) = 1.0;
        we(c) = h.edges[std::size_t(c)].weight;
    }
    const Vector de = inc.colwise().sum().transpose();
    const Vector dv = inc * we;
    Matrix middle = Matrix::Zero(e, e);
    for (Index c = 0; c < e; ++c) middle(c, c) = we(c) / de(c);
    Matrix s = inc * middle * inc.transpose();
    for (Index i = 0; i < h.n; ++i)
        for (Index j = 0; j < h.n; ++j)
            s(i, j) = (dv(i) > 0 && dv(j) > 0) ? s(i, j) / std::sqrt(dv(i) * dv(j)) : 0.0;
    return s;
}

inline Matrix covariance(const Matrix& a, const Matrix& b) {
    const Matrix ac = a.rowwise() - a.colwise().mean();
    const Matrix bc = b.rowwise() - b.colwise().mean();
    return ac.transpose() * bc / double(a.rows() - 1);
}

/// Two-view canonical correlations from the generalized eigenproblem
///   [0 C12; C21 0] v = lambda [C11 + reg I, 0; 0, C22 + reg I] v
/// solved with a generic (non-symmetric) dense generalized eigensolver.
inline Vector cca_generalized_eigen_oracle(const Matrix& x1, const Matrix& x2, double reg, Index m) {
    const Index d1 = x1.cols();
    const Index d2 = x2.cols();
    Matrix a = Matrix::Zero(d1 + d2, d1 + d2);
    Matrix b = Matrix::Zero(d1 + d2, d1 + d2);
    a.topRightCorner(d1, d2) = covariance(x1, x2);
    a.bottomLeftCorner(d2, d1) = covariance(x2, x1);
    b.topLeftCorner(d1, d1) = covariance(x1, x1) + reg * Matrix::Identity(d1, d1);
    b.bottomRightCorner(d2, d2) = covariance(x2, x2) + reg * Matrix::Identity(d2, d2);
    Eigen::GeneralizedEigenSolver<Matrix> ges(a, b);
    std::vector<double> values;
    for (Index i = 0; i < d1 + d2; ++i) values.push_back(ges.eigenvalues()(i).real());
    std::sort(values.rbegin(), values.rend());
    Vector out(m);
    for (Index j = 0; j < m; ++j) out(j) = std::max(0.0, values[std::size_t(j)]);
    return out;
}

inline Matrix inverse_sqrt(const Matrix& spd) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(spd);
    return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

/// Classical two-view CCA: singular values of the whitened cross-covariance.
inline Vector cca_svd_oracle(const Matrix& x1, const Matrix& x2, double reg, Index m) {
    const Matrix w1 = inverse_sqrt(covariance(x1, x1) + reg * Matrix::Identity(x1.cols(), x1.cols()));
    const Matrix w2 = inverse_sqrt(covariance(x2, x2) + reg * Matrix::Identity(x2.cols(), x2.cols()));
    const Eigen::JacobiSVD<Matrix> svd(w1 * covariance(x1, x2) * w2);
    return svd.singularValues().head(m);
}

}  // namespace zsl::test
