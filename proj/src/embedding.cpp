#include "zsl/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "zsl/error.hpp"

namespace zsl {

namespace {

struct Centered {
    std::vector<Matrix> data;
    std::vector<Vector> means;
};

Centered center_views(const std::vector<FeatureMatrix>& views) {
    Centered c;
    for (const auto& v : views) {
        Vector mean = v.values().colwise().mean().transpose();
        c.data.push_back(v.values().rowwise() - mean.transpose());
        c.means.push_back(std::move(mean));
    }
    return c;
}

Matrix cross_cov(const Matrix& a, const Matrix& b) {
    return (a.transpose() * b) / double(a.rows() - 1);
}

void validate_views(const std::vector<FeatureMatrix>& views) {
    if (views.size() < 2) throw InvalidParameter("multi-view CCA needs at least two views");
    const Index n = views.front().rows();
    if (n < 2) throw InvalidParameter("multi-view CCA needs at least two rows");
    for (const auto& v : views)
        if (v.rows() != n)
            throw ShapeError("view '" + v.view_name() + "' has " + std::to_string(v.rows()) + " rows, expected " +
                             std::to_string(n));
}

// Gram-Schmidt on the columns of a whitened block, in order. Columns that
// collapse are replaced by the first basis vector that survives
// orthogonalization, so the result is always orthonormal.
Matrix orthonormalize_columns(Matrix u) {
    const Index d = u.rows();
    const Index m = u.cols();
    for (Index j = 0; j < m; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (Index l = 0; l < j; ++l) u.col(j) -= u.col(l).dot(u.col(j)) * u.col(l);
        double norm = u.col(j).norm();
        for (Index e = 0; norm < 1e-10 && e < d; ++e) {
            u.col(j) = Vector::Unit(d, e);
            for (int pass = 0; pass < 2; ++pass)
                for (Index l = 0; l < j; ++l) u.col(j) -= u.col(l).dot(u.col(j)) * u.col(l);
            norm = u.col(j).norm();
            if (norm < 0.5) norm = 0.0;
        }
        if (norm == 0.0) throw NumericalError("multi-view CCA: cannot complete an orthonormal basis");
        u.col(j) /= norm;
    }
    return u;
}

}  // namespace

CcaModel fit_mvcca(const std::vector<FeatureMatrix>& views, const CcaOptions& options) {
    validate_views(views);
    const std::size_t n_views = views.size();
    Index min_dim = views.front().cols();
    for (const auto& v : views) min_dim = std::min(min_dim, v.cols());
    const Index m = options.m == 0 ? min_dim : options.m;
    if (m < 1 || m > min_dim)
        throw InvalidParameter("embedding dimensionality m=" + std::to_string(m) + " must lie in [1, " +
                               std::to_string(min_dim) + "]");
    if (options.reg && !(*options.reg > 0.0)) throw InvalidParameter("CCA regularizer must be > 0");
    if (!options.reg && !(options.relative_reg > 0.0))
        throw InvalidParameter("relative CCA regularizer must be > 0");

    const auto centered = center_views(views);

    std::vector<Index> offsets(n_views + 1, 0);
    for (std::size_t i = 0; i < n_views; ++i) offsets[i + 1] = offsets[i] + views[i].cols();
    const Index total = offsets.back();

    // Whitening factors for the regularized per-view covariances.
    std::vector<double> regs(n_views);
    std::vector<Matrix> inv_factor(n_views);  // L_i^{-1}
    for (std::size_t i = 0; i < n_views; ++i) {
        const Matrix cii = cross_cov(centered.data[i], centered.data[i]);
        const Index d = cii.rows();
        regs[i] = options.reg ? *options.reg : options.relative_reg * cii.trace() / double(d);
        if (!(regs[i] > 0.0)) regs[i] = options.relative_reg;  // constant view: trace is zero
        const Eigen::LLT<Matrix> llt(cii + regs[i] * Matrix::Identity(d, d));
        if (llt.info() != Eigen::Success)
            throw NumericalError("multi-view CCA: view " + std::to_string(i) + " covariance is not positive definite");
        inv_factor[i] = llt.matrixL().solve(Matrix::Identity(d, d));
    }

    // Off-diagonal blocks L_i^{-1} C_ij L_j^{-T}; the diagonal is zero so the
    // eigenvalues are sums of pairwise correlations.
    Matrix whitened = Matrix::Zero(total, total);
    for (std::size_t i = 0; i < n_views; ++i) {
        for (std::size_t j = i + 1; j < n_views; ++j) {
            const Matrix block =
                inv_factor[i] * cross_cov(centered.data[i], centered.data[j]) * inv_factor[j].transpose();
            whitened.block(offsets[i], offsets[j], block.rows(), block.cols()) = block;
            whitened.block(offsets[j], offsets[i], block.cols(), block.rows()) = block.transpose();
        }
    }

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened);
    if (eig.info() != Eigen::Success) throw NumericalError("multi-view CCA: eigensolver did not converge");
    // Eigen sorts ascending; take the top m.
    const Matrix top = eig.eigenvectors().rightCols(m).rowwise().reverse();

    CcaModel model;
    model.weight_power = options.weight_power;
    model.regs = regs;
    model.means = centered.means;
    for (std::size_t i = 0; i < n_views; ++i) {
        const Index d = views[i].cols();
        const Matrix u = orthonormalize_columns(top.middleRows(offsets[i], d));
        model.weights.push_back(inv_factor[i].transpose() * u);
    }

    // Per-direction mean pairwise correlation of the canonical variates.
    Vector rho = Vector::Zero(m);
    for (std::size_t i = 0; i < n_views; ++i) {
        const Matrix zi = centered.data[i] * model.weights[i];
        for (std::size_t j = 0; j < n_views; ++j) {
            if (i == j) continue;
            const Matrix zj = centered.data[j] * model.weights[j];
            rho += ((zi.array() * zj.array()).colwise().sum() / double(zi.rows() - 1)).matrix().transpose();
        }
    }
    rho /= double(n_views * (n_views - 1));
    rho = rho.cwiseMax(0.0);

    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return rho(a) > rho(b); });

    model.rho.resize(m);
    std::vector<Matrix> sorted(n_views);
    for (std::size_t i = 0; i < n_views; ++i) sorted[i].resize(model.weights[i].rows(), m);
    for (Index j = 0; j < m; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        model.rho(j) = rho(src);
        for (std::size_t i = 0; i < n_views; ++i) sorted[i].col(j) = model.weights[i].col(src);
    }
    model.weights = std::move(sorted);

    // Canonical sign: largest-magnitude entry of each column of W_1 is positive.
    for (Index j = 0; j < m; ++j) {
        Index arg = 0;
        model.weights[0].col(j).cwiseAbs().maxCoeff(&arg);
        if (model.weights[0](arg, j) < 0.0)
            for (auto& w : model.weights) w.col(j) = -w.col(j);
    }

    for (const auto& w : model.weights)
        if (!w.allFinite()) throw NumericalError("multi-view CCA: non-finite weights");
    return model;
}

CcaModel fit_mvcca(const std::vector<FeatureMatrix>& views, Index m, double reg) {
    CcaOptions options;
    options.m = m;
    options.reg = reg;
    if (m < 1) throw InvalidParameter("embedding dimensionality m must be >= 1");
    if (!(reg > 0.0)) throw InvalidParameter("CCA regularizer must be > 0");
    return fit_mvcca(views, options);
}

Matrix embed(const CcaModel& model, const Matrix& x, std::size_t view_index) {
    if (view_index >= model.n_views())
        throw InvalidParameter("view index " + std::to_string(view_index) + " out of range");
    const auto& w = model.weights[view_index];
    if (x.cols() != w.rows())
        throw ShapeError("embed: input has " + std::to_string(x.cols()) + " columns, view " +
                         std::to_string(view_index) + " has " + std::to_string(w.rows()));
    Matrix out = (x.rowwise() - model.means[view_index].transpose()) * w;
    for (Index j = 0; j < out.cols(); ++j) out.col(j) *= std::pow(model.rho(j), model.weight_power);
    return out;
}

FeatureMatrix embed(const CcaModel& model, const FeatureMatrix& x, std::size_t view_index) {
    return FeatureMatrix(embed(model, x.values(), view_index), x.view_name() + "_embedded");
}

PrototypeSet embed_prototypes(const CcaModel& model, const PrototypeSet& protos, std::size_t view_index) {
    if (protos.empty()) return protos;
    const Matrix embedded = embed(model, protos.matrix(), view_index);
    std::vector<Prototype> items;
    items.reserve(protos.size());
    for (std::size_t i = 0; i < protos.size(); ++i)
        items.push_back({protos[i].labels, embedded.row(static_cast<Index>(i)).transpose()});
    return PrototypeSet(std::move(items));
}

double cca_constraint_residual(const CcaModel& model, const std::vector<FeatureMatrix>& views) {
    if (views.size() != model.n_views()) throw ShapeError("view count does not match the model");
    const auto centered = center_views(views);
    double worst = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const Matrix cii = cross_cov(centered.data[i], centered.data[i]);
        const Matrix& w = model.weights[i];
        const Matrix gram =
            w.transpose() * (cii + model.regs[i] * Matrix::Identity(cii.rows(), cii.cols())) * w;
        worst = std::max(worst, (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
    }
    return worst;
}

// Persistence: manifest.txt plus one weight and one mean matrix per view.

namespace {

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> split_doubles(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto pos = text.find(',');
        out.push_back(parse_double(text.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
    return out;
}

std::string weights_file(std::size_t i) { return "view_" + std::to_string(i) + "_weights.csv"; }
std::string mean_file(std::size_t i) { return "view_" + std::to_string(i) + "_mean.csv"; }

}  // namespace

void save_cca_model(const std::filesystem::path& dir, const CcaModel& model) {
    std::filesystem::create_directories(dir);
    std::vector<double> rho(model.rho.data(), model.rho.data() + model.rho.size());
    std::string manifest = "# zsl multi-view CCA model\n";
    manifest += "n_views = " + std::to_string(model.n_views()) + "\n";
    manifest += "m = " + std::to_string(model.m()) + "\n";
    manifest += "weight_power = " + format_double(model.weight_power) + "\n";
    manifest += "reg = " + join(model.regs) + "\n";
    manifest += "rho = " + join(rho) + "\n";
    write_text_file(dir / "manifest.txt", manifest);
    for (std::size_t i = 0; i < model.n_views(); ++i) {
        write_matrix(dir / weights_file(i), model.weights[i]);
        write_matrix(dir / mean_file(i), model.means[i].transpose());
    }
}

CcaModel load_cca_model(const std::filesystem::path& dir) {
    const auto text = read_text_file(dir / "manifest.txt");
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        std::erase_if(line, [](char c) { return c == ' ' || c == '\r' || c == '\t'; });
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("CCA manifest: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto get = [&](std::string_view key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw FormatError("CCA manifest: missing '" + std::string(key) + "'");
        return it->second;
    };

    CcaModel model;
    const auto n_views = static_cast<std::size_t>(std::stoul(get("n_views")));
    const auto m = static_cast<Index>(std::stol(get("m")));
    model.weight_power = parse_double(get("weight_power"));
    model.regs = split_doubles(get("reg"));
    const auto rho = split_doubles(get("rho"));
    if (model.regs.size() != n_views || static_cast<Index>(rho.size()) != m)
        throw FormatError("CCA manifest: reg/rho lengths disagree with n_views/m");
    model.rho = Eigen::Map<const Vector>(rho.data(), m);
    for (std::size_t i = 0; i < n_views; ++i) {
        auto w = load_matrix(dir / weights_file(i)).values();
        auto mean = load_matrix(dir / mean_file(i)).values();
        if (w.cols() != m || mean.rows() != 1 || mean.cols() != w.rows())
            throw FormatError("CCA model: view " + std::to_string(i) + " files have inconsistent shapes");
        model.weights.push_back(std::move(w));
        model.means.push_back(mean.row(0).transpose());
    }
    return model;
}

}  // namespace zsl
