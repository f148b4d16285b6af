#include "zsl/projection.hpp"

#include <cmath>
#include <map>

#include <Eigen/QR>

#include "zsl/error.hpp"

namespace zsl {

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::none: return "none";
        case Normalization::zscore: return "zscore";
        case Normalization::l2: return "l2";
    }
    return "zscore";
}

Normalization parse_normalization(std::string_view text) {
    if (text == "none") return Normalization::none;
    if (text == "zscore") return Normalization::zscore;
    if (text == "l2") return Normalization::l2;
    throw InvalidParameter("unknown normalization '" + std::string(text) + "' (none|zscore|l2)");
}

Matrix ProjectionModel::normalize(const Matrix& x) const {
    if (x.cols() != d_in())
        throw ShapeError("input has " + std::to_string(x.cols()) + " columns, model expects " +
                         std::to_string(d_in()));
    switch (normalization) {
        case Normalization::none:
            return x;
        case Normalization::zscore:
            return (x.rowwise() - input_mean.transpose()).array().rowwise() / input_scale.transpose().array();
        case Normalization::l2: {
            Matrix out = x;
            for (Index r = 0; r < out.rows(); ++r) {
                const double n = out.row(r).norm();
                if (n > 0.0) out.row(r) /= n;
            }
            return out;
        }
    }
    return x;
}

Matrix solve_ridge(const Matrix& xc, const Matrix& tc, double lambda, const Matrix& prior) {
    if (xc.rows() != tc.rows())
        throw ShapeError("ridge: " + std::to_string(xc.rows()) + " input rows vs " + std::to_string(tc.rows()) +
                         " target rows");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("ridge: lambda must be finite and >= 0");
    const Index n = xc.rows();
    const Index d = xc.cols();
    const double root = std::sqrt(lambda);

    Matrix a(n + d, d);
    a.topRows(n) = xc;
    a.bottomRows(d) = root * Matrix::Identity(d, d);
    Matrix b(n + d, tc.cols());
    b.topRows(n) = tc;
    b.bottomRows(d) = root * prior;

    const Eigen::ColPivHouseholderQR<Matrix> qr(a);
    if (qr.rank() < d)
        throw SingularSystemError("ridge: system is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                                  std::to_string(d) + "); use lambda > 0");
    Matrix w = qr.solve(b);
    if (!w.allFinite()) throw SingularSystemError("ridge: solution is not finite");
    return w;
}

Matrix solve_ridge(const Matrix& xc, const Matrix& tc, double lambda) {
    return solve_ridge(xc, tc, lambda, Matrix::Zero(xc.cols(), tc.cols()));
}

ProjectionModel fit_ridge(const FeatureMatrix& x, const FeatureMatrix& y, double lambda,
                          Normalization normalization) {
    if (x.rows() != y.rows())
        throw ShapeError("fit_ridge: X has " + std::to_string(x.rows()) + " rows, Y has " +
                         std::to_string(y.rows()));
    const Index d = x.cols();

    ProjectionModel model;
    model.lambda = lambda;
    model.normalization = normalization;
    model.input_mean = Vector::Zero(d);
    model.input_scale = Vector::Ones(d);
    if (normalization == Normalization::zscore) {
        model.input_mean = x.values().colwise().mean().transpose();
        const Matrix centered = x.values().rowwise() - model.input_mean.transpose();
        model.input_scale = (centered.colwise().squaredNorm() / double(x.rows())).array().sqrt().transpose();
        for (Index j = 0; j < d; ++j)
            if (!(model.input_scale(j) > 0.0)) model.input_scale(j) = 1.0;
    }
    model.weights = Matrix::Zero(d, y.cols());

    const Matrix xn = model.normalize(x.values());
    if (normalization == Normalization::none) {
        model.weights = solve_ridge(xn, y.values(), lambda);
        model.bias = Vector::Zero(y.cols());
    } else {
        const Vector x_mean = xn.colwise().mean().transpose();
        const Vector y_mean = y.values().colwise().mean().transpose();
        model.weights = solve_ridge(xn.rowwise() - x_mean.transpose(), y.values().rowwise() - y_mean.transpose(),
                                    lambda);
        model.bias = y_mean - model.weights.transpose() * x_mean;
    }
    return model;
}

Matrix apply(const ProjectionModel& model, const Matrix& x) {
    Matrix out = model.normalize(x) * model.weights;
    out.rowwise() += model.bias.transpose();
    return out;
}

FeatureMatrix apply(const ProjectionModel& model, const FeatureMatrix& x, std::string view_name) {
    if (view_name.empty()) view_name = x.view_name() + "_projected";
    return FeatureMatrix(apply(model, x.values()), std::move(view_name));
}

namespace {

std::string join_vector(const Vector& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v(i));
    }
    return out;
}

Vector parse_vector(std::string_view text, Index expected, std::string_view key) {
    const auto m = parse_matrix(text, std::string(key));
    if (m.rows() != 1 || m.cols() != expected)
        throw FormatError("projection model: '" + std::string(key) + "' must have " + std::to_string(expected) +
                          " entries");
    return m.values().row(0).transpose();
}

}  // namespace

std::string format_projection_model(const ProjectionModel& model) {
    std::string out = "# zsl projection model: weights (d_in rows) followed by one bias row\n";
    out += "#! d_in = " + std::to_string(model.d_in()) + "\n";
    out += "#! d_out = " + std::to_string(model.d_out()) + "\n";
    out += "#! lambda = " + format_double(model.lambda) + "\n";
    out += "#! normalization = " + to_string(model.normalization) + "\n";
    out += "#! input_mean = " + join_vector(model.input_mean) + "\n";
    out += "#! input_scale = " + join_vector(model.input_scale) + "\n";
    Matrix body(model.d_in() + 1, model.d_out());
    body.topRows(model.d_in()) = model.weights;
    body.bottomRows(1) = model.bias.transpose();
    out += format_matrix(body);
    return out;
}

ProjectionModel parse_projection_model(std::string_view text) {
    std::map<std::string, std::string, std::less<>> header;
    std::string body;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.starts_with("#!")) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw FormatError("projection model: malformed header line");
            auto key = std::string(line.substr(2, eq - 2));
            auto value = std::string(line.substr(eq + 1));
            std::erase_if(key, [](char c) { return c == ' '; });
            std::erase_if(value, [](char c) { return c == ' ' || c == '\r'; });
            header[key] = value;
        } else {
            body.append(line);
            body.push_back('\n');
        }
    }
    const auto get = [&](std::string_view key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end()) throw FormatError("projection model: missing header '" + std::string(key) + "'");
        return it->second;
    };

    ProjectionModel model;
    const auto d_in = static_cast<Index>(std::stoll(get("d_in")));
    const auto d_out = static_cast<Index>(std::stoll(get("d_out")));
    model.lambda = parse_double(get("lambda"));
    model.normalization = parse_normalization(get("normalization"));
    model.input_mean = parse_vector(get("input_mean"), d_in, "input_mean");
    model.input_scale = parse_vector(get("input_scale"), d_in, "input_scale");
    const auto m = parse_matrix(body, "projection");
    if (m.rows() != d_in + 1 || m.cols() != d_out)
        throw FormatError("projection model: body must be " + std::to_string(d_in + 1) + " x " +
                          std::to_string(d_out));
    model.weights = m.values().topRows(d_in);
    model.bias = m.values().bottomRows(1).transpose();
    return model;
}

void save_projection_model(const std::filesystem::path& path, const ProjectionModel& model) {
    write_text_file(path, format_projection_model(model));
}

ProjectionModel load_projection_model(const std::filesystem::path& path) {
    return parse_projection_model(read_text_file(path));
}

}  // namespace zsl
