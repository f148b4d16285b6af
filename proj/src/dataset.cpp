#include "zsl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "zsl/error.hpp"

namespace zsl {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool is_skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

// Splits on '\n' and hands each line (with its 1-based number) to `fn`.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto pos = text.find('\n');
        const auto line = text.substr(0, pos);
        fn(line, ++line_no);
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const auto start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

void require_finite(const Matrix& m, std::string_view what) {
    if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

}  // namespace

FeatureMatrix::FeatureMatrix(Matrix values, std::string view_name)
    : values_(std::move(values)), view_name_(std::move(view_name)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw EmptyInputError("feature matrix '" + view_name_ + "' has no rows or no columns");
    require_finite(values_, "feature matrix '" + view_name_ + "'");
}

std::string join_labels(const LabelSet& labels, char sep) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += sep;
        out += labels[i];
    }
    return out;
}

LabelSet split_labels(std::string_view text, char sep) {
    LabelSet out;
    for (auto part : split(text, sep)) {
        part = trim(part);
        if (part.empty()) throw ParseError("empty label in set '" + std::string(text) + "'");
        out.emplace_back(part);
    }
    return out;
}

bool same_label_set(const LabelSet& a, const LabelSet& b) {
    return std::set<std::string>(a.begin(), a.end()) == std::set<std::string>(b.begin(), b.end());
}

LabelVocabulary::LabelVocabulary(std::vector<std::string> names, Role role)
    : names_(std::move(names)), role_(role) {
    if (names_.empty()) throw EmptyInputError("label vocabulary is empty");
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw InvalidInput("empty label name in vocabulary");
        if (!seen.insert(n).second) throw InvalidInput("duplicate label '" + n + "' in vocabulary");
    }
}

std::optional<std::size_t> LabelVocabulary::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

void require_disjoint(const LabelVocabulary& auxiliary, const LabelVocabulary& target) {
    for (const auto& n : target.names())
        if (auxiliary.index_of(n))
            throw InvalidInput("label '" + n + "' appears in both auxiliary and target vocabularies");
}

const Vector* WordVectorTable::find(std::string_view token) const {
    const auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
}

PrototypeSet::PrototypeSet(std::vector<Prototype> items) : items_(std::move(items)) {
    if (items_.empty()) return;
    space_dim_ = items_.front().vector.size();
    std::set<std::set<std::string>> seen;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto& p = items_[i];
        if (p.labels.empty()) throw InvalidInput("prototype with empty label set");
        if (p.vector.size() != space_dim_)
            throw ShapeError("prototype '" + join_labels(p.labels) + "' has dimension " +
                             std::to_string(p.vector.size()) + ", expected " +
                             std::to_string(space_dim_));
        if (!p.vector.allFinite())
            throw InvalidInput("prototype '" + join_labels(p.labels) + "' has a non-finite entry");
        if (!seen.emplace(p.labels.begin(), p.labels.end()).second)
            throw InvalidInput("duplicate prototype label set '" + join_labels(p.labels) + "'");
    }
}

Matrix PrototypeSet::matrix() const {
    Matrix m(static_cast<Index>(items_.size()), space_dim_);
    for (std::size_t i = 0; i < items_.size(); ++i) m.row(static_cast<Index>(i)) = items_[i].vector.transpose();
    return m;
}

double prototype_spacing(const PrototypeSet& protos) {
    if (protos.size() < 2) throw InvalidParameter("prototype spacing needs at least two prototypes");
    double total = 0.0;
    for (std::size_t i = 0; i < protos.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < protos.size(); ++j)
            if (i != j) best = std::min(best, (protos[i].vector - protos[j].vector).norm());
        total += best;
    }
    return total / static_cast<double>(protos.size());
}

// Text formats -------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ParseError("not a number: '" + std::string(token) + "'");
    if (!std::isfinite(v)) throw ParseError("non-finite value: '" + std::string(token) + "'");
    return v;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

FeatureMatrix parse_matrix(std::string_view text, std::string view_name) {
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (is_skippable(line)) return;
        const auto tokens = split(trim(line), ',');
        if (cols < 0) {
            cols = static_cast<Index>(tokens.size());
        } else if (static_cast<Index>(tokens.size()) != cols) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                              " columns, found " + std::to_string(tokens.size()));
        }
        for (const auto tok : tokens) {
            try {
                values.push_back(parse_double(tok));
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        ++rows;
    });
    if (rows == 0) throw EmptyInputError("matrix '" + view_name + "' has no data rows");
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
    return FeatureMatrix(std::move(m), std::move(view_name));
}

FeatureMatrix load_matrix(const std::filesystem::path& path, std::string view_name) {
    if (view_name.empty()) view_name = path.stem().string();
    return parse_matrix(read_text_file(path), std::move(view_name));
}

std::string format_matrix(const Matrix& m) {
    std::string out;
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    write_text_file(path, format_matrix(m));
}

WordVectorTable parse_word_vectors(std::string_view text) {
    WordVectorTable table;
    bool any = false;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (trim(line).empty()) return;
        const auto tokens = split_whitespace(line);
        const auto dim = static_cast<Index>(tokens.size()) - 1;
        if (dim < 1) throw FormatError("line " + std::to_string(line_no) + ": token without a vector");
        if (any && dim != table.dim)
            throw FormatError("line " + std::to_string(line_no) + ": dimension " + std::to_string(dim) +
                              " differs from " + std::to_string(table.dim));
        table.dim = dim;
        any = true;
        Vector v(dim);
        for (Index i = 0; i < dim; ++i) {
            try {
                v(i) = parse_double(tokens[static_cast<std::size_t>(i) + 1]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        std::string token(tokens.front());
        auto [it, inserted] = table.entries.insert_or_assign(token, std::move(v));
        if (!inserted)
            table.warnings.push_back("duplicate token '" + token + "' at line " + std::to_string(line_no) +
                                     "; keeping the last occurrence");
    });
    if (!any) throw EmptyInputError("word-vector table has no entries");
    return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
    return parse_word_vectors(read_text_file(path));
}

std::vector<std::string> load_labels(const std::filesystem::path& path) {
    std::vector<std::string> out;
    const auto text = read_text_file(path);
    for_each_line(text, [&](std::string_view line, std::size_t) {
        const auto t = trim(line);
        if (!t.empty()) out.emplace_back(t);
    });
    if (out.empty()) throw EmptyInputError("label file '" + path.string() + "' is empty");
    return out;
}

std::vector<LabelSet> load_label_sets(const std::filesystem::path& path) {
    std::vector<LabelSet> out;
    for (const auto& line : load_labels(path)) out.push_back(split_labels(line));
    return out;
}

void write_labels(const std::filesystem::path& path, const std::vector<std::string>& labels) {
    std::string out;
    for (const auto& l : labels) out += l + '\n';
    write_text_file(path, out);
}

void write_label_sets(const std::filesystem::path& path, const std::vector<LabelSet>& sets) {
    std::string out;
    for (const auto& s : sets) out += join_labels(s) + '\n';
    write_text_file(path, out);
}

PrototypeSet parse_prototypes(std::string_view text) {
    std::vector<Prototype> items;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (is_skippable(line)) return;
        const auto fields = split(trim(line), ',');
        if (fields.size() < 2)
            throw FormatError("line " + std::to_string(line_no) + ": prototype needs labels and a vector");
        Prototype p;
        p.labels = split_labels(fields.front());
        p.vector.resize(static_cast<Index>(fields.size()) - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                p.vector(static_cast<Index>(i) - 1) = parse_double(fields[i]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (!items.empty() && items.front().vector.size() != p.vector.size())
            throw FormatError("line " + std::to_string(line_no) + ": prototype dimension mismatch");
        items.push_back(std::move(p));
    });
    if (items.empty()) throw EmptyInputError("prototype file has no entries");
    return PrototypeSet(std::move(items));
}

PrototypeSet load_prototypes(const std::filesystem::path& path) {
    return parse_prototypes(read_text_file(path));
}

std::string format_prototypes(const PrototypeSet& protos) {
    std::string out;
    for (const auto& p : protos.items()) {
        out += join_labels(p.labels);
        for (Index i = 0; i < p.vector.size(); ++i) out += ',' + format_double(p.vector(i));
        out += '\n';
    }
    return out;
}

void write_prototypes(const std::filesystem::path& path, const PrototypeSet& protos) {
    write_text_file(path, format_prototypes(protos));
}

std::vector<std::string> nearest_prototype_labels(const Matrix& projected, const PrototypeSet& protos) {
    if (protos.empty()) throw InvalidInput("no prototypes");
    if (projected.cols() != protos.space_dim())
        throw ShapeError("projected data has " + std::to_string(projected.cols()) +
                         " columns, prototypes have " + std::to_string(protos.space_dim()));
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(projected.rows()));
    for (Index r = 0; r < projected.rows(); ++r) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < protos.size(); ++p) {
            const double d = (projected.row(r).transpose() - protos[p].vector).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        out.push_back(join_labels(protos[best].labels));
    }
    return out;
}

}  // namespace zsl
