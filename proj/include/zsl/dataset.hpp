#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace zsl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense n x d block of one view (low-level features, attribute or word
/// space projections, or embedded coordinates). Entries are finite.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(Matrix values, std::string view_name = {});

    const Matrix& values() const { return values_; }
    const std::string& view_name() const { return view_name_; }
    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    auto row(Index i) const { return values_.row(i); }

private:
    Matrix values_;
    std::string view_name_;
};

/// A set of labels in canonical order. Order is fixed by whoever builds the
/// set (vocabulary order for synthesized subsets, file order when loaded).
using LabelSet = std::vector<std::string>;

std::string join_labels(const LabelSet& labels, char sep = '|');
LabelSet split_labels(std::string_view text, char sep = '|');
bool same_label_set(const LabelSet& a, const LabelSet& b);

class LabelVocabulary {
public:
    enum class Role { auxiliary, target };

    LabelVocabulary(std::vector<std::string> names, Role role);

    const std::vector<std::string>& names() const { return names_; }
    Role role() const { return role_; }
    std::size_t size() const { return names_.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;

private:
    std::vector<std::string> names_;
    Role role_;
};

/// Throws InvalidInput if the two vocabularies share a label.
void require_disjoint(const LabelVocabulary& auxiliary, const LabelVocabulary& target);

struct WordVectorTable {
    Index dim = 0;
    std::map<std::string, Vector, std::less<>> entries;
    std::vector<std::string> warnings;

    const Vector* find(std::string_view token) const;
};

struct Prototype {
    LabelSet labels;
    Vector vector;
};

class PrototypeSet {
public:
    PrototypeSet() = default;
    explicit PrototypeSet(std::vector<Prototype> items);

    Index space_dim() const { return space_dim_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<Prototype>& items() const { return items_; }
    const Prototype& operator[](std::size_t i) const { return items_[i]; }

    /// Prototypes stacked as rows.
    Matrix matrix() const;

private:
    std::vector<Prototype> items_;
    Index space_dim_ = 0;
};

/// Mean distance from each prototype to its nearest other prototype.
double prototype_spacing(const PrototypeSet& protos);

// Text formats -------------------------------------------------------------

FeatureMatrix parse_matrix(std::string_view text, std::string view_name = {});
FeatureMatrix load_matrix(const std::filesystem::path& path, std::string view_name = {});
std::string format_matrix(const Matrix& m);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

WordVectorTable parse_word_vectors(std::string_view text);
WordVectorTable load_word_vectors(const std::filesystem::path& path);

std::vector<std::string> load_labels(const std::filesystem::path& path);
std::vector<LabelSet> load_label_sets(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<std::string>& labels);
void write_label_sets(const std::filesystem::path& path, const std::vector<LabelSet>& sets);

PrototypeSet parse_prototypes(std::string_view text);
PrototypeSet load_prototypes(const std::filesystem::path& path);
std::string format_prototypes(const PrototypeSet& protos);
void write_prototypes(const std::filesystem::path& path, const PrototypeSet& protos);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view token);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Synthetic benchmark ------------------------------------------------------

struct SynthParams {
    std::size_t n_aux_classes = 20;
    std::size_t n_target_classes = 5;
    std::size_t per_class = 50;
    std::size_t feat_dim = 5;
    std::size_t sem_dim = 100;
    double shift_magnitude = 0.0;
    std::uint64_t seed = 0;
    /// Std of class centers around the common offset, in units of the
    /// within-class std.
    double center_spread = 10.0;
    double cluster_std = 1.0;
    /// Std of the offset shared by all class centers.
    double center_offset = 0.0;
};

/// Auxiliary classes with per-instance semantic targets, plus target classes
/// whose prototypes come from a perturbed semantic map.
///
/// Class centers mu_c are Gaussian in feature space; instances are
/// mu_c + cluster_std * N(0, I). Semantic prototypes are A mu_c for auxiliary
/// classes and (A + D) mu_c for target classes, where D is a random map
/// scaled so the root-mean-square target displacement |D mu_c| equals
/// shift_magnitude. Every random component draws from its own stream, so
/// changing shift_magnitude leaves centers, instances and A untouched.
struct SynthBenchmark {
    FeatureMatrix aux_features;
    FeatureMatrix aux_semantics;
    std::vector<std::string> aux_labels;
    PrototypeSet aux_prototypes;

    FeatureMatrix target_features;
    WordVectorTable target_word_vectors;
    PrototypeSet target_prototypes;
    std::vector<std::string> target_true_labels;

    double shift_magnitude = 0.0;
    std::uint64_t seed = 0;
};

SynthBenchmark synth_benchmark(const SynthParams& params);

/// Nearest-prototype (Euclidean) labels for the rows of `projected`.
std::vector<std::string> nearest_prototype_labels(const Matrix& projected,
                                                  const PrototypeSet& protos);

}  // namespace zsl
