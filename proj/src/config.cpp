#include "zsl/config.hpp"

#include <cmath>
#include <set>

#include "zsl/dataset.hpp"
#include "zsl/error.hpp"

namespace zsl {

namespace {

std::string strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

// Keys whose values name input files.
const std::set<std::string, std::less<>> kInputPathKeys = {
    "aux_features", "aux_semantics", "aux_labels", "target_features", "target_labels", "prototypes",
};

}  // namespace

const std::map<std::string, std::string, std::less<>>& RunConfig::defaults() {
    static const std::map<std::string, std::string, std::less<>> table = {
        // inputs
        {"aux_features", ""},
        {"aux_semantics", ""},
        {"aux_labels", ""},
        {"target_features", ""},
        {"target_labels", ""},
        {"prototypes", ""},
        {"word_vectors", ""},
        {"target_vocab", ""},
        {"target_label_sets", ""},
        {"output_dir", "out"},
        {"seed", "0"},
        // projection
        {"normalization", "zscore"},
        {"lambda", "1.0"},
        // embedding
        {"m", "auto"},
        {"reg", "auto"},
        {"weight_power", "4"},
        // graphs and propagation
        {"k", "10"},
        {"sigma", "auto"},
        {"alpha", "0.85"},
        {"tol", "1e-9"},
        {"max_iter", "1000"},
        // multi-label
        {"method", "dmp"},
        {"metric", "cosine"},
        {"synthesis", "mean"},
        {"max_cardinality", "auto"},
        {"power_set_cap", "1000000"},
        {"ml_space", "word"},
        {"hamming_threshold", "centered_zero"},
        {"self_train_rounds", "3"},
        {"keep_fraction", "0.5"},
        {"augmentation_weight", "1.0"},
        // synthetic benchmark
        {"synth_aux_classes", "20"},
        {"synth_target_classes", "5"},
        {"synth_per_class", "50"},
        {"synth_feat_dim", "5"},
        {"synth_sem_dim", "100"},
        {"synth_shift", "0"},
        {"synth_shift_spacing", ""},
        {"synth_center_spread", "10"},
        {"synth_cluster_std", "1"},
        {"synth_center_offset", "0"},
    };
    return table;
}

RunConfig::RunConfig(std::map<std::string, std::string> values, std::filesystem::path base_dir)
    : values_(std::move(values)), base_dir_(std::move(base_dir)) {
    for (const auto& [key, value] : values_)
        if (!defaults().contains(key)) throw InvalidParameter("unknown config key '" + key + "'");
}

RunConfig RunConfig::parse(std::string_view text, std::filesystem::path base_dir) {
    std::map<std::string, std::string> values;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto pos = text.find('\n');
        const auto line = strip(text.substr(0, pos));
        text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = strip(std::string_view(line).substr(0, eq));
        if (key.empty()) throw InvalidParameter("config line " + std::to_string(line_no) + ": empty key");
        values[key] = strip(std::string_view(line).substr(eq + 1));
    }
    return RunConfig(std::move(values), std::move(base_dir));
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InvalidInput("config file '" + path.string() + "' does not exist");
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse(read_text_file(path), base);
}

void RunConfig::override_with(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw InvalidParameter("override '" + std::string(assignment) + "' lacks '='");
    const auto key = strip(assignment.substr(0, eq));
    if (!defaults().contains(key)) throw InvalidParameter("unknown config key '" + key + "'");
    values_[key] = strip(assignment.substr(eq + 1));
}

bool RunConfig::has(std::string_view key) const {
    return !text(key).empty();
}

std::string RunConfig::text(std::string_view key) const {
    const auto it = values_.find(std::string(key));
    if (it != values_.end()) return it->second;
    const auto d = defaults().find(key);
    if (d == defaults().end()) throw InvalidParameter("unknown config key '" + std::string(key) + "'");
    return d->second;
}

double RunConfig::number(std::string_view key) const {
    const auto value = text(key);
    try {
        return parse_double(value);
    } catch (const ParseError&) {
        throw InvalidParameter("config '" + std::string(key) + "' must be a number, got '" + value + "'");
    }
}

std::size_t RunConfig::count(std::string_view key) const {
    const double v = number(key);
    if (v < 0 || v != std::floor(v) || v > 1e15)
        throw InvalidParameter("config '" + std::string(key) + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::seed() const {
    const auto value = text("seed");
    try {
        std::size_t used = 0;
        const auto s = std::stoull(value, &used);
        if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
        return s;
    } catch (const std::exception&) {
        throw InvalidParameter("config 'seed' must be a non-negative integer, got '" + value + "'");
    }
}

std::optional<double> RunConfig::number_or_auto(std::string_view key) const {
    if (text(key) == "auto") return std::nullopt;
    return number(key);
}

std::optional<std::size_t> RunConfig::count_or_auto(std::string_view key) const {
    if (text(key) == "auto") return std::nullopt;
    return count(key);
}

std::filesystem::path RunConfig::path(std::string_view key) const {
    const auto value = text(key);
    if (value.empty()) throw InvalidParameter("config key '" + std::string(key) + "' is required");
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base_dir_ / p;
}

std::vector<std::filesystem::path> RunConfig::paths(std::string_view key) const {
    const auto value = text(key);
    if (value.empty()) throw InvalidParameter("config key '" + std::string(key) + "' is required");
    std::vector<std::filesystem::path> out;
    std::string_view rest = value;
    while (true) {
        const auto pos = rest.find(',');
        const auto item = strip(rest.substr(0, pos));
        if (item.empty()) throw InvalidParameter("config key '" + std::string(key) + "' has an empty list item");
        const std::filesystem::path p(item);
        out.push_back(p.is_absolute() ? p : base_dir_ / p);
        if (pos == std::string_view::npos) break;
        rest.remove_prefix(pos + 1);
    }
    return out;
}

void RunConfig::require(std::initializer_list<std::string_view> keys) const {
    for (const auto key : keys) {
        if (!has(key)) throw InvalidParameter("config key '" + std::string(key) + "' is required");
        if (kInputPathKeys.contains(key))
            for (const auto& p : paths(key))
                if (!std::filesystem::exists(p))
                    throw InvalidInput("config '" + std::string(key) + "': file '" + p.string() + "' does not exist");
    }
}

}  // namespace zsl
