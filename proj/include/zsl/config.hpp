#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zsl {

/// Flat `key = value` run configuration. Relative paths resolve against the
/// directory holding the config file.
class RunConfig {
public:
    RunConfig() = default;
    RunConfig(std::map<std::string, std::string> values, std::filesystem::path base_dir);

    /// Parses `key = value` lines; `#` starts a comment line. Unknown keys are
    /// rejected.
    static RunConfig parse(std::string_view text, std::filesystem::path base_dir = ".");
    static RunConfig load(const std::filesystem::path& path);

    /// Applies `key=value`.
    void override_with(std::string_view assignment);

    bool has(std::string_view key) const;
    std::string text(std::string_view key) const;  // default applied
    double number(std::string_view key) const;
    std::size_t count(std::string_view key) const;
    std::uint64_t seed() const;
    /// std::nullopt for the literal `auto`.
    std::optional<double> number_or_auto(std::string_view key) const;
    std::optional<std::size_t> count_or_auto(std::string_view key) const;

    std::filesystem::path path(std::string_view key) const;
    std::vector<std::filesystem::path> paths(std::string_view key) const;
    std::filesystem::path output_dir() const { return path("output_dir"); }

    /// Throws InvalidParameter naming the first missing key, or InvalidInput
    /// for a referenced file that does not exist.
    void require(std::initializer_list<std::string_view> keys) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Every key the CLI understands with its default ("" = no default).
    static const std::map<std::string, std::string, std::less<>>& defaults();

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_ = ".";
};

}  // namespace zsl
