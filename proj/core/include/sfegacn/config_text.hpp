#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sfegacn {

/// Flat `key = value` text, one entry per line. Used for run configs,
/// manifests, eval scenarios and the text section of model containers.
/// Lines starting with '#' and blank lines are ignored; keys keep the order
/// in which they were first set so emitted files are stable.
class ConfigText {
public:
    ConfigText() = default;

    static ConfigText parse(const std::string& text);
    static ConfigText load(const std::filesystem::path& path); // IoError / ConfigError

    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    void set_uint(const std::string& key, std::uint64_t value);

    bool has(const std::string& key) const;
    std::vector<std::string> keys() const { return order_; }

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const; // ConfigError when missing

    /// Typed reads throw ConfigError naming the key on malformed values.
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated list value, trimmed; empty value -> empty list.
    std::vector<std::string> get_list(const std::string& key) const;

    std::string serialize() const;
    void save(const std::filesystem::path& path) const; // IoError

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

/// Shared numeric formatting: shortest text that parses back to the exact
/// double ("%.17g" fallback). Used by every CSV/report writer so outputs are
/// byte-stable.
std::string format_double(double value);

/// strtod with full-string validation; returns nullopt on junk or overflow.
std::optional<double> parse_double(const std::string& text);

} // namespace sfegacn
