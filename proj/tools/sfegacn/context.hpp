#pragma once

#include <sfegacn/config_text.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sfegacn::cli {

// Documented exit codes (also in the README and --help).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitData = 4;
inline constexpr int kExitNumeric = 5;
inline constexpr int kExitIo = 6;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Run manifest: resolved options under their flag names (so the file feeds
/// straight back into --config), plus tool/subcommand/timing metadata.
/// timing.* keys vary run to run; everything else is deterministic.
class Manifest {
public:
    explicit Manifest(const std::string& subcommand);

    void set(const std::string& flag, const std::string& value) { data_.set(flag, value); }
    void set_uint(const std::string& flag, std::uint64_t value) { data_.set_uint(flag, value); }
    void set_double(const std::string& flag, double value) { data_.set_double(flag, value); }

    /// Writes the manifest with the elapsed time appended.
    void save(const std::filesystem::path& path, const Stopwatch& watch);

private:
    ConfigText data_;
};

/// Empty string -> no label column (all rows unlabeled).
std::optional<std::string> label_column_option(const std::string& value);

// Implemented in context.cpp against CLI11; declared with a forward type to
// keep this header light.
} // namespace sfegacn::cli

namespace CLI {
class App;
}

namespace sfegacn::cli {

/// Loads `config_path` (flat key = value; a previous run's manifest works
/// as-is) and fills every option the command line left unset. Flags always
/// win over the file. Meta keys (tool, subcommand, timing.*) and keys that
/// match no option are ignored.
void apply_config_defaults(CLI::App& sub, const std::string& config_path);

/// Post-merge required check: throws CLI::RequiredError when the option got
/// a value neither from the command line nor from --config.
void require_option(CLI::App& sub, const std::string& name);

/// "16,32" -> {16, 32}; rejects empty or zero entries.
std::vector<std::size_t> parse_hidden_dims(const std::string& text);

/// "label:count,label:count" -> pairs; used for per-label generation counts.
std::vector<std::pair<std::string, std::size_t>> parse_label_counts(const std::string& text);

} // namespace sfegacn::cli
