#include "context.hpp"

#include <sfegacn/error.hpp>
#include <sfegacn/version.hpp>

#include <CLI11.hpp>

#include <sstream>

namespace sfegacn::cli {

Manifest::Manifest(const std::string& subcommand) {
    data_.set("tool", std::string("sfegacn ") + kVersionString);
    data_.set("subcommand", subcommand);
}

void Manifest::save(const std::filesystem::path& path, const Stopwatch& watch) {
    data_.set("timing.total-ms", std::to_string(watch.elapsed_ms()));
    data_.save(path);
}

std::optional<std::string> label_column_option(const std::string& value) {
    if (value.empty()) return std::nullopt;
    return value;
}

void apply_config_defaults(CLI::App& sub, const std::string& config_path) {
    if (config_path.empty()) return;
    const ConfigText cfg = ConfigText::load(config_path);
    for (const auto& key : cfg.keys()) {
        if (key == "tool" || key == "subcommand" || key.rfind("timing.", 0) == 0) continue;
        CLI::Option* option = sub.get_option_no_throw("--" + key);
        if (option == nullptr || option->count() > 0) continue;
        option->add_result(cfg.require(key));
        option->run_callback();
    }
}

void require_option(CLI::App& sub, const std::string& name) {
    if (sub.get_option(name)->count() == 0) throw CLI::RequiredError(name);
}

std::vector<std::size_t> parse_hidden_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            const std::size_t width = std::stoull(item);
            if (width == 0) throw std::invalid_argument("zero");
            dims.push_back(width);
        } catch (const std::exception&) {
            throw ConfigError("bad hidden layer list: '" + text + "'");
        }
    }
    if (dims.empty()) throw ConfigError("hidden layer list is empty");
    return dims;
}

std::vector<std::pair<std::string, std::size_t>> parse_label_counts(const std::string& text) {
    std::vector<std::pair<std::string, std::size_t>> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0)
            throw ConfigError("bad label:count entry: '" + item + "'");
        try {
            out.emplace_back(item.substr(0, colon), std::stoull(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("bad label:count entry: '" + item + "'");
        }
    }
    return out;
}

} // namespace sfegacn::cli
