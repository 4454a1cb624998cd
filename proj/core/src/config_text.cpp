#include "sfegacn/config_text.hpp"

#include "sfegacn/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sfegacn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

ConfigText ConfigText::parse(const std::string& text) {
    ConfigText cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        cfg.set(key, trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

ConfigText ConfigText::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void ConfigText::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end()) order_.push_back(key);
    values_[key] = value;
}

void ConfigText::set_double(const std::string& key, double value) {
    set(key, format_double(value));
}

void ConfigText::set_uint(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}

bool ConfigText::has(const std::string& key) const {
    return values_.find(key) != values_.end();
}

std::optional<std::string> ConfigText::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string ConfigText::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::string ConfigText::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing config key: " + key);
    return *v;
}

double ConfigText::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    auto parsed = parse_double(*v);
    if (!parsed) throw ConfigError("config key '" + key + "': not a number: " + *v);
    return *parsed;
}

std::uint64_t ConfigText::get_uint(const std::string& key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v->c_str(), &end, 10);
    if (errno != 0 || end == v->c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "': not an unsigned integer: " + *v);
    return parsed;
}

bool ConfigText::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("config key '" + key + "': not a boolean: " + *v);
}

std::vector<std::string> ConfigText::get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v || trim(*v).empty()) return out;
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

std::string ConfigText::serialize() const {
    std::ostringstream out;
    for (const auto& key : order_) out << key << " = " << values_.at(key) << "\n";
    return out.str();
}

void ConfigText::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << serialize();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string format_double(double value) {
    // Shortest round-trippable decimal form keeps files small and exact.
    char buffer[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
        if (auto back = parse_double(buffer); back && *back == value) return buffer;
    }
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::optional<double> parse_double(const std::string& text) {
    if (text.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (errno != 0 || end != text.c_str() + text.size()) return std::nullopt;
    return value;
}

} // namespace sfegacn
