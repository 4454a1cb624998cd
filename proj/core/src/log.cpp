#include "sfegacn/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace sfegacn::log {

namespace {

Level parse_level(const char* text) {
    if (text == nullptr) return Level::Warn;
    std::string s(text);
    if (s == "debug") return Level::Debug;
    if (s == "info") return Level::Info;
    if (s == "warn" || s == "warning") return Level::Warn;
    if (s == "error") return Level::Error;
    if (s == "off" || s == "none") return Level::Off;
    return Level::Warn;
}

const char* tag(Level level) {
    switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    default: return "error";
    }
}

} // namespace

Level threshold() {
    static const Level value = parse_level(std::getenv("SFEGACN_LOG"));
    return value;
}

void write(Level level, const std::string& message) {
    if (level < threshold()) return;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    std::cerr << "[" << tag(level) << "] " << message << "\n";
}

} // namespace sfegacn::log
