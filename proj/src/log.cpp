#include "ecado/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace ecado::log {
namespace {

Level parse_env() {
    const char* v = std::getenv("ECADO_LOG");
    if (!v) return Level::warn;
    if (!std::strcmp(v, "debug")) return Level::debug;
    if (!std::strcmp(v, "info")) return Level::info;
    if (!std::strcmp(v, "warn")) return Level::warn;
    if (!std::strcmp(v, "error")) return Level::error;
    if (!std::strcmp(v, "off")) return Level::off;
    return Level::warn;
}

std::atomic<int>& level_slot() {
    static std::atomic<int> slot{static_cast<int>(parse_env())};
    return slot;
}

const char* tag(Level l) {
    switch (l) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        default: return "";
    }
}

}  // namespace

Level threshold() { return static_cast<Level>(level_slot().load()); }
void set_threshold(Level level) { level_slot().store(static_cast<int>(level)); }

void write(Level level, const std::string& msg) {
    if (level < threshold() || level == Level::off) return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[ecado " << tag(level) << "] " << msg << '\n';
}

}  // namespace ecado::log
