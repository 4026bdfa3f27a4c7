#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace fairlevel {

// Log verbosity comes from the FAIRLEVEL_LOG environment variable:
// unset/"off" -> silent, "info" -> info, "debug" -> info + debug.
enum class LogLevel { off = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("FAIRLEVEL_LOG");
        if (env == nullptr) return LogLevel::off;
        const std::string v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::off;
    }();
    return level;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[fairlevel] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[fairlevel:debug] " << msg << "\n";
}

} // namespace fairlevel
