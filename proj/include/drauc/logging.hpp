#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace drauc {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Log level comes from the DR_AUC_LOG environment variable
/// (one of "error", "info", "debug"); default is "error".
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("DR_AUC_LOG");
        if (env == nullptr) return LogLevel::error;
        const std::string v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

namespace detail {
inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}
inline void log_line(const char* tag, const std::string& msg) {
    std::lock_guard<std::mutex> lock(log_mutex());
    std::cerr << "[" << tag << "] " << msg << "\n";
}
} // namespace detail

inline void log_error(const std::string& msg) { detail::log_line("error", msg); }

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) detail::log_line("info", msg);
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) detail::log_line("debug", msg);
}

} // namespace drauc
