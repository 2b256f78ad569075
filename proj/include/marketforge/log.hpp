#pragma once

#include <cstdio>
#include <string>

namespace marketforge::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Process-wide level, initialized once from MARKETFORGE_LOG
// (error|warn|info|debug, default warn).
Level level();
void set_level(Level lv);

bool enabled(Level lv);
void write(Level lv, const std::string& msg);

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void warn(const std::string& msg) { write(Level::warn, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

}  // namespace marketforge::logging
