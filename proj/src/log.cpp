#include "marketforge/log.hpp"

#include <cstdlib>
#include <cstring>

namespace marketforge::logging {

namespace {

Level parse_env() {
  const char* env = std::getenv("MARKETFORGE_LOG");
  if (env == nullptr) return Level::warn;
  if (std::strcmp(env, "error") == 0) return Level::error;
  if (std::strcmp(env, "warn") == 0) return Level::warn;
  if (std::strcmp(env, "info") == 0) return Level::info;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  return Level::warn;
}

Level& current() {
  static Level lv = parse_env();
  return lv;
}

const char* tag(Level lv) {
  switch (lv) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level level() { return current(); }
void set_level(Level lv) { current() = lv; }
bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(current()); }

void write(Level lv, const std::string& msg) {
  if (!enabled(lv)) return;
  std::fprintf(stderr, "[marketforge %s] %s\n", tag(lv), msg.c_str());
}

}  // namespace marketforge::logging
