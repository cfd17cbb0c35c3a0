#pragma once

// Diagnostic logging to stderr, controlled by the DELAYHEDGE_LOG environment
// variable: unset/"0"/"off" silent, "1"/"info" progress notes, "2"/"debug"
// verbose.

#include <cstdlib>
#include <iostream>
#include <string>

namespace delayhedge {

inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("DELAYHEDGE_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
  }();
  return level;
}

template <typename... Args>
void log_info(const Args&... args) {
  if (log_level() >= 1) {
    (std::cerr << "[delayhedge] " << ... << args) << std::endl;
  }
}

template <typename... Args>
void log_debug(const Args&... args) {
  if (log_level() >= 2) {
    (std::cerr << "[delayhedge] " << ... << args) << std::endl;
  }
}

}  // namespace delayhedge
