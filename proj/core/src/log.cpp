#include "phoneval/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

namespace phoneval {

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("phoneval");
    if (existing) return existing;
    auto created = spdlog::stderr_color_mt("phoneval");
    created->set_pattern("[%l] %v");
    return created;
  }();
  return instance;
}

}  // namespace phoneval
