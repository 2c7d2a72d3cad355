#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace phoneval {

/// Shared library logger ("phoneval"), writing to stderr. Thread-safe.
std::shared_ptr<spdlog::logger> logger();

}  // namespace phoneval
