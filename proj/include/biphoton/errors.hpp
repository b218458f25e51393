#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Error taxonomy mirrors the CLI exit-code contract:
// config errors -> 2, data/format errors -> 3, pipeline errors -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct PipelineError : std::runtime_error {
  explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace biphoton
