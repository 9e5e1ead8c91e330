#pragma once

#include <stdexcept>
#include <string>

namespace s2a {

// Base class for everything thrown by this library. The C API maps
// ConfigError to S2A_CONFIG_ERROR and everything else to S2A_RUNTIME_ERROR.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration, bad user input, unknown keys, out-of-range values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Tensor shape violations; message always names the offending shapes.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Missing/unreadable/unwritable files, malformed dataset or checkpoint data.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace s2a
