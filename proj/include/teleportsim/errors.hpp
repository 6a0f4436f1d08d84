#pragma once

#include <stdexcept>
#include <string>

namespace tsim {

// CLI exit codes: 0 ok, 2 ConfigError, 3 DataError, 4 NonConvergenceError.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent tag streams; carries the first offending record.
struct TagFormatError : DataError {
  TagFormatError(const std::string& msg, std::size_t record_index)
      : DataError(msg + " (record " + std::to_string(record_index) + ")"),
        record(record_index) {}
  std::size_t record;
};

struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Programming-contract violations (dimension mismatches etc.).
struct DomainError : std::logic_error {
  explicit DomainError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace tsim
