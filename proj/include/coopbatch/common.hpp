#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coopbatch {

using VertexId = std::uint32_t;

/// Bad arguments or violated call contracts (shape mismatches, ids out of
/// range, invalid parameter combinations).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;
};

/// Binary file with wrong magic/version or truncated payload.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coopbatch
