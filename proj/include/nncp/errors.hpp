#pragma once

#include <stdexcept>
#include <string>

namespace nncp {

// Error taxonomy shared by the library and the CLI. Each class maps to a
// distinct process exit code (see tools/nncp_cli.cpp and `nncp --help`).
struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nncp
