#pragma once

#include <stdexcept>
#include <string>

namespace nate {

struct SyntaxError : std::runtime_error {
  int line, col;
  SyntaxError(int line, int col, const std::string& what)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
};

struct UnknownNodeError : std::runtime_error {
  explicit UnknownNodeError(int id)
      : std::runtime_error("unknown node id " + std::to_string(id)) {}
};

struct NotIllTypedError : std::runtime_error {
  NotIllTypedError() : std::runtime_error("program is well-typed") {}
};

struct EmptyCorpusError : std::runtime_error {
  EmptyCorpusError() : std::runtime_error("corpus is empty") {}
};

struct EmptyDatasetError : std::runtime_error {
  EmptyDatasetError() : std::runtime_error("training set is empty") {}
};

struct DimensionMismatchError : std::runtime_error {
  DimensionMismatchError(size_t want, size_t got)
      : std::runtime_error("vector length " + std::to_string(got) +
                           " does not match model width " +
                           std::to_string(want)) {}
};

struct VersionMismatchError : std::runtime_error {
  explicit VersionMismatchError(const std::string& what)
      : std::runtime_error("model version mismatch: " + what) {}
};

struct CorruptModelError : std::runtime_error {
  explicit CorruptModelError(const std::string& what)
      : std::runtime_error("corrupt model file: " + what) {}
};

struct TooFewProgramsError : std::runtime_error {
  explicit TooFewProgramsError(const std::string& what)
      : std::runtime_error("too few programs: " + what) {}
};

struct InvalidConfigError : std::runtime_error {
  explicit InvalidConfigError(const std::string& what)
      : std::runtime_error("invalid config: " + what) {}
};

struct CorpusFormatError : std::runtime_error {
  CorpusFormatError(size_t lineno, const std::string& what)
      : std::runtime_error("corpus line " + std::to_string(lineno) + ": " +
                           what) {}
};

}  // namespace nate
