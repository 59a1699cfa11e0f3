#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmts {

enum class ErrorCode {
  DuplicateHalfEdge,
  InvalidMesh,
  DegenerateExtent,
  OutOfRange,
  InvalidConfig,
  MalformedSequence,
  Desync,
  IllegalAnswer,
  EmptySurface,
  EmptyMesh,
  ParseError,
  NonTriangle,
  NegativeIndex,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported as an Error carrying a code; the
// message holds the human-readable diagnostic (line number, byte offset, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tmts
