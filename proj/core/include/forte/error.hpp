#pragma once

#include <stdexcept>
#include <string>

namespace forte {

// Each code maps to a distinct process exit status in the CLI.
enum class ErrorCode {
  kParse = 10,
  kValidation = 11,
  kInvalidGeometry = 20,
  kNoConvergence = 30,
  kUnreachable = 31,
  kResource = 32,
  kEmptyInput = 33,
  kDegenerateFit = 40,
  kBomMismatch = 50,
  kIo = 60,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace forte
