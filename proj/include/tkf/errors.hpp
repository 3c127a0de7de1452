#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tkf {

// Error taxonomy shared by all modules. `kind()` is a stable machine-readable
// tag; the CLI serializes it into the error JSON on the error stream.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error{what}, kind_{std::move(kind)} {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ParamError : Error {
  explicit ParamError(const std::string& w) : Error{"ParamError", w} {}
};

struct ProbError : Error {
  explicit ProbError(const std::string& w) : Error{"ProbError", w} {}
};

struct ResourceError : Error {
  explicit ResourceError(const std::string& w) : Error{"ResourceError", w} {}
};

struct DegenerateError : Error {
  explicit DegenerateError(const std::string& w) : Error{"DegenerateError", w} {}
};

struct InvalidSlopeError : Error {
  explicit InvalidSlopeError(const std::string& w) : Error{"InvalidSlope", w} {}
};

struct CapExceededError : Error {
  explicit CapExceededError(const std::string& w) : Error{"CapExceeded", w} {}
};

}  // namespace tkf
