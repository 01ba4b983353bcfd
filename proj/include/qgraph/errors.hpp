#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

/// Broad failure classes. The CLI maps Input to exit code 2 and Numeric to 3.
enum class ErrorKind {
  Parse,         // malformed document
  Validation,    // structurally invalid graph or boundary data
  Precondition,  // operation called outside its hypotheses (tadpoles, non k-independent, ...)
  Numeric,       // cutoff overflow, bracketing failure, singular solve
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable tag, e.g. "tadpole-present".
  const std::string& code() const noexcept { return code_; }

  bool is_numeric() const noexcept { return kind_ == ErrorKind::Numeric; }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline Error parse_error(const std::string& what) { return {ErrorKind::Parse, "parse-error", what}; }
inline Error validation_error(const std::string& what) {
  return {ErrorKind::Validation, "validation-error", what};
}
inline Error precondition_error(std::string code, const std::string& what) {
  return {ErrorKind::Precondition, std::move(code), what};
}
inline Error numeric_error(std::string code, const std::string& what) {
  return {ErrorKind::Numeric, std::move(code), what};
}

}  // namespace qgraph
