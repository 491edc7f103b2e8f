#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eqkit {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  OutsidePositivityWindow,
  Overflow,
  SyntaxError,
  UnknownIdentifier,
  WrongArity,
  VariableNotAllowedInDim,
  DomainError,
  ProjectionFailed,
  DegenerateGradient,
  SingularFieldDecomposition,
  CoeffLengthMismatch,
  UnboundedDomain,
  StuckParticle,
  EscapedParticle,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parser failures carry the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation failure inside an expression; `subexpression` is the printed
// form of the node that failed.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : Error(ErrorKind::DomainError, what + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

}  // namespace eqkit
