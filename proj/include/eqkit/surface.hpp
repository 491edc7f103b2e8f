#pragma once

// Implicit-surface expressions g(x, y[, z]).
//
// Grammar, loosest binding first:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] INTEGER)?
//   primary := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
// so "-x^2" is -(x^2). Chained powers ("x^2^3") are rejected; write
// "(x^2)^3" instead.

#include "eqkit/vec.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace eqkit {

enum class NodeKind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Sqrt, Exp, Abs };

struct ExprNode {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;  // Number
  int var = 0;          // Variable: 0, 1, 2 for x, y, z
  int exponent = 0;     // Pow
  Func func = Func::Sin;
  std::size_t offset = 0;  // byte offset in the source, for diagnostics
  std::vector<std::shared_ptr<const ExprNode>> args;
};

struct Dual {
  double value = 0.0;
  Vec grad = Vec::Zero();
};

class SurfaceExpr {
 public:
  SurfaceExpr() = default;

  Dim dim() const { return dim_; }
  const std::string& source() const { return source_; }
  const ExprNode* root() const { return root_.get(); }
  bool empty() const { return !root_; }
  int depth() const;

  double eval(const Vec& x) const;
  Dual eval_grad(const Vec& x) const;

  // Minimal-parenthesis rendering that reparses to an equal tree.
  std::string to_string() const;

  friend bool operator==(const SurfaceExpr& a, const SurfaceExpr& b);

 private:
  friend SurfaceExpr parse_surface(std::string_view src, Dim dim);
  Dim dim_ = Dim::Three;
  std::string source_;
  std::shared_ptr<const ExprNode> root_;
};

inline constexpr int kMaxExprDepth = 64;

// Throws ParseError (SyntaxError, UnknownIdentifier, WrongArity,
// VariableNotAllowedInDim) with the byte offset of the offending token.
SurfaceExpr parse_surface(std::string_view src, Dim dim);

// Free-function spelling of the member operations.
inline Dual eval_grad(const SurfaceExpr& e, const Vec& x) { return e.eval_grad(x); }
std::string to_string(const ExprNode& node);

}  // namespace eqkit
