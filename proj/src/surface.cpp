#include "eqkit/surface.hpp"

#include "eqkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace eqkit {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      t.kind = Tok::Ident;
      t.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return t;
    }
    switch (c) {
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '^': t.kind = Tok::Caret; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      default:
        throw ParseError(ErrorKind::SyntaxError, pos_,
                         std::string("unexpected character '") + c + "'");
    }
    t.text = src_.substr(pos_, 1);
    ++pos_;
    return t;
  }

 private:
  Token number() {
    Token t;
    t.kind = Tok::Number;
    t.offset = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      n += digits();
    }
    if (n == 0) throw ParseError(ErrorKind::SyntaxError, pos_, "malformed number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
      if (digits() == 0) end = save;  // "2e" is the number 2 followed by e
    }
    t.text = src_.substr(pos_, end - pos_);
    const std::string buf(t.text);
    char* stop = nullptr;
    t.number = std::strtod(buf.c_str(), &stop);
    if (!std::isfinite(t.number)) {
      throw ParseError(ErrorKind::SyntaxError, pos_, "number out of range");
    }
    pos_ = end;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1}, {"cos", Func::Cos, 1}, {"sqrt", Func::Sqrt, 1},
    {"exp", Func::Exp, 1}, {"abs", Func::Abs, 1},
};

std::string_view func_name(Func f) {
  for (const auto& info : kFuncs) {
    if (info.func == f) return info.name;
  }
  return "?";
}

int node_depth(const ExprNode& n) {
  int d = 0;
  for (const auto& a : n.args) d = std::max(d, node_depth(*a));
  return d + 1;
}

class Parser {
 public:
  Parser(std::string_view src, Dim dim) : lex_(src), dim_(dim) { advance(); }

  NodePtr parse() {
    NodePtr e = expr();
    if (cur_.kind != Tok::End) fail(cur_, "unexpected " + std::string(describe(cur_.kind)));
    return e;
  }

 private:
  static constexpr int kMaxRecursion = 4 * kMaxExprDepth;

  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ParseError(ErrorKind::SyntaxError, t.offset, msg);
  }

  NodePtr make(ExprNode n) {
    if (node_depth(n) > kMaxExprDepth) {
      throw ParseError(ErrorKind::SyntaxError, n.offset,
                       "expression nesting exceeds depth " + std::to_string(kMaxExprDepth));
    }
    return std::make_shared<const ExprNode>(std::move(n));
  }

  NodePtr binary(NodeKind k, std::size_t off, NodePtr a, NodePtr b) {
    ExprNode n;
    n.kind = k;
    n.offset = off;
    n.args = {std::move(a), std::move(b)};
    return make(std::move(n));
  }

  struct Guard {
    explicit Guard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxRecursion) p.fail(p.cur_, "expression nesting too deep");
    }
    ~Guard() { --p.depth_; }
    Parser& p;
  };

  NodePtr expr() {
    Guard g(*this);
    NodePtr lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Token op = cur_;
      advance();
      lhs = binary(op.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub, op.offset, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Token op = cur_;
      advance();
      lhs = binary(op.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div, op.offset, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    Guard g(*this);
    if (cur_.kind == Tok::Minus) {
      ExprNode n;
      n.kind = NodeKind::Negate;
      n.offset = cur_.offset;
      advance();
      n.args = {unary()};
      return make(std::move(n));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (cur_.kind != Tok::Caret) return base;
    ExprNode n;
    n.kind = NodeKind::Pow;
    n.offset = cur_.offset;
    advance();
    bool negative = false;
    if (cur_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    if (cur_.kind != Tok::Number) fail(cur_, "exponent must be an integer literal");
    if (cur_.text.find_first_not_of("0123456789") != std::string_view::npos) {
      fail(cur_, "exponent must be an integer literal");
    }
    int e = 0;
    const auto [ptr, ec] = std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), e);
    if (ec != std::errc() || e > 1024) fail(cur_, "exponent out of range");
    (void)ptr;
    n.exponent = negative ? -e : e;
    n.args = {base};
    advance();
    if (cur_.kind == Tok::Caret) fail(cur_, "chained '^' needs parentheses");
    return make(std::move(n));
  }

  NodePtr primary() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::Number: {
        advance();
        ExprNode n;
        n.kind = NodeKind::Number;
        n.number = t.number;
        n.offset = t.offset;
        return make(std::move(n));
      }
      case Tok::Ident: return identifier();
      case Tok::LParen: {
        advance();
        NodePtr e = expr();
        if (cur_.kind != Tok::RParen) fail(cur_, "expected ')'");
        advance();
        return e;
      }
      default:
        fail(t, "expected operand, found " + std::string(describe(t.kind)));
    }
  }

  NodePtr identifier() {
    const Token t = cur_;
    advance();
    if (t.text.size() == 1 && (t.text[0] == 'x' || t.text[0] == 'y' || t.text[0] == 'z')) {
      const int v = t.text[0] - 'x';
      if (v >= size(dim_)) {
        throw ParseError(ErrorKind::VariableNotAllowedInDim, t.offset,
                         "variable '" + std::string(t.text) + "' not allowed in dimension " +
                             std::to_string(size(dim_)));
      }
      ExprNode n;
      n.kind = NodeKind::Variable;
      n.var = v;
      n.offset = t.offset;
      return make(std::move(n));
    }
    const FuncInfo* info = nullptr;
    for (const auto& f : kFuncs) {
      if (f.name == t.text) info = &f;
    }
    if (!info) {
      throw ParseError(ErrorKind::UnknownIdentifier, t.offset,
                       "unknown identifier '" + std::string(t.text) + "'");
    }
    if (cur_.kind != Tok::LParen) fail(cur_, "expected '(' after " + std::string(t.text));
    advance();
    ExprNode n;
    n.kind = NodeKind::Call;
    n.func = info->func;
    n.offset = t.offset;
    if (cur_.kind != Tok::RParen) {
      n.args.push_back(expr());
      while (cur_.kind == Tok::Comma) {
        advance();
        n.args.push_back(expr());
      }
    }
    if (cur_.kind != Tok::RParen) fail(cur_, "expected ')'");
    advance();
    if (static_cast<int>(n.args.size()) != info->arity) {
      throw ParseError(ErrorKind::WrongArity, t.offset,
                       std::string(t.text) + " takes " + std::to_string(info->arity) +
                           " argument(s), got " + std::to_string(n.args.size()));
    }
    return make(std::move(n));
  }

  Lexer lex_;
  Dim dim_;
  Token cur_;
  int depth_ = 0;
};

// Binding strength used by the printer.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print(const ExprNode& n, std::string& out);

void print_at(const ExprNode& n, int min_prec, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, out);
    out += ')';
  } else {
    print(n, out);
  }
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, n.number);
      out.append(buf, res.ptr);
      return;
    }
    case NodeKind::Variable: out += static_cast<char>('x' + n.var); return;
    case NodeKind::Negate:
      out += '-';
      print_at(*n.args[0], 3, out);
      return;
    case NodeKind::Pow:
      print_at(*n.args[0], 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      print(*n.args[0], out);
      out += ')';
      return;
    default: {
      const int p = precedence(n);
      const char* op = n.kind == NodeKind::Add ? " + "
                       : n.kind == NodeKind::Sub ? " - "
                       : n.kind == NodeKind::Mul ? "*"
                                                 : "/";
      // Left associative: the right operand needs parentheses at equal rank.
      print_at(*n.args[0], p, out);
      out += op;
      print_at(*n.args[1], p + 1, out);
      return;
    }
  }
}

bool equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Variable:
      if (a.var != b.var) return false;
      break;
    case NodeKind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

// Shared evaluator; T is double or Dual.
double value_of(double v) { return v; }
double value_of(const Dual& d) { return d.value; }

double constant(double v, double) { return v; }
Dual constant(double v, const Dual&) { return Dual{v, Vec::Zero()}; }

double variable(const Vec& x, int k, double) { return x(k); }
Dual variable(const Vec& x, int k, const Dual&) { return Dual{x(k), Vec::Unit(k)}; }

// Scalar f(u) with derivative df applied through the chain rule.
double chain(double, double fv, double) { return fv; }
Dual chain(const Dual& u, double fv, double df) { return Dual{fv, df * u.grad}; }

double add(double a, double b) { return a + b; }
Dual add(const Dual& a, const Dual& b) { return Dual{a.value + b.value, a.grad + b.grad}; }
double sub(double a, double b) { return a - b; }
Dual sub(const Dual& a, const Dual& b) { return Dual{a.value - b.value, a.grad - b.grad}; }
double mul(double a, double b) { return a * b; }
Dual mul(const Dual& a, const Dual& b) {
  return Dual{a.value * b.value, b.value * a.grad + a.value * b.grad};
}
double neg(double a) { return -a; }
Dual neg(const Dual& a) { return Dual{-a.value, -a.grad}; }

template <class T>
T evaluate(const ExprNode& n, const Vec& x) {
  const T tag{};
  switch (n.kind) {
    case NodeKind::Number: return constant(n.number, tag);
    case NodeKind::Variable: return variable(x, n.var, tag);
    case NodeKind::Negate: return neg(evaluate<T>(*n.args[0], x));
    case NodeKind::Add: return add(evaluate<T>(*n.args[0], x), evaluate<T>(*n.args[1], x));
    case NodeKind::Sub: return sub(evaluate<T>(*n.args[0], x), evaluate<T>(*n.args[1], x));
    case NodeKind::Mul: return mul(evaluate<T>(*n.args[0], x), evaluate<T>(*n.args[1], x));
    case NodeKind::Div: {
      const T a = evaluate<T>(*n.args[0], x);
      const T b = evaluate<T>(*n.args[1], x);
      const double bv = value_of(b);
      if (bv == 0.0) throw DomainError("division by zero", to_string(n));
      // a/b = a * (1/b), d(1/b) = -db/b²
      return mul(a, chain(b, 1.0 / bv, -1.0 / (bv * bv)));
    }
    case NodeKind::Pow: {
      const T u = evaluate<T>(*n.args[0], x);
      const double uv = value_of(u);
      const int e = n.exponent;
      if (e == 0) return constant(1.0, tag);
      if (e < 0 && uv == 0.0) throw DomainError("division by zero", to_string(n));
      const double fv = std::pow(uv, e);
      const double df = e * std::pow(uv, e - 1);
      return chain(u, fv, df);
    }
    case NodeKind::Call: {
      const T u = evaluate<T>(*n.args[0], x);
      const double uv = value_of(u);
      switch (n.func) {
        case Func::Sin: return chain(u, std::sin(uv), std::cos(uv));
        case Func::Cos: return chain(u, std::cos(uv), -std::sin(uv));
        case Func::Exp: {
          const double ev = std::exp(uv);
          return chain(u, ev, ev);
        }
        case Func::Abs: {
          const double s = uv > 0.0 ? 1.0 : (uv < 0.0 ? -1.0 : 0.0);
          return chain(u, std::abs(uv), s);
        }
        case Func::Sqrt: {
          if (uv < 0.0) throw DomainError("sqrt of negative value", to_string(n));
          const double r = std::sqrt(uv);
          if constexpr (std::is_same_v<T, Dual>) {
            if (r == 0.0) {
              if (!u.grad.isZero()) {
                throw DomainError("sqrt is not differentiable at 0", to_string(n));
              }
              return Dual{0.0, Vec::Zero()};
            }
            return chain(u, r, 0.5 / r);
          } else {
            return r;
          }
        }
      }
    }
  }
  return constant(0.0, tag);
}

}  // namespace

std::string to_string(const ExprNode& node) {
  std::string out;
  print(node, out);
  return out;
}

SurfaceExpr parse_surface(std::string_view src, Dim dim) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError(ErrorKind::SyntaxError, src.size(), "empty expression");
  }
  Parser p(src, dim);
  SurfaceExpr e;
  e.dim_ = dim;
  e.source_ = std::string(src);
  e.root_ = p.parse();
  return e;
}

int SurfaceExpr::depth() const { return root_ ? node_depth(*root_) : 0; }

double SurfaceExpr::eval(const Vec& x) const { return evaluate<double>(*root_, x); }

Dual SurfaceExpr::eval_grad(const Vec& x) const {
  Dual d = evaluate<Dual>(*root_, x);
  if (dim_ == Dim::Two) d.grad(2) = 0.0;
  return d;
}

std::string SurfaceExpr::to_string() const { return root_ ? eqkit::to_string(*root_) : ""; }

bool operator==(const SurfaceExpr& a, const SurfaceExpr& b) {
  if (a.dim_ != b.dim_) return false;
  if (!a.root_ || !b.root_) return !a.root_ && !b.root_;
  return equal(*a.root_, *b.root_);
}

}  // namespace eqkit
