#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace berwald {

/// Scalar expression over named symbols: numeric literals, symbols, the
/// unary functions neg/exp/ln/sqrt/sin/cos/abs/sign, the arithmetic binary
/// operators, and powers with a constant real exponent. Expressions are
/// immutable; subtrees are shared, so repeated differentiation produces a
/// DAG rather than deep copies.
enum class ExprKind : unsigned char {
  Number,
  Symbol,
  Neg,
  Exp,
  Ln,
  Sqrt,
  Sin,
  Cos,
  Abs,
  Sign,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // constant exponent only
};

struct ExprNode;

class Expr {
 public:
  Expr();  // the zero expression
  static Expr number(double value);
  static Expr symbol(std::string name);
  static Expr wrap(std::shared_ptr<const ExprNode> node);

  ExprKind kind() const;
  double number_value() const;
  const std::string& symbol_name() const;
  double exponent() const;  // Pow only
  const std::vector<Expr>& children() const;

  bool is_number() const;
  bool is_number(double value) const;

  /// Node identity, used for DAG deduplication.
  const ExprNode* node() const { return node_.get(); }

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind;
  double number = 0.0;
  double exponent = 0.0;
  std::string symbol;
  std::vector<Expr> kids;
};

// Smart constructors; all fold constant subexpressions.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr abs(const Expr& a);
Expr sign(const Expr& a);

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error; `offset` is the byte offset into the parsed text.
class ParseError : public ExprError {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

class UndeclaredSymbolError : public ParseError {
 public:
  UndeclaredSymbolError(const std::string& symbol, std::size_t offset);
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

/// Evaluation failure (division by zero, ln/sqrt of a non-positive
/// argument, non-finite result); carries the offending subexpression.
class DomainError : public ExprError {
 public:
  DomainError(const std::string& message, Expr subexpr);
  const Expr& subexpr() const { return subexpr_; }

 private:
  Expr subexpr_;
};

using SymbolValues = std::map<std::string, double, std::less<>>;

/// Parses `text` against the expression grammar. Every symbol must appear
/// in `coords` or `params`; anything else raises UndeclaredSymbolError.
Expr parse_expr(std::string_view text, std::span<const std::string> coords,
                std::span<const std::string> params);

/// Exact symbolic derivative with respect to `coord`. d|u|/dx is
/// sign(u) du/dx, valid away from u = 0.
Expr differentiate(const Expr& e, std::string_view coord);

double evaluate(const Expr& e, const SymbolValues& symbols);
double evaluate(const Expr& e, const SymbolValues& coords, const SymbolValues& params);

/// Prints in a form parse_expr accepts; parse(to_string(e)) evaluates
/// identically to e.
std::string to_string(const Expr& e);

/// Replaces symbols by expressions (simultaneous substitution).
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

void collect_symbols(const Expr& e, std::set<std::string>& out);
bool depends_on(const Expr& e, std::string_view symbol);

/// A batch of expressions compiled against a fixed symbol ordering. Shared
/// subtrees are evaluated once. Used in grid sweeps where the map-based
/// evaluator would dominate the cost.
class ExprTape {
 public:
  ExprTape() = default;
  static ExprTape compile(std::span<const Expr> roots, std::span<const std::string> symbols);

  std::size_t root_count() const { return roots_.size(); }
  std::size_t symbol_count() const { return nsyms_; }

  /// `symbol_values` must match the compile-time symbol ordering;
  /// `out` receives one value per root. Throws DomainError.
  void evaluate(std::span<const double> symbol_values, std::span<double> out) const;

 private:
  struct Instr {
    ExprKind op;
    int a = -1;
    int b = -1;
    double imm = 0.0;
  };
  std::vector<Instr> code_;
  std::vector<int> roots_;
  std::vector<Expr> origin_;  // instruction -> source subexpression, for errors
  std::size_t nsyms_ = 0;
};

}  // namespace berwald
