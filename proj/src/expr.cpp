#include "berwald/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace berwald {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode&& n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

const std::shared_ptr<const ExprNode>& zero_node() {
  static const std::shared_ptr<const ExprNode> z =
      make_node(ExprNode{ExprKind::Number, 0.0, 0.0, std::string{}, std::vector<Expr>{}});
  return z;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::number(double value) {
  ExprNode n{};
  n.kind = ExprKind::Number;
  n.number = value;
  return wrap(make_node(std::move(n)));
}

Expr Expr::symbol(std::string name) {
  ExprNode n{};
  n.kind = ExprKind::Symbol;
  n.symbol = std::move(name);
  return wrap(make_node(std::move(n)));
}

Expr Expr::wrap(std::shared_ptr<const ExprNode> node) {
  Expr e;
  e.node_ = std::move(node);
  return e;
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->number; }
const std::string& Expr::symbol_name() const { return node_->symbol; }
double Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }

bool Expr::is_number() const { return node_->kind == ExprKind::Number; }
bool Expr::is_number(double value) const {
  return is_number() && node_->number == value;
}

namespace {

Expr make_unary(ExprKind k, Expr a) {
  ExprNode n{};
  n.kind = k;
  n.kids.push_back(std::move(a));
  return Expr::wrap(make_node(std::move(n)));
}

Expr make_binary(ExprKind k, Expr a, Expr b) {
  ExprNode n{};
  n.kind = k;
  n.kids.push_back(std::move(a));
  n.kids.push_back(std::move(b));
  return Expr::wrap(make_node(std::move(n)));
}

// Folds a unary function of a constant when the result is finite.
Expr fold_unary(ExprKind k, const Expr& a, double (*fn)(double)) {
  if (a.is_number()) {
    const double v = fn(a.number_value());
    if (std::isfinite(v)) return Expr::number(v);
  }
  return make_unary(k, a);
}

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    const double v = a.number_value() + b.number_value();
    if (std::isfinite(v)) return Expr::number(v);
  }
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  return make_binary(ExprKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    const double v = a.number_value() - b.number_value();
    if (std::isfinite(v)) return Expr::number(v);
  }
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return -b;
  return make_binary(ExprKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    const double v = a.number_value() * b.number_value();
    if (std::isfinite(v)) return Expr::number(v);
  }
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr::number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number(-1.0)) return -b;
  if (b.is_number(-1.0)) return -a;
  return make_binary(ExprKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number() && b.number_value() != 0.0) {
    const double v = a.number_value() / b.number_value();
    if (std::isfinite(v)) return Expr::number(v);
  }
  if (b.is_number(1.0)) return a;
  // 0/x is not folded: it must keep raising a domain error at x = 0.
  return make_binary(ExprKind::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_number()) return Expr::number(-a.number_value());
  if (a.kind() == ExprKind::Neg) return a.children()[0];
  return make_unary(ExprKind::Neg, a);
}

Expr pow(const Expr& base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return Expr::number(1.0);
  if (base.is_number()) {
    const double v = std::pow(base.number_value(), exponent);
    if (std::isfinite(v)) return Expr::number(v);
  }
  ExprNode n{};
  n.kind = ExprKind::Pow;
  n.exponent = exponent;
  n.kids.push_back(base);
  return Expr::wrap(make_node(std::move(n)));
}

Expr exp(const Expr& a) { return fold_unary(ExprKind::Exp, a, [](double v) { return std::exp(v); }); }
Expr ln(const Expr& a) {
  if (a.is_number() && a.number_value() > 0.0) return Expr::number(std::log(a.number_value()));
  return make_unary(ExprKind::Ln, a);
}
Expr sqrt(const Expr& a) {
  if (a.is_number() && a.number_value() >= 0.0) return Expr::number(std::sqrt(a.number_value()));
  return make_unary(ExprKind::Sqrt, a);
}
Expr sin(const Expr& a) { return fold_unary(ExprKind::Sin, a, [](double v) { return std::sin(v); }); }
Expr cos(const Expr& a) { return fold_unary(ExprKind::Cos, a, [](double v) { return std::cos(v); }); }
Expr abs(const Expr& a) {
  if (a.is_number()) return Expr::number(std::abs(a.number_value()));
  return make_unary(ExprKind::Abs, a);
}
Expr sign(const Expr& a) {
  if (a.is_number()) return Expr::number(sign_of(a.number_value()));
  return make_unary(ExprKind::Sign, a);
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : ExprError(message + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

UndeclaredSymbolError::UndeclaredSymbolError(const std::string& symbol, std::size_t offset)
    : ParseError("undeclared symbol '" + symbol + "'", offset), symbol_(symbol) {}

DomainError::DomainError(const std::string& message, Expr subexpr)
    : ExprError(message + " in '" + to_string(subexpr) + "'"), subexpr_(std::move(subexpr)) {}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::span<const std::string> coords;
  std::span<const std::string> params;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  double parse_number() {
    skip_ws();
    double value = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) throw ParseError("expected a number", pos);
    pos += static_cast<std::size_t>(ptr - first);
    return value;
  }

  // Signed number, used only for exponents after '^'.
  double parse_signed_number() {
    skip_ws();
    bool negate = false;
    if (consume('-')) negate = true;
    const double v = parse_number();
    return negate ? -v : v;
  }

  std::string parse_identifier() {
    skip_ws();
    const std::size_t start = pos;
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    char c = text[pos];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_'))
      throw ParseError("expected a symbol or number", pos);
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return std::string(text.substr(start, pos - start));
  }

  bool declared(const std::string& name) const {
    auto has = [&](std::span<const std::string> list) {
      return std::find(list.begin(), list.end(), name) != list.end();
    };
    return has(coords) || has(params);
  }

  Expr parse_expr() {
    skip_ws();
    Expr result = parse_term();
    for (;;) {
      if (consume('+')) {
        result = result + parse_term();
      } else if (consume('-')) {
        result = result - parse_term();
      } else {
        return result;
      }
    }
  }

  Expr parse_term() {
    Expr result = parse_factor();
    for (;;) {
      if (consume('*')) {
        result = result * parse_factor();
      } else if (consume('/')) {
        result = result / parse_factor();
      } else {
        return result;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (consume('^')) {
      return pow(base, parse_signed_number());
    }
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    const char c = text[pos];
    if (c == '-') {
      ++pos;
      return -parse_base();
    }
    if (c == '(') {
      ++pos;
      Expr inner = parse_expr();
      if (!consume(')')) throw ParseError("expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Expr::number(parse_number());
    }
    const std::size_t id_start = pos;
    const std::string name = parse_identifier();
    static const std::unordered_map<std::string, Expr (*)(const Expr&)> funcs = {
        {"exp", &berwald::exp}, {"ln", &berwald::ln},   {"sqrt", &berwald::sqrt},
        {"sin", &berwald::sin}, {"cos", &berwald::cos}, {"abs", &berwald::abs},
        {"sign", &berwald::sign},
    };
    skip_ws();
    const bool call = pos < text.size() && text[pos] == '(';
    if (call) {
      if (name == "neg") {
        ++pos;
        Expr inner = parse_expr();
        if (!consume(')')) throw ParseError("expected ')'", pos);
        return -inner;
      }
      if (auto it = funcs.find(name); it != funcs.end()) {
        ++pos;
        Expr inner = parse_expr();
        if (!consume(')')) throw ParseError("expected ')'", pos);
        return it->second(inner);
      }
      throw UndeclaredSymbolError(name, id_start);
    }
    if (!declared(name)) throw UndeclaredSymbolError(name, id_start);
    return Expr::symbol(name);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> coords,
                std::span<const std::string> params) {
  Parser p{text, 0, coords, params};
  Expr e = p.parse_expr();
  if (!p.at_end()) throw ParseError("trailing input", p.pos);
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expr differentiate(const Expr& e, std::string_view coord) {
  switch (e.kind()) {
    case ExprKind::Number:
      return Expr::number(0.0);
    case ExprKind::Symbol:
      return Expr::number(e.symbol_name() == coord ? 1.0 : 0.0);
    case ExprKind::Neg:
      return -differentiate(e.children()[0], coord);
    case ExprKind::Exp:
      return e * differentiate(e.children()[0], coord);
    case ExprKind::Ln:
      return differentiate(e.children()[0], coord) / e.children()[0];
    case ExprKind::Sqrt:
      return differentiate(e.children()[0], coord) / (Expr::number(2.0) * e);
    case ExprKind::Sin:
      return cos(e.children()[0]) * differentiate(e.children()[0], coord);
    case ExprKind::Cos:
      return -(sin(e.children()[0]) * differentiate(e.children()[0], coord));
    case ExprKind::Abs:
      return sign(e.children()[0]) * differentiate(e.children()[0], coord);
    case ExprKind::Sign:
      return Expr::number(0.0);  // away from the kink
    case ExprKind::Add:
      return differentiate(e.children()[0], coord) + differentiate(e.children()[1], coord);
    case ExprKind::Sub:
      return differentiate(e.children()[0], coord) - differentiate(e.children()[1], coord);
    case ExprKind::Mul: {
      const Expr& u = e.children()[0];
      const Expr& v = e.children()[1];
      return differentiate(u, coord) * v + u * differentiate(v, coord);
    }
    case ExprKind::Div: {
      const Expr& u = e.children()[0];
      const Expr& v = e.children()[1];
      return (differentiate(u, coord) * v - u * differentiate(v, coord)) / (v * v);
    }
    case ExprKind::Pow: {
      const Expr& u = e.children()[0];
      const double c = e.exponent();
      return Expr::number(c) * pow(u, c - 1.0) * differentiate(u, coord);
    }
  }
  throw ExprError("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_node(const Expr& e, const SymbolValues* a, const SymbolValues* b) {
  switch (e.kind()) {
    case ExprKind::Number:
      return e.number_value();
    case ExprKind::Symbol: {
      if (a) {
        if (auto it = a->find(e.symbol_name()); it != a->end()) return it->second;
      }
      if (b) {
        if (auto it = b->find(e.symbol_name()); it != b->end()) return it->second;
      }
      throw DomainError("unbound symbol", e);
    }
    case ExprKind::Neg:
      return -eval_node(e.children()[0], a, b);
    case ExprKind::Exp: {
      const double v = std::exp(eval_node(e.children()[0], a, b));
      if (!std::isfinite(v)) throw DomainError("exp overflow", e);
      return v;
    }
    case ExprKind::Ln: {
      const double u = eval_node(e.children()[0], a, b);
      if (u <= 0.0) throw DomainError("ln of non-positive argument", e);
      return std::log(u);
    }
    case ExprKind::Sqrt: {
      const double u = eval_node(e.children()[0], a, b);
      if (u < 0.0) throw DomainError("sqrt of negative argument", e);
      return std::sqrt(u);
    }
    case ExprKind::Sin:
      return std::sin(eval_node(e.children()[0], a, b));
    case ExprKind::Cos:
      return std::cos(eval_node(e.children()[0], a, b));
    case ExprKind::Abs:
      return std::abs(eval_node(e.children()[0], a, b));
    case ExprKind::Sign:
      return sign_of(eval_node(e.children()[0], a, b));
    case ExprKind::Add:
      return eval_node(e.children()[0], a, b) + eval_node(e.children()[1], a, b);
    case ExprKind::Sub:
      return eval_node(e.children()[0], a, b) - eval_node(e.children()[1], a, b);
    case ExprKind::Mul:
      return eval_node(e.children()[0], a, b) * eval_node(e.children()[1], a, b);
    case ExprKind::Div: {
      const double den = eval_node(e.children()[1], a, b);
      if (den == 0.0) throw DomainError("division by zero", e);
      const double v = eval_node(e.children()[0], a, b) / den;
      if (!std::isfinite(v)) throw DomainError("non-finite quotient", e);
      return v;
    }
    case ExprKind::Pow: {
      const double u = eval_node(e.children()[0], a, b);
      const double c = e.exponent();
      if (u < 0.0 && !is_integer(c)) throw DomainError("negative base with non-integer exponent", e);
      if (u == 0.0 && c < 0.0) throw DomainError("zero base with negative exponent", e);
      const double v = std::pow(u, c);
      if (!std::isfinite(v)) throw DomainError("non-finite power", e);
      return v;
    }
  }
  throw ExprError("unreachable expression kind");
}

}  // namespace

double evaluate(const Expr& e, const SymbolValues& symbols) {
  return eval_node(e, &symbols, nullptr);
}

double evaluate(const Expr& e, const SymbolValues& coords, const SymbolValues& params) {
  return eval_node(e, &coords, &params);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string number_to_string(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Precedence: add/sub 1, mul/div 2, pow 3, atoms 4.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Pow:
      return 3;
    case ExprKind::Number:
      return e.number_value() < 0 ? 3 : 4;
    default:
      return 4;
  }
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number:
      out += number_to_string(e.number_value());
      return;
    case ExprKind::Symbol:
      out += e.symbol_name();
      return;
    case ExprKind::Neg:
      out += "neg(";
      print_node(e.children()[0], out);
      out += ')';
      return;
    case ExprKind::Exp:
    case ExprKind::Ln:
    case ExprKind::Sqrt:
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Abs:
    case ExprKind::Sign: {
      static const std::unordered_map<int, const char*> names = {
          {static_cast<int>(ExprKind::Exp), "exp"},   {static_cast<int>(ExprKind::Ln), "ln"},
          {static_cast<int>(ExprKind::Sqrt), "sqrt"}, {static_cast<int>(ExprKind::Sin), "sin"},
          {static_cast<int>(ExprKind::Cos), "cos"},   {static_cast<int>(ExprKind::Abs), "abs"},
          {static_cast<int>(ExprKind::Sign), "sign"},
      };
      out += names.at(static_cast<int>(e.kind()));
      out += '(';
      print_node(e.children()[0], out);
      out += ')';
      return;
    }
    case ExprKind::Add:
      print_child(e.children()[0], 1, out);
      out += " + ";
      print_child(e.children()[1], 2, out);
      return;
    case ExprKind::Sub:
      print_child(e.children()[0], 1, out);
      out += " - ";
      print_child(e.children()[1], 2, out);
      return;
    case ExprKind::Mul:
      print_child(e.children()[0], 2, out);
      out += '*';
      print_child(e.children()[1], 3, out);
      return;
    case ExprKind::Div:
      print_child(e.children()[0], 2, out);
      out += '/';
      print_child(e.children()[1], 4, out);
      return;
    case ExprKind::Pow:
      print_child(e.children()[0], 4, out);
      out += '^';
      out += number_to_string(e.exponent());
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_node(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution and symbol queries
// ---------------------------------------------------------------------------

namespace {

Expr substitute_node(const Expr& e, const std::map<std::string, Expr>& repl,
                     std::unordered_map<const ExprNode*, Expr>& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  Expr result = e;
  switch (e.kind()) {
    case ExprKind::Number:
      break;
    case ExprKind::Symbol: {
      if (auto it = repl.find(e.symbol_name()); it != repl.end()) result = it->second;
      break;
    }
    default: {
      std::vector<Expr> kids;
      kids.reserve(e.children().size());
      bool changed = false;
      for (const Expr& c : e.children()) {
        kids.push_back(substitute_node(c, repl, memo));
        changed = changed || kids.back().node() != c.node();
      }
      if (changed) {
        switch (e.kind()) {
          case ExprKind::Neg: result = -kids[0]; break;
          case ExprKind::Exp: result = exp(kids[0]); break;
          case ExprKind::Ln: result = ln(kids[0]); break;
          case ExprKind::Sqrt: result = sqrt(kids[0]); break;
          case ExprKind::Sin: result = sin(kids[0]); break;
          case ExprKind::Cos: result = cos(kids[0]); break;
          case ExprKind::Abs: result = abs(kids[0]); break;
          case ExprKind::Sign: result = sign(kids[0]); break;
          case ExprKind::Add: result = kids[0] + kids[1]; break;
          case ExprKind::Sub: result = kids[0] - kids[1]; break;
          case ExprKind::Mul: result = kids[0] * kids[1]; break;
          case ExprKind::Div: result = kids[0] / kids[1]; break;
          case ExprKind::Pow: result = pow(kids[0], e.exponent()); break;
          default: break;
        }
      }
      break;
    }
  }
  memo.emplace(e.node(), result);
  return result;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return substitute_node(e, replacements, memo);
}

void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == ExprKind::Symbol) {
    out.insert(e.symbol_name());
    return;
  }
  for (const Expr& c : e.children()) collect_symbols(c, out);
}

bool depends_on(const Expr& e, std::string_view symbol) {
  if (e.kind() == ExprKind::Symbol) return e.symbol_name() == symbol;
  for (const Expr& c : e.children())
    if (depends_on(c, symbol)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

namespace {

struct TapeBuilder {
  std::unordered_map<std::string_view, int> symbol_slots;
  std::unordered_map<const ExprNode*, int> memo;
  std::vector<Expr> origin;
  struct RawInstr {
    ExprKind op;
    int a = -1, b = -1;
    double imm = 0.0;
  };
  std::vector<RawInstr> code;

  int visit(const Expr& e) {
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    RawInstr ins{e.kind()};
    switch (e.kind()) {
      case ExprKind::Number:
        ins.imm = e.number_value();
        break;
      case ExprKind::Symbol: {
        auto it = symbol_slots.find(e.symbol_name());
        if (it == symbol_slots.end())
          throw ExprError("tape compile: symbol '" + e.symbol_name() + "' not in symbol list");
        ins.a = it->second;
        break;
      }
      case ExprKind::Pow:
        ins.a = visit(e.children()[0]);
        ins.imm = e.exponent();
        break;
      default:
        ins.a = visit(e.children()[0]);
        if (e.children().size() > 1) ins.b = visit(e.children()[1]);
        break;
    }
    const int slot = static_cast<int>(code.size());
    code.push_back(ins);
    origin.push_back(e);
    memo.emplace(e.node(), slot);
    return slot;
  }
};

}  // namespace

ExprTape ExprTape::compile(std::span<const Expr> roots, std::span<const std::string> symbols) {
  TapeBuilder builder;
  for (std::size_t i = 0; i < symbols.size(); ++i)
    builder.symbol_slots.emplace(symbols[i], static_cast<int>(i));
  ExprTape tape;
  tape.nsyms_ = symbols.size();
  tape.roots_.reserve(roots.size());
  for (const Expr& r : roots) tape.roots_.push_back(builder.visit(r));
  tape.code_.resize(builder.code.size());
  for (std::size_t i = 0; i < builder.code.size(); ++i) {
    tape.code_[i] = Instr{builder.code[i].op, builder.code[i].a, builder.code[i].b,
                          builder.code[i].imm};
  }
  tape.origin_ = std::move(builder.origin);
  return tape;
}

void ExprTape::evaluate(std::span<const double> symbol_values, std::span<double> out) const {
  if (symbol_values.size() != nsyms_) throw ExprError("tape evaluate: wrong symbol count");
  if (out.size() != roots_.size()) throw ExprError("tape evaluate: wrong output size");
  thread_local std::vector<double> buf;
  if (buf.size() < code_.size()) buf.resize(code_.size());
  double* v = buf.data();
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double r = 0.0;
    switch (ins.op) {
      case ExprKind::Number: r = ins.imm; break;
      case ExprKind::Symbol: r = symbol_values[static_cast<std::size_t>(ins.a)]; break;
      case ExprKind::Neg: r = -v[ins.a]; break;
      case ExprKind::Exp:
        r = std::exp(v[ins.a]);
        if (!std::isfinite(r)) throw DomainError("exp overflow", origin_[i]);
        break;
      case ExprKind::Ln:
        if (v[ins.a] <= 0.0) throw DomainError("ln of non-positive argument", origin_[i]);
        r = std::log(v[ins.a]);
        break;
      case ExprKind::Sqrt:
        if (v[ins.a] < 0.0) throw DomainError("sqrt of negative argument", origin_[i]);
        r = std::sqrt(v[ins.a]);
        break;
      case ExprKind::Sin: r = std::sin(v[ins.a]); break;
      case ExprKind::Cos: r = std::cos(v[ins.a]); break;
      case ExprKind::Abs: r = std::abs(v[ins.a]); break;
      case ExprKind::Sign: r = sign_of(v[ins.a]); break;
      case ExprKind::Add: r = v[ins.a] + v[ins.b]; break;
      case ExprKind::Sub: r = v[ins.a] - v[ins.b]; break;
      case ExprKind::Mul: r = v[ins.a] * v[ins.b]; break;
      case ExprKind::Div:
        if (v[ins.b] == 0.0) throw DomainError("division by zero", origin_[i]);
        r = v[ins.a] / v[ins.b];
        if (!std::isfinite(r)) throw DomainError("non-finite quotient", origin_[i]);
        break;
      case ExprKind::Pow: {
        const double u = v[ins.a];
        const double c = ins.imm;
        if (u < 0.0 && !is_integer(c))
          throw DomainError("negative base with non-integer exponent", origin_[i]);
        if (u == 0.0 && c < 0.0) throw DomainError("zero base with negative exponent", origin_[i]);
        r = std::pow(u, c);
        if (!std::isfinite(r)) throw DomainError("non-finite power", origin_[i]);
        break;
      }
    }
    v[i] = r;
  }
  for (std::size_t i = 0; i < roots_.size(); ++i) out[i] = v[roots_[i]];
}

}  // namespace berwald
