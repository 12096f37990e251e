#include "anicon/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace anicon {

namespace {

constexpr std::array<std::string_view, kJetVars> kVarNames{"x1", "x2", "y1", "y2"};

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 5> kFunctions{{
    {"sqrt", Op::kSqrt},
    {"sin", Op::kSin},
    {"cos", Op::kCos},
    {"exp", Op::kExp},
    {"ln", Op::kLn},
}};

bool is_reserved(std::string_view id) {
  if (id == "pi") return true;
  for (auto v : kVarNames) {
    if (id == v) return true;
  }
  for (const auto& f : kFunctions) {
    if (id == f.name) return true;
  }
  return false;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string_view text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::kEnd) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(t);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.kind = Tok::kIdent;
    } else {
      switch (c) {
        case '+': t.kind = Tok::kPlus; break;
        case '-': t.kind = Tok::kMinus; break;
        case '*': t.kind = Tok::kStar; break;
        case '/': t.kind = Tok::kSlash; break;
        case '^': t.kind = Tok::kCaret; break;
        case '(': t.kind = Tok::kLParen; break;
        case ')': t.kind = Tok::kRParen; break;
        default:
          throw ParseError(t.line, t.column, "unexpected character '" + std::string(1, c) + "'");
      }
      advance();
    }
    t.text = src_.substr(start, pos_ - start);
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  bool digit_at(std::size_t i) const {
    return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    bool digits = false;
    while (digit_at(pos_)) {
      advance();
      digits = true;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (digit_at(pos_)) {
        advance();
        digits = true;
      }
    }
    if (!digits) throw ParseError(t.line, t.column, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (digit_at(look)) {
        while (pos_ < look) advance();
        while (digit_at(pos_)) advance();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    t.kind = Tok::kNumber;
    t.number = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(t.number)) throw ParseError(t.line, t.column, "number out of range");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& params)
      : lexer_(src), params_(params) {
    cur_ = lexer_.next();
  }

  Expr parse_all() {
    Expr e = expr();
    if (cur_.kind != Tok::kEnd) fail(cur_, "unexpected " + describe(cur_));
    return e;
  }

 private:
  [[noreturn]] static void fail(const Token& at, const std::string& msg) {
    throw ParseError(at.line, at.column, msg);
  }

  Token take() {
    Token t = cur_;
    cur_ = lexer_.next();
    return t;
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(cur_, std::string("expected ") + what + ", found " + describe(cur_));
    take();
  }

  Expr expr() {
    Expr lhs = term();
    while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      const Op op = take().kind == Tok::kPlus ? Op::kAdd : Op::kSub;
      lhs = Expr::binary(op, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (cur_.kind == Tok::kStar || cur_.kind == Tok::kSlash) {
      const Op op = take().kind == Tok::kStar ? Op::kMul : Op::kDiv;
      lhs = Expr::binary(op, lhs, factor());
    }
    return lhs;
  }

  Expr factor() {
    if (cur_.kind == Tok::kMinus) {
      take();
      return Expr::unary(Op::kNeg, factor());
    }
    Expr b = base();
    if (cur_.kind == Tok::kCaret) {
      take();
      b = Expr::power(b, exponent());
    }
    return b;
  }

  double exponent() {
    const Token start = cur_;
    if (cur_.kind == Tok::kNumber) return take().number;
    if (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      const bool neg = take().kind == Tok::kMinus;
      if (cur_.kind != Tok::kNumber) fail(cur_, "expected number after sign in exponent");
      const double v = take().number;
      return neg ? -v : v;
    }
    if (cur_.kind == Tok::kLParen) {
      take();
      Expr e = expr();
      expect(Tok::kRParen, "')'");
      for (int v = 0; v < kJetVars; ++v) {
        if (e.depends_on(v)) fail(start, "non-constant exponent");
      }
      if (!e.parameters().empty()) fail(start, "non-constant exponent");
      double value = 0.0;
      try {
        value = evaluate(e, Point4{});
      } catch (const DomainError& err) {
        fail(start, std::string("exponent: ") + err.what());
      }
      return value;
    }
    if (cur_.kind == Tok::kIdent) fail(cur_, "non-constant exponent");
    fail(cur_, "expected exponent, found " + describe(cur_));
  }

  Expr base() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::kNumber:
        take();
        return Expr::constant(t.number);
      case Tok::kLParen: {
        take();
        Expr e = expr();
        expect(Tok::kRParen, "')'");
        return e;
      }
      case Tok::kIdent:
        take();
        return identifier(t);
      default:
        fail(t, "expected operand, found " + describe(t));
    }
  }

  Expr identifier(const Token& t) {
    for (const auto& f : kFunctions) {
      if (t.text == f.name) {
        expect(Tok::kLParen, "'(' after function name");
        Expr arg = expr();
        expect(Tok::kRParen, "')'");
        return Expr::unary(f.op, arg);
      }
    }
    for (int v = 0; v < kJetVars; ++v) {
      if (t.text == kVarNames[v]) return Expr::variable(v);
    }
    if (t.text == "pi") return Expr::constant(std::numbers::pi);
    for (const auto& p : params_) {
      if (t.text == p) return Expr::parameter(p);
    }
    fail(t, "unknown identifier '" + std::string(t.text) + "'");
  }

  Lexer lexer_;
  const std::vector<std::string>& params_;
  Token cur_;
};

bool nodes_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::kConstant:
      return a->value == b->value;
    case Op::kVariable:
      return a->var == b->var;
    case Op::kParameter:
      return a->name == b->name;
    case Op::kPow:
      return a->value == b->value && nodes_equal(a->lhs.get(), b->lhs.get());
    default:
      return nodes_equal(a->lhs.get(), b->lhs.get()) && nodes_equal(a->rhs.get(), b->rhs.get());
  }
}

bool node_depends_on(const Node* n, int var) {
  if (n == nullptr) return false;
  if (n->op == Op::kVariable) return n->var == var;
  return node_depends_on(n->lhs.get(), var) || node_depends_on(n->rhs.get(), var);
}

void collect_params(const Node* n, std::set<std::string>& out) {
  if (n == nullptr) return;
  if (n->op == Op::kParameter) out.insert(n->name);
  collect_params(n->lhs.get(), out);
  collect_params(n->rhs.get(), out);
}

// Binding strength used by the printer: higher binds tighter.
int precedence(const Node& n) {
  switch (n.op) {
    case Op::kAdd:
    case Op::kSub:
      return 1;
    case Op::kMul:
    case Op::kDiv:
      return 2;
    case Op::kNeg:
      return 3;
    case Op::kPow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::kConstant:
      if (n.value < 0.0 || std::signbit(n.value)) {
        // The grammar has no negative literals; emit an equivalent form.
        out += "(0-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::kVariable:
      out += kVarNames[n.var];
      return;
    case Op::kParameter:
      out += n.name;
      return;
    case Op::kNeg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case Op::kPow:
      print_child(*n.lhs, precedence(*n.lhs) < 5, out);
      out += '^';
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv: {
      const int p = precedence(n);
      print_child(*n.lhs, precedence(*n.lhs) < p, out);
      static constexpr std::array<const char*, 4> kSym{" + ", " - ", "*", "/"};
      out += kSym[static_cast<int>(n.op) - static_cast<int>(Op::kAdd)];
      print_child(*n.rhs, precedence(*n.rhs) <= p, out);
      return;
    }
    default:
      for (const auto& f : kFunctions) {
        if (f.op == n.op) {
          out += f.name;
          print_child(*n.lhs, true, out);
          return;
        }
      }
  }
}

double lookup_param(const ParamList& params, const std::string& name) {
  for (const auto& p : params) {
    if (p.name == name) return p.value;
  }
  throw std::invalid_argument("unbound parameter '" + name + "'");
}

double eval_double(const Node& n, const Point4& x, const ParamList& params) {
  switch (n.op) {
    case Op::kConstant: return n.value;
    case Op::kVariable: return x[n.var];
    case Op::kParameter: return lookup_param(params, n.name);
    case Op::kNeg: return -eval_double(*n.lhs, x, params);
    case Op::kSqrt: return checked_sqrt(eval_double(*n.lhs, x, params));
    case Op::kSin: return std::sin(eval_double(*n.lhs, x, params));
    case Op::kCos: return std::cos(eval_double(*n.lhs, x, params));
    case Op::kExp: {
      const double v = std::exp(eval_double(*n.lhs, x, params));
      if (!std::isfinite(v)) throw DomainError("exp: overflow");
      return v;
    }
    case Op::kLn: return checked_log(eval_double(*n.lhs, x, params));
    case Op::kAdd: return eval_double(*n.lhs, x, params) + eval_double(*n.rhs, x, params);
    case Op::kSub: return eval_double(*n.lhs, x, params) - eval_double(*n.rhs, x, params);
    case Op::kMul: return eval_double(*n.lhs, x, params) * eval_double(*n.rhs, x, params);
    case Op::kDiv:
      return checked_div(eval_double(*n.lhs, x, params), eval_double(*n.rhs, x, params));
    case Op::kPow: return checked_pow(eval_double(*n.lhs, x, params), n.value);
  }
  throw std::logic_error("unhandled expression node");
}

Jet eval_node(const Node& n, const std::array<Jet, kJetVars>& x, const ParamList& params) {
  const auto lift = [&](double v) { return Jet(x[0].base(), x[0].order(), v); };
  switch (n.op) {
    case Op::kConstant: return lift(n.value);
    case Op::kVariable: return x[n.var];
    case Op::kParameter: return lift(lookup_param(params, n.name));
    case Op::kNeg: return -eval_node(*n.lhs, x, params);
    case Op::kSqrt: return sqrt(eval_node(*n.lhs, x, params));
    case Op::kSin: return sin(eval_node(*n.lhs, x, params));
    case Op::kCos: return cos(eval_node(*n.lhs, x, params));
    case Op::kExp: return exp(eval_node(*n.lhs, x, params));
    case Op::kLn: return log(eval_node(*n.lhs, x, params));
    case Op::kAdd: return eval_node(*n.lhs, x, params) + eval_node(*n.rhs, x, params);
    case Op::kSub: return eval_node(*n.lhs, x, params) - eval_node(*n.rhs, x, params);
    case Op::kMul: return eval_node(*n.lhs, x, params) * eval_node(*n.rhs, x, params);
    case Op::kDiv: {
      // Constant denominators skip the reciprocal series.
      if (n.rhs->op == Op::kConstant) {
        if (n.rhs->value == 0.0) throw DomainError("division by zero");
        return eval_node(*n.lhs, x, params) / n.rhs->value;
      }
      return eval_node(*n.lhs, x, params) / eval_node(*n.rhs, x, params);
    }
    case Op::kPow: {
      const Jet b = eval_node(*n.lhs, x, params);
      if (n.value == 2.0) return b * b;
      if (n.value == 1.0) return b;
      return pow(b, n.value);
    }
  }
  throw std::logic_error("unhandled expression node");
}

}  // namespace

std::string_view variable_name(int var) { return kVarNames.at(var); }

void validate_params(const ParamList& params) {
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (!is_identifier(p.name)) throw std::invalid_argument("invalid parameter name '" + p.name + "'");
    if (is_reserved(p.name)) throw std::invalid_argument("parameter name '" + p.name + "' is reserved");
    if (!seen.insert(p.name).second) {
      throw std::invalid_argument("duplicate parameter '" + p.name + "'");
    }
    if (!std::isfinite(p.value)) {
      throw std::invalid_argument("parameter '" + p.name + "' is not finite");
    }
  }
}

std::vector<std::string> param_names(const ParamList& params) {
  std::vector<std::string> names;
  for (const auto& p : params) names.push_back(p.name);
  return names;
}

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConstant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(int var) {
  if (var < 0 || var >= kJetVars) throw std::invalid_argument("variable index out of range");
  auto n = std::make_shared<Node>();
  n->op = Op::kVariable;
  n->var = var;
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::kParameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = arg.node();
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, const Expr& lhs, const Expr& rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = lhs.node();
  n->rhs = rhs.node();
  return Expr(std::move(n));
}

Expr Expr::power(const Expr& base, double exponent) {
  if (!std::isfinite(exponent)) throw std::invalid_argument("non-finite exponent");
  auto n = std::make_shared<Node>();
  n->op = Op::kPow;
  n->value = exponent;
  n->lhs = base.node();
  return Expr(std::move(n));
}

const Node& Expr::root() const {
  if (!root_) throw std::logic_error("empty expression");
  return *root_;
}

bool Expr::depends_on(int var) const { return node_depends_on(root_.get(), var); }

std::vector<std::string> Expr::parameters() const {
  std::set<std::string> names;
  collect_params(root_.get(), names);
  return {names.begin(), names.end()};
}

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(a.root_.get(), b.root_.get()); }

Expr parse(std::string_view source, const std::vector<std::string>& parameters) {
  return Parser(source, parameters).parse_all();
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

double evaluate(const Expr& e, const Point4& point, const ParamList& params) {
  return eval_double(e.root(), point, params);
}

Jet eval_jet(const Expr& e, const std::array<Jet, kJetVars>& vars, const ParamList& params) {
  for (const auto& v : vars) {
    if (v.empty()) throw std::invalid_argument("eval_jet: unbound variable jet");
    if (v.base() != vars[0].base() || v.order() != vars[0].order()) {
      throw std::invalid_argument("eval_jet: variable jets differ in base point or order");
    }
  }
  return eval_node(e.root(), vars, params);
}

Jet eval_jet(const Expr& e, const Point4& point, int order, const ParamList& params) {
  std::array<Jet, kJetVars> vars;
  for (int v = 0; v < kJetVars; ++v) vars[v] = Jet::variable(v, point, order);
  return eval_node(e.root(), vars, params);
}

}  // namespace anicon
