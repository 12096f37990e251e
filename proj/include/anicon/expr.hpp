#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anicon/jet.hpp"

namespace anicon {

/// Variable slots, shared with the jet variable indices.
enum Var : int { kX1 = 0, kX2 = 1, kY1 = 2, kY2 = 3 };

std::string_view variable_name(int var);

struct ParamBinding {
  std::string name;
  double value = 0.0;
};

using ParamList = std::vector<ParamBinding>;

/// Throws std::invalid_argument on duplicate or malformed names, clashes
/// with reserved words, or non-finite values.
void validate_params(const ParamList& params);

std::vector<std::string> param_names(const ParamList& params);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

enum class Op {
  kConstant,
  kVariable,
  kParameter,
  kNeg,
  kSqrt,
  kSin,
  kCos,
  kExp,
  kLn,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
};

struct Node {
  Op op = Op::kConstant;
  double value = 0.0;  // constant value, or exponent for kPow
  int var = -1;        // kVariable
  std::string name;    // kParameter
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree in the variables x1, x2, y1, y2 and named
/// parameters. Copies share structure.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double v);
  static Expr variable(int var);
  static Expr parameter(std::string name);
  static Expr unary(Op op, const Expr& arg);
  static Expr binary(Op op, const Expr& lhs, const Expr& rhs);
  static Expr power(const Expr& base, double exponent);

  bool empty() const noexcept { return root_ == nullptr; }
  const Node& root() const;
  const NodePtr& node() const noexcept { return root_; }

  bool depends_on(int var) const;
  std::vector<std::string> parameters() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
};

/// Parses `source`. Identifiers other than the four variables, `pi` and
/// the function names must appear in `parameters`.
Expr parse(std::string_view source, const std::vector<std::string>& parameters = {});

/// Text form that parses back to a structurally equal tree.
std::string print(const Expr& e);

double evaluate(const Expr& e, const Point4& point, const ParamList& params = {});

/// Composite jet of `e` with the given variable jets substituted.
Jet eval_jet(const Expr& e, const std::array<Jet, kJetVars>& vars, const ParamList& params = {});

/// Seeds the four coordinate jets at `point` and evaluates.
Jet eval_jet(const Expr& e, const Point4& point, int order, const ParamList& params = {});

}  // namespace anicon
