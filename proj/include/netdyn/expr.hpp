#pragma once

// A small arithmetic language for node dynamics.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | 'x[' int ']' | 'u[' int '][' int ']' | 'p["' name '"]'
//           | func '(' expr ')' | '(' expr ')' | '-' atom
//
// x[i] is coordinate i of the node's own state, u[s][i] is coordinate i of
// input slot s, p["k"] is a named parameter. '^' is right-associative.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netdyn/graph.hpp"

namespace netdyn {

using Vector = std::vector<double>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Tan, Tanh, Exp, Log, Sqrt, Abs };

namespace ast {

struct Number {
  double value;
};
struct SelfVar {
  std::size_t index;
};
struct InputVar {
  std::size_t slot;
  std::size_t index;
};
struct Param {
  std::string name;
};
struct Neg {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Func func;
  ExprPtr arg;
};

}  // namespace ast

struct Expr {
  std::variant<ast::Number, ast::SelfVar, ast::InputVar, ast::Param, ast::Neg, ast::Binary,
               ast::Call>
      node;
};

// Construction helpers.
ExprPtr number(double v);
ExprPtr self_var(std::size_t i);
ExprPtr input_var(std::size_t slot, std::size_t i);
ExprPtr param(std::string name);
ExprPtr neg(ExprPtr e);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr call(Func f, ExprPtr arg);

/// Structural equality. Literals compare by value.
bool structurally_equal(const Expr& a, const Expr& b);

std::string_view func_name(Func f);

/// Throws SyntaxError with the byte offset and the expected-token set.
ExprPtr parse(std::string_view text);

/// Fully parenthesized canonical text; parse(print(e)) is structurally e.
std::string print(const Expr& e);

using ParameterValues = std::map<std::string, double>;

/// Domain shape of an open system: own dimension, one dimension per input
/// slot, and parameter values.
struct SystemSignature {
  std::size_t self_dim = 1;
  std::vector<std::size_t> input_dims;
  ParameterValues parameters;

  std::size_t slot_count() const noexcept { return input_dims.size(); }

  friend bool operator==(const SystemSignature&, const SystemSignature&) = default;
};

/// Reports out-of-range x[i], u[s][i] and undeclared parameters.
Violations validate(const Expr& e, const SystemSignature& sig);

/// IEEE double evaluation. Throws ShapeMismatchError if an index is out of
/// range or a parameter is missing; never throws for NaN/inf.
double eval(const Expr& e, std::span<const double> self, std::span<const Vector> inputs,
            const ParameterValues& params);

/// Highest slot index referenced plus one (0 if no inputs are read).
std::size_t referenced_slots(const Expr& e);

/// Rewrites every u[s][i] into u[slot_map[s]][i]. Used only at the file
/// boundary to bring slot bindings back to canonical order.
ExprPtr remap_slots(const ExprPtr& e, std::span<const std::size_t> slot_map);

}  // namespace netdyn
