#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "expr/chart.hpp"

namespace srmin::expr {

enum class Op : std::uint8_t {
  Constant,
  Coord,
  // unary
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Atan,
  // binary
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent restricted to a constant
};

bool is_unary(Op op);
bool is_binary(Op op);

class Node;
using ExprPtr = std::shared_ptr<const Node>;

/* Immutable expression node. Construction goes through the factory
   functions below, which apply conservative constant folding; a node is
   never mutated after creation, so subtrees may be shared freely. */
class Node {
public:
  Node(Op op, double value, int coord, ExprPtr lhs, ExprPtr rhs)
      : op_(op), value_(value), coord_(coord),
        lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

  Op op() const { return op_; }
  double value() const { return value_; }   // Constant only
  int coord() const { return coord_; }      // Coord only
  const ExprPtr& lhs() const { return lhs_; }
  const ExprPtr& rhs() const { return rhs_; }

  bool is_constant() const { return op_ == Op::Constant; }
  bool is_constant(double v) const { return op_ == Op::Constant && value_ == v; }

private:
  Op op_;
  double value_ = 0.0;
  int coord_ = -1;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

/* Raised when evaluation hits a domain violation (division by zero, log or
   sqrt of a non-positive/negative argument, fractional power of a negative
   base). Carries the offending subexpression. */
class EvalError : public std::runtime_error {
public:
  EvalError(const std::string& what, ExprPtr subexpr)
      : std::runtime_error(what), subexpr_(std::move(subexpr)) {}
  const ExprPtr& subexpr() const { return subexpr_; }

private:
  ExprPtr subexpr_;
};

// -- factories (with folding: c?c -> c when finite, 0*e -> 0, e+0 -> e,
//    1*e -> e, e/1 -> e, e^1 -> e, e^0 -> 1, f(c) -> c when finite) --
ExprPtr constant(double v);
ExprPtr coordinate(int index);
ExprPtr unary(Op op, ExprPtr a);
ExprPtr binary(Op op, ExprPtr a, ExprPtr b);

ExprPtr neg(ExprPtr a);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr base, double exponent);

/* Evaluate at a point (length >= highest referenced coordinate + 1).
   Deterministic: the same tree and point always produce the same bits.
   Throws EvalError on domain violations. */
double evaluate(const ExprPtr& e, std::span<const double> point);

// Exact partial derivative with respect to coordinate `coord`.
ExprPtr differentiate(const ExprPtr& e, int coord);

// True if any Coord node appears in the tree.
bool depends_on_coords(const ExprPtr& e);

// Highest coordinate index referenced, or -1 for closed expressions.
int max_coord(const ExprPtr& e);

/* Render with minimal parentheses. The output reparses (over the same
   chart) to an identical tree. Nodes referencing coordinates outside the
   chart are rejected. */
std::string to_string(const ExprPtr& e, const Chart& chart);

// As above with placeholder names q0, q1, ... (used in error messages).
std::string to_string(const ExprPtr& e);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace srmin::expr
