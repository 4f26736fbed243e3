#pragma once

#include <string_view>

#include "expr/ast.hpp"
#include "expr/chart.hpp"

namespace srmin::expr {

/* Raised on malformed input: syntax errors, unknown identifiers, wrong
   function arity, non-constant power exponents. `offset` is the byte
   position in the source string where the problem starts. */
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/* Parse an infix expression over the chart's coordinate names.

   Grammar (binding from loosest to tightest): + -, * /, unary -, ^,
   then atoms: numbers, coordinates, pi, e, f(arg) for f in
   {sin, cos, tan, exp, log, sqrt, atan}, and parenthesized expressions.
   Power exponents must be constant expressions. Chart names shadow the
   built-in constants pi and e. */
ExprPtr parse_expression(std::string_view src, const Chart& chart);

}  // namespace srmin::expr
