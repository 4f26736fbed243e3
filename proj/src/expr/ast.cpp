#include "expr/ast.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace srmin::expr {

bool is_unary(Op op) {
  switch (op) {
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Tan:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Atan:
      return true;
    default:
      return false;
  }
}

bool is_binary(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
      return true;
    default:
      return false;
  }
}

ExprPtr constant(double v) {
  if (!std::isfinite(v))
    throw std::invalid_argument("expression constant must be finite");
  return std::make_shared<Node>(Op::Constant, v, -1, nullptr, nullptr);
}

ExprPtr coordinate(int index) {
  if (index < 0) throw std::invalid_argument("coordinate index must be >= 0");
  return std::make_shared<Node>(Op::Coord, 0.0, index, nullptr, nullptr);
}

namespace {

double apply_unary_value(Op op, double x) {
  switch (op) {
    case Op::Neg: return -x;
    case Op::Sin: return std::sin(x);
    case Op::Cos: return std::cos(x);
    case Op::Tan: return std::tan(x);
    case Op::Exp: return std::exp(x);
    case Op::Log: return std::log(x);
    case Op::Sqrt: return std::sqrt(x);
    case Op::Atan: return std::atan(x);
    default: throw std::logic_error("apply_unary_value: not unary");
  }
}

double apply_binary_value(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return std::pow(a, b);
    default: throw std::logic_error("apply_binary_value: not binary");
  }
}

}  // namespace

ExprPtr unary(Op op, ExprPtr a) {
  if (!is_unary(op)) throw std::invalid_argument("unary: bad op");
  if (!a) throw std::invalid_argument("unary: null operand");
  if (a->is_constant()) {
    double v = apply_unary_value(op, a->value());
    if (std::isfinite(v)) return constant(v);
    // Out-of-domain constant: keep the node so evaluation reports it.
  }
  return std::make_shared<Node>(op, 0.0, -1, std::move(a), nullptr);
}

ExprPtr binary(Op op, ExprPtr a, ExprPtr b) {
  if (!is_binary(op)) throw std::invalid_argument("binary: bad op");
  if (!a || !b) throw std::invalid_argument("binary: null operand");
  if (op == Op::Pow && !b->is_constant())
    throw std::invalid_argument("power exponent must be a constant");
  if (a->is_constant() && b->is_constant()) {
    double v = apply_binary_value(op, a->value(), b->value());
    if (std::isfinite(v)) return constant(v);
    return std::make_shared<Node>(op, 0.0, -1, std::move(a), std::move(b));
  }
  switch (op) {
    case Op::Add:
      if (a->is_constant(0.0)) return b;
      if (b->is_constant(0.0)) return a;
      break;
    case Op::Sub:
      if (b->is_constant(0.0)) return a;
      if (a->is_constant(0.0)) return unary(Op::Neg, std::move(b));
      break;
    case Op::Mul:
      if (a->is_constant(0.0) || b->is_constant(0.0)) return constant(0.0);
      if (a->is_constant(1.0)) return b;
      if (b->is_constant(1.0)) return a;
      break;
    case Op::Div:
      if (b->is_constant(1.0)) return a;
      break;
    case Op::Pow:
      if (b->is_constant(1.0)) return a;
      if (b->is_constant(0.0)) return constant(1.0);
      break;
    default:
      break;
  }
  return std::make_shared<Node>(op, 0.0, -1, std::move(a), std::move(b));
}

ExprPtr neg(ExprPtr a) { return unary(Op::Neg, std::move(a)); }
ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Op::Add, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
ExprPtr div(ExprPtr a, ExprPtr b) { return binary(Op::Div, std::move(a), std::move(b)); }
ExprPtr pow(ExprPtr base, double exponent) {
  return binary(Op::Pow, std::move(base), constant(exponent));
}

namespace {

double eval_rec(const ExprPtr& e, std::span<const double> p) {
  const Node& n = *e;
  switch (n.op()) {
    case Op::Constant:
      return n.value();
    case Op::Coord: {
      int i = n.coord();
      if (i < 0 || static_cast<std::size_t>(i) >= p.size())
        throw std::invalid_argument("evaluate: point has too few components");
      return p[static_cast<std::size_t>(i)];
    }
    case Op::Neg: return -eval_rec(n.lhs(), p);
    case Op::Sin: return std::sin(eval_rec(n.lhs(), p));
    case Op::Cos: return std::cos(eval_rec(n.lhs(), p));
    case Op::Tan: return std::tan(eval_rec(n.lhs(), p));
    case Op::Exp: return std::exp(eval_rec(n.lhs(), p));
    case Op::Atan: return std::atan(eval_rec(n.lhs(), p));
    case Op::Log: {
      double x = eval_rec(n.lhs(), p);
      if (x <= 0.0)
        throw EvalError("log of non-positive argument in '" + to_string(e) + "'", e);
      return std::log(x);
    }
    case Op::Sqrt: {
      double x = eval_rec(n.lhs(), p);
      if (x < 0.0)
        throw EvalError("sqrt of negative argument in '" + to_string(e) + "'", e);
      return std::sqrt(x);
    }
    case Op::Add: return eval_rec(n.lhs(), p) + eval_rec(n.rhs(), p);
    case Op::Sub: return eval_rec(n.lhs(), p) - eval_rec(n.rhs(), p);
    case Op::Mul: return eval_rec(n.lhs(), p) * eval_rec(n.rhs(), p);
    case Op::Div: {
      double a = eval_rec(n.lhs(), p);
      double b = eval_rec(n.rhs(), p);
      if (b == 0.0)
        throw EvalError("division by zero in '" + to_string(e) + "'", e);
      return a / b;
    }
    case Op::Pow: {
      double a = eval_rec(n.lhs(), p);
      double b = n.rhs()->value();
      if (a < 0.0 && b != std::floor(b))
        throw EvalError("fractional power of negative base in '" + to_string(e) + "'", e);
      if (a == 0.0 && b < 0.0)
        throw EvalError("zero raised to negative power in '" + to_string(e) + "'", e);
      return std::pow(a, b);
    }
  }
  throw std::logic_error("evaluate: unreachable");
}

}  // namespace

double evaluate(const ExprPtr& e, std::span<const double> point) {
  if (!e) throw std::invalid_argument("evaluate: null expression");
  return eval_rec(e, point);
}

ExprPtr differentiate(const ExprPtr& e, int coord) {
  if (!e) throw std::invalid_argument("differentiate: null expression");
  const Node& n = *e;
  switch (n.op()) {
    case Op::Constant:
      return constant(0.0);
    case Op::Coord:
      return constant(n.coord() == coord ? 1.0 : 0.0);
    case Op::Neg:
      return neg(differentiate(n.lhs(), coord));
    case Op::Sin:
      return mul(unary(Op::Cos, n.lhs()), differentiate(n.lhs(), coord));
    case Op::Cos:
      return neg(mul(unary(Op::Sin, n.lhs()), differentiate(n.lhs(), coord)));
    case Op::Tan:
      // d tan(u) = (1 + tan(u)^2) du
      return mul(add(constant(1.0), pow(unary(Op::Tan, n.lhs()), 2.0)),
                 differentiate(n.lhs(), coord));
    case Op::Exp:
      return mul(unary(Op::Exp, n.lhs()), differentiate(n.lhs(), coord));
    case Op::Log:
      return div(differentiate(n.lhs(), coord), n.lhs());
    case Op::Sqrt:
      return div(differentiate(n.lhs(), coord),
                 mul(constant(2.0), unary(Op::Sqrt, n.lhs())));
    case Op::Atan:
      return div(differentiate(n.lhs(), coord),
                 add(constant(1.0), pow(n.lhs(), 2.0)));
    case Op::Add:
      return add(differentiate(n.lhs(), coord), differentiate(n.rhs(), coord));
    case Op::Sub:
      return sub(differentiate(n.lhs(), coord), differentiate(n.rhs(), coord));
    case Op::Mul:
      return add(mul(differentiate(n.lhs(), coord), n.rhs()),
                 mul(n.lhs(), differentiate(n.rhs(), coord)));
    case Op::Div:
      // (u/v)' = (u'v - uv') / v^2
      return div(sub(mul(differentiate(n.lhs(), coord), n.rhs()),
                     mul(n.lhs(), differentiate(n.rhs(), coord))),
                 pow(n.rhs(), 2.0));
    case Op::Pow: {
      double c = n.rhs()->value();
      return mul(mul(constant(c), pow(n.lhs(), c - 1.0)),
                 differentiate(n.lhs(), coord));
    }
  }
  throw std::logic_error("differentiate: unreachable");
}

bool depends_on_coords(const ExprPtr& e) {
  if (!e) return false;
  if (e->op() == Op::Coord) return true;
  return depends_on_coords(e->lhs()) || depends_on_coords(e->rhs());
}

int max_coord(const ExprPtr& e) {
  if (!e) return -1;
  int m = e->op() == Op::Coord ? e->coord() : -1;
  return std::max({m, max_coord(e->lhs()), max_coord(e->rhs())});
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

/* Precedence used for minimal parenthesization. Higher binds tighter.
   Matches the grammar: ^ above unary minus above * and / above + and -. */
int precedence(const Node& n) {
  switch (n.op()) {
    case Op::Add:
    case Op::Sub: return 10;
    case Op::Mul:
    case Op::Div: return 20;
    case Op::Neg: return 30;
    case Op::Pow: return 40;
    case Op::Constant:
      return n.value() < 0.0 || std::signbit(n.value()) ? 30 : 50;
    default: return 50;
  }
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Atan: return "atan";
    default: return nullptr;
  }
}

void print_rec(const ExprPtr& e, const Chart* chart, std::string& out);

void print_child(const ExprPtr& child, const Chart* chart, int min_prec,
                 std::string& out) {
  bool parens = precedence(*child) < min_prec;
  if (parens) out += '(';
  print_rec(child, chart, out);
  if (parens) out += ')';
}

void print_rec(const ExprPtr& e, const Chart* chart, std::string& out) {
  const Node& n = *e;
  switch (n.op()) {
    case Op::Constant:
      out += format_double(n.value());
      return;
    case Op::Coord: {
      int i = n.coord();
      if (chart) {
        if (static_cast<std::size_t>(i) >= chart->dim())
          throw std::invalid_argument("to_string: coordinate not in chart");
        out += chart->name(static_cast<std::size_t>(i));
      } else {
        out += 'q';
        out += std::to_string(i);
      }
      return;
    }
    case Op::Neg:
      out += '-';
      print_child(n.lhs(), chart, 30, out);
      return;
    case Op::Add:
      print_child(n.lhs(), chart, 10, out);
      out += " + ";
      print_child(n.rhs(), chart, 11, out);
      return;
    case Op::Sub:
      print_child(n.lhs(), chart, 10, out);
      out += " - ";
      print_child(n.rhs(), chart, 11, out);
      return;
    case Op::Mul:
      print_child(n.lhs(), chart, 20, out);
      out += '*';
      print_child(n.rhs(), chart, 21, out);
      return;
    case Op::Div:
      print_child(n.lhs(), chart, 20, out);
      out += '/';
      print_child(n.rhs(), chart, 21, out);
      return;
    case Op::Pow:
      print_child(n.lhs(), chart, 41, out);
      out += '^';
      print_child(n.rhs(), chart, 30, out);
      return;
    default: {
      const char* f = function_name(n.op());
      if (!f) throw std::logic_error("to_string: unreachable");
      out += f;
      out += '(';
      print_rec(n.lhs(), chart, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const ExprPtr& e, const Chart& chart) {
  if (!e) throw std::invalid_argument("to_string: null expression");
  std::string out;
  print_rec(e, &chart, out);
  return out;
}

std::string to_string(const ExprPtr& e) {
  if (!e) throw std::invalid_argument("to_string: null expression");
  std::string out;
  print_rec(e, nullptr, out);
  return out;
}

}  // namespace srmin::expr
