#include "core/presets.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace srmin {

using expr::constant;
using expr::coordinate;
using expr::ExprPtr;

std::shared_ptr<const SRStructure> heisenberg_structure(int m) {
  if (m < 1 || m > 16) throw std::invalid_argument("heisenberg: m must be in [1, 16]");
  const int n = 2 * m + 1;

  std::vector<std::string> names;
  if (m == 1) {
    names = {"x", "y", "z"};
  } else {
    for (int i = 1; i <= 2 * m; ++i) names.push_back("x" + std::to_string(i));
    names.push_back("t");
  }
  expr::Chart chart(names);

  auto zero = constant(0.0);
  std::vector<VectorFieldExpr> frame(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < 2 * m; ++i) {
    auto& f = frame[static_cast<std::size_t>(i)];
    f.components.assign(static_cast<std::size_t>(n), zero);
    f.components[static_cast<std::size_t>(i)] = constant(1.0);
    const int partner = (i < m) ? i + m : i - m;
    ExprPtr half = expr::div(coordinate(partner), constant(2.0));
    f.components[static_cast<std::size_t>(n - 1)] = (i < m) ? half : expr::neg(half);
  }
  return SRStructure::build(std::move(chart), std::move(frame));
}

std::shared_ptr<const SRStructure> rototranslation_structure() {
  expr::Chart chart({"x", "y", "z"});
  auto zero = constant(0.0);

  VectorFieldExpr x1;
  x1.components = {expr::unary(expr::Op::Cos, coordinate(2)),
                   expr::unary(expr::Op::Sin, coordinate(2)), zero};
  VectorFieldExpr x2;
  x2.components = {zero, zero, constant(1.0)};

  return SRStructure::build(std::move(chart), {std::move(x1), std::move(x2)});
}

}  // namespace srmin
