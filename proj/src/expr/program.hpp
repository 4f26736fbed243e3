#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "expr/ast.hpp"

namespace srmin::expr {

/* A batch of expressions flattened into one instruction tape with common
   subexpressions shared. Each instruction performs exactly the operation
   the corresponding tree node would, so results are bit-identical to
   evaluate() and the same EvalErrors are raised. Intended for hot loops
   that evaluate the same expression set at many points. */
class Program {
public:
  Program() = default;
  explicit Program(std::span<const ExprPtr> outputs);

  std::size_t output_count() const { return outputs_.size(); }
  std::size_t scratch_size() const { return code_.size(); }

  /* Evaluate all outputs at `point`. `scratch` must have scratch_size()
     elements; reusing one buffer across calls avoids allocation. */
  void evaluate(std::span<const double> point, std::span<double> out,
                std::span<double> scratch) const;

  // Convenience variant that allocates its own scratch space.
  std::vector<double> evaluate(std::span<const double> point) const;

private:
  struct Instr {
    Op op;
    int a = -1;       // operand slots
    int b = -1;
    double value = 0.0;
    int coord = -1;
  };

  int intern(const ExprPtr& e);

  std::vector<Instr> code_;
  std::vector<ExprPtr> origin_;  // node behind each slot, for error reports
  std::vector<int> outputs_;

  // transient construction state, null outside the constructor
  std::unordered_map<const Node*, int>* by_node_ = nullptr;
  void* by_key_ = nullptr;
};

}  // namespace srmin::expr
