#include "expr/program.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

namespace srmin::expr {

namespace {

struct SlotKey {
  Op op;
  int a;
  int b;
  std::uint64_t value_bits;
  int coord;

  bool operator==(const SlotKey&) const = default;
};

struct SlotKeyHash {
  std::size_t operator()(const SlotKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.op);
    auto mix = [&h](std::size_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::size_t>(k.a) + 1);
    mix(static_cast<std::size_t>(k.b) + 1);
    mix(static_cast<std::size_t>(k.value_bits));
    mix(static_cast<std::size_t>(k.coord) + 1);
    return h;
  }
};

}  // namespace

int Program::intern(const ExprPtr& e) {
  if (auto it = by_node_->find(e.get()); it != by_node_->end())
    return it->second;

  Instr ins;
  ins.op = e->op();
  switch (ins.op) {
    case Op::Constant:
      ins.value = e->value();
      break;
    case Op::Coord:
      ins.coord = e->coord();
      break;
    default:
      ins.a = intern(e->lhs());
      if (is_binary(ins.op)) ins.b = intern(e->rhs());
      break;
  }

  SlotKey key{ins.op, ins.a, ins.b,
              ins.op == Op::Constant ? std::bit_cast<std::uint64_t>(ins.value) : 0,
              ins.coord};
  auto* by_key = static_cast<std::unordered_map<SlotKey, int, SlotKeyHash>*>(by_key_);
  if (auto it = by_key->find(key); it != by_key->end()) {
    by_node_->emplace(e.get(), it->second);
    return it->second;
  }
  int slot = static_cast<int>(code_.size());
  code_.push_back(ins);
  origin_.push_back(e);
  by_key->emplace(key, slot);
  by_node_->emplace(e.get(), slot);
  return slot;
}

Program::Program(std::span<const ExprPtr> outputs) {
  std::unordered_map<const Node*, int> by_node;
  std::unordered_map<SlotKey, int, SlotKeyHash> by_key;
  by_node_ = &by_node;
  by_key_ = &by_key;
  outputs_.reserve(outputs.size());
  for (const ExprPtr& e : outputs) {
    if (!e) throw std::invalid_argument("Program: null output expression");
    outputs_.push_back(intern(e));
  }
  by_node_ = nullptr;
  by_key_ = nullptr;
}

void Program::evaluate(std::span<const double> point, std::span<double> out,
                       std::span<double> scratch) const {
  if (out.size() != outputs_.size())
    throw std::invalid_argument("Program: output span has wrong size");
  if (scratch.size() < code_.size())
    throw std::invalid_argument("Program: scratch buffer too small");

  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double r;
    switch (ins.op) {
      case Op::Constant:
        r = ins.value;
        break;
      case Op::Coord:
        if (ins.coord < 0 || static_cast<std::size_t>(ins.coord) >= point.size())
          throw std::invalid_argument("Program: point has too few components");
        r = point[static_cast<std::size_t>(ins.coord)];
        break;
      case Op::Neg: r = -scratch[ins.a]; break;
      case Op::Sin: r = std::sin(scratch[ins.a]); break;
      case Op::Cos: r = std::cos(scratch[ins.a]); break;
      case Op::Tan: r = std::tan(scratch[ins.a]); break;
      case Op::Exp: r = std::exp(scratch[ins.a]); break;
      case Op::Atan: r = std::atan(scratch[ins.a]); break;
      case Op::Log: {
        double x = scratch[ins.a];
        if (x <= 0.0)
          throw EvalError("log of non-positive argument in '" + to_string(origin_[i]) + "'",
                          origin_[i]);
        r = std::log(x);
        break;
      }
      case Op::Sqrt: {
        double x = scratch[ins.a];
        if (x < 0.0)
          throw EvalError("sqrt of negative argument in '" + to_string(origin_[i]) + "'",
                          origin_[i]);
        r = std::sqrt(x);
        break;
      }
      case Op::Add: r = scratch[ins.a] + scratch[ins.b]; break;
      case Op::Sub: r = scratch[ins.a] - scratch[ins.b]; break;
      case Op::Mul: r = scratch[ins.a] * scratch[ins.b]; break;
      case Op::Div: {
        double d = scratch[ins.b];
        if (d == 0.0)
          throw EvalError("division by zero in '" + to_string(origin_[i]) + "'", origin_[i]);
        r = scratch[ins.a] / d;
        break;
      }
      case Op::Pow: {
        double a = scratch[ins.a];
        double b = scratch[ins.b];
        if (a < 0.0 && b != std::floor(b))
          throw EvalError("fractional power of negative base in '" + to_string(origin_[i]) + "'",
                          origin_[i]);
        if (a == 0.0 && b < 0.0)
          throw EvalError("zero raised to negative power in '" + to_string(origin_[i]) + "'",
                          origin_[i]);
        r = std::pow(a, b);
        break;
      }
      default:
        throw std::logic_error("Program: unreachable");
    }
    scratch[i] = r;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k)
    out[k] = scratch[static_cast<std::size_t>(outputs_[k])];
}

std::vector<double> Program::evaluate(std::span<const double> point) const {
  std::vector<double> scratch(scratch_size());
  std::vector<double> out(outputs_.size());
  evaluate(point, out, scratch);
  return out;
}

}  // namespace srmin::expr
