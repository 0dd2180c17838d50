#pragma once

// Scalar expression language for metric components and test functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | coordinate | function '(' expr ')' | '(' expr ')'
//
// Functions: sin cos exp ln sqrt abs. The exponent of '^' must not depend on
// any coordinate. There is no implicit multiplication.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "projeq/jet.hpp"

namespace projeq::expr {

enum class NodeKind { kConstant, kVariable, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };
enum class Function { kSin, kCos, kExp, kLn, kSqrt, kAbs };

struct Node {
  NodeKind kind;
  std::size_t offset = 0;  // byte offset of the node's operator or token
  double value = 0.0;      // kConstant
  int variable = -1;       // kVariable: position in the coordinate list
  Function function = Function::kSin;
  std::shared_ptr<const Node> lhs;  // unary operand, call argument, or left
  std::shared_ptr<const Node> rhs;
};

const char* function_name(Function f);
/// True for the reserved function names.
bool is_function_name(std::string_view name);

class Expression {
 public:
  Expression(std::shared_ptr<const Node> root, std::vector<std::string> coordinates);

  const Node& root() const { return *root_; }
  const std::vector<std::string>& coordinates() const { return coordinates_; }

  /// Evaluates with coordinate values given in coordinate-list order.
  double eval(std::span<const double> values) const;
  Jet eval(std::span<const Jet> values) const;

  /// Minimal-parenthesis rendering that re-parses to an identical tree.
  std::string to_string() const;

  /// Structural equality (ignores source offsets).
  bool same_tree(const Expression& other) const;

 private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> coordinates_;
};

/// Parses `text`. Identifiers must be coordinates or function names.
/// Throws ParseError with a byte offset.
Expression parse(std::string_view text, const std::vector<std::string>& coordinates);

/// Convenience: seeds the coordinates at `point` and evaluates to `order`.
Jet eval_jet(const Expression& e, std::span<const double> point, int order);

}  // namespace projeq::expr
