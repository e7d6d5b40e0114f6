#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace gas::expr {

// Scalar expression mini-language used by scenario files. Grammar (LL(1)):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, binds
//                                            tighter than unary minus
//   primary := number | ident | func '(' expr ')' | '(' expr ')'
// Identifiers: m1..m3, x1..x3, t, pi. Functions: sin cos exp tanh sqrt log.

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double number = 0.0;      // Number
  std::string name;         // Var, Call
  NodePtr a, b;             // operands
};

/// Thrown on any syntax or validation problem; column is 1-based.
struct ParseError : std::runtime_error {
  int column;
  ParseError(const std::string& what, int col)
      : std::runtime_error(what), column(col) {}
};

NodePtr parse_expr(const std::string& text);

/// Variable bindings: m1..m3, x1..x3, t; pi is built in.
struct Bindings {
  std::array<double, 3> m{0, 0, 0};
  std::array<double, 3> x{0, 0, 0};
  double t = 0.0;
};

double eval(const NodePtr& e, const Bindings& b);

/// Exact symbolic partial derivative with respect to a variable name
/// ("m1", "x2", "t", ...).
NodePtr differentiate(const NodePtr& e, const std::string& var);

/// Names of the variables the expression references (excluding pi).
std::vector<std::string> free_variables(const NodePtr& e);

}  // namespace gas::expr
