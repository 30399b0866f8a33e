// Small arithmetic expression language over (x, y) plus named parameters.
// Carries the symbolic forms of vector fields and first integrals; supports
// exact differentiation so Jacobians and second-derivative tests are not
// contaminated by finite-difference noise.
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace isl {

enum class ExprKind { Const, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Call };

// Built-in unary functions. Sign is internal: it appears only in derivatives
// of abs and evaluates to +/-1 (error at 0, where abs is not smooth).
enum class Func { Sin, Cos, Exp, Log, Sqrt, Atan, Abs, Sign };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  double value = 0.0;       // Const
  int var = 0;              // Var: 0 = x, 1 = y
  std::string name;         // Param
  Func func = Func::Sin;    // Call
  Expr a, b;                // operands

  ExprNode(ExprKind k) : kind(k) {}
};

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg), offset(off) {}
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

using ParamMap = std::map<std::string, double>;

Expr parse(const std::string& source);
std::string print(const Expr& e);

// Structural equality (same tree shape, same leaves).
bool equal(const Expr& a, const Expr& b);

// point = (x, y); params must bind every free parameter ("pi" is implicit).
double eval(const Expr& e, double x, double y, const ParamMap& params);

// Exact derivative with respect to x (var = 0) or y (var = 1).
Expr differentiate(const Expr& e, int var);

// Substitutes numeric values for all parameters, folding constants.
Expr bind_params(const Expr& e, const ParamMap& params);

// Free parameter names (excluding x, y).
std::vector<std::string> free_params(const Expr& e);

// Replaces every occurrence of variable var (0 = x, 1 = y) with repl.
Expr substitute(const Expr& e, int var, const Expr& repl);

// Replaces named parameters by expressions (simultaneous substitution).
Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& repl);

// Node constructors with light constant folding; used by differentiate and
// by tests that build ASTs directly.
namespace ast {
Expr constant(double v);
Expr var_x();
Expr var_y();
Expr param(const std::string& name);
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr a, Expr b);
Expr call(Func f, Expr a);
}  // namespace ast

}  // namespace isl
