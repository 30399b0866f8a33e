#include "isl/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace isl {

namespace ast {

namespace {
Expr make(ExprKind k) { return std::make_shared<ExprNode>(k); }

bool is_const(const Expr& e, double v) {
  return e->kind == ExprKind::Const && e->value == v;
}
}  // namespace

Expr constant(double v) {
  auto n = std::make_shared<ExprNode>(ExprKind::Const);
  n->value = v;
  return n;
}

Expr var_x() {
  auto n = std::make_shared<ExprNode>(ExprKind::Var);
  n->var = 0;
  return n;
}

Expr var_y() {
  auto n = std::make_shared<ExprNode>(ExprKind::Var);
  n->var = 1;
  return n;
}

Expr param(const std::string& name) {
  auto n = std::make_shared<ExprNode>(ExprKind::Param);
  n->name = name;
  return n;
}

Expr neg(Expr a) {
  if (a->kind == ExprKind::Const) return constant(-a->value);
  if (a->kind == ExprKind::Neg) return a->a;
  auto n = std::make_shared<ExprNode>(ExprKind::Neg);
  n->a = std::move(a);
  return n;
}

Expr add(Expr a, Expr b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (a->kind == ExprKind::Const && b->kind == ExprKind::Const)
    return constant(a->value + b->value);
  auto n = std::make_shared<ExprNode>(ExprKind::Add);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr sub(Expr a, Expr b) {
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return neg(b);
  if (a->kind == ExprKind::Const && b->kind == ExprKind::Const)
    return constant(a->value - b->value);
  auto n = std::make_shared<ExprNode>(ExprKind::Sub);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr mul(Expr a, Expr b) {
  if (is_const(a, 0) || is_const(b, 0)) return constant(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (a->kind == ExprKind::Const && b->kind == ExprKind::Const)
    return constant(a->value * b->value);
  auto n = std::make_shared<ExprNode>(ExprKind::Mul);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr div(Expr a, Expr b) {
  if (is_const(a, 0)) return constant(0);
  if (is_const(b, 1)) return a;
  auto n = std::make_shared<ExprNode>(ExprKind::Div);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr pow(Expr a, Expr b) {
  if (is_const(b, 1)) return a;
  if (is_const(b, 0)) return constant(1);
  auto n = std::make_shared<ExprNode>(ExprKind::Pow);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr call(Func f, Expr a) {
  auto n = std::make_shared<ExprNode>(ExprKind::Call);
  n->func = f;
  n->a = std::move(a);
  return n;
}

}  // namespace ast

// ---------------------------------------------------------------------------
// Parser: recursive descent, precedence ^ > unary - > * / > + -, right-assoc ^.
// ---------------------------------------------------------------------------

namespace {

// Raw builders for the parser: no folding, so parse(print(e)) reproduces the
// tree exactly. The one exception is unary minus on a literal, which folds to
// a negative constant so "-3" round-trips.
Expr raw_binary(ExprKind k, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>(k);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr raw_neg(Expr a) {
  if (a->kind == ExprKind::Const) return ast::constant(-a->value);
  auto n = std::make_shared<ExprNode>(ExprKind::Neg);
  n->a = std::move(a);
  return n;
}

struct FuncName {
  const char* name;
  Func func;
};

constexpr FuncName kFuncs[] = {
    {"sin", Func::Sin},   {"cos", Func::Cos}, {"exp", Func::Exp},
    {"log", Func::Log},   {"sqrt", Func::Sqrt}, {"atan", Func::Atan},
    {"abs", Func::Abs},   {"sign", Func::Sign},
};

const char* func_name(Func f) {
  for (const auto& fn : kFuncs)
    if (fn.func == f) return fn.name;
  return "?";
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        e = raw_binary(ExprKind::Add, e, term());
      else if (eat('-'))
        e = raw_binary(ExprKind::Sub, e, term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      skip_ws();
      if (eat('*'))
        e = raw_binary(ExprKind::Mul, e, unary());
      else if (eat('/'))
        e = raw_binary(ExprKind::Div, e, unary());
      else
        return e;
    }
  }

  Expr unary() {
    skip_ws();
    if (eat('-')) return raw_neg(unary());
    if (eat('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    skip_ws();
    if (eat('^')) return raw_binary(ExprKind::Pow, base, unary());  // right-assoc
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      Expr e = expression();
      skip_ws();
      if (!eat(')')) throw ParseError("unclosed parenthesis", pos_ == src_.size() ? pos_ : open);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", start);
    pos_ += static_cast<std::size_t>(end - begin);
    return ast::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      for (const auto& fn : kFuncs) {
        if (name == fn.name) {
          ++pos_;  // consume '('
          Expr arg = expression();
          skip_ws();
          if (!eat(')'))
            throw ParseError("unclosed parenthesis", pos_ == src_.size() ? pos_ : start);
          return ast::call(fn.func, arg);
        }
      }
      throw ParseError("unknown function '" + name +
                           "' (allowed: sin, cos, exp, log, sqrt, atan, abs)",
                       start);
    }
    if (name == "x") return ast::var_x();
    if (name == "y") return ast::var_y();
    return ast::param(name);
  }
};

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

void print_rec(const Expr& e, std::ostringstream& out, int parent_prec, bool right_side) {
  int prec = precedence(e->kind);
  bool need_paren = prec < parent_prec ||
                    (prec == parent_prec && right_side && prec != 4) ||
                    (prec == parent_prec && !right_side && prec == 4);
  switch (e->kind) {
    case ExprKind::Const: {
      char buf[40];
      if (e->value == static_cast<long long>(e->value) && std::abs(e->value) < 1e15)
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(e->value));
      else
        std::snprintf(buf, sizeof buf, "%.17g", e->value);
      if (e->value < 0) {
        out << '(' << buf << ')';  // keep unary structure reparseable
      } else {
        out << buf;
      }
      return;
    }
    case ExprKind::Var: out << (e->var == 0 ? "x" : "y"); return;
    case ExprKind::Param: out << e->name; return;
    case ExprKind::Call:
      out << func_name(e->func) << '(';
      print_rec(e->a, out, 0, false);
      out << ')';
      return;
    default: break;
  }
  if (need_paren) out << '(';
  switch (e->kind) {
    case ExprKind::Neg:
      out << '-';
      print_rec(e->a, out, prec + 1, false);
      break;
    case ExprKind::Add:
      print_rec(e->a, out, prec, false); out << " + "; print_rec(e->b, out, prec + 1, true);
      break;
    case ExprKind::Sub:
      print_rec(e->a, out, prec, false); out << " - "; print_rec(e->b, out, prec + 1, true);
      break;
    case ExprKind::Mul:
      print_rec(e->a, out, prec, false); out << "*"; print_rec(e->b, out, prec + 1, true);
      break;
    case ExprKind::Div:
      print_rec(e->a, out, prec, false); out << "/"; print_rec(e->b, out, prec + 1, true);
      break;
    case ExprKind::Pow:
      print_rec(e->a, out, prec + 1, false); out << "^"; print_rec(e->b, out, prec, true);
      break;
    default: break;
  }
  if (need_paren) out << ')';
}

}  // namespace

Expr parse(const std::string& source) { return Parser(source).run(); }

std::string print(const Expr& e) {
  std::ostringstream out;
  print_rec(e, out, 0, false);
  return out.str();
}

bool equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Const: return a->value == b->value;
    case ExprKind::Var: return a->var == b->var;
    case ExprKind::Param: return a->name == b->name;
    case ExprKind::Neg: return equal(a->a, b->a);
    case ExprKind::Call: return a->func == b->func && equal(a->a, b->a);
    default: return equal(a->a, b->a) && equal(a->b, b->b);
  }
}

double eval(const Expr& e, double x, double y, const ParamMap& params) {
  switch (e->kind) {
    case ExprKind::Const: return e->value;
    case ExprKind::Var: return e->var == 0 ? x : y;
    case ExprKind::Param: {
      auto it = params.find(e->name);
      if (it != params.end()) return it->second;
      if (e->name == "pi") return M_PI;
      throw EvalError("unbound parameter '" + e->name + "'");
    }
    case ExprKind::Neg: return -eval(e->a, x, y, params);
    case ExprKind::Add: return eval(e->a, x, y, params) + eval(e->b, x, y, params);
    case ExprKind::Sub: return eval(e->a, x, y, params) - eval(e->b, x, y, params);
    case ExprKind::Mul: return eval(e->a, x, y, params) * eval(e->b, x, y, params);
    case ExprKind::Div: {
      double num = eval(e->a, x, y, params);
      double den = eval(e->b, x, y, params);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case ExprKind::Pow: {
      double base = eval(e->a, x, y, params);
      double exp = eval(e->b, x, y, params);
      if (base == 0.0 && exp < 0.0) throw EvalError("zero raised to negative power");
      if (base < 0.0 && exp != std::floor(exp))
        throw EvalError("negative base with non-integer exponent");
      return std::pow(base, exp);
    }
    case ExprKind::Call: {
      double v = eval(e->a, x, y, params);
      switch (e->func) {
        case Func::Sin: return std::sin(v);
        case Func::Cos: return std::cos(v);
        case Func::Exp: return std::exp(v);
        case Func::Log:
          if (v <= 0.0) throw EvalError("log of non-positive argument");
          return std::log(v);
        case Func::Sqrt:
          if (v < 0.0) throw EvalError("sqrt of negative argument");
          return std::sqrt(v);
        case Func::Atan: return std::atan(v);
        case Func::Abs: return std::abs(v);
        case Func::Sign:
          if (v == 0.0) throw EvalError("derivative of abs at a non-smooth point");
          return v > 0.0 ? 1.0 : -1.0;
      }
      throw EvalError("bad function");
    }
  }
  throw EvalError("bad node");
}

Expr differentiate(const Expr& e, int var) {
  using namespace ast;
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Param: return constant(0);
    case ExprKind::Var: return constant(e->var == var ? 1 : 0);
    case ExprKind::Neg: return neg(differentiate(e->a, var));
    case ExprKind::Add: return add(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Sub: return sub(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Mul:
      return add(mul(differentiate(e->a, var), e->b), mul(e->a, differentiate(e->b, var)));
    case ExprKind::Div:
      // (u/v)' = u'/v - u v'/v^2
      return sub(div(differentiate(e->a, var), e->b),
                 div(mul(e->a, differentiate(e->b, var)), mul(e->b, e->b)));
    case ExprKind::Pow: {
      Expr u = e->a, v = e->b;
      Expr du = differentiate(u, var), dv = differentiate(v, var);
      if (v->kind == ExprKind::Const) {
        // c*u^(c-1)*u'
        return mul(mul(v, pow(u, constant(v->value - 1))), du);
      }
      // u^v * (v' log u + v u'/u)
      return mul(pow(u, v), add(mul(dv, call(Func::Log, u)), div(mul(v, du), u)));
    }
    case ExprKind::Call: {
      Expr u = e->a;
      Expr du = differentiate(u, var);
      Expr outer;
      switch (e->func) {
        case Func::Sin: outer = call(Func::Cos, u); break;
        case Func::Cos: outer = neg(call(Func::Sin, u)); break;
        case Func::Exp: outer = call(Func::Exp, u); break;
        case Func::Log: outer = div(constant(1), u); break;
        case Func::Sqrt: outer = div(constant(1), mul(constant(2), call(Func::Sqrt, u))); break;
        case Func::Atan: outer = div(constant(1), add(constant(1), mul(u, u))); break;
        case Func::Abs: outer = call(Func::Sign, u); break;
        case Func::Sign: outer = constant(0); break;  // piecewise constant
      }
      return mul(outer, du);
    }
  }
  throw EvalError("bad node");
}

Expr bind_params(const Expr& e, const ParamMap& params) {
  using namespace ast;
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Var: return e;
    case ExprKind::Param: {
      auto it = params.find(e->name);
      if (it != params.end()) return constant(it->second);
      if (e->name == "pi") return constant(M_PI);
      return e;
    }
    case ExprKind::Neg: return neg(bind_params(e->a, params));
    case ExprKind::Add: return add(bind_params(e->a, params), bind_params(e->b, params));
    case ExprKind::Sub: return sub(bind_params(e->a, params), bind_params(e->b, params));
    case ExprKind::Mul: return mul(bind_params(e->a, params), bind_params(e->b, params));
    case ExprKind::Div: return div(bind_params(e->a, params), bind_params(e->b, params));
    case ExprKind::Pow: return pow(bind_params(e->a, params), bind_params(e->b, params));
    case ExprKind::Call: return call(e->func, bind_params(e->a, params));
  }
  throw EvalError("bad node");
}

namespace {
void collect_params(const Expr& e, std::vector<std::string>& out) {
  switch (e->kind) {
    case ExprKind::Param:
      if (e->name != "pi" &&
          std::find(out.begin(), out.end(), e->name) == out.end())
        out.push_back(e->name);
      return;
    case ExprKind::Const:
    case ExprKind::Var: return;
    case ExprKind::Neg:
    case ExprKind::Call: collect_params(e->a, out); return;
    default:
      collect_params(e->a, out);
      collect_params(e->b, out);
      return;
  }
}
}  // namespace

std::vector<std::string> free_params(const Expr& e) {
  std::vector<std::string> out;
  collect_params(e, out);
  return out;
}

Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& repl) {
  using namespace ast;
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Var: return e;
    case ExprKind::Param: {
      auto it = repl.find(e->name);
      return it != repl.end() ? it->second : e;
    }
    case ExprKind::Neg: return neg(substitute_params(e->a, repl));
    case ExprKind::Add:
      return add(substitute_params(e->a, repl), substitute_params(e->b, repl));
    case ExprKind::Sub:
      return sub(substitute_params(e->a, repl), substitute_params(e->b, repl));
    case ExprKind::Mul:
      return mul(substitute_params(e->a, repl), substitute_params(e->b, repl));
    case ExprKind::Div:
      return div(substitute_params(e->a, repl), substitute_params(e->b, repl));
    case ExprKind::Pow:
      return pow(substitute_params(e->a, repl), substitute_params(e->b, repl));
    case ExprKind::Call: return call(e->func, substitute_params(e->a, repl));
  }
  throw EvalError("bad node");
}

Expr substitute(const Expr& e, int var, const Expr& repl) {
  using namespace ast;
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Param: return e;
    case ExprKind::Var: return e->var == var ? repl : e;
    case ExprKind::Neg: return neg(substitute(e->a, var, repl));
    case ExprKind::Add: return add(substitute(e->a, var, repl), substitute(e->b, var, repl));
    case ExprKind::Sub: return sub(substitute(e->a, var, repl), substitute(e->b, var, repl));
    case ExprKind::Mul: return mul(substitute(e->a, var, repl), substitute(e->b, var, repl));
    case ExprKind::Div: return div(substitute(e->a, var, repl), substitute(e->b, var, repl));
    case ExprKind::Pow: return pow(substitute(e->a, var, repl), substitute(e->b, var, repl));
    case ExprKind::Call: return call(e->func, substitute(e->a, var, repl));
  }
  throw EvalError("bad node");
}

}  // namespace isl
