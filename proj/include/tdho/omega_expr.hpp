#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

enum class ExprKind { Number, Variable, Constant, Negate, Binary, Call };

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh, Cosh, Sech, Abs, Pow };

/// AST node for omega^2(t) expressions. Named constants carry the value they
/// were bound to at parse time, so evaluation never looks anything up.
struct ExprNode {
  ExprKind kind = ExprKind::Number;
  double value = 0.0;  // Number, Constant
  std::string name;    // Constant
  char op = 0;         // Binary: one of + - * / ^
  Func func = Func::Sin;
  std::vector<ExprNode> children;

  static ExprNode number(double v);
  static ExprNode variable();
  static ExprNode constant(std::string name, double v);
  static ExprNode negate(ExprNode child);
  static ExprNode binary(char op, ExprNode lhs, ExprNode rhs);
  static ExprNode call(Func f, std::vector<ExprNode> args);

  friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

using ConstantTable = std::map<std::string, double, std::less<>>;

std::string_view func_name(Func f);
int func_arity(Func f);

/// Grammar (lowest to highest precedence):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | 't' | constant | func '(' expr (',' expr)* ')' | '(' expr ')'
/// `pi` is predefined; user constants may shadow it.
ExprNode parse_expression(std::string_view source, const ConstantTable& constants = {});

/// Throws NonFinite when any subexpression evaluates to inf or NaN.
double evaluate(const ExprNode& ast, double t);

/// Fully parenthesized text that parses back to the same tree.
std::string to_string(const ExprNode& ast);

}  // namespace tdho
