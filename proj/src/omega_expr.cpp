#include "tdho/omega_expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace tdho {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

constexpr std::array<FuncInfo, 10> kFunctions{{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"sqrt", Func::Sqrt, 1},
    {"tanh", Func::Tanh, 1},
    {"cosh", Func::Cosh, 1},
    {"sech", Func::Sech, 1},
    {"abs", Func::Abs, 1},
    {"pow", Func::Pow, 2},
}};

const FuncInfo* find_function(std::string_view name) {
  for (const auto& info : kFunctions)
    if (info.name == name) return &info;
  return nullptr;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view src, const ConstantTable& constants) : src_(src), constants_(constants) {}

  ExprNode parse() {
    ExprNode root = expr();
    skip_space();
    if (pos_ != src_.size()) fail({"operator", "end of input"}, "unexpected trailing input");
    return root;
  }

 private:
  std::string_view src_;
  const ConstantTable& constants_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw SyntaxError(pos_, std::move(expected), detail);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string(1, c)}, std::string("expected '") + c + "'");
  }

  ExprNode expr() {
    ExprNode lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = ExprNode::binary('+', std::move(lhs), term());
      } else if (accept('-')) {
        lhs = ExprNode::binary('-', std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  ExprNode term() {
    ExprNode lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = ExprNode::binary('*', std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = ExprNode::binary('/', std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  ExprNode unary() {
    if (accept('-')) return ExprNode::negate(unary());
    return power();
  }

  ExprNode power() {
    ExprNode base = primary();
    if (accept('^')) return ExprNode::binary('^', std::move(base), unary());
    return base;
  }

  ExprNode primary() {
    skip_space();
    if (pos_ >= src_.size()) fail({"number", "identifier", "(", "-"}, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprNode inner = expr();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail({"number", "identifier", "(", "-"}, std::string("unexpected character '") + c + "'");
  }

  ExprNode number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        pos_ = look;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail({"number"}, "malformed number literal");
    }
    return ExprNode::number(value);
  }

  ExprNode identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (auto it = constants_.find(name); it != constants_.end())
      return ExprNode::constant(std::string(name), it->second);
    if (name == "t") return ExprNode::variable();
    if (name == "pi") return ExprNode::constant("pi", std::numbers::pi);

    if (const FuncInfo* info = find_function(name)) {
      expect('(');
      std::vector<ExprNode> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      if (static_cast<int>(args.size()) != info->arity) {
        fail({")"}, std::string(name) + " takes " + std::to_string(info->arity) + " argument(s)");
      }
      expect(')');
      return ExprNode::call(info->func, std::move(args));
    }
    throw UnknownIdentifier(std::string(name), start);
  }
};

double checked(double value, double t, const ExprNode& node) {
  if (!std::isfinite(value)) throw NonFinite(t, to_string(node));
  return value;
}

double apply(Func f, double x) {
  switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Exp: return std::exp(x);
    case Func::Log: return x > 0.0 ? std::log(x) : std::numeric_limits<double>::quiet_NaN();
    case Func::Sqrt: return std::sqrt(x);
    case Func::Tanh: return std::tanh(x);
    case Func::Cosh: return std::cosh(x);
    case Func::Sech: return 1.0 / std::cosh(x);
    case Func::Abs: return std::fabs(x);
    case Func::Pow: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void print(const ExprNode& node, std::string& out) {
  switch (node.kind) {
    case ExprKind::Number: {
      std::array<char, 32> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), node.value);
      out.append(buf.data(), ptr);
      return;
    }
    case ExprKind::Variable: out += 't'; return;
    case ExprKind::Constant: out += node.name; return;
    case ExprKind::Negate:
      out += "(-";
      print(node.children[0], out);
      out += ')';
      return;
    case ExprKind::Binary:
      out += '(';
      print(node.children[0], out);
      out += ' ';
      out += node.op;
      out += ' ';
      print(node.children[1], out);
      out += ')';
      return;
    case ExprKind::Call:
      out += func_name(node.func);
      out += '(';
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        print(node.children[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

SyntaxError::SyntaxError(std::size_t pos, std::vector<std::string> expected_tokens,
                         const std::string& detail)
    : Error("syntax error at offset " + std::to_string(pos) + ": " + detail + " (expected " +
            join(expected_tokens) + ")"),
      position(pos),
      expected(std::move(expected_tokens)) {}

ExprNode ExprNode::number(double v) {
  ExprNode n;
  n.kind = ExprKind::Number;
  n.value = v;
  return n;
}

ExprNode ExprNode::variable() {
  ExprNode n;
  n.kind = ExprKind::Variable;
  return n;
}

ExprNode ExprNode::constant(std::string name, double v) {
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.name = std::move(name);
  n.value = v;
  return n;
}

ExprNode ExprNode::negate(ExprNode child) {
  ExprNode n;
  n.kind = ExprKind::Negate;
  n.children.push_back(std::move(child));
  return n;
}

ExprNode ExprNode::binary(char op, ExprNode lhs, ExprNode rhs) {
  ExprNode n;
  n.kind = ExprKind::Binary;
  n.op = op;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

ExprNode ExprNode::call(Func f, std::vector<ExprNode> args) {
  ExprNode n;
  n.kind = ExprKind::Call;
  n.func = f;
  n.children = std::move(args);
  return n;
}

std::string_view func_name(Func f) {
  for (const auto& info : kFunctions)
    if (info.func == f) return info.name;
  return "?";
}

int func_arity(Func f) {
  for (const auto& info : kFunctions)
    if (info.func == f) return info.arity;
  return 0;
}

ExprNode parse_expression(std::string_view source, const ConstantTable& constants) {
  return Parser(source, constants).parse();
}

double evaluate(const ExprNode& node, double t) {
  switch (node.kind) {
    case ExprKind::Number:
    case ExprKind::Constant: return node.value;
    case ExprKind::Variable: return t;
    case ExprKind::Negate: return -evaluate(node.children[0], t);
    case ExprKind::Binary: {
      const double a = evaluate(node.children[0], t);
      const double b = evaluate(node.children[1], t);
      double r = 0.0;
      switch (node.op) {
        case '+': r = a + b; break;
        case '-': r = a - b; break;
        case '*': r = a * b; break;
        case '/': r = a / b; break;
        case '^': r = std::pow(a, b); break;
        default: throw Error(std::string("invalid operator '") + node.op + "'");
      }
      return checked(r, t, node);
    }
    case ExprKind::Call: {
      if (node.func == Func::Pow) {
        const double a = evaluate(node.children[0], t);
        const double b = evaluate(node.children[1], t);
        return checked(std::pow(a, b), t, node);
      }
      return checked(apply(node.func, evaluate(node.children[0], t)), t, node);
    }
  }
  throw Error("corrupt expression node");
}

std::string to_string(const ExprNode& ast) {
  std::string out;
  print(ast, out);
  return out;
}

}  // namespace tdho
