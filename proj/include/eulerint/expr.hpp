#pragma once

// Minimal arithmetic expression grammar for config files:
//   +, -, *, /, ^ (right associative), unary minus, parentheses,
//   sin, cos, exp, numbers, pi, and the variables u1..u8 (chart
//   coordinates; s1..s8 accepted as synonyms inside stratum
//   parametrizations) and x, y, z (embedding coordinates).

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eulerint {

class Expr {
 public:
  static Expr parse(const std::string& text);

  double eval(const Eigen::VectorXd& vars) const {
    if (uses_xyz_)
      throw std::invalid_argument("expression uses x/y/z but no embedding is available");
    return eval_node(*root_, vars, nullptr);
  }
  double eval(const Eigen::VectorXd& vars, const Eigen::VectorXd& xyz) const {
    return eval_node(*root_, vars, &xyz);
  }

  bool uses_xyz() const { return uses_xyz_; }
  int max_var() const { return max_var_; }  // highest u/s index used (1-based)

 private:
  enum class Op { Const, Var, Xyz, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

  struct Node {
    Op op;
    double value = 0.0;
    int index = 0;
    std::unique_ptr<Node> a, b;
  };

  static double eval_node(const Node& n, const Eigen::VectorXd& vars,
                          const Eigen::VectorXd* xyz) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var:
        if (n.index >= vars.size())
          throw std::invalid_argument("expression variable u" + std::to_string(n.index + 1) +
                                      " exceeds the chart dimension");
        return vars[n.index];
      case Op::Xyz:
        if (!xyz || n.index >= xyz->size())
          throw std::invalid_argument("expression uses x/y/z beyond the embedding dimension");
        return (*xyz)[n.index];
      case Op::Add: return eval_node(*n.a, vars, xyz) + eval_node(*n.b, vars, xyz);
      case Op::Sub: return eval_node(*n.a, vars, xyz) - eval_node(*n.b, vars, xyz);
      case Op::Mul: return eval_node(*n.a, vars, xyz) * eval_node(*n.b, vars, xyz);
      case Op::Div: return eval_node(*n.a, vars, xyz) / eval_node(*n.b, vars, xyz);
      case Op::Pow: return std::pow(eval_node(*n.a, vars, xyz), eval_node(*n.b, vars, xyz));
      case Op::Neg: return -eval_node(*n.a, vars, xyz);
      case Op::Sin: return std::sin(eval_node(*n.a, vars, xyz));
      case Op::Cos: return std::cos(eval_node(*n.a, vars, xyz));
      case Op::Exp: return std::exp(eval_node(*n.a, vars, xyz));
    }
    throw std::logic_error("unreachable");
  }

  struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    bool uses_xyz = false;
    int max_var = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) const {
      throw std::invalid_argument("expression error at position " + std::to_string(pos) +
                                  " in '" + s + "': " + msg);
    }

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool consume(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    char peek() {
      skip_ws();
      return pos < s.size() ? s[pos] : '\0';
    }

    std::unique_ptr<Node> make(Op op, std::unique_ptr<Node> a = nullptr,
                               std::unique_ptr<Node> b = nullptr) {
      auto n = std::make_unique<Node>();
      n->op = op;
      n->a = std::move(a);
      n->b = std::move(b);
      return n;
    }

    std::unique_ptr<Node> expr() {
      auto lhs = term();
      while (true) {
        if (consume('+'))
          lhs = make(Op::Add, std::move(lhs), term());
        else if (consume('-'))
          lhs = make(Op::Sub, std::move(lhs), term());
        else
          return lhs;
      }
    }

    std::unique_ptr<Node> term() {
      auto lhs = factor();
      while (true) {
        if (consume('*'))
          lhs = make(Op::Mul, std::move(lhs), factor());
        else if (consume('/'))
          lhs = make(Op::Div, std::move(lhs), factor());
        else
          return lhs;
      }
    }

    std::unique_ptr<Node> factor() {
      if (consume('-')) return make(Op::Neg, factor());
      auto base = primary();
      if (consume('^')) return make(Op::Pow, std::move(base), factor());  // right assoc
      return base;
    }

    std::unique_ptr<Node> primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        auto inner = expr();
        if (!consume(')')) fail("missing closing parenthesis");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return ident();
      fail(std::string("unexpected character '") + c + "'");
    }

    std::unique_ptr<Node> number() {
      const std::size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
              s[pos] == 'e' || s[pos] == 'E' ||
              ((s[pos] == '+' || s[pos] == '-') && pos > start &&
               (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
        ++pos;
      try {
        std::size_t used = 0;
        const double v = std::stod(s.substr(start, pos - start), &used);
        if (used != pos - start) fail("malformed number");
        auto n = make(Op::Const);
        n->value = v;
        return n;
      } catch (const std::exception&) {
        fail("malformed number");
      }
    }

    std::unique_ptr<Node> ident() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "pi") {
        auto n = make(Op::Const);
        n->value = M_PI;
        return n;
      }
      if (name == "sin" || name == "cos" || name == "exp") {
        if (!consume('(')) fail("'" + name + "' needs parentheses");
        auto arg = expr();
        if (!consume(')')) fail("missing closing parenthesis after '" + name + "'");
        const Op op = name == "sin" ? Op::Sin : name == "cos" ? Op::Cos : Op::Exp;
        return make(op, std::move(arg));
      }
      if (name.size() == 1 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
        auto n = make(Op::Xyz);
        n->index = name[0] - 'x';
        uses_xyz = true;
        return n;
      }
      if (name.size() >= 2 && (name[0] == 'u' || name[0] == 's')) {
        bool digits = true;
        for (std::size_t i = 1; i < name.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
        if (digits) {
          const int idx = std::stoi(name.substr(1));
          if (idx < 1 || idx > 8) fail("variable index out of range in '" + name + "'");
          max_var = std::max(max_var, idx);
          auto n = make(Op::Var);
          n->index = idx - 1;
          return n;
        }
      }
      fail("unknown identifier '" + name + "'");
    }
  };

  std::shared_ptr<Node> root_;
  bool uses_xyz_ = false;
  int max_var_ = 0;
};

inline Expr Expr::parse(const std::string& text) {
  Parser p(text);
  auto root = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  Expr e;
  e.root_ = std::move(root);
  e.uses_xyz_ = p.uses_xyz;
  e.max_var_ = p.max_var;
  return e;
}

}  // namespace eulerint
