#include "anharm/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "anharm/errors.hpp"

namespace anharm {
namespace detail {

enum class Fn { exp, log, sqrt, abs, br };

struct Number {
  double value;
};
struct Variable {
  bool frequency;
  int index;
};
struct Negate {
  std::shared_ptr<const ExprNode> operand;
};
struct Binary {
  char op;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};
struct Call {
  Fn fn;
  std::shared_ptr<const ExprNode> arg;
};

struct ExprNode {
  std::variant<Number, Variable, Negate, Binary, Call> v;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

template <class T>
NodePtr make(T t) {
  return std::make_shared<const ExprNode>(ExprNode{std::move(t)});
}

double at(std::span<const double> s, int i) {
  return static_cast<std::size_t>(i) < s.size() ? s[static_cast<std::size_t>(i)] : 0.0;
}

double eval(const ExprNode& node, std::span<const double> x, std::span<const double> xi) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return n.frequency ? at(xi, n.index) : at(x, n.index);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval(*n.operand, x, xi);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const double a = eval(*n.lhs, x, xi);
          const double b = eval(*n.rhs, x, xi);
          switch (n.op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: {
              // Integer exponents keep negative bases meaningful (x^3 for x < 0).
              const double r = std::round(b);
              if (r == b && std::abs(r) <= 64.0) return std::pow(a, static_cast<int>(r));
              return std::pow(a, b);
            }
          }
        } else {
          const double a = eval(*n.arg, x, xi);
          switch (n.fn) {
            case Fn::exp: return std::exp(a);
            case Fn::log: return std::log(a);
            case Fn::sqrt: return std::sqrt(a);
            case Fn::abs: return std::abs(a);
            case Fn::br: return std::sqrt(1.0 + a * a);
          }
          return 0.0;
        }
      },
      node.v);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse_all() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

  int max_index = -1;
  bool uses_x = false;
  bool uses_xi = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression: " + msg + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Binary{'+', lhs, term()});
      } else if (accept('-')) {
        lhs = make(Binary{'-', lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Binary{'*', lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Binary{'/', lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Negate{unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Binary{'^', base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return make(Number{v});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);

    if (name == "x" || name == "xi") {
      const bool freq = name == "xi";
      (freq ? uses_xi : uses_x) = true;
      int index = 0;
      if (accept('[')) {
        skip_ws();
        const std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (digits == pos_) fail("expected index");
        index = std::stoi(std::string(s_.substr(digits, pos_ - digits)));
        expect(']');
      }
      max_index = std::max(max_index, index);
      return make(Variable{freq, index});
    }
    if (name == "pi") return make(Number{std::numbers::pi});

    Fn fn{};
    if (name == "exp") {
      fn = Fn::exp;
    } else if (name == "log") {
      fn = Fn::log;
    } else if (name == "sqrt") {
      fn = Fn::sqrt;
    } else if (name == "abs") {
      fn = Fn::abs;
    } else if (name == "br") {
      fn = Fn::br;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    NodePtr arg = expression();
    expect(')');
    return make(Call{fn, arg});
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace
}  // namespace detail

Expression Expression::parse(std::string_view text) {
  detail::Parser p(text);
  Expression e;
  e.root_ = p.parse_all();
  e.text_ = std::string(text);
  e.max_index_ = p.max_index;
  e.uses_x_ = p.uses_x;
  e.uses_xi_ = p.uses_xi;
  return e;
}

double Expression::operator()(std::span<const double> x, std::span<const double> xi) const {
  return detail::eval(*root_, x, xi);
}

}  // namespace anharm
