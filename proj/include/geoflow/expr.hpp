#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>

#include "errors.hpp"

namespace geoflow {

/// Scalar expression in one variable `r`: numbers, pi, + - * / ^, parentheses and
/// sin cos tan exp log sqrt atan abs sinh cosh tanh.
class Expression {
 public:
  explicit Expression(std::string text) : text_(std::move(text)) {
    pos_ = 0;
    root_ = parse_sum();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  double operator()(double r) const { return root_->eval(r); }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(double r) const = 0;
  };
  using Ptr = std::shared_ptr<const Node>;

  struct Number : Node {
    double v;
    explicit Number(double x) : v(x) {}
    double eval(double) const override { return v; }
  };
  struct Var : Node {
    double eval(double r) const override { return r; }
  };
  struct Binary : Node {
    char op;
    Ptr a, b;
    Binary(char o, Ptr x, Ptr y) : op(o), a(std::move(x)), b(std::move(y)) {}
    double eval(double r) const override {
      const double x = a->eval(r), y = b->eval(r);
      switch (op) {
        case '+': return x + y;
        case '-': return x - y;
        case '*': return x * y;
        case '/': return x / y;
        default: return std::pow(x, y);
      }
    }
  };
  struct Negate : Node {
    Ptr a;
    explicit Negate(Ptr x) : a(std::move(x)) {}
    double eval(double r) const override { return -a->eval(r); }
  };
  struct Call : Node {
    double (*fn)(double);
    Ptr a;
    Call(double (*f)(double), Ptr x) : fn(f), a(std::move(x)) {}
    double eval(double r) const override { return fn(a->eval(r)); }
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("expression '" + text_ + "': " + msg);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Ptr parse_sum() {
    Ptr left = parse_product();
    for (;;) {
      if (accept('+')) left = std::make_shared<Binary>('+', left, parse_product());
      else if (accept('-')) left = std::make_shared<Binary>('-', left, parse_product());
      else return left;
    }
  }
  Ptr parse_product() {
    Ptr left = parse_unary();
    for (;;) {
      if (accept('*')) left = std::make_shared<Binary>('*', left, parse_unary());
      else if (accept('/')) left = std::make_shared<Binary>('/', left, parse_unary());
      else return left;
    }
  }
  Ptr parse_unary() {
    if (accept('-')) return std::make_shared<Negate>(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }
  // Right associative; -x^2 parses as -(x^2).
  Ptr parse_power() {
    Ptr base = parse_atom();
    if (accept('^')) return std::make_shared<Binary>('^', base, parse_unary());
    return base;
  }
  Ptr parse_atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      Ptr e = parse_sum();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(text_.substr(pos_), &used);
      pos_ += used;
      return std::make_shared<Number>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "r") return std::make_shared<Var>();
      if (name == "pi") return std::make_shared<Number>(M_PI);
      double (*fn)(double) = nullptr;
      if (name == "sin") fn = [](double x) { return std::sin(x); };
      else if (name == "cos") fn = [](double x) { return std::cos(x); };
      else if (name == "tan") fn = [](double x) { return std::tan(x); };
      else if (name == "exp") fn = [](double x) { return std::exp(x); };
      else if (name == "log") fn = [](double x) { return std::log(x); };
      else if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
      else if (name == "atan") fn = [](double x) { return std::atan(x); };
      else if (name == "abs") fn = [](double x) { return std::fabs(x); };
      else if (name == "sinh") fn = [](double x) { return std::sinh(x); };
      else if (name == "cosh") fn = [](double x) { return std::cosh(x); };
      else if (name == "tanh") fn = [](double x) { return std::tanh(x); };
      else fail("unknown name '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      Ptr arg = parse_sum();
      if (!accept(')')) fail("missing ')'");
      return std::make_shared<Call>(fn, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  Ptr root_;
};

}  // namespace geoflow
