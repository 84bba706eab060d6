#include "dppgeo/cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dppgeo::cli {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  double parse() {
    const double value = expression();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("expression \"" + std::string(text_) + "\": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expression() {
    double value = term();
    for (;;) {
      if (accept('+'))
        value += term();
      else if (accept('-'))
        value -= term();
      else
        return value;
    }
  }

  double term() {
    double value = unary();
    for (;;) {
      if (accept('*'))
        value *= unary();
      else if (accept('/'))
        value /= unary();
      else
        return value;
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // right associative; binds tighter than unary minus on its left
  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    if (accept('(')) {
      const double value = expression();
      if (!accept(')')) error("missing ')'");
      return value;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return named();
    error("unexpected '" + std::string(1, c) + "'");
  }

  double number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc()) error("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return value;
  }

  double named() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "pi") return std::numbers::pi;
    if (name == "e") return std::numbers::e;
    if (!accept('(')) error("unknown name '" + name + "'");
    const double arg = expression();
    if (!accept(')')) error("missing ')' after " + name + " argument");
    if (name == "log") return std::log(arg);
    if (name == "exp") return std::exp(arg);
    if (name == "sqrt") return std::sqrt(arg);
    error("unknown function '" + name + "'");
  }
};

}  // namespace

double evaluate_expression(std::string_view text) {
  const double value = Parser(text).parse();
  if (!std::isfinite(value))
    throw std::invalid_argument("expression \"" + std::string(text) + "\" is not a finite number");
  return value;
}

}  // namespace dppgeo::cli
