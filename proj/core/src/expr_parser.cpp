#include "fwdflat/expr_parser.hpp"

#include <cctype>
#include <string>

#include "fwdflat/error.hpp"

namespace fwdflat {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  Scalar parse() {
    Scalar value = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, Errc code = Errc::ParseError) const {
    throw Error(code, "column " + std::to_string(offset_ + pos_ + 1) + ": " + msg);
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

  Scalar expression() {
    Scalar value = term();
    while (true) {
      if (accept('+')) {
        value = value + term();
      } else if (accept('-')) {
        value = value - term();
      } else {
        return value;
      }
    }
  }

  Scalar term() {
    Scalar value = unary();
    while (true) {
      if (accept('*')) {
        value = value * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Scalar d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero", Errc::DivisionByZeroScalar);
        }
        value = value / d;
      } else {
        return value;
      }
    }
  }

  Scalar unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Scalar power() {
    Scalar base = primary();
    if (!accept('^')) return base;
    skip_space();
    bool negative = false;
    if (accept('-')) {
      negative = true;
    } else {
      accept('+');
    }
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer literal");
    if (pos_ - start > 6) fail("exponent too large");
    int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (negative && base.is_zero()) fail("zero raised to a negative power", Errc::DivisionByZeroScalar);
    return pow(base, negative ? -e : e);
  }

  Scalar primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Scalar inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
        fail("only integer and p/q rational literals are supported");
      return Scalar(mpq_class(mpz_class(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      const std::size_t after = pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        pos_ = start;
        fail("function '" + name + "' is not a rational operation", Errc::NonRationalExpression);
      }
      pos_ = after;
      return Scalar::variable(std::move(name));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

Scalar parse_scalar(std::string_view text, std::size_t column_offset) {
  return Parser(text, column_offset).parse();
}

}  // namespace fwdflat
