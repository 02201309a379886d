#pragma once

#include <cctype>
#include <string>

#include "hyperexp/diffop.hpp"
#include "hyperexp/errors.hpp"

namespace hyperexp {

namespace detail {

class OperatorParser {
 public:
  explicit OperatorParser(const std::string& text) : s_(text) {}

  DiffOp parse() {
    skip();
    if (at_end()) fail("empty input");
    DiffOp e = expr();
    skip();
    if (!at_end()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  // expr := term (('+'|'-') term)*
  DiffOp expr() {
    DiffOp acc = term();
    for (;;) {
      skip();
      if (peek() == '+') {
        advance();
        acc += term();
      } else if (peek() == '-') {
        advance();
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  // term := factor (('*'|'/') factor)*; '/' needs a constant divisor
  DiffOp term() {
    DiffOp acc = factor();
    for (;;) {
      skip();
      if (peek() == '*') {
        advance();
        acc = op_mul(acc, factor());
      } else if (peek() == '/') {
        int l = line_, c = col_;
        advance();
        DiffOp d = factor();
        if (d.order() != 0 || d.coeff(0).degree() != 0) {
          throw NonPolynomialCoefficient("division by an x-dependent expression at line " +
                                         std::to_string(l) + ", column " + std::to_string(c));
        }
        acc = Poly(Scalar(1) / d.coeff(0).lead()) * acc;
      } else {
        return acc;
      }
    }
  }

  // factor := atom ('^' uint)?
  DiffOp factor() {
    DiffOp a = atom();
    skip();
    if (peek() == '^') {
      advance();
      skip();
      mpz_class e = uint_literal();
      if (e > 100000) fail("exponent too large");
      a = op_pow(a, static_cast<int>(e.get_si()));
    }
    return a;
  }

  DiffOp atom() {
    skip();
    if (at_end()) fail("unexpected end of input");
    char ch = peek();
    if (ch == '-') {
      advance();
      return -factor();
    }
    if (ch == '(') {
      advance();
      DiffOp e = expr();
      skip();
      if (peek() != ')') fail("expected ')'");
      advance();
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mpz_class n = uint_literal();
      return DiffOp::multiplication(Poly(Scalar(mpq_class(n))));
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      int l = line_, c = col_;
      std::string id;
      while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) {
        id += peek();
        advance();
      }
      if (id == "x") return DiffOp::multiplication(Poly::x());
      if (id == "Dx") return DiffOp::d();
      if (id == "I") return DiffOp::multiplication(Poly(Scalar::imag_unit()));
      throw SyntaxError("unknown identifier '" + id + "'", l, c);
    }
    fail(std::string("unexpected '") + ch + "'");
  }

  mpz_class uint_literal() {
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
    std::string digits;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      digits += peek();
      advance();
    }
    return mpz_class(digits);
  }

  void skip() {
    while (!at_end()) {
      char ch = peek();
      if (ch == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

/// Parse an operator expression in x, Dx and I; products follow D x = x D + 1.
inline DiffOp parse_operator(const std::string& text) {
  return detail::OperatorParser(text).parse();
}

/// Parse a constant expression such as `3`, `1/2` or `(1+2*I)`.
inline Scalar parse_scalar(const std::string& text) {
  DiffOp op = parse_operator(text);
  if (op.is_zero()) return Scalar(0);
  if (op.order() != 0 || op.coeff(0).degree() != 0)
    throw SyntaxError("expected a constant", 1, 1);
  return op.coeff(0).lead();
}

}  // namespace hyperexp
