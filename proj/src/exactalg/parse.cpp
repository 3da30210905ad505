#include "piii/exactalg/parse.hpp"

#include <cctype>
#include <string>

#include "piii/exactalg/errors.hpp"

namespace piii::exactalg {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  RatFun run() {
    RatFun r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError("parse error at " + std::to_string(pos_) + ": " + m + " in \"" + std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  RatFun expr() {
    RatFun acc = term();
    for (;;) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        return acc;
    }
  }

  RatFun term() {
    RatFun acc = unary();
    for (;;) {
      if (eat('*'))
        acc *= unary();
      else if (eat('/'))
        acc /= unary();
      else
        return acc;
    }
  }

  RatFun unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  RatFun power() {
    RatFun base = atom();
    if (eat('^')) {
      bool paren = eat('(');
      bool neg = eat('-');
      skip();
      std::size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (st == pos_) fail("integer exponent expected");
      long e = std::stol(std::string(s_.substr(st, pos_ - st)));
      if (paren && !eat(')')) fail("')' expected");
      if (neg) e = -e;
      if (base.is_zero() && e < 0) throw DivisionByZero();
      return base.pow(e);
    }
    return base;
  }

  mpq_class number_literal() {
    std::size_t st = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string ip(s_.substr(st, pos_ - st));
    mpq_class v(mpz_class(ip.empty() ? "0" : ip));
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t fs = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string fp(s_.substr(fs, pos_ - fs));
      if (!fp.empty()) {
        mpz_class den = 1;
        for (std::size_t k = 0; k < fp.size(); ++k) den *= 10;
        v += mpq_class(mpz_class(fp), den);
      }
      v.canonicalize();
    } else if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      std::size_t ds = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      mpz_class den(std::string(s_.substr(ds, pos_ - ds)));
      if (den == 0) throw DivisionByZero();
      v /= mpq_class(den);
      v.canonicalize();
    }
    return v;
  }

  RatFun atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatFun r = expr();
      if (!eat(')')) fail("')' expected");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      mpq_class v = number_literal();
      // "3/4i" or "2i": imaginary literal
      if (pos_ < s_.size() && s_[pos_] == 'i' &&
          (pos_ + 1 == s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
        ++pos_;
        return RatFun(GaussRat(0, v));
      }
      return RatFun(GaussRat(v));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t st = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id(s_.substr(st, pos_ - st));
      if (id == "i") return RatFun(GaussRat::i());
      if (peek() == '(') fail("function application not supported (" + id + "); transcendental functions are out of scope");
      return RatFun::var(id);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

RatFun parse(std::string_view text) { return Parser(text).run(); }

GaussRat parse_number(std::string_view text) {
  RatFun r = parse(text);
  if (!r.is_constant()) throw ParseError("not a number: " + std::string(text));
  return r.constant_value();
}

}  // namespace piii::exactalg
