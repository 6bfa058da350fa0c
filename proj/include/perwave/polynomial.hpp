#ifndef PERWAVE_POLYNOMIAL_HPP
#define PERWAVE_POLYNOMIAL_HPP

// Multivariate polynomials in u1..un with exact differentiation, plus a
// small recursive-descent parser for arithmetic expressions over them.
// Grammar (explicit '*' required, '^' takes a nonnegative integer literal):
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := ('+' | '-')* base ('^' uint)?
//   base   := number | 'u' index | '(' expr ')'
//
// Polynomials are kept canonical: monomials sorted by graded lexicographic
// exponent order, like terms merged, zero coefficients dropped.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "perwave/types.hpp"

namespace perwave {

struct Monomial {
  double coeff = 0.0;
  std::vector<int> exponents;  // length n
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double value) {
    Polynomial p(nvars);
    if (value != 0.0) p.terms_.push_back({value, std::vector<int>(nvars, 0)});
    return p;
  }

  static Polynomial variable(int nvars, int index) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    e[static_cast<std::size_t>(index)] = 1;
    p.terms_.push_back({1.0, std::move(e)});
    return p;
  }

  int nvars() const { return nvars_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double eval(const Vec& u) const {
    double acc = 0.0;
    for (const auto& m : terms_) {
      double t = m.coeff;
      for (int v = 0; v < nvars_; ++v)
        for (int k = 0; k < m.exponents[static_cast<std::size_t>(v)]; ++k) t *= u(v);
      acc += t;
    }
    return acc;
  }

  // Exact partial derivative with respect to u_{var}.
  Polynomial derivative(int var) const {
    Polynomial out(nvars_);
    for (const auto& m : terms_) {
      const int e = m.exponents[static_cast<std::size_t>(var)];
      if (e == 0) continue;
      Monomial d = m;
      d.coeff *= e;
      d.exponents[static_cast<std::size_t>(var)] = e - 1;
      out.terms_.push_back(std::move(d));
    }
    out.normalize();
    return out;
  }

  Polynomial& operator+=(const Polynomial& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    normalize();
    return *this;
  }

  Polynomial operator-() const {
    Polynomial out = *this;
    for (auto& m : out.terms_) m.coeff = -m.coeff;
    return out;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a += -b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(a.nvars_);
    out.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ma : a.terms_)
      for (const auto& mb : b.terms_) {
        Monomial m;
        m.coeff = ma.coeff * mb.coeff;
        m.exponents.resize(static_cast<std::size_t>(a.nvars_));
        for (int v = 0; v < a.nvars_; ++v)
          m.exponents[static_cast<std::size_t>(v)] =
              ma.exponents[static_cast<std::size_t>(v)] + mb.exponents[static_cast<std::size_t>(v)];
        out.terms_.push_back(std::move(m));
      }
    out.normalize();
    return out;
  }

  Polynomial pow(int e) const {
    if (e < 0) throw ConfigError("polynomial: negative exponent");
    Polynomial out = constant(nvars_, 1.0);
    for (int k = 0; k < e; ++k) out = out * (*this);
    return out;
  }

  // Canonical text form; parse(print(p)) == p.
  std::string print() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& m : terms_) {
      double c = m.coeff;
      if (first) {
        if (c < 0) { os << "-"; c = -c; }
      } else {
        os << (c < 0 ? " - " : " + ");
        c = std::abs(c);
      }
      first = false;
      bool has_var = false;
      for (int v = 0; v < nvars_; ++v) has_var |= m.exponents[static_cast<std::size_t>(v)] > 0;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", c);
      if (!has_var || c != 1.0) {
        os << buf;
        if (has_var) os << "*";
      }
      bool first_var = true;
      for (int v = 0; v < nvars_; ++v) {
        const int e = m.exponents[static_cast<std::size_t>(v)];
        if (e == 0) continue;
        if (!first_var) os << "*";
        first_var = false;
        os << "u" << (v + 1);
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

  void normalize() {
    std::map<std::vector<int>, double> merged;
    for (auto& m : terms_) merged[m.exponents] += m.coeff;
    std::vector<Monomial> out;
    out.reserve(merged.size());
    for (auto& [e, c] : merged)
      if (c != 0.0) out.push_back({c, e});
    auto degree = [](const std::vector<int>& e) {
      int d = 0;
      for (int x : e) d += x;
      return d;
    };
    std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) {
      const int da = degree(a.exponents), db = degree(b.exponents);
      if (da != db) return da > db;
      return a.exponents > b.exponents;
    });
    terms_ = std::move(out);
  }

 private:
  int nvars_ = 0;
  std::vector<Monomial> terms_;
};

namespace poly_detail {

class Parser {
 public:
  Parser(std::string_view text, int nvars) : text_(text), nvars_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("flux expression, position " + std::to_string(pos_ + 1) +
                      ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc += -term();
      else return acc;
    }
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (eat('*')) acc = acc * factor();
    return acc;
  }

  Polynomial factor() {
    int sign = 1;
    for (;;) {
      if (eat('-')) sign = -sign;
      else if (eat('+')) continue;
      else break;
    }
    Polynomial b = base();
    if (eat('^')) b = b.pow(parse_exponent());
    if (sign < 0) b = -b;
    return b;
  }

  Polynomial base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (c == 'u') return variable();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return Polynomial::constant(nvars_, number());
    if (std::isalpha(static_cast<unsigned char>(c))) fail("unknown variable name (use u1..un)");
    fail(std::string("unexpected character '") + c + "'");
  }

  Polynomial variable() {
    ++pos_;  // 'u'
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected variable index after 'u'");
    std::size_t len = 0;
    const int idx = std::stoi(std::string(text_.substr(pos_)), &len);
    pos_ += len;
    if (idx < 1 || idx > nvars_)
      fail("unknown variable name u" + std::to_string(idx) + " (n = " +
           std::to_string(nvars_) + ")");
    return Polynomial::variable(nvars_, idx - 1);
  }

  double number() {
    std::size_t len = 0;
    double v = 0.0;
    try {
      v = std::stod(std::string(text_.substr(pos_)), &len);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += len;
    return v;
  }

  int parse_exponent() {
    skip_ws();
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '.'))
      fail("exponent must be a nonnegative integer literal");
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected integer exponent after '^'");
    std::size_t len = 0;
    const long e = std::stol(std::string(text_.substr(pos_)), &len);
    if (pos_ + len < text_.size() && text_[pos_ + len] == '.')
      fail("exponent must be a nonnegative integer literal");
    pos_ += len;
    if (e > 64) fail("exponent too large");
    return static_cast<int>(e);
  }

  std::string_view text_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace poly_detail

inline Polynomial parse_flux_expression(std::string_view text, int nvars) {
  return poly_detail::Parser(text, nvars).parse();
}

}  // namespace perwave

#endif
