#include "akit/polynomial.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <numeric>
#include <set>

namespace akit {

namespace {

std::atomic<int> g_degree_cap{16};

int exponent_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0, [](int acc, std::uint16_t v) { return acc + v; });
}

void check_cap(int degree) {
  if (degree > g_degree_cap.load(std::memory_order_relaxed)) {
    throw DegreeCapExceeded("total degree " + std::to_string(degree) + " exceeds cap " +
                            std::to_string(g_degree_cap.load()));
  }
}

const std::shared_ptr<const std::vector<std::string>>& empty_names() {
  static const auto names = std::make_shared<const std::vector<std::string>>();
  return names;
}

}  // namespace

int degree_cap() { return g_degree_cap.load(); }

void set_degree_cap(int cap) {
  if (cap < 1) throw std::invalid_argument("degree cap must be positive");
  g_degree_cap.store(cap);
}

// ---------------------------------------------------------------------------
// Ring

Ring::Ring() : names_(empty_names()) {}

Ring::Ring(std::vector<std::string> names) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty() || !std::isalpha(static_cast<unsigned char>(n.front())) ||
        !std::all_of(n.begin(), n.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
      throw PolynomialError("invalid variable name '" + n + "'");
    }
    if (!seen.insert(n).second) throw PolynomialError("duplicate variable name '" + n + "'");
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<std::size_t> Ring::index_of(std::string_view name) const {
  const auto& v = *names_;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == name) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Construction and queries

Polynomial Polynomial::constant(Ring ring, const Rational& value) {
  Polynomial p(std::move(ring));
  p.add_term(Exponent(p.ring_.size(), 0), value);
  return p;
}

Polynomial Polynomial::variable(Ring ring, std::string_view name) {
  Polynomial p(std::move(ring));
  const std::size_t i = p.require_variable(name);
  Exponent e(p.ring_.size(), 0);
  e[i] = 1;
  p.add_term(e, Rational(1));
  return p;
}

Polynomial Polynomial::monomial(Ring ring, Exponent exponent, const Rational& coefficient) {
  Polynomial p(std::move(ring));
  if (exponent.size() != p.ring_.size()) throw PolynomialError("exponent length does not match ring");
  check_cap(exponent_degree(exponent));
  p.add_term(exponent, coefficient);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && exponent_degree(terms_.begin()->first) == 0);
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Exponent(ring_.size(), 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

int Polynomial::total_degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) d = std::max(d, exponent_degree(e));
  return d;
}

int Polynomial::degree_in(std::string_view name) const {
  const auto i = ring_.index_of(name);
  if (!i) return 0;
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max<int>(d, e[*i]);
  return d;
}

void Polynomial::add_term(const Exponent& exponent, const Rational& coefficient) {
  if (coefficient == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponent, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::require_same_ring(const Polynomial& other, const char* op) const {
  if (!(ring_ == other.ring_)) throw PolynomialError(std::string("ring mismatch in ") + op);
}

std::size_t Polynomial::require_variable(std::string_view name) const {
  const auto i = ring_.index_of(name);
  if (!i) throw PolynomialError("unknown variable '" + std::string(name) + "'");
  return *i;
}

// ---------------------------------------------------------------------------
// Arithmetic

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_ring(other, "addition");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_ring(other, "subtraction");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_same_ring(b, "multiplication");
  Polynomial r(a.ring_);
  if (a.is_zero() || b.is_zero()) return r;
  check_cap(a.total_degree() + b.total_degree());
  Exponent e(a.ring_.size());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) { return *this = *this * other; }

Polynomial& Polynomial::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= scalar;
  return *this;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  if (exponent == 0) return constant(ring_, 1);
  if (!is_zero()) check_cap(total_degree() * static_cast<int>(exponent));
  Polynomial result = constant(ring_, 1);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Calculus and substitution

Polynomial Polynomial::diff(std::string_view name) const {
  const std::size_t i = require_variable(name);
  Polynomial r(ring_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponent d = e;
    d[i] -= 1;
    r.add_term(d, c * e[i]);
  }
  return r;
}

Polynomial Polynomial::integrate(std::string_view name, const Rational& lower, const Rational& upper) const {
  const std::size_t i = require_variable(name);
  Polynomial r(ring_);
  for (const auto& [e, c] : terms_) {
    const unsigned k = e[i] + 1U;
    mpz_class up_pow, lo_pow;
    mpz_pow_ui(up_pow.get_mpz_t(), upper.get_num_mpz_t(), k);
    mpz_pow_ui(lo_pow.get_mpz_t(), lower.get_num_mpz_t(), k);
    mpz_class up_den, lo_den;
    mpz_pow_ui(up_den.get_mpz_t(), upper.get_den_mpz_t(), k);
    mpz_pow_ui(lo_den.get_mpz_t(), lower.get_den_mpz_t(), k);
    Rational span = Rational(up_pow, up_den) - Rational(lo_pow, lo_den);
    span.canonicalize();
    Exponent d = e;
    d[i] = 0;
    r.add_term(d, c * span / k);
  }
  return r;
}

Polynomial Polynomial::substitute(std::string_view name, const Polynomial& value) const {
  require_same_ring(value, "substitution");
  const std::size_t idx = require_variable(name);
  std::vector<Polynomial> images;
  images.reserve(ring_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    images.push_back(i == idx ? value : variable(ring_, ring_.name(i)));
  }
  return compose(images);
}

Polynomial Polynomial::compose(std::span<const Polynomial> images) const {
  if (images.size() != ring_.size()) throw PolynomialError("compose: need one image per variable");
  if (images.empty()) return *this;
  const Ring& target = images.front().ring();
  for (const auto& img : images) {
    if (!(img.ring() == target)) throw PolynomialError("compose: images live in different rings");
  }
  // Degree bound before expanding.
  int bound = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (std::size_t i = 0; i < e.size(); ++i) d += e[i] * std::max(images[i].total_degree(), 0);
    bound = std::max(bound, d);
  }
  check_cap(bound);

  std::vector<std::vector<Polynomial>> powers(ring_.size());
  auto power = [&](std::size_t i, unsigned k) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(constant(target, 1));
    while (cache.size() <= k) cache.push_back(cache.back() * images[i]);
    return cache[k];
  };
  Polynomial r(target);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(target, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) term = term * power(i, e[i]);
    }
    r += term;
  }
  return r;
}

Polynomial Polynomial::embed(const Ring& target) const {
  if (ring_ == target) return *this;
  std::vector<std::size_t> map(ring_.size(), 0);
  std::vector<bool> used(ring_.size(), false);
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < e.size(); ++i) used[i] = used[i] || e[i] != 0;
  }
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    if (!used[i]) continue;
    const auto j = target.index_of(ring_.name(i));
    if (!j) throw PolynomialError("cannot embed: variable '" + ring_.name(i) + "' missing from target ring");
    map[i] = *j;
  }
  Polynomial r(target);
  for (const auto& [e, c] : terms_) {
    Exponent d(target.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) d[map[i]] = e[i];
    }
    r.add_term(d, c);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Evaluation

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != ring_.size()) throw PolynomialError("evaluate: point has wrong dimension");
  Rational total = 0;
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) v *= point[i];
    }
    total += v;
  }
  return total;
}

Rational Polynomial::evaluate(const std::map<std::string, Rational>& point) const {
  std::vector<Rational> values(ring_.size(), Rational(0));
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    auto it = point.find(ring_.name(i));
    if (it != point.end()) {
      values[i] = it->second;
    } else if (degree_in(ring_.name(i)) > 0) {
      throw PolynomialError("evaluate: missing assignment for '" + ring_.name(i) + "'");
    }
  }
  return evaluate(std::span<const Rational>(values));
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != ring_.size()) throw PolynomialError("evaluate: point has wrong dimension");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double v = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) v *= point[i];
    }
    total += v;
  }
  return total;
}

Polynomial integrate_t01(const Polynomial& p) { return p.integrate(kTimeVariable, 0, 1); }

// ---------------------------------------------------------------------------
// Printing

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += ring_.name(i);
      if (e[i] > 1) mono += '^' + std::to_string(e[i]);
    }
    std::string body;
    if (mono.empty()) {
      body = mag.get_str();
    } else if (mag == 1) {
      body = mono;
    } else {
      body = mag.get_str() + '*' + mono;
    }
    if (first) {
      if (negative) {
        // A leading minus must belong to a numeric literal.
        out += mono.empty() || mag != 1 ? "-" + body : "-1*" + body;
      } else {
        out += body;
      }
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const Ring& ring) : text_(text), ring_(ring) {}

  Polynomial parse() {
    skip_ws();
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  Polynomial expr() {
    Polynomial acc = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (peek('*')) {
      ++pos_;
      acc = acc * factor();
    }
    return acc;
  }

  Polynomial factor() {
    Polynomial b = base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      const std::string digits = read_digits("exponent");
      unsigned long k = 0;
      try {
        k = std::stoul(digits);
      } catch (const std::exception&) {
        fail("exponent out of range");
      }
      if (k > 65535UL) fail("exponent out of range");
      return b.pow(static_cast<unsigned>(k));
    }
    return b;
  }

  std::string read_digits(const char* what) {
    const std::size_t start = pos_;
    while (digit_at(pos_)) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  Polynomial base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '-' && digit_at(pos_ + 1))) {
      std::string literal;
      if (c == '-') {
        literal = "-";
        ++pos_;
      }
      literal += read_digits("digits");
      if (peek('/')) {
        ++pos_;
        skip_ws();
        const std::size_t den_at = pos_;
        const std::string den = read_digits("denominator");
        if (den.find_first_not_of('0') == std::string::npos) {
          pos_ = den_at;
          fail("zero denominator");
        }
        literal += '/' + den;
      }
      return Polynomial::constant(ring_, parse_rational(literal));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      if (!ring_.contains(name)) throw UnknownVariable(name, start);
      return Polynomial::variable(ring_, name);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const Ring& ring_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(std::string_view text, const Ring& ring) { return PolyParser(text, ring).parse(); }

}  // namespace akit
