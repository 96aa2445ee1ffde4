#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akit/rational.hpp"

namespace akit {

/// Name of the distinguished time variable.
inline constexpr std::string_view kTimeVariable = "t";

/// Ordered list of variable names shared by a family of polynomials.
///
/// Rings compare equal when their name lists are equal; copies share storage,
/// so comparing two polynomials built from the same Ring is a pointer check.
class Ring {
 public:
  Ring();
  explicit Ring(std::vector<std::string> names);

  std::size_t size() const { return names_->size(); }
  const std::string& name(std::size_t i) const { return (*names_)[i]; }
  std::span<const std::string> names() const { return *names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  friend bool operator==(const Ring& a, const Ring& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

class PolynomialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a product would exceed the configured total-degree cap.
class DegreeCapExceeded : public PolynomialError {
 public:
  using PolynomialError::PolynomialError;
};

/// Process-wide total-degree cap (default 16).
int degree_cap();
void set_degree_cap(int cap);

using Exponent = std::vector<std::uint16_t>;

/// Exact multivariate polynomial with rational coefficients.
///
/// Terms are kept in canonical form: no zero coefficients are stored, so
/// structural equality is polynomial equality.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational>;

  Polynomial() = default;
  explicit Polynomial(Ring ring) : ring_(std::move(ring)) {}

  static Polynomial constant(Ring ring, const Rational& value);
  static Polynomial variable(Ring ring, std::string_view name);
  static Polynomial monomial(Ring ring, Exponent exponent, const Rational& coefficient);

  const Ring& ring() const { return ring_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero when absent).
  Rational constant_term() const;
  int total_degree() const;
  int degree_in(std::string_view name) const;
  bool depends_on(std::string_view name) const { return degree_in(name) > 0; }

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& scalar);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.ring_ == b.ring_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned exponent) const;

  /// Formal partial derivative.
  Polynomial diff(std::string_view name) const;

  /// Exact definite integral in `name` over [lower, upper]; the variable is eliminated.
  Polynomial integrate(std::string_view name, const Rational& lower, const Rational& upper) const;

  /// Replaces one variable by a polynomial of the same ring.
  Polynomial substitute(std::string_view name, const Polynomial& value) const;

  /// Simultaneous substitution: variable i of this ring becomes images[i].
  /// All images must share one ring, which becomes the ring of the result.
  Polynomial compose(std::span<const Polynomial> images) const;

  /// Re-expresses the polynomial in `target`, matching variables by name.
  /// Variables that occur must exist in the target ring.
  Polynomial embed(const Ring& target) const;

  /// Exact evaluation; `point` lists one value per ring variable.
  Rational evaluate(std::span<const Rational> point) const;
  /// Evaluation by variable name; throws when an occurring variable is missing.
  Rational evaluate(const std::map<std::string, Rational>& point) const;
  double evaluate(std::span<const double> point) const;

  /// Canonical text in the input grammar; parse(to_string()) round-trips.
  std::string to_string() const;

 private:
  void add_term(const Exponent& exponent, const Rational& coefficient);
  void require_same_ring(const Polynomial& other, const char* op) const;
  std::size_t require_variable(std::string_view name) const;

  Ring ring_;
  TermMap terms_;
};

/// ∫₀¹ p dt over the ring's time variable.
Polynomial integrate_t01(const Polynomial& p);

/// Syntax error with the byte offset into the parsed text.
class ParseError : public PolynomialError {
 public:
  ParseError(std::string message, std::size_t offset)
      : PolynomialError(std::move(message)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownVariable : public ParseError {
 public:
  UnknownVariable(std::string name, std::size_t offset)
      : ParseError("unknown variable '" + name + "'", offset), name_(std::move(name)) {}
  const std::string& variable() const { return name_; }

 private:
  std::string name_;
};

/// Parses the grammar
///   expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
///   factor := base ('^' uint)? ; base := rational | ident | '(' expr ')' ;
///   rational := int ('/' uint)? ; ident := letter (letter|digit)*
/// where int carries an optional leading '-' attached to its digits.
Polynomial parse_poly(std::string_view text, const Ring& ring);

}  // namespace akit
