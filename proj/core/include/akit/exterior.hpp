#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "akit/polynomial.hpp"

namespace akit {

/// Strictly increasing list of 0-based frame indices. Printed 1-based.
using MultiIndex = std::vector<int>;

class FormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exterior form of fixed degree over a frame of rank r, polynomial coefficients.
///
/// Only strictly increasing multi-indices are stored and zero components are
/// dropped, so equality is structural. A form whose degree exceeds the rank
/// has no admissible multi-index and is always zero.
class AlgebroidForm {
 public:
  using ComponentMap = std::map<MultiIndex, Polynomial>;

  AlgebroidForm(Ring ring, int rank, int degree);

  /// Degree-0 form.
  static AlgebroidForm function(const Polynomial& f, int rank);
  /// coefficient · e^{i1}∧…∧e^{ik}; the indices may be in any order and are sorted with sign.
  static AlgebroidForm basis(const Polynomial& coefficient, int rank, std::vector<int> indices);
  /// Basis covector e^a.
  static AlgebroidForm covector(const Ring& ring, int rank, int a);
  /// Σ_a coefficients[a]·e^a.
  static AlgebroidForm one_form(std::span<const Polynomial> coefficients);

  const Ring& ring() const { return ring_; }
  int rank() const { return rank_; }
  int degree() const { return degree_; }
  const ComponentMap& components() const { return components_; }
  bool is_zero() const { return components_.empty(); }

  Polynomial component(const MultiIndex& index) const;
  /// Adds `coefficient` to the component at a strictly increasing multi-index.
  void add(const MultiIndex& index, const Polynomial& coefficient);

  /// Degree-0 value (zero polynomial if the form vanishes).
  Polynomial as_function() const;

  AlgebroidForm operator-() const;
  AlgebroidForm& operator+=(const AlgebroidForm& other);
  AlgebroidForm& operator-=(const AlgebroidForm& other);
  AlgebroidForm& operator*=(const Polynomial& f);
  AlgebroidForm& operator*=(const Rational& s);
  friend AlgebroidForm operator+(AlgebroidForm a, const AlgebroidForm& b) { return a += b; }
  friend AlgebroidForm operator-(AlgebroidForm a, const AlgebroidForm& b) { return a -= b; }
  friend AlgebroidForm operator*(const Polynomial& f, AlgebroidForm a) { return a *= f; }
  friend AlgebroidForm operator*(const Rational& s, AlgebroidForm a) { return a *= s; }
  friend bool operator==(const AlgebroidForm& a, const AlgebroidForm& b) {
    return a.rank_ == b.rank_ && a.degree_ == b.degree_ && a.ring_ == b.ring_ && a.components_ == b.components_;
  }

  /// Applies `fn` to every coefficient; the result may live in another ring.
  template <class Fn>
  AlgebroidForm transform(const Ring& target, Fn&& fn) const {
    AlgebroidForm out(target, rank_, degree_);
    for (const auto& [index, c] : components_) out.add(index, fn(c));
    return out;
  }

  /// Text rendering: "coeff*e^1^e^3 + ..." in lexicographic multi-index order.
  std::string to_string() const;

 private:
  void require_compatible(const AlgebroidForm& other, const char* op) const;

  Ring ring_;
  int rank_;
  int degree_;
  ComponentMap components_;
};

/// Graded-commutative exterior product.
AlgebroidForm wedge(const AlgebroidForm& a, const AlgebroidForm& b);

/// Interior product in the first slot: (i_v b)_J = Σ_a v^a b_{aJ}.
AlgebroidForm contract_first(const AlgebroidForm& b, std::span<const Polynomial> v);

/// Sorts `indices` in place, returning the permutation sign or 0 on a repeat.
int sort_with_sign(std::vector<int>& indices);

std::string multi_index_string(const MultiIndex& index);

}  // namespace akit
