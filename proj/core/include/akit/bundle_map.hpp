#pragma once

#include <span>
#include <string>
#include <vector>

#include "akit/algebroid.hpp"
#include "akit/exterior.hpp"
#include "akit/report.hpp"

namespace akit {

class BundleMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major matrix of polynomials; rows index the target frame.
using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Vector-bundle map Φ: A_M → A_N over φ: M → N.
///
/// The base map gives y_j = φ_j(x[, t]) and the fiber matrix Φ^b_a satisfies
/// Φ(e_a) = Σ_b Φ^b_a ε_b; all entries live in the source ring. Entries that
/// contain t describe a smooth family Φ_t.
class BundleMap {
 public:
  BundleMap(AlgebroidPtr source, AlgebroidPtr target, std::vector<Polynomial> base_map, PolyMatrix fiber,
            std::string name = {});

  static BundleMap identity(const AlgebroidPtr& algebroid);

  const std::string& name() const { return name_; }
  const AlgebroidPtr& source() const { return source_; }
  const AlgebroidPtr& target() const { return target_; }
  const std::vector<Polynomial>& base_map() const { return base_; }
  const PolyMatrix& fiber() const { return fiber_; }
  const Polynomial& fiber(int b, int a) const { return fiber_[b][a]; }
  bool depends_on_time() const;

  /// f ∘ φ for f in the target ring (t maps to t).
  Polynomial pull_function(const Polynomial& f) const;
  /// Φ*(ε^b) = Σ_a Φ^b_a e^a.
  AlgebroidForm pull_covector(int b) const;

  /// Φ_s for a fixed time s.
  BundleMap at_time(const Rational& s) const;
  /// Substitutes t ← scale·t + offset in every entry.
  BundleMap reparametrize(const Rational& scale, const Rational& offset) const;

  friend bool operator==(const BundleMap& a, const BundleMap& b);

 private:
  AlgebroidPtr source_;
  AlgebroidPtr target_;
  std::vector<Polynomial> base_;
  PolyMatrix fiber_;
  std::string name_;
};

/// Section of the pullback bundle φ*A_N, carrying its base map.
class SupportedSection {
 public:
  SupportedSection(const BundleMap& map, std::vector<Polynomial> components);
  SupportedSection(std::vector<Polynomial> base_map, std::vector<Polynomial> components);

  const std::vector<Polynomial>& base_map() const { return base_; }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& operator[](int b) const { return components_[b]; }
  int size() const { return static_cast<int>(components_.size()); }

  friend bool operator==(const SupportedSection&, const SupportedSection&) = default;

 private:
  std::vector<Polynomial> base_;
  std::vector<Polynomial> components_;
};

/// Φ* on forms: coefficients get y ← φ(x), covectors ε^b ↦ Σ_a Φ^b_a e^a.
AlgebroidForm pullback(const BundleMap& map, const AlgebroidForm& form);

/// Φ*∘d_N = d_M∘Φ* on the generators y_j and ε^b of Ω(A_N).
///
/// Both sides are Φ*-derivations of degree 1 (Φ* is multiplicative and d is
/// a derivation), so agreement on algebra generators forces agreement on all
/// forms. When entries contain t the residuals are identities in t, i.e. the
/// check is "for all t".
CheckReport is_morphism(const BundleMap& map);

/// i_θ^Φ: Ω^k(A_N) → Ω^{k-1}(A_M),
///   i(g ε^{b1}∧…∧ε^{bk}) = (g∘φ) Σ_j (-1)^{j-1} θ^{bj} Φ*ε^{b1}∧…(omit j)…∧Φ*ε^{bk}.
/// Degree-0 input gives the zero function.
AlgebroidForm contraction(const SupportedSection& theta, const BundleMap& map, const AlgebroidForm& form);

/// Degree −1 Φ*-derivation V, given by its values V(ε^b), to the section θ^b = V(ε^b).
SupportedSection derivation_to_section(std::span<const Polynomial> values, const BundleMap& map);

/// outer ∘ inner: base φ_outer(φ_inner(x)), fiber Φ_outer(φ_inner(x))·Φ_inner(x).
BundleMap compose(const BundleMap& outer, const BundleMap& inner);

/// Entry-wise pull of a target-ring matrix along `map`'s base map.
PolyMatrix pull_matrix(const BundleMap& map, const PolyMatrix& m);

}  // namespace akit
