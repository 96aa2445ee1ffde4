#pragma once

// Natural homotopies Ψ = Φ + θ dt between Lie algebroid morphisms.
//
// A homotopy is stored as a list of pieces covering [0, 1]. Each piece holds a
// polynomial family Φ_t (a BundleMap whose entries contain t) and a supported
// section θ_t, both written in the global time variable and valid on the
// piece's closed interval. Smooth homotopies have one piece; vertical
// composites have several, are continuous in Φ at the junctions, and may jump
// in θ.
//
// Conventions: the homotopy condition is
//   ∂_t Φ_t* = d_M ∘ i_θ + i_θ ∘ d_N,
// and the chain homotopy Θ(w) = ∫₀¹ i_θ(w) dt satisfies
//   Φ_1* − Φ_0* = d_M Θ + Θ d_N.
// For tangent bundles with Φ = dφ_t and θ = ∂φ/∂t this is the classical
// homotopy formula, which the tests use to pin the signs.

#include <optional>
#include <string>
#include <vector>

#include "akit/bundle_map.hpp"

namespace akit {

class HomotopyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HomotopyPiece {
  Rational start;
  Rational end;
  BundleMap family;
  SupportedSection section;
};

class NaturalHomotopy {
 public:
  /// Validates interval coverage, shared base maps, and Φ-continuity at junctions.
  explicit NaturalHomotopy(std::vector<HomotopyPiece> pieces, std::string name = {});

  /// Single piece on [0, 1].
  static NaturalHomotopy smooth(BundleMap family, std::vector<Polynomial> theta, std::string name = {});
  /// Φ_t ≡ Φ, θ = 0.
  static NaturalHomotopy constant(const BundleMap& map, std::string name = {});

  const std::string& name() const { return name_; }
  const std::vector<HomotopyPiece>& pieces() const { return pieces_; }
  bool is_smooth() const { return pieces_.size() == 1; }
  const AlgebroidPtr& source() const { return pieces_.front().family.source(); }
  const AlgebroidPtr& target() const { return pieces_.front().family.target(); }

  /// Φ_0 and Φ_1 (t-free bundle maps).
  BundleMap start_map() const;
  BundleMap end_map() const;

  /// Same homotopy split at the given interior breakpoints.
  NaturalHomotopy refined(const std::vector<Rational>& breakpoints) const;
  std::vector<Rational> breakpoints() const;

 private:
  std::vector<HomotopyPiece> pieces_;
  std::string name_;
};

/// α + β∧dt on A_M × TI, with α of degree k and β of degree k−1 (absent for k = 0).
struct ProductForm {
  AlgebroidForm alpha;
  std::optional<AlgebroidForm> beta;

  int degree() const { return alpha.degree(); }
  friend bool operator==(const ProductForm&, const ProductForm&) = default;
};

/// Builds α + β∧dt, checking degrees; pass std::nullopt for β when α has degree 0.
ProductForm make_product_form(AlgebroidForm alpha, std::optional<AlgebroidForm> beta);

/// d(α + β∧dt) = dα + ((−1)^k ∂_t α + dβ)∧dt.
ProductForm product_differential(const LieAlgebroid& algebroid, const ProductForm& form);

/// Ψ*w = Φ*w − (−1)^{deg w} i_θ^Φ(w)∧dt, for single-piece homotopies.
ProductForm product_pullback(const NaturalHomotopy& homotopy, const AlgebroidForm& form);

/// Ψ* d_N = d_{M×I} Ψ* on the generators y_j and ε^b, for single-piece homotopies.
CheckReport check_product_morphism(const NaturalHomotopy& homotopy);

/// Φ_t a morphism for all t, and the homotopy condition on generators, per piece.
CheckReport check_homotopy(const NaturalHomotopy& homotopy);

/// Θ(w) = Σ_pieces ∫ i_θ(w) dt; the result is free of t.
AlgebroidForm chain_homotopy_operator(const NaturalHomotopy& homotopy, const AlgebroidForm& form);

/// Φ_1*w − Φ_0*w = d Θ(w) + Θ(d w), exact. Reports precondition_failed when
/// the homotopy itself does not pass check_homotopy.
CheckReport verify_chain_homotopy(const NaturalHomotopy& homotopy, const AlgebroidForm& form);

/// Ψ' ∘_H Ψ for Ψ: A_M → A_N (first) and Ψ': A_N → A_P (second):
///   Φ^H = Φ'∘Φ,  θ^H = Φ'(φ)·θ + θ'∘φ.
NaturalHomotopy compose_horizontal(const NaturalHomotopy& first, const NaturalHomotopy& second);

/// Ψ' ∘_V Ψ: runs `first` on [0, 1/2] with t ← 2t, then `second` on [1/2, 1]
/// with t ← 2t − 1; θ picks up the factor 2 of the reparametrization.
NaturalHomotopy compose_vertical(const NaturalHomotopy& first, const NaturalHomotopy& second);

/// Exact piecewise equality of Φ and θ after refining to common breakpoints.
CheckReport compare_homotopies(const NaturalHomotopy& a, const NaturalHomotopy& b, const std::string& name);

/// (K1 ∘_H H1) ∘_V (K0 ∘_H H0) = (K1 ∘_V K0) ∘_H (H1 ∘_V H0), where H0, H1: A_M → A_N
/// and K0, K1: A_N → A_P with H0 ending where H1 starts and likewise for K.
CheckReport interchange_check(const NaturalHomotopy& h0, const NaturalHomotopy& h1, const NaturalHomotopy& k0,
                              const NaturalHomotopy& k1);

}  // namespace akit
