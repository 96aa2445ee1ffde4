#pragma once

// Lie algebroids presented in one chart and one global frame.
//
// A LieAlgebroid over coordinates x1..xm with frame e_1..e_r stores
//   anchor      ρ^i_a  : ♯(e_a) = Σ_i ρ^i_a ∂/∂x_i
//   structure   c^c_ab : [e_a, e_b] = Σ_c c^c_ab e_c   (antisymmetric in a, b)
// with polynomial entries. Every coefficient ring is (x1..xm, t); the
// algebroid data itself never depends on t, while forms may, in which case t
// is a parameter the differential does not see.
//
// The differential is evaluated on generators and extended by the Leibniz rule:
//   d f   = Σ_a ρ_a(f) e^a,        ρ_a(f) = Σ_i ρ^i_a ∂f/∂x_i
//   d e^c = -1/2 Σ_{a,b} c^c_ab e^a∧e^b = -Σ_{a<b} c^c_ab e^a∧e^b.
// The second formula comes from the invariant expression
//   (dε)(a0, a1) = ρ(a0)ε(a1) - ρ(a1)ε(a0) - ε([a0, a1])
// applied to ε = e^c on (e_a, e_b): both Lie-derivative terms vanish on a
// constant pairing, leaving <d e^c, e_a∧e_b> = -c^c_ab. Summing over ordered
// pairs counts each a<b twice, hence the 1/2.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "akit/exterior.hpp"
#include "akit/polynomial.hpp"
#include "akit/report.hpp"

namespace akit {

class AlgebroidError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LieAlgebroid {
 public:
  class Builder {
   public:
    Builder(std::string name, std::vector<std::string> coordinates, int rank);

    const Ring& ring() const { return ring_; }
    /// ρ^i_a, 0-based indices.
    Builder& anchor(int a, int i, Polynomial value);
    /// Sets [e_a, e_b] = Σ_c value[c] e_c (and [e_b, e_a] to its negative).
    Builder& bracket(int a, int b, std::vector<Polynomial> value);
    /// c^c_ab for a single c.
    Builder& structure(int c, int a, int b, Polynomial value);
    LieAlgebroid build() &&;

   private:
    std::string name_;
    std::vector<std::string> coordinates_;
    int rank_;
    Ring ring_;
    std::vector<std::vector<Polynomial>> anchor_;
    std::vector<Polynomial> structure_;
  };

  const std::string& name() const { return name_; }
  int base_dim() const { return static_cast<int>(coordinates_.size()); }
  int rank() const { return rank_; }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  /// (coordinates..., t).
  const Ring& ring() const { return ring_; }

  const Polynomial& anchor(int a, int i) const { return anchor_[a][i]; }
  /// ♯(e_a) as a vector field, one component per coordinate.
  std::span<const Polynomial> anchor_field(int a) const { return anchor_[a]; }
  const Polynomial& structure(int c, int a, int b) const { return structure_[index(c, a, b)]; }

  Polynomial coordinate(int i) const;
  Polynomial time() const;
  Polynomial constant(const Rational& value) const { return Polynomial::constant(ring_, value); }
  Polynomial zero() const { return Polynomial(ring_); }
  AlgebroidForm covector(int a) const { return AlgebroidForm::covector(ring_, rank_, a); }
  AlgebroidForm function(const Polynomial& f) const { return AlgebroidForm::function(f, rank_); }

  /// ρ_a(f) = Σ_i ρ^i_a ∂f/∂x_i.
  Polynomial anchor_derivative(int a, const Polynomial& f) const;
  /// d e^c, cached at construction.
  const AlgebroidForm& covector_differential(int c) const { return covector_differentials_[c]; }

 private:
  LieAlgebroid() = default;
  std::size_t index(int c, int a, int b) const {
    return (static_cast<std::size_t>(c) * rank_ + a) * rank_ + b;
  }

  std::string name_;
  std::vector<std::string> coordinates_;
  int rank_ = 0;
  Ring ring_;
  std::vector<std::vector<Polynomial>> anchor_;
  std::vector<Polynomial> structure_;
  std::vector<AlgebroidForm> covector_differentials_;
};

using AlgebroidPtr = std::shared_ptr<const LieAlgebroid>;

/// The algebroid differential d_A; degree k form to degree k+1.
AlgebroidForm differential(const LieAlgebroid& algebroid, const AlgebroidForm& form);

/// d² on every coordinate function and every frame covector.
CheckReport validate_dga(const LieAlgebroid& algebroid);

/// Direct expansion of the bracket axioms: the Jacobi identity on all frame
/// triples (using the Leibniz rule for function coefficients) and the anchor
/// homomorphism condition ρ[e_a, e_b] = [ρe_a, ρe_b].
CheckReport bracket_axioms_oracle(const LieAlgebroid& algebroid);

/// Section Σ_d s[d] e_d of the algebroid.
using Section = std::vector<Polynomial>;

/// [s, u] via the structure functions and the Leibniz rule.
Section section_bracket(const LieAlgebroid& algebroid, const Section& s, const Section& u);

}  // namespace akit
