#pragma once

// Tangent bundles and deformation retractions onto subalgebroids.
//
// For A = TM the natural homotopies are exactly Ψ = dψ with ψ(x, t) = φ_t(x),
// so Φ_t is the Jacobian of φ_t and θ = ∂φ/∂t. This is the reference case
// that fixes the sign convention of check_homotopy.

#include <optional>
#include <string>
#include <vector>

#include "akit/homotopy.hpp"

namespace akit {

class TangentCaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tℝ^m with coordinates prefix1..prefixm, identity anchor and zero bracket.
AlgebroidPtr tangent_algebroid(int m, const std::string& prefix = "x", std::string name = {});

/// Ψ = dψ for ψ(x, t) = φ(x, t): fiber = ∂φ_j/∂x_i, θ^j = ∂φ_j/∂t. Both
/// algebroids must be tangent bundles; φ lives in the source ring.
NaturalHomotopy homotopy_from_map(const std::vector<Polynomial>& phi, const AlgebroidPtr& source,
                                  const AlgebroidPtr& target, std::string name = {});
/// Same on Tℝ^m → Tℝ^n (one shared algebroid when m = n, coordinates x and y otherwise).
NaturalHomotopy homotopy_from_map(const std::vector<Polynomial>& phi, int m, int n, std::string name = {});

/// A_R ⊂ A_M in adapted form: R = {x_i = 0 for i dropped}, A_R spanned by the
/// kept frame elements restricted to R.
class SubalgebroidPresentation {
 public:
  SubalgebroidPresentation(AlgebroidPtr ambient, std::vector<int> dropped_coordinates, std::vector<int> kept_frame);

  const AlgebroidPtr& ambient() const { return ambient_; }
  const std::vector<int>& dropped_coordinates() const { return dropped_; }
  const std::vector<int>& kept_coordinates() const { return kept_coords_; }
  const std::vector<int>& kept_frame() const { return kept_frame_; }
  /// Restriction of the ambient data to R and the kept frame.
  const AlgebroidPtr& restricted() const { return restricted_; }
  /// i_{A_R}: A_R → A_M.
  const BundleMap& inclusion() const { return *inclusion_; }
  /// Brackets of kept elements stay in the kept span on R, and their anchors
  /// are tangent to R.
  const CheckReport& closure() const { return closure_; }

 private:
  AlgebroidPtr ambient_;
  std::vector<int> dropped_;
  std::vector<int> kept_coords_;
  std::vector<int> kept_frame_;
  AlgebroidPtr restricted_;
  std::optional<BundleMap> inclusion_;
  CheckReport closure_;
};

/// Φ̌: A_M → A_R with i_{A_R}∘Φ̌ = Φ, when Φ's base lands in R and its fiber
/// image lies in the kept span; std::nullopt otherwise.
std::optional<BundleMap> factor_through(const BundleMap& map, const SubalgebroidPresentation& sub);

/// Deformation retraction of A_M onto A_R: H passes check_homotopy, Φ_0 = id,
/// Φ_1 factors through A_R, and Φ̌_1∘i_{A_R} = id_{A_R}.
CheckReport check_retraction(const NaturalHomotopy& homotopy, const SubalgebroidPresentation& sub);

/// Im(dφ̌)_m + Im(♯_{A_R})_{φ̌(m)} = T_{φ̌(m)}R at every sample m, by numeric
/// rank (singular values above 1e-9). `phi_check` has one component per
/// coordinate of R and lives in a ring containing M's coordinates (and t, unused).
CheckReport check_transversality(const std::vector<Polynomial>& phi_check, const LieAlgebroid& restricted,
                                 const std::vector<std::string>& source_coordinates,
                                 const std::vector<std::vector<Rational>>& samples);

}  // namespace akit
