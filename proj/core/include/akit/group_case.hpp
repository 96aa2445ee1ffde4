#pragma once

// Matrix Lie algebras: integrating paths to group elements and checking
// Φ1 = Ad_h ∘ Φ0.
//
// A path θ(t) = Σ_a θ^a(t) E_a in g is integrated with the right-invariant
// convention dh/dt = θ(t)·h(t), h(0) = I, by fixed-step RK4. Morphism
// matrices follow the BundleMap layout: column a holds the coefficients of
// Φ(E_a).
//
// Sign note. With dh/dt = θh, the family Φ_t = Ad_{h(t)}∘Φ0 satisfies
// dΦ_t/dt = ad_θ ∘ Φ_t. The symbolic homotopy condition in homotopy.hpp,
// specialised to a point base, reads dΦ_t/dt = −ad_θ ∘ Φ_t instead, so a
// symbolic natural homotopy with section θ integrates to h from the path −θ.
// The flow helpers here use the +ad_θ form that matches the ODE above.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "akit/algebroid.hpp"
#include "akit/rational.hpp"
#include "akit/report.hpp"

namespace akit {

class GroupCaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense rational matrix, row-major.
using RationalMatrix = std::vector<std::vector<Rational>>;

Eigen::MatrixXd to_eigen(const RationalMatrix& m);

class MatrixLieAlgebra {
 public:
  /// Computes the structure constants exactly; throws if the basis is
  /// dependent or its commutators leave the span.
  MatrixLieAlgebra(std::string name, int n, std::vector<RationalMatrix> basis);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int rank() const { return static_cast<int>(basis_.size()); }
  const RationalMatrix& basis(int a) const { return basis_[a]; }
  const Eigen::MatrixXd& basis_numeric(int a) const { return numeric_[a]; }
  /// c^c_ab with [E_a, E_b] = Σ_c c^c_ab E_c.
  const Rational& structure(int c, int a, int b) const;
  /// The same algebra as a Lie algebroid over a point.
  const AlgebroidPtr& algebroid() const { return algebroid_; }

  /// Σ_a x[a] E_a.
  Eigen::MatrixXd element(std::span<const double> coefficients) const;
  /// ad_X in the basis: (ad_X)^c_b = Σ_a X^a c^c_ab.
  Eigen::MatrixXd ad(std::span<const double> coefficients) const;
  /// Coefficients of M in the basis via the Gram normal equations; throws
  /// when the least-squares residual exceeds 1e-9 (relative to max(1, |M|)).
  Eigen::VectorXd expand(const Eigen::MatrixXd& m) const;
  /// Exact coordinates of a rational matrix in the basis, or std::nullopt.
  std::optional<std::vector<Rational>> expand_exact(const RationalMatrix& m) const;

 private:
  std::string name_;
  int n_;
  std::vector<RationalMatrix> basis_;
  std::vector<Eigen::MatrixXd> numeric_;
  std::vector<Rational> structure_;
  Eigen::MatrixXd gram_;
  AlgebroidPtr algebroid_;
};

struct GroupElement {
  Eigen::MatrixXd matrix;
  int steps = 0;
  std::string method;
  double t0 = 0.0;
  double t1 = 1.0;
  double determinant = 1.0;
  /// exp(∫ tr θ dt); equals 1 for trace-free algebras.
  double expected_determinant = 1.0;
  double determinant_tolerance = 1e-8;

  bool determinant_ok() const;
};

/// RK4 solution of dh/dt = θ(t)h, h(t0) = I, at t1. θ^a are polynomials in t
/// (any ring whose only used variable is t).
GroupElement integrate_path(const MatrixLieAlgebra& algebra, const std::vector<Polynomial>& theta, int steps,
                            double t0 = 0.0, double t1 = 1.0);

/// exp(M) by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

/// Ad_h in the basis: column a holds the coefficients of h E_a h⁻¹.
Eigen::MatrixXd adjoint_matrix(const MatrixLieAlgebra& algebra, const Eigen::MatrixXd& h);

/// Checks ‖Φ1 − Ad_h·Φ0‖_max ≤ tol after confirming Φ0, Φ1 are morphisms.
CheckReport verify_ad(const MatrixLieAlgebra& algebra, const RationalMatrix& phi0, const RationalMatrix& phi1,
                      const GroupElement& h, double tol);
/// As above with a floating-point Φ1; its morphism property is checked to tol.
CheckReport verify_ad(const MatrixLieAlgebra& algebra, const RationalMatrix& phi0, const Eigen::MatrixXd& phi1,
                      const GroupElement& h, double tol);

/// Φ_t = Ad_{h(t)}·Φ0 sampled on the uniform grid t_k = k/steps.
struct SampledFlow {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> h;
  std::vector<Eigen::MatrixXd> phi;
  std::vector<Eigen::VectorXd> theta;
};

SampledFlow flow_homotopy(const MatrixLieAlgebra& algebra, const RationalMatrix& phi0,
                          const std::vector<Polynomial>& theta_hat, int steps);

/// max over interior samples of ‖(Φ_{t+ε} − Φ_{t−ε})/2ε − ad_θ(t)·Φ_t‖_max,
/// with ε = stride/steps.
double flow_fd_residual(const MatrixLieAlgebra& algebra, const SampledFlow& flow, int stride);

}  // namespace akit
