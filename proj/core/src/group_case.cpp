#include "akit/group_case.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "akit/bundle_map.hpp"

namespace akit {

namespace {

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  RationalMatrix out(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

RationalMatrix commutator(const RationalMatrix& a, const RationalMatrix& b) {
  RationalMatrix ab = multiply(a, b);
  const RationalMatrix ba = multiply(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    for (std::size_t j = 0; j < ab.size(); ++j) ab[i][j] -= ba[i][j];
  }
  return ab;
}

// Row-reduces [B | v] where the columns of B are the flattened basis matrices.
// Returns the solution, or nullopt when v is outside the span. Throws on a
// dependent basis.
std::optional<std::vector<Rational>> solve_exact(const std::vector<RationalMatrix>& basis, const RationalMatrix& m) {
  const std::size_t r = basis.size();
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> rows(n * n, std::vector<Rational>(r + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t a = 0; a < r; ++a) rows[i * n + j][a] = basis[a][i][j];
      rows[i * n + j][r] = m[i][j];
    }
  }
  std::size_t pivot_row = 0;
  std::vector<std::size_t> pivot_of(r);
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t p = pivot_row;
    while (p < rows.size() && rows[p][col] == 0) ++p;
    if (p == rows.size()) throw GroupCaseError("basis matrices are linearly dependent");
    std::swap(rows[p], rows[pivot_row]);
    const Rational inv = 1 / rows[pivot_row][col];
    for (auto& x : rows[pivot_row]) x *= inv;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q == pivot_row || rows[q][col] == 0) continue;
      const Rational f = rows[q][col];
      for (std::size_t k = col; k <= r; ++k) rows[q][k] -= f * rows[pivot_row][k];
    }
    pivot_of[col] = pivot_row++;
  }
  for (std::size_t q = pivot_row; q < rows.size(); ++q) {
    if (rows[q][r] != 0) return std::nullopt;
  }
  std::vector<Rational> x(r);
  for (std::size_t a = 0; a < r; ++a) x[a] = rows[pivot_of[a]][r];
  return x;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<double> eval_path(const std::vector<Polynomial>& theta, double t) {
  std::vector<double> out;
  out.reserve(theta.size());
  for (const auto& p : theta) {
    const Ring& ring = p.ring();
    std::vector<double> point(ring.size(), 0.0);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (ring.name(i) == kTimeVariable) {
        point[i] = t;
      } else if (p.depends_on(ring.name(i))) {
        throw GroupCaseError("path component depends on '" + ring.name(i) + "'; only t is allowed");
      }
    }
    out.push_back(p.evaluate(std::span<const double>(point)));
  }
  return out;
}

void require_path(const MatrixLieAlgebra& g, const std::vector<Polynomial>& theta) {
  if (static_cast<int>(theta.size()) != g.rank()) throw GroupCaseError("path needs one component per basis element");
}

// Integrates on [t0, t1] with `steps` RK4 steps and calls visit(k, h) at every grid point.
template <class Visit>
Eigen::MatrixXd rk4(const MatrixLieAlgebra& g, const std::vector<Polynomial>& theta, int steps, double t0, double t1,
                    Visit&& visit) {
  if (steps < 1) throw GroupCaseError("steps must be at least 1");
  require_path(g, theta);
  const double dt = (t1 - t0) / steps;
  const auto X = [&](double t) {
    const auto c = eval_path(theta, t);
    return g.element(c);
  };
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(g.n(), g.n());
  visit(0, h);
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const Eigen::MatrixXd Xa = X(t);
    const Eigen::MatrixXd Xm = X(t + dt / 2);
    const Eigen::MatrixXd Xb = X(t + dt);
    const Eigen::MatrixXd k1 = Xa * h;
    const Eigen::MatrixXd k2 = Xm * (h + dt / 2 * k1);
    const Eigen::MatrixXd k3 = Xm * (h + dt / 2 * k2);
    const Eigen::MatrixXd k4 = Xb * (h + dt * k3);
    h += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    visit(k + 1, h);
  }
  return h;
}

RationalMatrix square_matrix_check(const RationalMatrix& m, int n, const char* what) {
  if (static_cast<int>(m.size()) != n) throw GroupCaseError(std::string(what) + " has wrong row count");
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != n) throw GroupCaseError(std::string(what) + " has wrong column count");
  }
  return m;
}

BundleMap point_morphism(const MatrixLieAlgebra& g, const RationalMatrix& phi, const std::string& name) {
  const auto& A = g.algebroid();
  PolyMatrix fiber;
  for (const auto& row : phi) {
    std::vector<Polynomial> r;
    for (const auto& x : row) r.push_back(A->constant(x));
    fiber.push_back(std::move(r));
  }
  return BundleMap(A, A, {}, std::move(fiber), name);
}

CheckReport ad_report(const MatrixLieAlgebra& g, const RationalMatrix& phi0, const Eigen::MatrixXd& phi1,
                      const GroupElement& h, double tol, CheckReport report) {
  const Eigen::MatrixXd ad = adjoint_matrix(g, h.matrix);
  const double err = max_abs(phi1 - ad * to_eigen(phi0));
  report.metrics.push_back({"max|Phi1 - Ad_h Phi0|", err});
  report.metrics.push_back({"tol", tol});
  ++report.identities_checked;
  if (!(err <= tol)) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << err;
    report.fail_with("max|Phi1 - Ad_h Phi0|", os.str());
  }
  if (!h.determinant_ok()) report.notes.push_back("det h deviates from exp(integral of tr theta)");
  return report;
}

}  // namespace

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
  const Eigen::Index rows = static_cast<Eigen::Index>(m.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(m.front().size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = to_double(m[i][j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MatrixLieAlgebra

MatrixLieAlgebra::MatrixLieAlgebra(std::string name, int n, std::vector<RationalMatrix> basis)
    : name_(std::move(name)), n_(n), basis_(std::move(basis)) {
  if (n < 1) throw GroupCaseError("matrix size must be positive");
  const int r = rank();
  for (auto& E : basis_) square_matrix_check(E, n, "basis matrix");
  for (const auto& E : basis_) numeric_.push_back(to_eigen(E));
  if (r > 0) solve_exact(basis_, basis_.front());  // throws on dependence

  structure_.assign(static_cast<std::size_t>(r) * r * r, Rational(0));
  LieAlgebroid::Builder builder(name_, {}, r);
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      const auto c = solve_exact(basis_, commutator(basis_[a], basis_[b]));
      if (!c) {
        throw GroupCaseError("[E_" + std::to_string(a + 1) + ", E_" + std::to_string(b + 1) +
                             "] is not in the span of the basis");
      }
      for (int k = 0; k < r; ++k) {
        structure_[(static_cast<std::size_t>(k) * r + a) * r + b] = (*c)[k];
        structure_[(static_cast<std::size_t>(k) * r + b) * r + a] = -(*c)[k];
        if ((*c)[k] != 0) builder.structure(k, a, b, Polynomial::constant(builder.ring(), (*c)[k]));
      }
    }
  }
  algebroid_ = std::make_shared<const LieAlgebroid>(std::move(builder).build());

  gram_.resize(r, r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) gram_(a, b) = numeric_[a].cwiseProduct(numeric_[b]).sum();
  }
}

const Rational& MatrixLieAlgebra::structure(int c, int a, int b) const {
  const int r = rank();
  return structure_[(static_cast<std::size_t>(c) * r + a) * r + b];
}

Eigen::MatrixXd MatrixLieAlgebra::element(std::span<const double> x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (int a = 0; a < rank(); ++a) {
    if (x[a] != 0.0) out += x[a] * numeric_[a];
  }
  return out;
}

Eigen::MatrixXd MatrixLieAlgebra::ad(std::span<const double> x) const {
  const int r = rank();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, r);
  for (int c = 0; c < r; ++c) {
    for (int b = 0; b < r; ++b) {
      for (int a = 0; a < r; ++a) out(c, b) += x[a] * to_double(structure(c, a, b));
    }
  }
  return out;
}

Eigen::VectorXd MatrixLieAlgebra::expand(const Eigen::MatrixXd& m) const {
  const int r = rank();
  Eigen::VectorXd rhs(r);
  for (int a = 0; a < r; ++a) rhs(a) = numeric_[a].cwiseProduct(m).sum();
  const Eigen::VectorXd x = gram_.ldlt().solve(rhs);
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(n_, n_);
  for (int a = 0; a < r; ++a) back += x(a) * numeric_[a];
  const double residual = max_abs(back - m);
  if (residual > 1e-9 * std::max(1.0, max_abs(m))) {
    throw GroupCaseError("matrix lies outside the span of the basis (residual " + std::to_string(residual) + ")");
  }
  return x;
}

std::optional<std::vector<Rational>> MatrixLieAlgebra::expand_exact(const RationalMatrix& m) const {
  square_matrix_check(m, n_, "matrix");
  return solve_exact(basis_, m);
}

// ---------------------------------------------------------------------------
// Integration

bool GroupElement::determinant_ok() const {
  return std::abs(determinant - expected_determinant) <= determinant_tolerance * std::max(1.0, std::abs(expected_determinant));
}

GroupElement integrate_path(const MatrixLieAlgebra& g, const std::vector<Polynomial>& theta, int steps, double t0,
                            double t1) {
  GroupElement out;
  out.matrix = rk4(g, theta, steps, t0, t1, [](int, const Eigen::MatrixXd&) {});
  out.steps = steps;
  out.method = "rk4";
  out.t0 = t0;
  out.t1 = t1;
  out.determinant = out.matrix.determinant();
  // det h(t1) = exp(∫ tr θ dt), with the integral taken exactly.
  if (!theta.empty()) {
    Polynomial trace(theta.front().ring());
    for (int a = 0; a < g.rank(); ++a) {
      Rational tr = 0;
      for (int i = 0; i < g.n(); ++i) tr += g.basis(a)[i][i];
      if (tr != 0) trace += theta[a].embed(trace.ring()) * tr;
    }
    const double integral = to_double(trace.integrate(kTimeVariable, Rational(t0), Rational(t1)).constant_term());
    out.expected_determinant = std::exp(integral);
  }
  return out;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  const double norm = m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd a = m / std::ldexp(1.0, squarings);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / k;
    sum += term;
    if (max_abs(term) < 1e-18 * max_abs(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Eigen::MatrixXd adjoint_matrix(const MatrixLieAlgebra& g, const Eigen::MatrixXd& h) {
  const int r = g.rank();
  const Eigen::MatrixXd hinv = h.inverse();
  Eigen::MatrixXd out(r, r);
  for (int a = 0; a < r; ++a) out.col(a) = g.expand(h * g.basis_numeric(a) * hinv);
  return out;
}

// ---------------------------------------------------------------------------
// Ad verification

CheckReport verify_ad(const MatrixLieAlgebra& g, const RationalMatrix& phi0, const RationalMatrix& phi1,
                      const GroupElement& h, double tol) {
  CheckReport report;
  report.name = "verify_ad(" + g.name() + ")";
  square_matrix_check(phi0, g.rank(), "Phi0");
  square_matrix_check(phi1, g.rank(), "Phi1");
  const CheckReport m0 = is_morphism(point_morphism(g, phi0, "Phi0"));
  const CheckReport m1 = is_morphism(point_morphism(g, phi1, "Phi1"));
  if (!m0.passed() || !m1.passed()) {
    report.absorb(m0, "precondition Phi0: ");
    report.absorb(m1, "precondition Phi1: ");
    report.status = Status::precondition_failed;
    return report;
  }
  return ad_report(g, phi0, to_eigen(phi1), h, tol, std::move(report));
}

CheckReport verify_ad(const MatrixLieAlgebra& g, const RationalMatrix& phi0, const Eigen::MatrixXd& phi1,
                      const GroupElement& h, double tol) {
  CheckReport report;
  report.name = "verify_ad(" + g.name() + ")";
  square_matrix_check(phi0, g.rank(), "Phi0");
  const int r = g.rank();
  if (phi1.rows() != r || phi1.cols() != r) throw GroupCaseError("Phi1 has wrong shape");
  const CheckReport m0 = is_morphism(point_morphism(g, phi0, "Phi0"));
  // Φ1[e_a, e_b] − [Φ1 e_a, Φ1 e_b], numerically.
  double bracket_err = 0.0;
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      for (int c = 0; c < r; ++c) {
        double lhs = 0.0;
        for (int d = 0; d < r; ++d) lhs += phi1(c, d) * to_double(g.structure(d, a, b));
        double rhs = 0.0;
        for (int p = 0; p < r; ++p) {
          for (int q = 0; q < r; ++q) rhs += phi1(p, a) * phi1(q, b) * to_double(g.structure(c, p, q));
        }
        bracket_err = std::max(bracket_err, std::abs(lhs - rhs));
      }
    }
  }
  if (!m0.passed() || bracket_err > tol) {
    report.absorb(m0, "precondition Phi0: ");
    if (bracket_err > tol) report.fail_with("precondition Phi1: bracket defect", std::to_string(bracket_err));
    report.status = Status::precondition_failed;
    return report;
  }
  return ad_report(g, phi0, phi1, h, tol, std::move(report));
}

// ---------------------------------------------------------------------------
// Flow

SampledFlow flow_homotopy(const MatrixLieAlgebra& g, const RationalMatrix& phi0,
                          const std::vector<Polynomial>& theta_hat, int steps) {
  square_matrix_check(phi0, g.rank(), "Phi0");
  const Eigen::MatrixXd p0 = to_eigen(phi0);
  SampledFlow flow;
  rk4(g, theta_hat, steps, 0.0, 1.0, [&](int k, const Eigen::MatrixXd& h) {
    const double t = static_cast<double>(k) / steps;
    flow.times.push_back(t);
    flow.h.push_back(h);
    flow.phi.push_back(adjoint_matrix(g, h) * p0);
    const auto c = eval_path(theta_hat, t);
    flow.theta.push_back(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  });
  return flow;
}

double flow_fd_residual(const MatrixLieAlgebra& g, const SampledFlow& flow, int stride) {
  if (stride < 1) throw GroupCaseError("stride must be at least 1");
  const int last = static_cast<int>(flow.times.size()) - 1;
  double worst = 0.0;
  for (int k = stride; k + stride <= last; ++k) {
    const double eps = flow.times[k + stride] - flow.times[k];
    const Eigen::MatrixXd fd = (flow.phi[k + stride] - flow.phi[k - stride]) / (2 * eps);
    const Eigen::VectorXd& th = flow.theta[k];
    const Eigen::MatrixXd ad = g.ad(std::span<const double>(th.data(), static_cast<std::size_t>(th.size())));
    worst = std::max(worst, max_abs(fd - ad * flow.phi[k]));
  }
  return worst;
}

}  // namespace akit
