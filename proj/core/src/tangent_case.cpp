#include "akit/tangent_case.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <map>

namespace akit {

namespace {

void require_tangent(const LieAlgebroid& A) {
  if (A.rank() != A.base_dim()) throw TangentCaseError(A.name() + " is not a tangent bundle (rank differs from dimension)");
  for (int a = 0; a < A.rank(); ++a) {
    for (int i = 0; i < A.base_dim(); ++i) {
      if (A.anchor(a, i) != A.constant(a == i ? 1 : 0)) throw TangentCaseError(A.name() + " anchor is not the identity");
    }
  }
}

std::string point_string(const std::vector<Rational>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += to_string(p[i]);
  }
  return s + ")";
}

}  // namespace

AlgebroidPtr tangent_algebroid(int m, const std::string& prefix, std::string name) {
  if (m < 0) throw TangentCaseError("negative dimension");
  std::vector<std::string> coords;
  for (int i = 0; i < m; ++i) coords.push_back(prefix + std::to_string(i + 1));
  if (name.empty()) name = "TR" + std::to_string(m);
  LieAlgebroid::Builder b(std::move(name), coords, m);
  for (int a = 0; a < m; ++a) b.anchor(a, a, Polynomial::constant(b.ring(), 1));
  return std::make_shared<const LieAlgebroid>(std::move(b).build());
}

NaturalHomotopy homotopy_from_map(const std::vector<Polynomial>& phi, const AlgebroidPtr& source,
                                  const AlgebroidPtr& target, std::string name) {
  require_tangent(*source);
  require_tangent(*target);
  if (static_cast<int>(phi.size()) != target->base_dim()) throw TangentCaseError("phi needs one component per target coordinate");
  const Ring& ring = source->ring();
  std::vector<Polynomial> base;
  PolyMatrix fiber;
  std::vector<Polynomial> theta;
  for (const auto& p : phi) {
    const Polynomial q = p.embed(ring);
    std::vector<Polynomial> row;
    for (const auto& x : source->coordinates()) row.push_back(q.diff(x));
    fiber.push_back(std::move(row));
    theta.push_back(q.diff(kTimeVariable));
    base.push_back(q);
  }
  BundleMap family(source, target, std::move(base), std::move(fiber), name);
  return NaturalHomotopy::smooth(std::move(family), std::move(theta), std::move(name));
}

NaturalHomotopy homotopy_from_map(const std::vector<Polynomial>& phi, int m, int n, std::string name) {
  const AlgebroidPtr source = tangent_algebroid(m, "x");
  const AlgebroidPtr target = m == n ? source : tangent_algebroid(n, "y");
  return homotopy_from_map(phi, source, target, std::move(name));
}

// ---------------------------------------------------------------------------
// SubalgebroidPresentation

SubalgebroidPresentation::SubalgebroidPresentation(AlgebroidPtr ambient, std::vector<int> dropped_coordinates,
                                                   std::vector<int> kept_frame)
    : ambient_(std::move(ambient)), dropped_(std::move(dropped_coordinates)), kept_frame_(std::move(kept_frame)) {
  const LieAlgebroid& M = *ambient_;
  std::sort(dropped_.begin(), dropped_.end());
  std::sort(kept_frame_.begin(), kept_frame_.end());
  if (std::adjacent_find(dropped_.begin(), dropped_.end()) != dropped_.end() ||
      std::adjacent_find(kept_frame_.begin(), kept_frame_.end()) != kept_frame_.end()) {
    throw TangentCaseError("repeated index in subalgebroid presentation");
  }
  for (int i : dropped_) {
    if (i < 0 || i >= M.base_dim()) throw TangentCaseError("dropped coordinate out of range");
  }
  for (int a : kept_frame_) {
    if (a < 0 || a >= M.rank()) throw TangentCaseError("kept frame index out of range");
  }
  std::vector<std::string> names;
  for (int i = 0; i < M.base_dim(); ++i) {
    if (!std::binary_search(dropped_.begin(), dropped_.end(), i)) {
      kept_coords_.push_back(i);
      names.push_back(M.coordinates()[i]);
    }
  }

  LieAlgebroid::Builder builder(M.name() + "|R", names, static_cast<int>(kept_frame_.size()));
  const Ring& rring = builder.ring();
  // Restriction to R: dropped coordinates ↦ 0, kept ones to the R coordinate.
  std::vector<Polynomial> restrict_images;
  std::vector<Polynomial> inclusion_base;
  for (int i = 0; i < M.base_dim(); ++i) {
    const bool dropped = std::binary_search(dropped_.begin(), dropped_.end(), i);
    Polynomial img = dropped ? Polynomial(rring) : Polynomial::variable(rring, M.coordinates()[i]);
    restrict_images.push_back(img);
    inclusion_base.push_back(img);
  }
  restrict_images.push_back(Polynomial::variable(rring, kTimeVariable));
  const auto restrict = [&](const Polynomial& p) { return p.compose(restrict_images); };

  closure_.name = "subalgebroid_closure(" + M.name() + ")";
  const auto frame = [](int a) { return "e_" + std::to_string(a + 1); };
  for (std::size_t ka = 0; ka < kept_frame_.size(); ++ka) {
    const int a = kept_frame_[ka];
    for (int i = 0; i < M.base_dim(); ++i) {
      const Polynomial rho = restrict(M.anchor(a, i));
      const auto it = std::find(kept_coords_.begin(), kept_coords_.end(), i);
      if (it == kept_coords_.end()) {
        closure_.expect_zero("anchor(" + frame(a) + ")^" + M.coordinates()[i] + " on R", rho.is_zero(), rho.to_string());
      } else if (!rho.is_zero()) {
        builder.anchor(static_cast<int>(ka), static_cast<int>(it - kept_coords_.begin()), rho);
      }
    }
    for (std::size_t kb = ka + 1; kb < kept_frame_.size(); ++kb) {
      const int b = kept_frame_[kb];
      for (int c = 0; c < M.rank(); ++c) {
        const Polynomial s = restrict(M.structure(c, a, b));
        const auto it = std::find(kept_frame_.begin(), kept_frame_.end(), c);
        if (it == kept_frame_.end()) {
          closure_.expect_zero("[" + frame(a) + "," + frame(b) + "]^" + std::to_string(c + 1) + " on R", s.is_zero(),
                               s.to_string());
        } else if (!s.is_zero()) {
          builder.structure(static_cast<int>(it - kept_frame_.begin()), static_cast<int>(ka), static_cast<int>(kb), s);
        }
      }
    }
  }
  restricted_ = std::make_shared<const LieAlgebroid>(std::move(builder).build());

  PolyMatrix fiber(M.rank(), std::vector<Polynomial>(kept_frame_.size(), Polynomial(rring)));
  for (std::size_t ka = 0; ka < kept_frame_.size(); ++ka) fiber[kept_frame_[ka]][ka] = Polynomial::constant(rring, 1);
  inclusion_.emplace(restricted_, ambient_, std::move(inclusion_base), std::move(fiber), "i_" + restricted_->name());
}

// ---------------------------------------------------------------------------
// Retractions

std::optional<BundleMap> factor_through(const BundleMap& map, const SubalgebroidPresentation& sub) {
  for (int i : sub.dropped_coordinates()) {
    if (!map.base_map()[i].is_zero()) return std::nullopt;
  }
  for (int b = 0; b < map.target()->rank(); ++b) {
    if (std::binary_search(sub.kept_frame().begin(), sub.kept_frame().end(), b)) continue;
    for (const auto& p : map.fiber()[b]) {
      if (!p.is_zero()) return std::nullopt;
    }
  }
  std::vector<Polynomial> base;
  for (int i : sub.kept_coordinates()) base.push_back(map.base_map()[i]);
  PolyMatrix fiber;
  for (int b : sub.kept_frame()) fiber.push_back(map.fiber()[b]);
  return BundleMap(map.source(), sub.restricted(), std::move(base), std::move(fiber), map.name() + "_check");
}

CheckReport check_retraction(const NaturalHomotopy& H, const SubalgebroidPresentation& sub) {
  CheckReport report;
  report.name = "check_retraction(" + (H.name().empty() ? std::string("homotopy") : H.name()) + ")";
  const LieAlgebroid& M = *sub.ambient();
  if (!(H.source()->ring() == M.ring()) || !(H.target()->ring() == M.ring()) || H.source()->rank() != M.rank() ||
      H.target()->rank() != M.rank()) {
    throw TangentCaseError("retraction homotopy must map the ambient algebroid to itself");
  }
  const CheckReport pre = check_homotopy(H);
  if (!pre.passed()) {
    report.absorb(pre, "precondition: ");
    report.status = Status::precondition_failed;
    report.notes.push_back("homotopy condition fails; retraction conditions not evaluated");
    return report;
  }
  report.absorb(sub.closure(), "A_R closure: ");

  // (a) Φ_0 = id
  const BundleMap phi0 = H.start_map();
  for (int i = 0; i < M.base_dim(); ++i) {
    const Polynomial d = phi0.base_map()[i] - M.coordinate(i);
    report.expect_zero("(a) phi0_" + M.coordinates()[i] + " - " + M.coordinates()[i], d.is_zero(), d.to_string());
  }
  for (int b = 0; b < M.rank(); ++b) {
    for (int a = 0; a < M.rank(); ++a) {
      const Polynomial d = phi0.fiber(b, a) - M.constant(a == b ? 1 : 0);
      report.expect_zero("(a) Phi0[" + std::to_string(b + 1) + "][" + std::to_string(a + 1) + "] - delta", d.is_zero(),
                         d.to_string());
    }
  }

  // (b) Φ_1 lands in A_R
  const BundleMap phi1 = H.end_map();
  for (int i : sub.dropped_coordinates()) {
    const Polynomial& p = phi1.base_map()[i];
    report.expect_zero("(b) phi1_" + M.coordinates()[i] + " (dropped coordinate)", p.is_zero(), p.to_string());
  }
  for (int b = 0; b < M.rank(); ++b) {
    if (std::binary_search(sub.kept_frame().begin(), sub.kept_frame().end(), b)) continue;
    for (int a = 0; a < M.rank(); ++a) {
      const Polynomial& p = phi1.fiber(b, a);
      report.expect_zero("(b) Phi1[" + std::to_string(b + 1) + "][" + std::to_string(a + 1) + "] (outside A_R)",
                         p.is_zero(), p.to_string());
    }
  }

  const auto check = factor_through(phi1, sub);
  if (!check) {
    report.notes.push_back("Phi1 does not factor through A_R; condition (c) not evaluated");
    return report;
  }
  report.absorb(is_morphism(*check), "(c) Phi1_check morphism: ");

  // (c) Φ̌_1 ∘ i = id_{A_R}
  const BundleMap loop = compose(*check, sub.inclusion());
  const LieAlgebroid& R = *sub.restricted();
  for (int i = 0; i < R.base_dim(); ++i) {
    const Polynomial d = loop.base_map()[i] - R.coordinate(i);
    report.expect_zero("(c) (Phi1_check o i)_" + R.coordinates()[i] + " - " + R.coordinates()[i], d.is_zero(),
                       d.to_string());
  }
  for (int b = 0; b < R.rank(); ++b) {
    for (int a = 0; a < R.rank(); ++a) {
      const Polynomial d = loop.fiber(b, a) - R.constant(a == b ? 1 : 0);
      report.expect_zero("(c) (Phi1_check o i)[" + std::to_string(b + 1) + "][" + std::to_string(a + 1) + "] - delta",
                         d.is_zero(), d.to_string());
    }
  }
  return report;
}

CheckReport check_transversality(const std::vector<Polynomial>& phi_check, const LieAlgebroid& R,
                                 const std::vector<std::string>& source_coordinates,
                                 const std::vector<std::vector<Rational>>& samples) {
  CheckReport report;
  report.name = "check_transversality(" + R.name() + ")";
  const int dim_r = R.base_dim();
  if (static_cast<int>(phi_check.size()) != dim_r) throw TangentCaseError("phi_check needs one component per coordinate of R");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& sample = samples[s];
    if (sample.size() != source_coordinates.size()) throw TangentCaseError("sample has wrong dimension");
    std::map<std::string, Rational> at_m{{std::string(kTimeVariable), Rational(0)}};
    for (std::size_t i = 0; i < sample.size(); ++i) at_m[source_coordinates[i]] = sample[i];
    std::map<std::string, Rational> at_y{{std::string(kTimeVariable), Rational(0)}};
    for (int j = 0; j < dim_r; ++j) at_y[R.coordinates()[j]] = phi_check[j].evaluate(at_m);

    const Eigen::Index cols = static_cast<Eigen::Index>(source_coordinates.size()) + R.rank();
    Eigen::MatrixXd block(dim_r, cols);
    for (int j = 0; j < dim_r; ++j) {
      for (std::size_t i = 0; i < source_coordinates.size(); ++i) {
        block(j, static_cast<Eigen::Index>(i)) = to_double(phi_check[j].diff(source_coordinates[i]).evaluate(at_m));
      }
      for (int a = 0; a < R.rank(); ++a) {
        block(j, static_cast<Eigen::Index>(source_coordinates.size()) + a) = to_double(R.anchor(a, j).evaluate(at_y));
      }
    }
    int rank = 0;
    if (dim_r > 0 && cols > 0) {
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
      const auto& sv = svd.singularValues();
      for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > 1e-9) ++rank;
      }
    }
    const std::string label = "sample " + point_string(sample);
    report.metrics.push_back({label + " rank", static_cast<double>(rank)});
    ++report.identities_checked;
    if (rank != dim_r) report.fail_with(label, "rank " + std::to_string(rank) + " < dim R = " + std::to_string(dim_r));
  }
  return report;
}

}  // namespace akit
