#include "akit/bundle_map.hpp"

namespace akit {

namespace {

bool same_algebroid(const AlgebroidPtr& a, const AlgebroidPtr& b) {
  return a == b || (a->name() == b->name() && a->rank() == b->rank() && a->ring() == b->ring());
}

// Images sending each source-ring variable to itself except t ↦ time_image.
std::vector<Polynomial> time_substitution(const LieAlgebroid& A, const Polynomial& time_image) {
  std::vector<Polynomial> images;
  for (int i = 0; i < A.base_dim(); ++i) images.push_back(A.coordinate(i));
  images.push_back(time_image);
  return images;
}

}  // namespace

// ---------------------------------------------------------------------------
// BundleMap

BundleMap::BundleMap(AlgebroidPtr source, AlgebroidPtr target, std::vector<Polynomial> base_map, PolyMatrix fiber,
                     std::string name)
    : source_(std::move(source)), target_(std::move(target)), name_(std::move(name)) {
  if (!source_ || !target_) throw BundleMapError("bundle map needs source and target algebroids");
  if (static_cast<int>(base_map.size()) != target_->base_dim()) {
    throw BundleMapError("base map has " + std::to_string(base_map.size()) + " components, target base has dimension " +
                         std::to_string(target_->base_dim()));
  }
  if (static_cast<int>(fiber.size()) != target_->rank()) throw BundleMapError("fiber matrix has wrong row count");
  const Ring& ring = source_->ring();
  for (auto& p : base_map) base_.push_back(p.embed(ring));
  for (auto& row : fiber) {
    if (static_cast<int>(row.size()) != source_->rank()) throw BundleMapError("fiber matrix has wrong column count");
    std::vector<Polynomial> embedded;
    for (auto& p : row) embedded.push_back(p.embed(ring));
    fiber_.push_back(std::move(embedded));
  }
}

BundleMap BundleMap::identity(const AlgebroidPtr& A) {
  std::vector<Polynomial> base;
  for (int i = 0; i < A->base_dim(); ++i) base.push_back(A->coordinate(i));
  PolyMatrix fiber(A->rank(), std::vector<Polynomial>(A->rank(), A->zero()));
  for (int a = 0; a < A->rank(); ++a) fiber[a][a] = A->constant(1);
  return BundleMap(A, A, std::move(base), std::move(fiber), "id_" + A->name());
}

bool BundleMap::depends_on_time() const {
  for (const auto& p : base_) {
    if (p.depends_on(kTimeVariable)) return true;
  }
  for (const auto& row : fiber_) {
    for (const auto& p : row) {
      if (p.depends_on(kTimeVariable)) return true;
    }
  }
  return false;
}

Polynomial BundleMap::pull_function(const Polynomial& f) const {
  std::vector<Polynomial> images = base_;
  images.push_back(source_->time());
  return f.embed(target_->ring()).compose(images);
}

AlgebroidForm BundleMap::pull_covector(int b) const {
  AlgebroidForm w(source_->ring(), source_->rank(), 1);
  for (int a = 0; a < source_->rank(); ++a) w.add({a}, fiber_[b][a]);
  return w;
}

BundleMap BundleMap::at_time(const Rational& s) const { return reparametrize(0, s); }

BundleMap BundleMap::reparametrize(const Rational& scale, const Rational& offset) const {
  const LieAlgebroid& A = *source_;
  const auto images = time_substitution(A, A.time() * scale + A.constant(offset));
  std::vector<Polynomial> base;
  for (const auto& p : base_) base.push_back(p.compose(images));
  PolyMatrix fiber;
  for (const auto& row : fiber_) {
    std::vector<Polynomial> r;
    for (const auto& p : row) r.push_back(p.compose(images));
    fiber.push_back(std::move(r));
  }
  return BundleMap(source_, target_, std::move(base), std::move(fiber), name_);
}

bool operator==(const BundleMap& a, const BundleMap& b) {
  return same_algebroid(a.source_, b.source_) && same_algebroid(a.target_, b.target_) && a.base_ == b.base_ &&
         a.fiber_ == b.fiber_;
}

// ---------------------------------------------------------------------------
// SupportedSection

SupportedSection::SupportedSection(const BundleMap& map, std::vector<Polynomial> components)
    : SupportedSection(map.base_map(), std::move(components)) {
  if (static_cast<int>(components_.size()) != map.target()->rank()) {
    throw BundleMapError("supported section needs one component per target frame element");
  }
  for (auto& c : components_) c = c.embed(map.source()->ring());
}

SupportedSection::SupportedSection(std::vector<Polynomial> base_map, std::vector<Polynomial> components)
    : base_(std::move(base_map)), components_(std::move(components)) {}

// ---------------------------------------------------------------------------
// Pullback and morphism check

AlgebroidForm pullback(const BundleMap& F, const AlgebroidForm& w) {
  const LieAlgebroid& M = *F.source();
  const LieAlgebroid& N = *F.target();
  if (w.rank() != N.rank()) throw BundleMapError("rank mismatch in pullback");
  AlgebroidForm out(M.ring(), M.rank(), w.degree());
  std::vector<std::optional<AlgebroidForm>> covectors(N.rank());
  auto covector = [&](int b) -> const AlgebroidForm& {
    if (!covectors[b]) covectors[b] = F.pull_covector(b);
    return *covectors[b];
  };
  for (const auto& [I, g] : w.components()) {
    AlgebroidForm term = M.function(F.pull_function(g));
    for (int b : I) {
      term = wedge(term, covector(b));
      if (term.is_zero()) break;
    }
    if (!term.is_zero()) out += term;
  }
  return out;
}

CheckReport is_morphism(const BundleMap& F) {
  const LieAlgebroid& M = *F.source();
  const LieAlgebroid& N = *F.target();
  CheckReport report;
  report.name = "is_morphism(" + (F.name().empty() ? std::string("map") : F.name()) + ")";
  for (int j = 0; j < N.base_dim(); ++j) {
    const AlgebroidForm lhs = pullback(F, differential(N, N.function(N.coordinate(j))));
    const AlgebroidForm rhs = differential(M, M.function(F.base_map()[j]));
    const AlgebroidForm diff = lhs - rhs;
    report.expect_zero("Phi*(d " + N.coordinates()[j] + ") - d(Phi* " + N.coordinates()[j] + ")", diff.is_zero(),
                       diff.to_string());
  }
  for (int b = 0; b < N.rank(); ++b) {
    const AlgebroidForm lhs = pullback(F, N.covector_differential(b));
    const AlgebroidForm rhs = differential(M, F.pull_covector(b));
    const AlgebroidForm diff = lhs - rhs;
    const std::string eps = "eps^" + std::to_string(b + 1);
    report.expect_zero("Phi*(d " + eps + ") - d(Phi* " + eps + ")", diff.is_zero(), diff.to_string());
  }
  if (F.depends_on_time()) report.notes.push_back("checked as an identity in t");
  return report;
}

// ---------------------------------------------------------------------------
// Contraction and the derivation/section correspondence

AlgebroidForm contraction(const SupportedSection& theta, const BundleMap& F, const AlgebroidForm& w) {
  const LieAlgebroid& M = *F.source();
  const LieAlgebroid& N = *F.target();
  if (w.rank() != N.rank()) throw BundleMapError("rank mismatch in contraction");
  if (theta.size() != N.rank()) throw BundleMapError("section length differs from target rank");
  if (theta.base_map() != F.base_map()) throw BundleMapError("section and bundle map cover different base maps");
  if (w.degree() == 0) return AlgebroidForm(M.ring(), M.rank(), 0);

  AlgebroidForm out(M.ring(), M.rank(), w.degree() - 1);
  std::vector<std::optional<AlgebroidForm>> covectors(N.rank());
  auto covector = [&](int b) -> const AlgebroidForm& {
    if (!covectors[b]) covectors[b] = F.pull_covector(b);
    return *covectors[b];
  };
  for (const auto& [I, g] : w.components()) {
    const Polynomial gphi = F.pull_function(g);
    for (std::size_t j = 0; j < I.size(); ++j) {
      const Polynomial& th = theta[I[j]];
      if (th.is_zero()) continue;
      Polynomial coeff = gphi * th;
      if (j % 2 == 1) coeff = -coeff;
      AlgebroidForm term = M.function(coeff);
      for (std::size_t q = 0; q < I.size() && !term.is_zero(); ++q) {
        if (q != j) term = wedge(term, covector(I[q]));
      }
      if (!term.is_zero()) out += term;
    }
  }
  return out;
}

SupportedSection derivation_to_section(std::span<const Polynomial> values, const BundleMap& F) {
  if (static_cast<int>(values.size()) != F.target()->rank()) {
    throw BundleMapError("derivation must be given on every basis 1-form");
  }
  return SupportedSection(F, std::vector<Polynomial>(values.begin(), values.end()));
}

// ---------------------------------------------------------------------------
// Composition

PolyMatrix pull_matrix(const BundleMap& F, const PolyMatrix& m) {
  PolyMatrix out;
  for (const auto& row : m) {
    std::vector<Polynomial> r;
    for (const auto& p : row) r.push_back(F.pull_function(p));
    out.push_back(std::move(r));
  }
  return out;
}

BundleMap compose(const BundleMap& outer, const BundleMap& inner) {
  if (!same_algebroid(outer.source(), inner.target())) {
    throw BundleMapError("cannot compose: target of inner map differs from source of outer map");
  }
  const LieAlgebroid& M = *inner.source();
  std::vector<Polynomial> base;
  for (const auto& p : outer.base_map()) base.push_back(inner.pull_function(p));
  const PolyMatrix pulled = pull_matrix(inner, outer.fiber());
  const int rp = outer.target()->rank();
  const int rn = inner.target()->rank();
  PolyMatrix fiber(rp, std::vector<Polynomial>(M.rank(), M.zero()));
  for (int c = 0; c < rp; ++c) {
    for (int b = 0; b < rn; ++b) {
      if (pulled[c][b].is_zero()) continue;
      for (int a = 0; a < M.rank(); ++a) {
        if (!inner.fiber(b, a).is_zero()) fiber[c][a] += pulled[c][b] * inner.fiber(b, a);
      }
    }
  }
  std::string name;
  if (!outer.name().empty() || !inner.name().empty()) name = outer.name() + "." + inner.name();
  return BundleMap(inner.source(), outer.target(), std::move(base), std::move(fiber), std::move(name));
}

}  // namespace akit
