#include "generators.hpp"

#include <stdexcept>

#include "akit/tangent_case.hpp"

namespace akit::testgen {

int Rng::uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

bool Rng::coin(double p) { return std::bernoulli_distribution(p)(engine_); }

Rational Rng::small_rational(bool nonzero) {
  for (;;) {
    const int p = uniform(-3, 3);
    const int q = uniform(1, 3);
    if (nonzero && p == 0) continue;
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
}

Polynomial random_poly(Rng& rng, const Ring& ring, const std::vector<std::string>& vars, int max_degree, int max_terms) {
  Polynomial p(ring);
  const int terms = rng.uniform(0, max_terms);
  for (int k = 0; k < terms; ++k) {
    Exponent e(ring.size(), 0);
    const int deg = rng.uniform(0, max_degree);
    for (int d = 0; d < deg && !vars.empty(); ++d) e[*ring.index_of(rng.pick(vars))] += 1;
    p += Polynomial::monomial(ring, e, rng.small_rational(true));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Lie algebras

namespace {

Constants zero_constants(int r) {
  return Constants(r, std::vector<std::vector<Rational>>(r, std::vector<Rational>(r, Rational(0))));
}

void set_bracket(Constants& c, int a, int b, int k, const Rational& v) {
  c[k][a][b] = v;
  c[k][b][a] = -v;
}

Constants direct_sum(const Constants& x, const Constants& y) {
  const int rx = static_cast<int>(x.size());
  const int ry = static_cast<int>(y.size());
  Constants c = zero_constants(rx + ry);
  for (int k = 0; k < rx; ++k)
    for (int a = 0; a < rx; ++a)
      for (int b = 0; b < rx; ++b) c[k][a][b] = x[k][a][b];
  for (int k = 0; k < ry; ++k)
    for (int a = 0; a < ry; ++a)
      for (int b = 0; b < ry; ++b) c[rx + k][rx + a][rx + b] = y[k][a][b];
  return c;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  RationalMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[col]);
    std::swap(inv[p], inv[col]);
    const Rational s = 1 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] *= s;
      inv[col][j] *= s;
    }
    for (std::size_t q = 0; q < n; ++q) {
      if (q == col || a[q][col] == 0) continue;
      const Rational f = a[q][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[q][j] -= f * a[col][j];
        inv[q][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

RationalMatrix int_matrix(std::initializer_list<std::initializer_list<int>> rows) {
  RationalMatrix m;
  for (const auto& row : rows) {
    std::vector<Rational> r;
    for (int x : row) r.emplace_back(x);
    m.push_back(std::move(r));
  }
  return m;
}

// ∫_0^t p ds for p in a ring containing t.
Polynomial antiderivative_t(const Polynomial& p) {
  const std::size_t ti = *p.ring().index_of(kTimeVariable);
  Polynomial out(p.ring());
  for (const auto& [e, c] : p.terms()) {
    Exponent f = e;
    f[ti] += 1;
    out += Polynomial::monomial(p.ring(), f, c / Rational(f[ti]));
  }
  return out;
}

std::vector<std::string> with_time(std::vector<std::string> names, bool time) {
  if (time) names.emplace_back(kTimeVariable);
  return names;
}

}  // namespace

Constants known_algebra(const std::string& name) {
  if (name.rfind("abelian", 0) == 0) return zero_constants(std::stoi(name.substr(7)));
  if (name == "aff") {
    Constants c = zero_constants(2);
    set_bracket(c, 0, 1, 1, 1);
    return c;
  }
  if (name == "heis") {
    Constants c = zero_constants(3);
    set_bracket(c, 0, 1, 2, 1);
    return c;
  }
  if (name == "so3") {
    Constants c = zero_constants(3);
    set_bracket(c, 0, 1, 2, 1);
    set_bracket(c, 1, 2, 0, 1);
    set_bracket(c, 2, 0, 1, 1);
    return c;
  }
  if (name == "sl2") {
    Constants c = zero_constants(3);
    set_bracket(c, 0, 1, 1, 2);
    set_bracket(c, 0, 2, 2, -2);
    set_bracket(c, 1, 2, 0, 1);
    return c;
  }
  if (name == "filiform4") {
    Constants c = zero_constants(4);
    set_bracket(c, 0, 1, 2, 1);
    set_bracket(c, 0, 2, 3, 1);
    return c;
  }
  if (name == "so3+R") return direct_sum(known_algebra("so3"), known_algebra("abelian1"));
  if (name == "sl2+R") return direct_sum(known_algebra("sl2"), known_algebra("abelian1"));
  if (name == "heis+R") return direct_sum(known_algebra("heis"), known_algebra("abelian1"));
  if (name == "aff+aff") return direct_sum(known_algebra("aff"), known_algebra("aff"));
  if (name == "aff+R") return direct_sum(known_algebra("aff"), known_algebra("abelian1"));
  throw std::invalid_argument("unknown algebra " + name);
}

std::vector<std::string> known_algebra_names(int max_rank) {
  std::vector<std::string> out;
  const std::vector<std::pair<std::string, int>> all = {
      {"abelian1", 1}, {"abelian2", 2}, {"aff", 2},      {"abelian3", 3}, {"heis", 3},  {"so3", 3},
      {"sl2", 3},      {"aff+R", 3},    {"abelian4", 4}, {"filiform4", 4}, {"so3+R", 4}, {"sl2+R", 4},
      {"heis+R", 4},   {"aff+aff", 4}};
  for (const auto& [n, r] : all) {
    if (r <= max_rank) out.push_back(n);
  }
  return out;
}

RationalMatrix random_invertible(Rng& rng, int r) {
  for (;;) {
    RationalMatrix p(r, std::vector<Rational>(r));
    for (auto& row : p)
      for (auto& x : row) x = rng.uniform(-2, 2);
    if (inverse(p)) return p;
  }
}

Constants change_basis(const Constants& c, const RationalMatrix& p) {
  const int r = static_cast<int>(c.size());
  const RationalMatrix q = *inverse(p);
  Constants out = zero_constants(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int a = 0; a < r; ++a) {
        if (p[a][i] == 0) continue;
        for (int b = 0; b < r; ++b) {
          if (p[b][j] == 0) continue;
          for (int cc = 0; cc < r; ++cc) {
            if (c[cc][a][b] == 0) continue;
            const Rational w = p[a][i] * p[b][j] * c[cc][a][b];
            for (int k = 0; k < r; ++k) out[k][i][j] += q[k][cc] * w;
          }
        }
      }
  return out;
}

AlgebroidPtr point_algebroid(const std::string& name, const Constants& c) {
  const int r = static_cast<int>(c.size());
  LieAlgebroid::Builder b(name, {}, r);
  for (int a = 0; a < r; ++a)
    for (int bb = a + 1; bb < r; ++bb)
      for (int k = 0; k < r; ++k) {
        if (c[k][a][bb] != 0) b.structure(k, a, bb, Polynomial::constant(b.ring(), c[k][a][bb]));
      }
  return std::make_shared<const LieAlgebroid>(std::move(b).build());
}

AlgebroidPtr random_lie_algebra(Rng& rng, int max_rank, Constants* constants) {
  const std::string name = rng.pick(known_algebra_names(max_rank));
  Constants c = known_algebra(name);
  c = change_basis(c, random_invertible(rng, static_cast<int>(c.size())));
  if (constants) *constants = c;
  return point_algebroid(name, c);
}

AlgebroidPtr mutate(Rng& rng, const Constants& c, const std::string& name) {
  const int r = static_cast<int>(c.size());
  if (r < 2) return point_algebroid(name, c);
  Constants m = c;
  const int a = rng.uniform(0, r - 2);
  const int b = rng.uniform(a + 1, r - 1);
  const int k = rng.uniform(0, r - 1);
  set_bracket(m, a, b, k, m[k][a][b] + rng.small_rational(true));
  return point_algebroid(name + "~", m);
}

MatrixLieAlgebra so3() {
  return MatrixLieAlgebra("so3", 3,
                          {int_matrix({{0, 0, 0}, {0, 0, -1}, {0, 1, 0}}), int_matrix({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}}),
                           int_matrix({{0, -1, 0}, {1, 0, 0}, {0, 0, 0}})});
}

MatrixLieAlgebra heisenberg_matrices() {
  return MatrixLieAlgebra("heis", 3,
                          {int_matrix({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}), int_matrix({{0, 0, 0}, {0, 0, 1}, {0, 0, 0}}),
                           int_matrix({{0, 0, 1}, {0, 0, 0}, {0, 0, 0}})});
}

AlgebroidPtr action_algebroid(const MatrixLieAlgebra& g, const std::string& prefix) {
  const int n = g.n();
  const int r = g.rank();
  std::vector<std::string> coords;
  for (int i = 0; i < n; ++i) coords.push_back(prefix + std::to_string(i + 1));
  LieAlgebroid::Builder b(g.name() + "_action", coords, r);
  const Ring& ring = b.ring();
  for (int a = 0; a < r; ++a) {
    for (int i = 0; i < n; ++i) {
      Polynomial v(ring);
      for (int j = 0; j < n; ++j) {
        if (g.basis(a)[i][j] != 0) v -= Polynomial::variable(ring, coords[j]) * g.basis(a)[i][j];
      }
      b.anchor(a, i, v);
    }
    for (int bb = a + 1; bb < r; ++bb)
      for (int k = 0; k < r; ++k) {
        if (g.structure(k, a, bb) != 0) b.structure(k, a, bb, Polynomial::constant(ring, g.structure(k, a, bb)));
      }
  }
  return std::make_shared<const LieAlgebroid>(std::move(b).build());
}

AlgebroidPtr random_algebroid(Rng& rng) {
  switch (rng.uniform(0, 4)) {
    case 0:
      return tangent_algebroid(rng.uniform(1, 3));
    case 1:
      return action_algebroid(so3());
    case 2:
      return action_algebroid(heisenberg_matrices());
    case 3:
      return random_lie_algebra(rng, 3);
    default:
      return tangent_algebroid(2);
  }
}

AlgebroidForm random_form(Rng& rng, const LieAlgebroid& a, int degree, int max_poly_degree, bool time) {
  AlgebroidForm w(a.ring(), a.rank(), degree);
  if (degree > a.rank()) return w;
  const auto vars = with_time(a.coordinates(), time);
  // All strictly increasing multi-indices of the given degree.
  std::vector<int> idx(degree);
  for (int i = 0; i < degree; ++i) idx[i] = i;
  for (;;) {
    if (rng.coin(0.7)) w.add(idx, random_poly(rng, a.ring(), vars, max_poly_degree, 3));
    int i = degree - 1;
    while (i >= 0 && idx[i] == a.rank() - degree + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < degree; ++j) idx[j] = idx[j - 1] + 1;
  }
  return w;
}

BundleMap random_bundle_map(Rng& rng, const AlgebroidPtr& source, const AlgebroidPtr& target, int max_degree,
                            bool time) {
  const auto vars = with_time(source->coordinates(), time);
  std::vector<Polynomial> base;
  for (int j = 0; j < target->base_dim(); ++j) base.push_back(random_poly(rng, source->ring(), vars, max_degree, 3));
  PolyMatrix fiber(target->rank());
  for (auto& row : fiber)
    for (int a = 0; a < source->rank(); ++a) row.push_back(random_poly(rng, source->ring(), vars, max_degree, 2));
  return BundleMap(source, target, std::move(base), std::move(fiber), "F");
}

std::vector<Polynomial> random_section(Rng& rng, const LieAlgebroid& source, int rank, int max_degree, bool time) {
  const auto vars = with_time(source.coordinates(), time);
  std::vector<Polynomial> out;
  for (int b = 0; b < rank; ++b) out.push_back(random_poly(rng, source.ring(), vars, max_degree, 3));
  return out;
}

NaturalHomotopy random_tangent_homotopy(Rng& rng, const AlgebroidPtr& source, const AlgebroidPtr& target,
                                        int max_degree) {
  const auto vars = with_time(source->coordinates(), true);
  std::vector<Polynomial> phi;
  for (int j = 0; j < target->base_dim(); ++j) phi.push_back(random_poly(rng, source->ring(), vars, max_degree, 4));
  return homotopy_from_map(phi, source, target, "H");
}

NaturalHomotopy random_tangent_homotopy(Rng& rng, int m, int n, int max_degree) {
  const AlgebroidPtr source = tangent_algebroid(m, "x");
  const AlgebroidPtr target = m == n ? source : tangent_algebroid(n, "y");
  return random_tangent_homotopy(rng, source, target, max_degree);
}

NaturalHomotopy random_tangent_continuation(Rng& rng, const BundleMap& start, int max_degree) {
  const auto& source = start.source();
  const auto vars = with_time(source->coordinates(), true);
  const Polynomial t = source->time();
  std::vector<Polynomial> phi;
  for (const auto& p : start.base_map()) phi.push_back(p + t * random_poly(rng, source->ring(), vars, max_degree, 3));
  return homotopy_from_map(phi, source, start.target(), "H'");
}

NaturalHomotopy random_lie_homotopy(Rng& rng) {
  Constants c = rng.coin() ? known_algebra("heis") : known_algebra("abelian" + std::to_string(rng.uniform(1, 3)));
  if (rng.coin()) c = change_basis(c, random_invertible(rng, static_cast<int>(c.size())));
  const AlgebroidPtr target = point_algebroid("n", c);
  const int r = target->rank();
  const bool point_source = rng.coin(0.3);
  const AlgebroidPtr source = point_source ? target : tangent_algebroid(rng.uniform(1, 2));
  const LieAlgebroid& M = *source;
  const int s = M.rank();

  // Φ_0: identity on a point source, zero from a tangent bundle.
  PolyMatrix phi0(r, std::vector<Polynomial>(s, M.zero()));
  if (point_source) {
    for (int b = 0; b < r; ++b) phi0[b][b] = M.constant(1);
  }
  const std::vector<Polynomial> theta = random_section(rng, M, r, point_source ? 2 : 1, true);
  std::vector<AlgebroidForm> dtheta;
  for (const auto& th : theta) dtheta.push_back(differential(M, M.function(th)));

  // Picard iteration Φ_t = Φ_0 + ∫_0^t (dθ^b − Σ C^b_cd θ^c Φ_s^d); exact after ≤ r+1 rounds (nilpotent).
  PolyMatrix phi = phi0;
  for (int round = 0; round <= r + 1; ++round) {
    PolyMatrix next = phi0;
    for (int b = 0; b < r; ++b) {
      for (int a = 0; a < s; ++a) {
        Polynomial integrand = dtheta[b].component({a});
        for (int cc = 0; cc < r; ++cc)
          for (int d = 0; d < r; ++d) {
            if (c[b][cc][d] != 0 && !theta[cc].is_zero()) integrand -= theta[cc] * phi[d][a] * c[b][cc][d];
          }
        next[b][a] += antiderivative_t(integrand);
      }
    }
    phi = std::move(next);
  }
  BundleMap family(source, target, {}, std::move(phi), "Phi");
  return NaturalHomotopy::smooth(std::move(family), theta, "L");
}

}  // namespace akit::testgen
