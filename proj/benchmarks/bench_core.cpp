#include <benchmark/benchmark.h>

#include "akit/group_case.hpp"
#include "akit/tangent_case.hpp"

namespace {

using namespace akit;

Polynomial dense(const Ring& ring, int degree) {
  // (1 + x1 + x2 + x3)^degree
  Polynomial base = Polynomial::constant(ring, 1);
  for (const char* v : {"x1", "x2", "x3"}) base += Polynomial::variable(ring, v);
  return base.pow(static_cast<unsigned>(degree));
}

void BM_PolynomialMultiply(benchmark::State& state) {
  const Ring ring({"x1", "x2", "x3", "t"});
  const int d = static_cast<int>(state.range(0));
  const Polynomial a = dense(ring, d);
  const Polynomial b = dense(ring, d) + Polynomial::variable(ring, "t");
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
  state.counters["terms"] = static_cast<double>(a.terms().size());
}
BENCHMARK(BM_PolynomialMultiply)->Arg(2)->Arg(4)->Arg(6);

AlgebroidPtr so3_action() {
  // so(3) acting on R^3 by rotations.
  LieAlgebroid::Builder b("so3xR3", {"x1", "x2", "x3"}, 3);
  const Ring& r = b.ring();
  const auto x = [&](const char* n) { return Polynomial::variable(r, n); };
  b.anchor(0, 1, -x("x3")).anchor(0, 2, x("x2"));
  b.anchor(1, 0, x("x3")).anchor(1, 2, -x("x1"));
  b.anchor(2, 0, -x("x2")).anchor(2, 1, x("x1"));
  const Polynomial one = Polynomial::constant(r, 1);
  b.structure(2, 0, 1, one).structure(0, 1, 2, one).structure(1, 2, 0, one);
  return std::make_shared<const LieAlgebroid>(std::move(b).build());
}

void BM_Differential(benchmark::State& state) {
  const AlgebroidPtr A = so3_action();
  const int k = static_cast<int>(state.range(0));
  AlgebroidForm w(A->ring(), A->rank(), k);
  const Polynomial coeff = dense(A->ring(), 3);
  if (k == 0) {
    w = A->function(coeff);
  } else {
    for (int a = 0; a + k <= A->rank(); ++a) {
      std::vector<int> idx;
      for (int i = 0; i < k; ++i) idx.push_back(a + i);
      w += AlgebroidForm::basis(coeff, A->rank(), idx);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(differential(*A, w));
}
BENCHMARK(BM_Differential)->DenseRange(0, 2);

void BM_CheckHomotopy(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const AlgebroidPtr T = tangent_algebroid(m);
  std::vector<Polynomial> phi;
  const Polynomial t = T->time();
  for (int i = 0; i < m; ++i) {
    const Polynomial xi = T->coordinate(i);
    const Polynomial next = T->coordinate((i + 1) % m);
    phi.push_back((T->constant(1) - t) * xi + t * t * xi * next + t * next * next * next);
  }
  const NaturalHomotopy H = homotopy_from_map(phi, T, T);
  for (auto _ : state) benchmark::DoNotOptimize(check_homotopy(H));
}
BENCHMARK(BM_CheckHomotopy)->DenseRange(1, 4);

void BM_IntegratePath(benchmark::State& state) {
  RationalMatrix e1{{0, 0, 0}, {0, 0, -1}, {0, 1, 0}};
  RationalMatrix e2{{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}};
  RationalMatrix e3{{0, -1, 0}, {1, 0, 0}, {0, 0, 0}};
  const MatrixLieAlgebra g("so3", 3, {e1, e2, e3});
  const Ring ring({"t"});
  const Polynomial t = Polynomial::variable(ring, "t");
  const std::vector<Polynomial> theta{t, t * t, Polynomial::constant(ring, 1)};
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_path(g, theta, steps));
}
BENCHMARK(BM_IntegratePath)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
