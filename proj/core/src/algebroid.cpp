#include "akit/algebroid.hpp"

#include <algorithm>

namespace akit {

namespace {

Ring algebroid_ring(const std::vector<std::string>& coordinates) {
  std::vector<std::string> names = coordinates;
  if (std::find(names.begin(), names.end(), kTimeVariable) != names.end()) {
    throw AlgebroidError("coordinate name 't' is reserved for time");
  }
  names.emplace_back(kTimeVariable);
  return Ring(std::move(names));
}

std::string frame_name(int a) { return "e_" + std::to_string(a + 1); }

}  // namespace

// ---------------------------------------------------------------------------
// Builder

LieAlgebroid::Builder::Builder(std::string name, std::vector<std::string> coordinates, int rank)
    : name_(std::move(name)), coordinates_(std::move(coordinates)), rank_(rank), ring_(algebroid_ring(coordinates_)) {
  if (rank < 0) throw AlgebroidError("negative rank");
  anchor_.assign(rank_, std::vector<Polynomial>(coordinates_.size(), Polynomial(ring_)));
  structure_.assign(static_cast<std::size_t>(rank_) * rank_ * rank_, Polynomial(ring_));
}

LieAlgebroid::Builder& LieAlgebroid::Builder::anchor(int a, int i, Polynomial value) {
  if (a < 0 || a >= rank_ || i < 0 || i >= static_cast<int>(coordinates_.size())) {
    throw AlgebroidError("anchor index out of range");
  }
  anchor_[a][i] = value.embed(ring_);
  return *this;
}

LieAlgebroid::Builder& LieAlgebroid::Builder::structure(int c, int a, int b, Polynomial value) {
  if (a < 0 || b < 0 || c < 0 || a >= rank_ || b >= rank_ || c >= rank_) {
    throw AlgebroidError("structure index out of range");
  }
  if (a == b) {
    if (!value.is_zero()) throw AlgebroidError("[e_a, e_a] must vanish");
    return *this;
  }
  value = value.embed(ring_);
  const auto at = [&](int cc, int aa, int bb) {
    return (static_cast<std::size_t>(cc) * rank_ + aa) * rank_ + bb;
  };
  structure_[at(c, b, a)] = -value;
  structure_[at(c, a, b)] = std::move(value);
  return *this;
}

LieAlgebroid::Builder& LieAlgebroid::Builder::bracket(int a, int b, std::vector<Polynomial> value) {
  if (static_cast<int>(value.size()) != rank_) throw AlgebroidError("bracket value has wrong length");
  for (int c = 0; c < rank_; ++c) structure(c, a, b, std::move(value[c]));
  return *this;
}

LieAlgebroid LieAlgebroid::Builder::build() && {
  const auto check_time_free = [](const Polynomial& p) {
    if (p.depends_on(kTimeVariable)) throw AlgebroidError("algebroid data must not depend on t");
  };
  for (const auto& row : anchor_) std::for_each(row.begin(), row.end(), check_time_free);
  std::for_each(structure_.begin(), structure_.end(), check_time_free);

  LieAlgebroid A;
  A.name_ = std::move(name_);
  A.coordinates_ = std::move(coordinates_);
  A.rank_ = rank_;
  A.ring_ = ring_;
  A.anchor_ = std::move(anchor_);
  A.structure_ = std::move(structure_);
  for (int c = 0; c < A.rank_; ++c) {
    AlgebroidForm de(A.ring_, A.rank_, 2);
    for (int a = 0; a < A.rank_; ++a) {
      for (int b = a + 1; b < A.rank_; ++b) de.add({a, b}, -A.structure(c, a, b));
    }
    A.covector_differentials_.push_back(std::move(de));
  }
  return A;
}

// ---------------------------------------------------------------------------
// Accessors

Polynomial LieAlgebroid::coordinate(int i) const { return Polynomial::variable(ring_, coordinates_.at(i)); }

Polynomial LieAlgebroid::time() const { return Polynomial::variable(ring_, kTimeVariable); }

Polynomial LieAlgebroid::anchor_derivative(int a, const Polynomial& f) const {
  Polynomial out(ring_);
  for (int i = 0; i < base_dim(); ++i) {
    const Polynomial& rho = anchor_[a][i];
    if (rho.is_zero()) continue;
    const Polynomial df = f.diff(coordinates_[i]);
    if (!df.is_zero()) out += rho * df;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differential

AlgebroidForm differential(const LieAlgebroid& A, const AlgebroidForm& w) {
  if (w.rank() != A.rank()) throw AlgebroidError("rank mismatch in differential");
  if (!(w.ring() == A.ring())) throw AlgebroidError("form ring differs from algebroid ring");
  AlgebroidForm out(A.ring(), A.rank(), w.degree() + 1);
  std::vector<int> indices;
  for (const auto& [I, f] : w.components()) {
    // df ∧ e^I
    for (int a = 0; a < A.rank(); ++a) {
      Polynomial g = A.anchor_derivative(a, f);
      if (g.is_zero()) continue;
      indices.assign(1, a);
      indices.insert(indices.end(), I.begin(), I.end());
      const int sign = sort_with_sign(indices);
      if (sign == 0) continue;
      out.add(indices, sign > 0 ? g : -g);
    }
    // f · Σ_j (-1)^j e^{i_0}∧…∧d e^{i_j}∧…
    for (std::size_t j = 0; j < I.size(); ++j) {
      for (const auto& [pq, c] : A.covector_differential(I[j]).components()) {
        indices.assign(I.begin(), I.begin() + static_cast<std::ptrdiff_t>(j));
        indices.insert(indices.end(), pq.begin(), pq.end());
        indices.insert(indices.end(), I.begin() + static_cast<std::ptrdiff_t>(j) + 1, I.end());
        int sign = sort_with_sign(indices);
        if (sign == 0) continue;
        if (j % 2 == 1) sign = -sign;
        Polynomial term = f * c;
        out.add(indices, sign > 0 ? term : -term);
      }
    }
  }
  return out;
}

CheckReport validate_dga(const LieAlgebroid& A) {
  CheckReport report;
  report.name = "validate_dga(" + A.name() + ")";
  for (int i = 0; i < A.base_dim(); ++i) {
    const AlgebroidForm dd = differential(A, differential(A, A.function(A.coordinate(i))));
    report.expect_zero("d^2(" + A.coordinates()[i] + ")", dd.is_zero(), dd.to_string());
  }
  for (int c = 0; c < A.rank(); ++c) {
    const AlgebroidForm dd = differential(A, A.covector_differential(c));
    report.expect_zero("d^2(e^" + std::to_string(c + 1) + ")", dd.is_zero(), dd.to_string());
  }
  if (!report.passed()) report.notes.push_back("d^2 != 0: the bracket/anchor data is not a Lie algebroid");
  return report;
}

// ---------------------------------------------------------------------------
// Bracket-axiom oracle

Section section_bracket(const LieAlgebroid& A, const Section& s, const Section& u) {
  const int r = A.rank();
  if (static_cast<int>(s.size()) != r || static_cast<int>(u.size()) != r) {
    throw AlgebroidError("section has wrong length");
  }
  Section out(r, A.zero());
  for (int a = 0; a < r; ++a) {
    if (s[a].is_zero()) continue;
    for (int b = 0; b < r; ++b) {
      if (u[b].is_zero()) continue;
      const Polynomial sab = s[a] * u[b];
      for (int d = 0; d < r; ++d) {
        if (!A.structure(d, a, b).is_zero()) out[d] += sab * A.structure(d, a, b);
      }
    }
  }
  // Leibniz terms: ρ(s)(u_d) - ρ(u)(s_d).
  for (int d = 0; d < r; ++d) {
    for (int a = 0; a < r; ++a) {
      if (!s[a].is_zero()) out[d] += s[a] * A.anchor_derivative(a, u[d]);
      if (!u[a].is_zero()) out[d] -= u[a] * A.anchor_derivative(a, s[d]);
    }
  }
  return out;
}

CheckReport bracket_axioms_oracle(const LieAlgebroid& A) {
  CheckReport report;
  report.name = "bracket_axioms(" + A.name() + ")";
  const int r = A.rank();
  const int m = A.base_dim();
  auto frame = [&](int a) {
    Section s(r, A.zero());
    s[a] = A.constant(1);
    return s;
  };
  auto structure_section = [&](int a, int b) {
    Section s(r, A.zero());
    for (int d = 0; d < r; ++d) s[d] = A.structure(d, a, b);
    return s;
  };

  // Anchor is a bracket homomorphism: Σ_d c^d_ab ρ^i_d = ρ_a(ρ^i_b) - ρ_b(ρ^i_a).
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      for (int i = 0; i < m; ++i) {
        Polynomial lhs = A.zero();
        for (int d = 0; d < r; ++d) lhs += A.structure(d, a, b) * A.anchor(d, i);
        const Polynomial rhs = A.anchor_derivative(a, A.anchor(b, i)) - A.anchor_derivative(b, A.anchor(a, i));
        const Polynomial diff = lhs - rhs;
        report.expect_zero("anchor[" + frame_name(a) + "," + frame_name(b) + "]^" + A.coordinates()[i],
                           diff.is_zero(), diff.to_string());
      }
    }
  }

  // Jacobi on frame triples.
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      for (int c = b + 1; c < r; ++c) {
        const Section j1 = section_bracket(A, frame(a), structure_section(b, c));
        const Section j2 = section_bracket(A, frame(b), structure_section(c, a));
        const Section j3 = section_bracket(A, frame(c), structure_section(a, b));
        for (int d = 0; d < r; ++d) {
          const Polynomial jac = j1[d] + j2[d] + j3[d];
          report.expect_zero(
              "jacobi(" + frame_name(a) + "," + frame_name(b) + "," + frame_name(c) + ")^" + std::to_string(d + 1),
              jac.is_zero(), jac.to_string());
        }
      }
    }
  }
  if (!report.passed()) report.notes.push_back("bracket axioms violated");
  return report;
}

}  // namespace akit
