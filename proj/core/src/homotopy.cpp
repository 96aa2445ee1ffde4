#include "akit/homotopy.hpp"

#include <algorithm>
#include <set>

namespace akit {

namespace {

Polynomial time_derivative(const Polynomial& p) { return p.diff(kTimeVariable); }

AlgebroidForm time_derivative(const AlgebroidForm& w) {
  return w.transform(w.ring(), [](const Polynomial& c) { return c.diff(kTimeVariable); });
}

Polynomial reparametrized(const LieAlgebroid& A, const Polynomial& p, const Rational& scale, const Rational& offset) {
  std::vector<Polynomial> images;
  for (int i = 0; i < A.base_dim(); ++i) images.push_back(A.coordinate(i));
  images.push_back(A.time() * scale + A.constant(offset));
  return p.compose(images);
}

std::string piece_prefix(const NaturalHomotopy& H, std::size_t p) {
  if (H.is_smooth()) return {};
  const auto& piece = H.pieces()[p];
  return "piece[" + to_string(piece.start) + "," + to_string(piece.end) + "] ";
}

void require_time_free(const AlgebroidForm& w) {
  for (const auto& [I, c] : w.components()) {
    if (c.depends_on(kTimeVariable)) throw HomotopyError("form on the target must not depend on t");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// NaturalHomotopy

NaturalHomotopy::NaturalHomotopy(std::vector<HomotopyPiece> pieces, std::string name)
    : pieces_(std::move(pieces)), name_(std::move(name)) {
  if (pieces_.empty()) throw HomotopyError("homotopy needs at least one piece");
  if (pieces_.front().start != 0 || pieces_.back().end != 1) throw HomotopyError("pieces must cover [0, 1]");
  const auto& src = pieces_.front().family.source();
  const auto& tgt = pieces_.front().family.target();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& piece = pieces_[i];
    if (!(piece.start < piece.end)) throw HomotopyError("piece interval is empty or reversed");
    if (i > 0 && pieces_[i - 1].end != piece.start) throw HomotopyError("pieces are not contiguous");
    if (piece.family.source()->ring() != src->ring() || piece.family.target()->ring() != tgt->ring() ||
        piece.family.source()->rank() != src->rank() || piece.family.target()->rank() != tgt->rank()) {
      throw HomotopyError("pieces map between different algebroids");
    }
    if (piece.section.base_map() != piece.family.base_map()) {
      throw HomotopyError("section and family of a piece cover different base maps");
    }
    if (piece.section.size() != tgt->rank()) throw HomotopyError("section length differs from target rank");
    if (i > 0 && !(pieces_[i - 1].family.at_time(piece.start) == piece.family.at_time(piece.start))) {
      throw HomotopyError("family is discontinuous at t = " + to_string(piece.start));
    }
  }
}

NaturalHomotopy NaturalHomotopy::smooth(BundleMap family, std::vector<Polynomial> theta, std::string name) {
  SupportedSection section(family, std::move(theta));
  std::vector<HomotopyPiece> pieces;
  pieces.push_back({Rational(0), Rational(1), std::move(family), std::move(section)});
  return NaturalHomotopy(std::move(pieces), std::move(name));
}

NaturalHomotopy NaturalHomotopy::constant(const BundleMap& map, std::string name) {
  std::vector<Polynomial> zero(map.target()->rank(), map.source()->zero());
  return smooth(map, std::move(zero), std::move(name));
}

BundleMap NaturalHomotopy::start_map() const { return pieces_.front().family.at_time(0); }

BundleMap NaturalHomotopy::end_map() const { return pieces_.back().family.at_time(1); }

std::vector<Rational> NaturalHomotopy::breakpoints() const {
  std::vector<Rational> out;
  out.reserve(pieces_.size() + 1);
  out.push_back(pieces_.front().start);
  for (const auto& p : pieces_) out.push_back(p.end);
  return out;
}

NaturalHomotopy NaturalHomotopy::refined(const std::vector<Rational>& breakpoints) const {
  std::vector<HomotopyPiece> out;
  for (const auto& piece : pieces_) {
    std::vector<Rational> cuts;
    for (const auto& b : breakpoints) {
      if (piece.start < b && b < piece.end) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Rational lo = piece.start;
    for (const auto& c : cuts) {
      out.push_back({lo, c, piece.family, piece.section});
      lo = c;
    }
    out.push_back({lo, piece.end, piece.family, piece.section});
  }
  return NaturalHomotopy(std::move(out), name_);
}

// ---------------------------------------------------------------------------
// Product algebroid A_M × TI

ProductForm make_product_form(AlgebroidForm alpha, std::optional<AlgebroidForm> beta) {
  if (alpha.degree() == 0) {
    if (beta) throw HomotopyError("degree-0 product form has no dt part");
  } else {
    if (!beta) throw HomotopyError("product form of positive degree needs a dt part");
    if (beta->degree() != alpha.degree() - 1 || beta->rank() != alpha.rank() || !(beta->ring() == alpha.ring())) {
      throw HomotopyError("dt part must have degree k-1 on the same frame");
    }
  }
  return ProductForm{std::move(alpha), std::move(beta)};
}

ProductForm product_differential(const LieAlgebroid& A, const ProductForm& w) {
  const int k = w.degree();
  AlgebroidForm alpha = differential(A, w.alpha);
  AlgebroidForm beta = time_derivative(w.alpha);
  if (k % 2 == 1) beta = -beta;
  if (w.beta) beta += differential(A, *w.beta);
  return ProductForm{std::move(alpha), std::move(beta)};
}

ProductForm product_pullback(const NaturalHomotopy& H, const AlgebroidForm& w) {
  if (!H.is_smooth()) throw HomotopyError("product_pullback needs a single-piece homotopy; evaluate per piece");
  const auto& piece = H.pieces().front();
  AlgebroidForm alpha = pullback(piece.family, w);
  if (w.degree() == 0) return ProductForm{std::move(alpha), std::nullopt};
  AlgebroidForm beta = contraction(piece.section, piece.family, w);
  // −(−1)^l
  if (w.degree() % 2 == 0) beta = -beta;
  return ProductForm{std::move(alpha), std::move(beta)};
}

CheckReport check_product_morphism(const NaturalHomotopy& H) {
  CheckReport report;
  report.name = "check_product_morphism(" + (H.name().empty() ? std::string("homotopy") : H.name()) + ")";
  const LieAlgebroid& M = *H.source();
  const LieAlgebroid& N = *H.target();
  const auto compare = [&](const std::string& label, const AlgebroidForm& w) {
    const ProductForm lhs = product_differential(M, product_pullback(H, w));
    const ProductForm rhs = product_pullback(H, differential(N, w));
    const AlgebroidForm da = lhs.alpha - rhs.alpha;
    report.expect_zero(label + " (form part)", da.is_zero(), da.to_string());
    AlgebroidForm db = lhs.beta ? *lhs.beta : AlgebroidForm(M.ring(), M.rank(), w.degree());
    if (rhs.beta) db -= *rhs.beta;
    report.expect_zero(label + " (dt part)", db.is_zero(), db.to_string());
  };
  for (int j = 0; j < N.base_dim(); ++j) compare("d Psi*(" + N.coordinates()[j] + ")", N.function(N.coordinate(j)));
  for (int b = 0; b < N.rank(); ++b) compare("d Psi*(eps^" + std::to_string(b + 1) + ")", N.covector(b));
  return report;
}

// ---------------------------------------------------------------------------
// Homotopy condition and chain homotopy

CheckReport check_homotopy(const NaturalHomotopy& H) {
  CheckReport report;
  report.name = "check_homotopy(" + (H.name().empty() ? std::string("homotopy") : H.name()) + ")";
  const LieAlgebroid& M = *H.source();
  const LieAlgebroid& N = *H.target();
  for (std::size_t p = 0; p < H.pieces().size(); ++p) {
    const auto& piece = H.pieces()[p];
    const std::string prefix = piece_prefix(H, p);
    const BundleMap& F = piece.family;
    const SupportedSection& theta = piece.section;

    CheckReport morphism = is_morphism(F);
    report.identities_checked += morphism.identities_checked;
    for (const auto& r : morphism.residuals) report.fail_with(prefix + "(i) " + r.label, r.value);

    for (int j = 0; j < N.base_dim(); ++j) {
      const AlgebroidForm dy = differential(N, N.function(N.coordinate(j)));
      const Polynomial residual = time_derivative(F.base_map()[j]) - contraction(theta, F, dy).as_function();
      report.expect_zero(prefix + "(ii) d/dt phi_" + N.coordinates()[j] + " - i(d " + N.coordinates()[j] + ")",
                         residual.is_zero(), residual.to_string());
    }
    for (int b = 0; b < N.rank(); ++b) {
      const AlgebroidForm eps = N.covector(b);
      const AlgebroidForm lhs = time_derivative(F.pull_covector(b));
      const AlgebroidForm di = differential(M, contraction(theta, F, eps));
      const AlgebroidForm id = contraction(theta, F, N.covector_differential(b));
      const AlgebroidForm residual = lhs - di - id;
      const std::string e = "eps^" + std::to_string(b + 1);
      report.expect_zero(prefix + "(ii) d/dt Phi*(" + e + ") - d i(" + e + ") - i(d " + e + ")", residual.is_zero(),
                         residual.to_string());
    }
  }
  return report;
}

AlgebroidForm chain_homotopy_operator(const NaturalHomotopy& H, const AlgebroidForm& w) {
  require_time_free(w);
  const LieAlgebroid& M = *H.source();
  if (w.degree() == 0) return AlgebroidForm(M.ring(), M.rank(), 0);
  AlgebroidForm out(M.ring(), M.rank(), w.degree() - 1);
  for (const auto& piece : H.pieces()) {
    const AlgebroidForm i = contraction(piece.section, piece.family, w);
    out += i.transform(M.ring(), [&](const Polynomial& c) { return c.integrate(kTimeVariable, piece.start, piece.end); });
  }
  return out;
}

CheckReport verify_chain_homotopy(const NaturalHomotopy& H, const AlgebroidForm& w) {
  CheckReport report;
  report.name = "chain_homotopy(" + (H.name().empty() ? std::string("homotopy") : H.name()) + ", " + w.to_string() + ")";
  const CheckReport pre = check_homotopy(H);
  if (!pre.passed()) {
    report.absorb(pre, "precondition: ");
    report.status = Status::precondition_failed;
    report.notes.push_back("homotopy condition fails; chain-homotopy identity not evaluated");
    return report;
  }
  const LieAlgebroid& M = *H.source();
  const LieAlgebroid& N = *H.target();
  const AlgebroidForm theta_w = chain_homotopy_operator(H, w);
  AlgebroidForm residual = pullback(H.end_map(), w) - pullback(H.start_map(), w);
  if (w.degree() > 0) residual -= differential(M, theta_w);
  residual -= chain_homotopy_operator(H, differential(N, w));
  report.expect_zero("Phi1* w - Phi0* w - d Theta(w) - Theta(d w)", residual.is_zero(), residual.to_string());
  return report;
}

// ---------------------------------------------------------------------------
// Compositions

NaturalHomotopy compose_horizontal(const NaturalHomotopy& first, const NaturalHomotopy& second) {
  std::vector<Rational> cuts = first.breakpoints();
  const auto more = second.breakpoints();
  cuts.insert(cuts.end(), more.begin(), more.end());
  const NaturalHomotopy H = first.refined(cuts);
  const NaturalHomotopy K = second.refined(cuts);
  if (H.pieces().size() != K.pieces().size()) throw HomotopyError("internal: refinement mismatch");

  std::vector<HomotopyPiece> pieces;
  for (std::size_t p = 0; p < H.pieces().size(); ++p) {
    const auto& hp = H.pieces()[p];
    const auto& kp = K.pieces()[p];
    BundleMap family = compose(kp.family, hp.family);  // throws on algebroid mismatch
    const PolyMatrix pulled = pull_matrix(hp.family, kp.family.fiber());
    const LieAlgebroid& M = *hp.family.source();
    std::vector<Polynomial> theta;
    for (std::size_t c = 0; c < pulled.size(); ++c) {
      Polynomial v = hp.family.pull_function(kp.section[static_cast<int>(c)]);
      for (std::size_t b = 0; b < pulled[c].size(); ++b) {
        if (!pulled[c][b].is_zero() && !hp.section[static_cast<int>(b)].is_zero()) {
          v += pulled[c][b] * hp.section[static_cast<int>(b)];
        }
      }
      theta.push_back(v.embed(M.ring()));
    }
    SupportedSection section(family, std::move(theta));
    pieces.push_back({hp.start, hp.end, std::move(family), std::move(section)});
  }
  std::string name;
  if (!first.name().empty() || !second.name().empty()) name = second.name() + "*H" + first.name();
  return NaturalHomotopy(std::move(pieces), std::move(name));
}

NaturalHomotopy compose_vertical(const NaturalHomotopy& first, const NaturalHomotopy& second) {
  if (!(first.end_map() == second.start_map())) {
    throw HomotopyError("vertical composition needs Phi_1 of the first homotopy to equal Phi_0 of the second");
  }
  std::vector<HomotopyPiece> pieces;
  const auto append = [&](const NaturalHomotopy& H, const Rational& offset) {
    const LieAlgebroid& M = *H.source();
    for (const auto& piece : H.pieces()) {
      // Global time s on [(a+o)/2, (b+o)/2] maps to local time 2s − o.
      BundleMap family = piece.family.reparametrize(2, -offset);
      std::vector<Polynomial> theta;
      for (const auto& c : piece.section.components()) theta.push_back(reparametrized(M, c, 2, -offset) * Rational(2));
      SupportedSection section(family, std::move(theta));
      pieces.push_back({(piece.start + offset) / 2, (piece.end + offset) / 2, std::move(family), std::move(section)});
    }
  };
  append(first, 0);
  append(second, 1);
  std::string name;
  if (!first.name().empty() || !second.name().empty()) name = second.name() + "*V" + first.name();
  return NaturalHomotopy(std::move(pieces), std::move(name));
}

CheckReport compare_homotopies(const NaturalHomotopy& a, const NaturalHomotopy& b, const std::string& name) {
  CheckReport report;
  report.name = name;
  std::vector<Rational> cuts = a.breakpoints();
  const auto more = b.breakpoints();
  cuts.insert(cuts.end(), more.begin(), more.end());
  const NaturalHomotopy A = a.refined(cuts);
  const NaturalHomotopy B = b.refined(cuts);
  if (A.pieces().size() != B.pieces().size()) {
    report.fail_with("pieces", "different piece structure");
    return report;
  }
  for (std::size_t p = 0; p < A.pieces().size(); ++p) {
    const auto& pa = A.pieces()[p];
    const auto& pb = B.pieces()[p];
    const std::string prefix = "piece[" + to_string(pa.start) + "," + to_string(pa.end) + "] ";
    if (pa.family.base_map().size() != pb.family.base_map().size() ||
        pa.family.fiber().size() != pb.family.fiber().size() || pa.section.size() != pb.section.size()) {
      report.fail_with(prefix + "shape", "dimension mismatch");
      continue;
    }
    for (std::size_t j = 0; j < pa.family.base_map().size(); ++j) {
      const Polynomial d = pa.family.base_map()[j] - pb.family.base_map()[j];
      report.expect_zero(prefix + "phi_" + std::to_string(j + 1), d.is_zero(), d.to_string());
    }
    for (std::size_t r = 0; r < pa.family.fiber().size(); ++r) {
      for (std::size_t c = 0; c < pa.family.fiber()[r].size(); ++c) {
        const Polynomial d = pa.family.fiber()[r][c] - pb.family.fiber()[r][c];
        report.expect_zero(prefix + "Phi[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]", d.is_zero(),
                           d.to_string());
      }
    }
    for (int c = 0; c < pa.section.size(); ++c) {
      const Polynomial d = pa.section[c] - pb.section[c];
      report.expect_zero(prefix + "theta[" + std::to_string(c + 1) + "]", d.is_zero(), d.to_string());
    }
  }
  return report;
}

CheckReport interchange_check(const NaturalHomotopy& h0, const NaturalHomotopy& h1, const NaturalHomotopy& k0,
                              const NaturalHomotopy& k1) {
  const NaturalHomotopy lhs = compose_vertical(compose_horizontal(h0, k0), compose_horizontal(h1, k1));
  const NaturalHomotopy rhs = compose_horizontal(compose_vertical(h0, h1), compose_vertical(k0, k1));
  return compare_homotopies(lhs, rhs, "interchange");
}

}  // namespace akit
