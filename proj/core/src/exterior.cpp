#include "akit/exterior.hpp"

#include <algorithm>

namespace akit {

int sort_with_sign(std::vector<int>& indices) {
  int sign = 1;
  // Insertion sort; k is small.
  for (std::size_t i = 1; i < indices.size(); ++i) {
    for (std::size_t j = i; j > 0 && indices[j - 1] >= indices[j]; --j) {
      if (indices[j - 1] == indices[j]) return 0;
      std::swap(indices[j - 1], indices[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i - 1] == indices[i]) return 0;
  }
  return sign;
}

std::string multi_index_string(const MultiIndex& index) {
  std::string out;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i != 0) out += '^';
    out += "e^" + std::to_string(index[i] + 1);
  }
  return out;
}

AlgebroidForm::AlgebroidForm(Ring ring, int rank, int degree)
    : ring_(std::move(ring)), rank_(rank), degree_(degree) {
  if (rank < 0) throw FormError("negative rank");
  if (degree < 0) throw FormError("negative degree");
}

AlgebroidForm AlgebroidForm::function(const Polynomial& f, int rank) {
  AlgebroidForm w(f.ring(), rank, 0);
  w.add({}, f);
  return w;
}

AlgebroidForm AlgebroidForm::basis(const Polynomial& coefficient, int rank, std::vector<int> indices) {
  AlgebroidForm w(coefficient.ring(), rank, static_cast<int>(indices.size()));
  for (int i : indices) {
    if (i < 0 || i >= rank) throw FormError("frame index out of range");
  }
  const int sign = sort_with_sign(indices);
  if (sign == 0) return w;
  w.add(indices, sign > 0 ? coefficient : -coefficient);
  return w;
}

AlgebroidForm AlgebroidForm::covector(const Ring& ring, int rank, int a) {
  return basis(Polynomial::constant(ring, 1), rank, {a});
}

AlgebroidForm AlgebroidForm::one_form(std::span<const Polynomial> coefficients) {
  if (coefficients.empty()) throw FormError("one_form needs at least one coefficient to fix the ring");
  const int rank = static_cast<int>(coefficients.size());
  AlgebroidForm w(coefficients.front().ring(), rank, 1);
  for (int a = 0; a < rank; ++a) w.add({a}, coefficients[a]);
  return w;
}

Polynomial AlgebroidForm::component(const MultiIndex& index) const {
  auto it = components_.find(index);
  return it == components_.end() ? Polynomial(ring_) : it->second;
}

void AlgebroidForm::add(const MultiIndex& index, const Polynomial& coefficient) {
  if (static_cast<int>(index.size()) != degree_) throw FormError("multi-index length differs from degree");
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= rank_) throw FormError("frame index out of range");
    if (i > 0 && index[i - 1] >= index[i]) throw FormError("multi-index not strictly increasing");
  }
  if (!(coefficient.ring() == ring_)) throw FormError("coefficient ring differs from form ring");
  if (coefficient.is_zero()) return;
  auto [it, inserted] = components_.try_emplace(index, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second.is_zero()) components_.erase(it);
  }
}

Polynomial AlgebroidForm::as_function() const {
  if (degree_ != 0) throw FormError("as_function on a form of positive degree");
  return component({});
}

void AlgebroidForm::require_compatible(const AlgebroidForm& other, const char* op) const {
  if (rank_ != other.rank_) throw FormError(std::string("rank mismatch in ") + op);
  if (degree_ != other.degree_) throw FormError(std::string("degree mismatch in ") + op);
  if (!(ring_ == other.ring_)) throw FormError(std::string("ring mismatch in ") + op);
}

AlgebroidForm AlgebroidForm::operator-() const {
  AlgebroidForm r(*this);
  for (auto& [i, c] : r.components_) c = -c;
  return r;
}

AlgebroidForm& AlgebroidForm::operator+=(const AlgebroidForm& other) {
  require_compatible(other, "addition");
  for (const auto& [i, c] : other.components_) add(i, c);
  return *this;
}

AlgebroidForm& AlgebroidForm::operator-=(const AlgebroidForm& other) {
  require_compatible(other, "subtraction");
  for (const auto& [i, c] : other.components_) add(i, -c);
  return *this;
}

AlgebroidForm& AlgebroidForm::operator*=(const Polynomial& f) {
  if (!(f.ring() == ring_)) throw FormError("ring mismatch in scalar multiplication");
  ComponentMap out;
  for (auto& [i, c] : components_) {
    Polynomial p = c * f;
    if (!p.is_zero()) out.emplace(i, std::move(p));
  }
  components_ = std::move(out);
  return *this;
}

AlgebroidForm& AlgebroidForm::operator*=(const Rational& s) {
  if (s == 0) {
    components_.clear();
    return *this;
  }
  for (auto& [i, c] : components_) c *= s;
  return *this;
}

std::string AlgebroidForm::to_string() const {
  if (components_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [index, c] : components_) {
    std::string coeff = c.to_string();
    std::string piece;
    if (index.empty()) {
      piece = coeff;
    } else if (coeff == "1") {
      piece = multi_index_string(index);
    } else if (c.terms().size() == 1) {
      piece = coeff + '*' + multi_index_string(index);
    } else {
      piece = '(' + coeff + ")*" + multi_index_string(index);
    }
    if (!first) out += " + ";
    out += piece;
    first = false;
  }
  return out;
}

AlgebroidForm wedge(const AlgebroidForm& a, const AlgebroidForm& b) {
  if (a.rank() != b.rank()) throw FormError("rank mismatch in wedge");
  if (!(a.ring() == b.ring())) throw FormError("ring mismatch in wedge");
  AlgebroidForm out(a.ring(), a.rank(), a.degree() + b.degree());
  if (out.degree() > out.rank()) return out;
  std::vector<int> merged;
  for (const auto& [ia, ca] : a.components()) {
    for (const auto& [ib, cb] : b.components()) {
      merged.assign(ia.begin(), ia.end());
      merged.insert(merged.end(), ib.begin(), ib.end());
      const int sign = sort_with_sign(merged);
      if (sign == 0) continue;
      Polynomial p = ca * cb;
      if (sign < 0) p = -p;
      out.add(merged, p);
    }
  }
  return out;
}

AlgebroidForm contract_first(const AlgebroidForm& b, std::span<const Polynomial> v) {
  if (b.degree() == 0) throw FormError("contraction of a degree-0 form");
  if (static_cast<int>(v.size()) != b.rank()) throw FormError("rank mismatch in contraction");
  AlgebroidForm out(b.ring(), b.rank(), b.degree() - 1);
  for (const auto& [index, c] : b.components()) {
    for (std::size_t p = 0; p < index.size(); ++p) {
      const Polynomial& va = v[index[p]];
      if (va.is_zero()) continue;
      MultiIndex rest;
      rest.reserve(index.size() - 1);
      for (std::size_t q = 0; q < index.size(); ++q) {
        if (q != p) rest.push_back(index[q]);
      }
      Polynomial term = va * c;
      if (p % 2 == 1) term = -term;
      out.add(rest, term);
    }
  }
  return out;
}

}  // namespace akit
