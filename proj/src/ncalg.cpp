#include "dicert/ncalg.hpp"

#include <algorithm>
#include <sstream>

namespace dicert::ncalg {

Letter projector(Party p, int setting, int outcome) {
  if (p == Party::E) throw std::invalid_argument("projector letters belong to party A or B");
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("projector outcome must be 0 or 1");
  return Letter{p, LetterKind::Projector, static_cast<std::uint16_t>(setting),
                static_cast<std::uint8_t>(outcome)};
}

Letter adversary(int id) {
  return Letter{Party::E, LetterKind::Adversary, static_cast<std::uint16_t>(id), 0};
}

Letter adversary_adjoint(int id) {
  return Letter{Party::E, LetterKind::AdversaryAdjoint, static_cast<std::uint16_t>(id), 0};
}

Monomial::Monomial(std::vector<Letter> letters) : word_(std::move(letters)) {
  canonicalize();
}

Monomial Monomial::zero() {
  Monomial m;
  m.zero_ = true;
  return m;
}

void Monomial::canonicalize() {
  if (zero_) {
    word_.clear();
    return;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    // stable bubble: commute letters of different parties into A < B < E
    // order; same-party letters never swap.
    for (std::size_t i = 0; i + 1 < word_.size(); ++i) {
      if (word_[i].party > word_[i + 1].party) {
        std::swap(word_[i], word_[i + 1]);
        changed = true;
      }
    }
    // local projector rules on adjacent same-party letters
    for (std::size_t i = 0; i + 1 < word_.size();) {
      const Letter& u = word_[i];
      const Letter& v = word_[i + 1];
      if (u.kind == LetterKind::Projector && v.kind == LetterKind::Projector &&
          u.party == v.party && u.index == v.index) {
        if (u.outcome == v.outcome) {  // idempotence
          word_.erase(word_.begin() + static_cast<long>(i) + 1);
          changed = true;
          continue;
        }
        zero_ = true;  // orthogonal outcomes of one measurement
        word_.clear();
        return;
      }
      ++i;
    }
  }
}

Monomial Monomial::adjoint() const {
  if (zero_) return zero();
  std::vector<Letter> rev;
  rev.reserve(word_.size());
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    Letter l = *it;
    if (l.kind == LetterKind::Adversary)
      l.kind = LetterKind::AdversaryAdjoint;
    else if (l.kind == LetterKind::AdversaryAdjoint)
      l.kind = LetterKind::Adversary;
    rev.push_back(l);
  }
  return Monomial(std::move(rev));
}

Monomial operator*(const Monomial& u, const Monomial& v) {
  if (u.is_zero() || v.is_zero()) return Monomial::zero();
  std::vector<Letter> w = u.word_;
  w.insert(w.end(), v.word_.begin(), v.word_.end());
  return Monomial(std::move(w));
}

std::strong_ordering Monomial::operator<=>(const Monomial& o) const {
  if (zero_ != o.zero_) return zero_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = word_.size() <=> o.word_.size(); c != 0) return c;
  for (std::size_t i = 0; i < word_.size(); ++i)
    if (auto c = word_[i] <=> o.word_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Monomial::str() const {
  if (zero_) return "0";
  if (word_.empty()) return "1";
  std::ostringstream out;
  bool first = true;
  for (const Letter& l : word_) {
    if (!first) out << ' ';
    first = false;
    switch (l.kind) {
      case LetterKind::Projector:
        out << (l.party == Party::A ? 'A' : 'B') << l.index << '_' << int(l.outcome);
        break;
      case LetterKind::Adversary:
        out << 'Z' << l.index;
        break;
      case LetterKind::AdversaryAdjoint:
        out << 'Z' << l.index << '*';
        break;
    }
  }
  return out.str();
}

Monomial canonicalize(const Monomial& m) { return m; }  // canonical by construction

Polynomial::Polynomial(double c) {
  if (c != 0.0) terms_[Monomial{}] = Coeff(c);
}

Polynomial::Polynomial(const Monomial& m) {
  if (!m.is_zero()) terms_[m] = Coeff(1.0);
}

void Polynomial::add_term(const Monomial& m, Coeff c) {
  if (m.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (std::abs(it->second) < 1e-15) terms_.erase(it);
  } else if (std::abs(c) < 1e-15) {
    terms_.erase(it);
  }
}

Polynomial Polynomial::projector(Party p, int setting, int outcome) {
  Monomial m(std::vector<Letter>{ncalg::projector(p, setting, 0)});
  Polynomial r(m);
  if (outcome == 1) r = Polynomial(1.0) - r;
  return r;
}

Polynomial Polynomial::correlator(int x, int y) {
  Monomial ax(std::vector<Letter>{ncalg::projector(Party::A, x, 0)});
  Monomial by(std::vector<Letter>{ncalg::projector(Party::B, y, 0)});
  Polynomial r = 4.0 * (Polynomial(ax) * Polynomial(by));
  r -= 2.0 * Polynomial(ax);
  r -= 2.0 * Polynomial(by);
  r += Polynomial(1.0);
  return r;
}

Polynomial Polynomial::adjoint() const {
  Polynomial r;
  for (const auto& [m, c] : terms_) r.add_term(m.adjoint(), std::conj(c));
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial operator*(Polynomial::Coeff s, const Polynomial& p) {
  Polynomial r;
  for (const auto& [m, c] : p.terms_) r.add_term(m, s * c);
  return r;
}

std::vector<Monomial> generate_basis(int level, int alice_settings,
                                     int bob_settings,
                                     std::span<const Monomial> extras) {
  if (level < 1) throw std::invalid_argument("basis level must be >= 1");
  std::vector<Letter> letters;
  for (int x = 0; x < alice_settings; ++x) letters.push_back(projector(Party::A, x, 0));
  for (int y = 0; y < bob_settings; ++y) letters.push_back(projector(Party::B, y, 0));

  std::vector<Monomial> basis{Monomial{}};
  std::vector<Monomial> frontier{Monomial{}};
  std::map<Monomial, bool> seen{{Monomial{}, true}};
  for (int len = 1; len <= level; ++len) {
    std::vector<Monomial> next;
    for (const Monomial& w : frontier) {
      for (const Letter& l : letters) {
        Monomial m = w * Monomial(std::vector<Letter>{l});
        if (m.is_zero() || m.degree() != len) continue;
        if (seen.try_emplace(m, true).second) {
          basis.push_back(m);
          next.push_back(m);
        }
      }
    }
    frontier = std::move(next);
  }
  for (const Monomial& e : extras) {
    if (e.is_zero()) continue;
    if (seen.try_emplace(e, true).second) basis.push_back(e);
  }
  return basis;
}

int MomentMatrixSpec::find_var(const Monomial& w) const {
  Monomial key = w;
  if (hermitian_moments) key = std::min(key, key.adjoint());
  auto it = var_ids.find(key);
  return it == var_ids.end() ? -1 : it->second;
}

MomentMatrixSpec build_moment_matrix(std::span<const Monomial> basis,
                                     bool hermitian_moments) {
  MomentMatrixSpec spec;
  spec.basis.assign(basis.begin(), basis.end());
  spec.hermitian_moments = hermitian_moments;
  spec.dim = static_cast<int>(basis.size());
  spec.cells.assign(static_cast<std::size_t>(spec.dim) * spec.dim, MomentEntry{});

  auto intern = [&](const Monomial& w) {
    Monomial key = w;
    if (hermitian_moments) key = std::min(key, key.adjoint());
    auto [it, inserted] = spec.var_ids.try_emplace(key, spec.num_vars());
    if (inserted) spec.var_words.push_back(key);
    return it->second;
  };

  std::vector<Monomial> adjoints(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) adjoints[i] = basis[i].adjoint();

  for (int r = 0; r < spec.dim; ++r) {
    for (int c = 0; c < spec.dim; ++c) {
      Monomial prod = adjoints[static_cast<std::size_t>(r)] * spec.basis[static_cast<std::size_t>(c)];
      MomentEntry e;
      if (!prod.is_zero()) e.var = intern(prod);
      spec.cells[static_cast<std::size_t>(r) * spec.dim + c] = e;
    }
  }
  spec.identity_var = spec.find_var(Monomial{});

  spec.conj_var.resize(static_cast<std::size_t>(spec.num_vars()));
  for (int v = 0; v < spec.num_vars(); ++v) {
    if (hermitian_moments) {
      spec.conj_var[static_cast<std::size_t>(v)] = v;
    } else {
      int cv = spec.find_var(spec.var_words[static_cast<std::size_t>(v)].adjoint());
      // adjoint word may be absent from the table when the basis is not
      // closed under adjoints of products; tie to self in that case is
      // wrong, so record -1 and let realify treat it as a free pair half.
      spec.conj_var[static_cast<std::size_t>(v)] = cv;
    }
  }
  return spec;
}

LinearFunctional to_functional(const Polynomial& p, const MomentMatrixSpec& spec) {
  std::map<int, double> acc;
  double constant = 0.0;
  for (const auto& [m, c] : p.terms()) {
    if (std::abs(c.imag()) > 1e-12)
      throw std::invalid_argument("to_functional requires a real-acting polynomial; use to_complex_functional");
    if (m.is_zero()) continue;
    int v = spec.find_var(m);
    if (v < 0) throw BasisTooSmallError(m.str());
    acc[v] += c.real();
  }
  LinearFunctional f;
  f.constant = constant;
  for (auto& [v, w] : acc)
    if (std::abs(w) > 1e-15) f.coeffs.emplace_back(v, w);
  return f;
}

ComplexFunctional to_complex_functional(const Polynomial& p,
                                        const MomentMatrixSpec& spec) {
  std::map<int, std::complex<double>> acc;
  for (const auto& [m, c] : p.terms()) {
    if (m.is_zero()) continue;
    int v = spec.find_var(m);
    if (v < 0) throw BasisTooSmallError(m.str());
    acc[v] += c;
  }
  ComplexFunctional f;
  for (auto& [v, w] : acc)
    if (std::abs(w) > 1e-15) f.coeffs.emplace_back(v, w);
  return f;
}

}  // namespace dicert::ncalg
