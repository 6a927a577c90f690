// Noncommutative word algebra over measurement projectors and adversary
// operators, with canonical reduction and symbolic moment-matrix assembly.
#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dicert::ncalg {

enum class Party : std::uint8_t { A = 0, B = 1, E = 2 };

enum class LetterKind : std::uint8_t {
  Projector = 0,        // M_{a|x} (party A) or N_{b|y} (party B)
  Adversary = 1,        // Z_k
  AdversaryAdjoint = 2  // Z_k^dagger
};

struct Letter {
  Party party;
  LetterKind kind;
  std::uint16_t index;      // measurement setting, or adversary operator id
  std::uint8_t outcome = 0; // projector outcome (0 or 1)

  auto operator<=>(const Letter&) const = default;
};

Letter projector(Party p, int setting, int outcome);
Letter adversary(int id);
Letter adversary_adjoint(int id);

// A canonical word. Canonical form: A-letters precede B-letters precede
// E-letters (cross-party commutation), adjacent equal projectors collapsed
// (idempotence), orthogonal same-setting projectors annihilate to zero.
class Monomial {
 public:
  Monomial() = default;  // identity
  explicit Monomial(std::vector<Letter> letters);
  static Monomial zero();

  bool is_zero() const { return zero_; }
  bool is_identity() const { return !zero_ && word_.empty(); }
  int degree() const { return static_cast<int>(word_.size()); }
  const std::vector<Letter>& letters() const { return word_; }

  Monomial adjoint() const;
  friend Monomial operator*(const Monomial& u, const Monomial& v);

  std::strong_ordering operator<=>(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return (*this <=> o) == 0; }

  std::string str() const;

 private:
  std::vector<Letter> word_;
  bool zero_ = false;
  void canonicalize();
};

// Re-canonicalization entry point (idempotent by construction).
Monomial canonicalize(const Monomial& m);

// Finitely supported complex combination of canonical monomials.
class Polynomial {
 public:
  using Coeff = std::complex<double>;

  Polynomial() = default;
  Polynomial(double c);  // NOLINT: implicit scalar lift is intended
  Polynomial(const Monomial& m);

  static Polynomial identity() { return Polynomial(Monomial{}); }
  // M_{outcome|setting} with M_{1|x} eliminated as 1 - M_{0|x}.
  static Polynomial projector(Party p, int setting, int outcome);
  // C(x,y) = 4<a_x b_y> - 2<a_x> - 2<b_y> + 1 over outcome-0 projectors.
  static Polynomial correlator(int x, int y);

  const std::map<Monomial, Coeff>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Polynomial adjoint() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Coeff s, const Polynomial& p);
  friend Polynomial operator*(double s, const Polynomial& p) { return Coeff(s) * p; }

 private:
  std::map<Monomial, Coeff> terms_;
  void add_term(const Monomial& m, Coeff c);
};

// All canonical nonzero words of length <= level over outcome-0 projector
// letters (alice_settings + bob_settings of them), plus `extras`,
// deduplicated, identity first.
std::vector<Monomial> generate_basis(int level, int alice_settings,
                                     int bob_settings,
                                     std::span<const Monomial> extras = {});

// A symbolic moment-matrix cell: constant (0 or 1 for the pinned identity
// handled at SDP assembly) or a moment-variable reference.
struct MomentEntry {
  int var = -1;        // -1 means the zero monomial (constant 0)
  double sign = 1.0;   // always +1 currently; kept for symmetry with docs
};

struct MomentMatrixSpec {
  std::vector<Monomial> basis;
  bool hermitian_moments = true;
  int dim = 0;
  std::vector<Monomial> var_words;  // var id -> representative word
  std::map<Monomial, int> var_ids;  // representative word -> var id
  std::vector<int> conj_var;        // var id of the adjoint word (== id when self-adjoint or hermitian_moments)
  std::vector<MomentEntry> cells;   // row-major dim*dim
  int identity_var = -1;            // var id of the identity moment

  const MomentEntry& at(int r, int c) const { return cells[r * dim + c]; }
  int num_vars() const { return static_cast<int>(var_words.size()); }
  int find_var(const Monomial& w) const;  // -1 when absent
};

// M[u,v] = var(canonical(u^dagger v)). With hermitian_moments the variable
// of w and of w^dagger coincide (real symmetric block); otherwise they are
// distinct but tied through conj_var.
MomentMatrixSpec build_moment_matrix(std::span<const Monomial> basis,
                                     bool hermitian_moments = true);

struct BasisTooSmallError : std::runtime_error {
  explicit BasisTooSmallError(const std::string& word)
      : std::runtime_error("monomial outside the moment table: " + word) {}
};

// Real affine functional over moment variables: constant + sum coeff*y[var].
struct LinearFunctional {
  double constant = 0.0;
  std::vector<std::pair<int, double>> coeffs;  // sorted, unique var ids
};

// Expand a polynomial (with conjugate-symmetric, effectively real action)
// into a linear functional over the spec's moment variables. Throws
// BasisTooSmallError naming the offending word when a monomial has no
// moment variable.
LinearFunctional to_functional(const Polynomial& p, const MomentMatrixSpec& spec);

// Complex-coefficient functional over the moment variables of a
// non-hermitian spec; realified together with the block in sdp::realify.
struct ComplexFunctional {
  std::complex<double> constant{0.0, 0.0};
  std::vector<std::pair<int, std::complex<double>>> coeffs;
};

ComplexFunctional to_complex_functional(const Polynomial& p,
                                        const MomentMatrixSpec& spec);

// Debug dump of a relaxation: {basis: [word strings], entries: [[r,c,var]]}
// with var -1 for zero cells. Serialized by json_io.
}  // namespace dicert::ncalg
