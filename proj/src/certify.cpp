#include "dicert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace dicert::certify {
namespace {

using ncalg::Monomial;
using ncalg::MomentMatrixSpec;
using ncalg::Party;
using ncalg::Polynomial;

// How a moment-matrix spec was embedded into the flat SDP variable vector.
// Hermitian specs use one real variable per moment; complex specs split each
// conjugate pair into real and imaginary parts and realify the block.
struct Mapping {
  bool hermitian = true;
  std::vector<int> re;  // spec var -> sdp var of the real part
  std::vector<int> im;  // spec var -> sdp var of the imaginary part, -1 if none
  std::vector<double> im_sign;  // +1 when the var is its pair's representative
};

Mapping add_moment_block(sdp::Problem& p, const MomentMatrixSpec& spec) {
  Mapping map;
  map.hermitian = spec.hermitian_moments;
  int nv = spec.num_vars();
  map.re.assign(static_cast<std::size_t>(nv), -1);
  map.im.assign(static_cast<std::size_t>(nv), -1);
  map.im_sign.assign(static_cast<std::size_t>(nv), 1.0);

  if (spec.hermitian_moments) {
    for (int v = 0; v < nv; ++v) map.re[static_cast<std::size_t>(v)] = p.nvars + v;
    sdp::Block blk;
    blk.dim = spec.dim;
    std::map<int, std::vector<sdp::SparseEntry>> per_var;
    for (int r = 0; r < spec.dim; ++r)
      for (int c = 0; c <= r; ++c) {
        const auto& e = spec.at(r, c);
        if (e.var >= 0) per_var[map.re[static_cast<std::size_t>(e.var)]].push_back({r, c, 1.0});
      }
    for (auto& [var, entries] : per_var) blk.fvars.push_back({var, std::move(entries)});
    p.nvars += nv;
    p.blocks.push_back(std::move(blk));
    return map;
  }

  // Complex moments: one representative per conjugate pair {w, w-adjoint}.
  for (int v = 0; v < nv; ++v) {
    int cv = spec.conj_var[static_cast<std::size_t>(v)];
    if (cv < 0) throw std::logic_error("moment table not closed under adjoints");
    int rep = std::min(v, cv);
    if (v != rep) {
      map.re[static_cast<std::size_t>(v)] = map.re[static_cast<std::size_t>(rep)];
      map.im[static_cast<std::size_t>(v)] = map.im[static_cast<std::size_t>(rep)];
      map.im_sign[static_cast<std::size_t>(v)] = -1.0;
      continue;
    }
    map.re[static_cast<std::size_t>(v)] = p.nvars++;
    if (cv != v) map.im[static_cast<std::size_t>(v)] = p.nvars++;
  }

  sdp::ComplexBlock cblk;
  cblk.dim = spec.dim;
  std::map<int, std::vector<sdp::ComplexSparseEntry>> per_var;
  for (int r = 0; r < spec.dim; ++r)
    for (int c = 0; c <= r; ++c) {
      const auto& e = spec.at(r, c);
      if (e.var < 0) continue;
      auto v = static_cast<std::size_t>(e.var);
      // cell value = y_re + s*i*y_im
      per_var[map.re[v]].push_back({r, c, {1.0, 0.0}});
      if (map.im[v] >= 0)
        per_var[map.im[v]].push_back({r, c, {0.0, map.im_sign[v]}});
    }
  for (auto& [var, entries] : per_var) cblk.fvars.emplace_back(var, std::move(entries));
  p.blocks.push_back(sdp::realify_block(cblk));
  return map;
}

// Accumulate scale * <poly> into a real row over the sdp variables.
void accumulate(std::map<int, double>& row, const Mapping& map,
                const MomentMatrixSpec& spec, const Polynomial& poly,
                double scale) {
  if (map.hermitian) {
    auto f = ncalg::to_functional(poly, spec);
    for (const auto& [v, w] : f.coeffs) row[map.re[static_cast<std::size_t>(v)]] += scale * w;
    return;
  }
  auto f = ncalg::to_complex_functional(poly, spec);
  std::map<int, double> imag;
  for (const auto& [v, c] : f.coeffs) {
    auto vu = static_cast<std::size_t>(v);
    // c * (y_re + s*i*y_im): real part contributes to the row, the imaginary
    // part must cancel for a conjugate-symmetric polynomial.
    row[map.re[vu]] += scale * c.real();
    imag[map.re[vu]] += c.imag();
    if (map.im[vu] >= 0) {
      row[map.im[vu]] -= scale * map.im_sign[vu] * c.imag();
      imag[map.im[vu]] += map.im_sign[vu] * c.real();
    }
  }
  for (const auto& [var, w] : imag)
    if (std::abs(w) > 1e-9)
      throw std::invalid_argument("moment functional is not real-valued");
}

std::vector<std::pair<int, double>> to_row(const std::map<int, double>& m) {
  std::vector<std::pair<int, double>> r;
  for (const auto& [v, w] : m)
    if (w != 0.0) r.emplace_back(v, w);
  return r;
}

Polynomial bell_polynomial(const qmodel::BellExpression& e) {
  Polynomial p;
  for (const auto& [xy, coef] : e.coeffs)
    p += coef * Polynomial::correlator(xy.first, xy.second);
  return p;
}

void add_statistics_constraints(sdp::Problem& prob, const ConstraintSet& cs,
                                const std::vector<const MomentMatrixSpec*>& specs,
                                const std::vector<Mapping>& maps) {
  for (const auto& mb : cs.marginals) {
    Polynomial expct =
        2.0 * Polynomial::projector(mb.alice ? Party::A : Party::B, mb.setting, 0) -
        Polynomial(1.0);
    std::map<int, double> row;
    for (std::size_t k = 0; k < specs.size(); ++k)
      accumulate(row, maps[k], *specs[k], expct, 1.0);
    prob.equalities.push_back({to_row(row), mb.value});
  }
  if (cs.bell_lower) {
    Polynomial bp = bell_polynomial(cs.bell_lower->first);
    std::map<int, double> row;
    for (std::size_t k = 0; k < specs.size(); ++k)
      accumulate(row, maps[k], *specs[k], bp, 1.0);
    prob.inequalities.push_back({to_row(row), cs.bell_lower->second});
  }
  for (const auto& cb : cs.correlator_bounds) {
    Polynomial cp = Polynomial::correlator(cb.x, cb.y);
    double scale = cb.lower ? 1.0 : -1.0;
    std::map<int, double> row;
    for (std::size_t k = 0; k < specs.size(); ++k)
      accumulate(row, maps[k], *specs[k], cp, scale);
    prob.inequalities.push_back({to_row(row), scale * cb.bound});
  }
}

void check_target(const ConstraintSet& cs, int tx, int ty) {
  if (tx < 0 || tx >= cs.nx || ty < 0 || ty >= cs.ny)
    throw std::invalid_argument("target settings outside the scenario");
}

}  // namespace

ConstraintSet ConstraintSet::from_bell(const qmodel::BellExpression& e, double v) {
  ConstraintSet cs;
  cs.nx = e.nx;
  cs.ny = e.ny;
  cs.bell_lower = {e, v};
  return cs;
}

ConstraintSet ConstraintSet::from_correlators(const qmodel::BellExpression& e,
                                              const qmodel::CorrelatorSet& c,
                                              double k_sigma) {
  ConstraintSet cs;
  cs.nx = e.nx;
  cs.ny = e.ny;
  for (const auto& [xy, coef] : e.coeffs) {
    if (coef == 0.0) continue;
    auto [x, y] = xy;
    double se = c.stderr_at(x, y);
    CorrelatorBound cb;
    cb.x = x;
    cb.y = y;
    cb.lower = coef > 0.0;
    cb.bound = cb.lower ? c.at(x, y) - k_sigma * se : c.at(x, y) + k_sigma * se;
    cs.correlator_bounds.push_back(cb);
  }
  return cs;
}

BoundResult npa_max_bell(const qmodel::BellExpression& e, const NpaOptions& opts) {
  auto basis = ncalg::generate_basis(opts.level, e.nx, e.ny, opts.extra_words);
  auto spec = ncalg::build_moment_matrix(basis, opts.hermitian_moments);

  sdp::Problem prob;
  auto map = add_moment_block(prob, spec);
  prob.c = Eigen::VectorXd::Zero(prob.nvars);

  std::map<int, double> obj;
  accumulate(obj, map, spec, bell_polynomial(e), -1.0);  // maximize
  for (const auto& [v, w] : obj) prob.c[v] = w;

  std::map<int, double> idrow;
  accumulate(idrow, map, spec, Polynomial::identity(), 1.0);
  prob.equalities.push_back({to_row(idrow), 1.0});

  auto sol = sdp::solve(prob, opts.solver);
  BoundResult r;
  r.status = sol.status;
  r.value = -sol.primal_objective;
  // All moment variables are bounded by 1, so the dual bound survives an
  // imperfect dual residual weakened by at most its l1 norm.
  r.certified_bound = -sol.certified_dual;
  r.moment_vars = prob.nvars;
  r.matrix_dim = prob.blocks.front().dim;
  return r;
}

GuessingResult min_entropy(const ConstraintSet& cs, int target_x, int target_y,
                           const NpaOptions& opts) {
  check_target(cs, target_x, target_y);
  auto basis = ncalg::generate_basis(opts.level, cs.nx, cs.ny, opts.extra_words);
  auto spec = ncalg::build_moment_matrix(basis, opts.hermitian_moments);

  sdp::Problem prob;
  std::vector<Mapping> maps;
  std::vector<const MomentMatrixSpec*> specs;
  for (int g = 0; g < 4; ++g) {
    maps.push_back(add_moment_block(prob, spec));
    specs.push_back(&spec);
  }
  prob.c = Eigen::VectorXd::Zero(prob.nvars);

  // Guess g = (a, b): the adversary wins the weight of branch g landing on
  // exactly that outcome pair at the target settings.
  std::map<int, double> obj;
  for (int g = 0; g < 4; ++g) {
    Polynomial win = Polynomial::projector(Party::A, target_x, g >> 1) *
                     Polynomial::projector(Party::B, target_y, g & 1);
    accumulate(obj, maps[static_cast<std::size_t>(g)], spec, win, -1.0);  // maximize
  }
  for (const auto& [v, w] : obj) prob.c[v] = w;

  std::map<int, double> idrow;
  for (int g = 0; g < 4; ++g)
    accumulate(idrow, maps[static_cast<std::size_t>(g)], spec, Polynomial::identity(), 1.0);
  prob.equalities.push_back({to_row(idrow), 1.0});

  add_statistics_constraints(prob, cs, specs, maps);

  auto sol = sdp::solve(prob, opts.solver);
  GuessingResult r;
  r.status = sol.status;
  // Minimizing -P_guess, so -dual is a certified upper bound on P_guess. All
  // moment variables are bounded by 1, so any dual-feasibility residual can
  // weaken the bound by at most its l1 norm; add it back for safety.
  r.p_guess = std::clamp(-sol.certified_dual, 0.0, 1.0);
  r.moment_vars = prob.nvars;
  r.matrix_dim = prob.blocks.front().dim;

  // When the Bell constraint sits at (or next to) the quantum maximum the
  // feasible set loses its interior, P_guess behaves like a square root of
  // the constraint slack, and the optimal multiplier diverges - interior
  // point iterates then stall with a loose certificate. But for any fixed
  // penalty L >= 0, P_guess <= max over the unconstrained moment cone of
  // [win + L*(bell - v)], and that program is perfectly conditioned. Scan a
  // geometric penalty schedule and keep the best certified bound.
  if (cs.bell_lower && cs.correlator_bounds.empty() && cs.marginals.empty() &&
      (r.status != sdp::Status::Optimal ||
       r.p_guess - (-sol.primal_objective) > 2e-4)) {
    std::map<int, double> bellrow;
    Polynomial bp = bell_polynomial(cs.bell_lower->first);
    for (int g = 0; g < 4; ++g)
      accumulate(bellrow, maps[static_cast<std::size_t>(g)], spec, bp, 1.0);
    const double v = cs.bell_lower->second;
    sdp::Problem pen = prob;
    pen.inequalities.clear();
    double prev_bound = std::numeric_limits<double>::infinity();
    for (double lam = 1.0; lam <= 2.0e4; lam *= 4.0) {
      pen.c = prob.c;
      for (const auto& [var, wv] : bellrow) pen.c[var] -= lam * wv;
      auto s2 = sdp::solve(pen, opts.solver);
      if (s2.status != sdp::Status::Optimal && s2.status != sdp::Status::NearOptimal)
        continue;
      double bound = -s2.certified_dual - lam * v;
      if (std::getenv("DICERT_ME_DEBUG"))
        std::fprintf(stderr, "penalty %g: status %s primal %.8f cert bound %.8f\n",
                     lam, sdp::status_name(s2.status).c_str(),
                     -s2.primal_objective - lam * v, bound);
      if (bound < r.p_guess) r.p_guess = std::clamp(bound, 0.0, 1.0);
      // The penalized bound is convex in the penalty: stop once it turns up.
      if (bound > prev_bound + 1e-9) break;
      prev_bound = bound;
    }
  }

  r.h_min_bits = r.p_guess > 0.0 ? std::max(0.0, -std::log2(r.p_guess)) : 2.0;
  // A stalled solve can still end with a certificate that matches the
  // (feasible) primal value; the bound is then as trustworthy as a converged
  // one even if the central path never reached the strict tolerance.
  if (r.status != sdp::Status::Optimal && r.status != sdp::Status::NearOptimal &&
      sol.primal_infeasibility <= 1e-6 &&
      r.p_guess - (-sol.primal_objective) <= 5e-3)
    r.status = sdp::Status::NearOptimal;
  return r;
}

namespace {

// Solve the entropy program restricted to a subset of quadrature nodes.
// Returns the result with raw/primal bits holding only the nodes' share
// (their constants included, the omitted endpoint node's constant excluded).
VNResult vn_solve_nodes(const ConstraintSet& cs, int target_x, int target_y,
                        const VNOptions& opts, const quadrature::QuadratureRule& rule,
                        const std::vector<int>& nodes) {
  // Basis: projector words up to the level, plus one adversary operator per
  // (node, guessed pair) with its adjoint and, optionally, products with the
  // measurement projectors (all settings, not just the target: products with
  // the non-target settings tighten the bound substantially because the Bell
  // constraint couples all four correlators).
  std::vector<Monomial> extras;
  std::vector<Monomial> prods;
  prods.emplace_back(std::vector<ncalg::Letter>{});  // identity prefix
  if (opts.target_products) {
    for (int x = 0; x < cs.nx; ++x)
      prods.emplace_back(std::vector<ncalg::Letter>{ncalg::projector(Party::A, x, 0)});
    for (int y = 0; y < cs.ny; ++y)
      prods.emplace_back(std::vector<ncalg::Letter>{ncalg::projector(Party::B, y, 0)});
    for (int x = 0; x < cs.nx; ++x)
      for (int y = 0; y < cs.ny; ++y)
        prods.emplace_back(std::vector<ncalg::Letter>{ncalg::projector(Party::A, x, 0),
                                                      ncalg::projector(Party::B, y, 0)});
  }
  for (int i : nodes)
    for (int g = 0; g < 4; ++g) {
      int k = 4 * i + g;
      Monomial z(std::vector<ncalg::Letter>{ncalg::adversary(k)});
      Monomial zd(std::vector<ncalg::Letter>{ncalg::adversary_adjoint(k)});
      for (const Monomial& zz : {z, zd})
        for (const Monomial& p : prods) extras.push_back(p * zz);
    }
  auto basis = ncalg::generate_basis(opts.level, cs.nx, cs.ny, extras);
  auto spec = ncalg::build_moment_matrix(basis, true);

  sdp::Problem prob;
  auto map = add_moment_block(prob, spec);
  prob.c = Eigen::VectorXd::Zero(prob.nvars);

  // The optimizing adversary operator at node t is norm-bounded by
  // alpha = 3/2 * max(1/t, 1/(1-t)). The program works with the rescaled
  // contraction Z/alpha (the objective absorbs alpha), so every moment stays
  // in [-1, 1]: that keeps the problem well-scaled, makes the feasible set
  // compact (no dual degeneracy), and validates the l1 residual adjustment
  // of the certified bound.
  auto alpha_of = [&](int i) {
    double t = rule.nodes[static_cast<std::size_t>(i)];
    return 1.5 * std::max(1.0 / t, t < 1.0 ? 1.0 / (1.0 - t) : 1.0);
  };
  for (int i : nodes)
    for (int g = 0; g < 4; ++g) {
      int k = 4 * i + g;
      Monomial z(std::vector<ncalg::Letter>{ncalg::adversary(k)});
      Monomial zd(std::vector<ncalg::Letter>{ncalg::adversary_adjoint(k)});
      for (const Monomial& w : {zd * z, z * zd}) {
        int v = spec.find_var(w);
        if (v < 0) throw std::logic_error("adversary norm moment missing");
        prob.inequalities.push_back(
            {{{map.re[static_cast<std::size_t>(v)], -1.0}}, -1.0});
      }
    }

  double const_bits = 0.0;
  std::vector<std::map<int, double>> node_rows(nodes.size());
  std::map<int, double> obj;
  for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
    int i = nodes[ni];
    double t = rule.nodes[static_cast<std::size_t>(i)];
    double ci = rule.coeffs[static_cast<std::size_t>(i)];
    const_bits += ci;
    for (int g = 0; g < 4; ++g) {
      int k = 4 * i + g;
      Polynomial z{Monomial(std::vector<ncalg::Letter>{ncalg::adversary(k)})};
      Polynomial zd = z.adjoint();
      Polynomial mn = Polynomial::projector(Party::A, target_x, g >> 1) *
                      Polynomial::projector(Party::B, target_y, g & 1);
      double al = alpha_of(i);
      Polynomial term =
          mn * (al * (z + zd) + (1.0 - t) * al * al * (zd * z)) + t * al * al * (z * zd);
      accumulate(obj, map, spec, term, ci);
      accumulate(node_rows[ni], map, spec, term, ci);
    }
  }
  for (const auto& [v, w] : obj) prob.c[v] = w;

  std::map<int, double> idrow;
  accumulate(idrow, map, spec, Polynomial::identity(), 1.0);
  prob.equalities.push_back({to_row(idrow), 1.0});

  add_statistics_constraints(prob, cs, {&spec}, {map});

  auto sol = sdp::solve(prob, opts.solver);
  VNResult r;
  r.status = sol.status;
  // dual <= min, and the l1 dual residual bounds the leak through the
  // moment variables (all in [-1, 1] here: projector moments are bounded by
  // 1 and Z moments by the operator norm bound built into the construction).
  r.raw_bits = const_bits + sol.certified_dual;
  r.primal_bits = const_bits + sol.primal_objective;
  for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
    double term = rule.coeffs[static_cast<std::size_t>(nodes[ni])];
    for (const auto& [v, w] : node_rows[ni]) term += w * sol.y[v];
    r.node_terms.push_back(term);
  }
  r.moment_vars = prob.nvars;
  r.matrix_dim = prob.blocks.front().dim;
  // A stalled solve still carries a valid dual certificate; when that
  // certificate is close to the feasible primal value the bound is
  // trustworthy, so report near-optimal instead of a failure.
  if (r.status != sdp::Status::Optimal && r.status != sdp::Status::NearOptimal &&
      r.primal_bits - r.raw_bits <= 0.02)
    r.status = sdp::Status::NearOptimal;
  return r;
}

}  // namespace

VNResult von_neumann_bound(const ConstraintSet& cs, int target_x, int target_y,
                           const VNOptions& opts) {
  check_target(cs, target_x, target_y);
  if (opts.m < 2) throw std::invalid_argument("von_neumann_bound: m must be >= 2");
  auto rule = quadrature::gauss_radau(opts.m);

  VNResult r;
  if (opts.joint) {
    std::vector<int> nodes;
    for (int i = 0; i + 1 < opts.m; ++i) nodes.push_back(i);
    r = vn_solve_nodes(cs, target_x, target_y, opts, rule, nodes);
  } else {
    // Sum of per-node infima: a weaker but valid bound; kept for comparison
    // with the joint program.
    r.status = sdp::Status::Optimal;
    for (int i = 0; i + 1 < opts.m; ++i) {
      auto part = vn_solve_nodes(cs, target_x, target_y, opts, rule, {i});
      if (std::getenv("DICERT_VN_DEBUG"))
        std::fprintf(stderr, "node %d t=%.4f raw=%.6f primal=%.6f status=%s\n", i,
                     rule.nodes[static_cast<std::size_t>(i)], part.raw_bits,
                     part.primal_bits, sdp::status_name(part.status).c_str());
      r.raw_bits += part.raw_bits;
      r.primal_bits += part.primal_bits;
      r.node_terms.push_back(part.node_terms.front());
      r.moment_vars = std::max(r.moment_vars, part.moment_vars);
      r.matrix_dim = std::max(r.matrix_dim, part.matrix_dim);
      if (part.status != sdp::Status::Optimal) r.status = part.status;
    }
  }
  r.bits = std::clamp(r.raw_bits, 0.0, 2.0);
  return r;
}

double finite_stat_adjust(double value, double stderr, double k_sigma) {
  if (!(k_sigma >= 0.0)) throw std::invalid_argument("finite_stat_adjust: k must be >= 0");
  return value - k_sigma * stderr;
}

RateReport rate_report(double entropy_bits_per_pair, double pair_rate_hz) {
  if (entropy_bits_per_pair < 0.0 || pair_rate_hz < 0.0)
    throw std::invalid_argument("rate_report: negative input");
  return {entropy_bits_per_pair, pair_rate_hz, entropy_bits_per_pair * pair_rate_hz};
}

}  // namespace dicert::certify
