#include "dicert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace dicert::sdp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double entry_norm(const std::vector<SparseEntry>& es) {
  double s = 0.0;
  for (const auto& e : es) {
    double w = e.row == e.col ? 1.0 : 2.0;
    s += w * e.value * e.value;
  }
  return std::sqrt(s);
}

void add_entries(MatrixXd& m, const std::vector<SparseEntry>& es, double scale) {
  for (const auto& e : es) {
    m(e.row, e.col) += scale * e.value;
    if (e.row != e.col) m(e.col, e.row) += scale * e.value;
  }
}

// tr(F M) for symmetric M and F given as lower-triangle entries.
double dot_entries(const std::vector<SparseEntry>& es, const MatrixXd& m) {
  double s = 0.0;
  for (const auto& e : es) {
    double w = e.row == e.col ? 1.0 : 2.0;
    s += w * e.value * m(e.row, e.col);
  }
  return s;
}

// Largest alpha in (0, 1] with W + alpha * frac * D staying PSD, where W is
// positive definite with Cholesky factor L. Uses the spectrum of L^-1 D L^-T.
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& d, double frac) {
  MatrixXd m = llt.matrixL().solve(d);
  m = llt.matrixL().solve(m.transpose()).eval();
  // m is L^-1 D L^-T up to asymmetry from roundoff
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -frac / lmin);
}

// Internal form: all constraints as PSD blocks (inequalities become 1x1
// slacks) plus dense equality data.
struct Work {
  int nv = 0;
  VectorXd c;
  std::vector<Block> blocks;  // original blocks then inequality slacks
  MatrixXd A;                 // equality rows x nv
  VectorXd b;
};

Work build_work(const Problem& p) {
  Work w;
  w.nv = p.nvars;
  w.c = p.c;
  w.blocks = p.blocks;
  for (const auto& iq : p.inequalities) {
    Block blk;
    blk.dim = 1;
    blk.f0.push_back({0, 0, -iq.rhs});
    for (const auto& [var, coef] : iq.coeffs) {
      VarBlockEntries v;
      v.var = var;
      v.entries.push_back({0, 0, coef});
      blk.fvars.push_back(std::move(v));
    }
    std::sort(blk.fvars.begin(), blk.fvars.end(),
              [](const auto& a, const auto& b) { return a.var < b.var; });
    w.blocks.push_back(std::move(blk));
  }
  int me = static_cast<int>(p.equalities.size());
  w.A = MatrixXd::Zero(me, w.nv);
  w.b = VectorXd::Zero(me);
  for (int r = 0; r < me; ++r) {
    for (const auto& [var, coef] : p.equalities[static_cast<std::size_t>(r)].coeffs)
      w.A(r, var) += coef;
    w.b[r] = p.equalities[static_cast<std::size_t>(r)].rhs;
  }
  return w;
}

struct Iterate {
  VectorXd y, nu;
  std::vector<MatrixXd> X, S;
};

}  // namespace

void Problem::validate() const {
  if (nvars < 0) throw std::invalid_argument("sdp: negative variable count");
  if (c.size() != nvars) throw std::invalid_argument("sdp: objective length != nvars");
  auto check_entry = [](const SparseEntry& e, int dim) {
    if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim || e.row < e.col)
      throw std::invalid_argument("sdp: entry outside lower triangle of block");
    if (!std::isfinite(e.value)) throw std::invalid_argument("sdp: non-finite entry");
  };
  for (const auto& blk : blocks) {
    if (blk.dim <= 0) throw std::invalid_argument("sdp: block dim must be positive");
    for (const auto& e : blk.f0) check_entry(e, blk.dim);
    int prev = -1;
    for (const auto& fv : blk.fvars) {
      if (fv.var <= prev) throw std::invalid_argument("sdp: block vars not strictly increasing");
      if (fv.var >= nvars) throw std::invalid_argument("sdp: variable index out of range");
      prev = fv.var;
      for (const auto& e : fv.entries) check_entry(e, blk.dim);
    }
  }
  auto check_row = [&](const LinearConstraint& lc) {
    for (const auto& [var, coef] : lc.coeffs) {
      if (var < 0 || var >= nvars) throw std::invalid_argument("sdp: row variable out of range");
      if (!std::isfinite(coef)) throw std::invalid_argument("sdp: non-finite row coefficient");
    }
    if (!std::isfinite(lc.rhs)) throw std::invalid_argument("sdp: non-finite rhs");
  };
  for (const auto& lc : equalities) check_row(lc);
  for (const auto& lc : inequalities) check_row(lc);
}

std::string status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::NearOptimal: return "near-optimal";
    case Status::IterationLimit: return "iteration-limit";
    case Status::NumericalFailure: return "numerical-failure";
    case Status::Diverged: return "diverged";
  }
  return "unknown";
}

Solution solve(const Problem& p, const SolveOptions& opts) {
  p.validate();
  Work w = build_work(p);
  const int nv = w.nv;
  const int me = static_cast<int>(w.b.size());
  const int nb = static_cast<int>(w.blocks.size());

  double total_dim = 0.0;
  double data_scale = 1.0;
  for (const auto& blk : w.blocks) {
    total_dim += blk.dim;
    data_scale = std::max(data_scale, entry_norm(blk.f0));
    for (const auto& fv : blk.fvars)
      data_scale = std::max(data_scale, entry_norm(fv.entries));
  }
  if (nv == 0 || nb == 0)
    throw std::invalid_argument("sdp: empty problem");

  double c_scale = std::max(1.0, w.c.lpNorm<Eigen::Infinity>());
  double b_scale = me ? std::max(1.0, w.b.lpNorm<Eigen::Infinity>()) : 1.0;
  double tau_p = 10.0 * std::max(data_scale, b_scale);  // S scale
  double tau_d = 10.0 * c_scale;                        // X scale

  Iterate it;
  it.y = VectorXd::Zero(nv);
  it.nu = VectorXd::Zero(me);
  for (const auto& blk : w.blocks) {
    it.X.emplace_back(tau_d * MatrixXd::Identity(blk.dim, blk.dim));
    it.S.emplace_back(tau_p * MatrixXd::Identity(blk.dim, blk.dim));
  }

  Solution sol;
  sol.y = it.y;

  // Per-iteration storage, reused.
  std::vector<MatrixXd> Sinv(static_cast<std::size_t>(nb));
  std::vector<MatrixXd> Rp(static_cast<std::size_t>(nb));
  std::vector<Eigen::LLT<MatrixXd>> lltX(static_cast<std::size_t>(nb)),
      lltS(static_cast<std::size_t>(nb));
  MatrixXd H(nv, nv);
  std::vector<MatrixXd> dXa(static_cast<std::size_t>(nb)),
      dSa(static_cast<std::size_t>(nb)), dX(static_cast<std::size_t>(nb)),
      dS(static_cast<std::size_t>(nb));

  auto slack_of = [&](int k, const VectorXd& y) {
    const Block& blk = w.blocks[static_cast<std::size_t>(k)];
    MatrixXd s = MatrixXd::Zero(blk.dim, blk.dim);
    add_entries(s, blk.f0, 1.0);
    for (const auto& fv : blk.fvars) add_entries(s, fv.entries, y[fv.var]);
    return s;
  };

  // Gram matrix G_uv = tr(F_u F_v) over all blocks. Used to project defects
  // of the dual-feasibility equation onto span{F_v}: inside the iteration to
  // keep the Newton steps on the affine set, and afterwards to repair the
  // returned certificate. Skipped for very large systems.
  Eigen::LLT<MatrixXd> lltG;
  Eigen::LLT<MatrixXd> lltAAt;
  bool gram_ok = false;
  if (nv <= 6000) {
    MatrixXd G = MatrixXd::Zero(nv, nv);
    for (const auto& blk : w.blocks) {
      std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> bycell;
      for (const auto& fv : blk.fvars)
        for (const auto& e : fv.entries)
          bycell[{e.row, e.col}].emplace_back(fv.var, e.value);
      for (const auto& [cell, lst] : bycell) {
        double wgt = cell.first == cell.second ? 1.0 : 2.0;
        for (const auto& [u, vu] : lst)
          for (const auto& [v, vv] : lst)
            if (u <= v) G(u, v) += wgt * vu * vv;
      }
    }
    G = G.selfadjointView<Eigen::Upper>();
    G.diagonal().array() += 1e-12 * (1.0 + G.diagonal().cwiseAbs().maxCoeff());
    lltG.compute(G);
    gram_ok = lltG.info() == Eigen::Success;
    if (me && gram_ok) {
      MatrixXd AAt = w.A * w.A.transpose();
      AAt.diagonal().array() += 1e-12 * (1.0 + AAt.diagonal().cwiseAbs().maxCoeff());
      lltAAt.compute(AAt);
      gram_ok = lltAAt.info() == Eigen::Success;
    }
  }

  double mu = 0.0;
  char last_steps[64] = "";
  Status status = Status::IterationLimit;
  // Track the best iterate seen: near the numerical floor the last iterate
  // can be worse than an earlier one, and stalls should return the best
  // point instead of failing.
  Solution best;
  double best_score = std::numeric_limits<double>::infinity();
  double cert_best = -std::numeric_limits<double>::infinity();
  int best_iter = -1;
  // On degenerate problems the dual objective keeps improving long after the
  // residual score has bottomed out (the Newton solves lose dual feasibility,
  // which the post-solve repair restores). Keep a second snapshot at the best
  // dual objective among primal-feasible iterates and repair from it too.
  Solution bestd;
  double best_dobj = -std::numeric_limits<double>::infinity();
  int bestd_iter = -1;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // Residuals.
    VectorXd rd = w.c;  // c - F*X - A^T nu
    double pinf = 0.0;
    mu = 0.0;
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      const Block& blk = w.blocks[ku];
      Rp[ku] = slack_of(k, it.y) - it.S[ku];
      pinf = std::max(pinf, Rp[ku].cwiseAbs().maxCoeff() / (1.0 + data_scale));
      for (const auto& fv : blk.fvars)
        rd[fv.var] -= dot_entries(fv.entries, it.X[ku]);
      mu += (it.X[ku].array() * it.S[ku].array()).sum();
    }
    mu /= total_dim;
    VectorXd rb = me ? VectorXd(w.b - w.A * it.y) : VectorXd();
    if (me) {
      rd -= w.A.transpose() * it.nu;
      pinf = std::max(pinf, rb.lpNorm<Eigen::Infinity>() / (1.0 + b_scale));
    }
    double dinf = rd.lpNorm<Eigen::Infinity>() / (1.0 + c_scale);

    double pobj = w.c.dot(it.y);
    double dobj = me ? w.b.dot(it.nu) : 0.0;
    for (int k = 0; k < nb; ++k)
      dobj -= dot_entries(w.blocks[static_cast<std::size_t>(k)].f0,
                          it.X[static_cast<std::size_t>(k)]);
    double gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));

    sol.y = it.y;
    sol.eq_duals = it.nu;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.rel_gap = gap;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    sol.dual_residual_l1 = rd.lpNorm<1>();
    cert_best = std::max(cert_best, dobj - sol.dual_residual_l1);

    double score = std::max({gap, pinf, dinf});
    if (std::isfinite(score) && score < best_score) {
      best_score = score;
      best_iter = iter;
      best = sol;
      best.X.assign(it.X.begin(), it.X.end());
    }
    if (pinf <= 1e-6 && std::isfinite(dobj) &&
        dobj > best_dobj + 1e-12 * (1.0 + std::abs(dobj))) {
      best_dobj = dobj;
      bestd_iter = iter;
      bestd = sol;
      bestd.X.assign(it.X.begin(), it.X.end());
    }

    if (opts.verbose)
      std::printf("it %3d  pobj % .8e  dobj % .8e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e%s\n",
                  iter, pobj, dobj, gap, pinf, dinf, mu, last_steps);

    if (gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol) {
      status = Status::Optimal;
      break;
    }
    if (!it.y.allFinite() || it.y.lpNorm<Eigen::Infinity>() > 1e12 ||
        mu > 1e30 || !std::isfinite(mu)) {
      status = Status::Diverged;
      break;
    }
    if (iter - std::max(best_iter, bestd_iter) >= 10) {
      // No residual progress for a while: numerical floor reached.
      status = Status::IterationLimit;
      break;
    }

    // Factor X and S, form S^-1.
    bool fact_ok = true;
    for (int k = 0; k < nb && fact_ok; ++k) {
      auto ku = static_cast<std::size_t>(k);
      lltX[ku].compute(it.X[ku]);
      lltS[ku].compute(it.S[ku]);
      if (lltX[ku].info() != Eigen::Success || lltS[ku].info() != Eigen::Success)
        fact_ok = false;
      else
        Sinv[ku] = lltS[ku].solve(MatrixXd::Identity(
            w.blocks[ku].dim, w.blocks[ku].dim));
    }
    if (!fact_ok) {
      status = Status::NumericalFailure;
      break;
    }

    // Schur complement H_ij = 1/2 tr(F_i (X F_j S^-1 + S^-1 F_j X)).
    H.setZero();
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      const Block& blk = w.blocks[ku];
      const MatrixXd& X = it.X[ku];
      const MatrixXd& Si = Sinv[ku];
      MatrixXd U(blk.dim, blk.dim);
      for (const auto& fj : blk.fvars) {
        U.setZero();
        for (const auto& e : fj.entries) {
          U.noalias() += e.value * X.col(e.row) * Si.row(e.col);
          if (e.row != e.col)
            U.noalias() += e.value * X.col(e.col) * Si.row(e.row);
        }
        MatrixXd Us = 0.5 * (U + U.transpose());
        for (const auto& fi : blk.fvars) {
          if (fi.var > fj.var) break;
          H(fi.var, fj.var) += dot_entries(fi.entries, Us);
        }
      }
    }
    H = H.selfadjointView<Eigen::Upper>();
    // Tiny diagonal regularization keeps the factorization alive when some
    // variable touches no block (or blocks become near-singular).
    double reg = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += reg;

    // Keep a copy for iterative refinement of the Newton solves (skipped for
    // very large systems where the extra memory would dominate).
    const bool refine = nv <= 6000;
    MatrixXd Hcopy;
    if (refine) Hcopy = H;
    Eigen::LLT<Eigen::Ref<MatrixXd>> lltH(H);  // in-place
    if (lltH.info() != Eigen::Success) {
      status = Status::NumericalFailure;
      break;
    }
    MatrixXd HiAt;
    Eigen::LLT<MatrixXd> lltM;
    if (me) {
      HiAt = lltH.solve(w.A.transpose());
      MatrixXd M = w.A * HiAt;
      M.diagonal().array() += 1e-13 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      lltM.compute(M);
      if (lltM.info() != Eigen::Success) {
        status = Status::NumericalFailure;
        break;
      }
    }

    // One Newton solve for a given complementarity target; fills dy/dnu/dX/dS.
    VectorXd dy(nv), dnu(me);
    auto newton = [&](const std::vector<MatrixXd>* corr, double sigmu,
                      std::vector<MatrixXd>& outdX, std::vector<MatrixXd>& outdS) {
      VectorXd g = -rd;
      for (int k = 0; k < nb; ++k) {
        auto ku = static_cast<std::size_t>(k);
        const Block& blk = w.blocks[ku];
        // Rc = sigmu I - X S - corr;  T = Sym((Rc - X Rp) S^-1)
        MatrixXd Rc = -it.X[ku] * it.S[ku];
        if (sigmu != 0.0) Rc.diagonal().array() += sigmu;
        if (corr) Rc -= (*corr)[ku];
        MatrixXd T = (Rc - it.X[ku] * Rp[ku]) * Sinv[ku];
        T = 0.5 * (T + T.transpose()).eval();
        for (const auto& fv : blk.fvars) g[fv.var] += dot_entries(fv.entries, T);
      }
      if (me) {
        VectorXd Hig = lltH.solve(g);
        dnu = lltM.solve(rb - w.A * Hig);
        dy = Hig + HiAt * dnu;
        if (refine)
          for (int r = 0; r < 2; ++r) {
            // KKT: H dy - A^T dnu = g,  A dy = rb.
            VectorXd e1 = g - Hcopy.selfadjointView<Eigen::Lower>() * dy +
                          w.A.transpose() * dnu;
            VectorXd e2 = rb - w.A * dy;
            VectorXd t1 = lltH.solve(e1);
            VectorXd ddnu = lltM.solve(e2 - w.A * t1);
            dnu += ddnu;
            dy += t1 + HiAt * ddnu;
          }
      } else {
        dy = lltH.solve(g);
        if (refine)
          for (int r = 0; r < 2; ++r)
            dy += lltH.solve(g - Hcopy.selfadjointView<Eigen::Lower>() * dy);
      }
      for (int k = 0; k < nb; ++k) {
        auto ku = static_cast<std::size_t>(k);
        const Block& blk = w.blocks[ku];
        MatrixXd ds = Rp[ku];
        for (const auto& fv : blk.fvars) add_entries(ds, fv.entries, dy[fv.var]);
        MatrixXd Rc = -it.X[ku] * it.S[ku];
        if (sigmu != 0.0) Rc.diagonal().array() += sigmu;
        if (corr) Rc -= (*corr)[ku];
        MatrixXd dx = (Rc - it.X[ku] * ds) * Sinv[ku];
        outdX[ku] = 0.5 * (dx + dx.transpose());
        outdS[ku] = std::move(ds);
      }
      if (gram_ok) {
        // The dX formula satisfies F.dX + A^T dnu = rd only up to the solve
        // accuracy, and on ill-conditioned problems the leftover compounds
        // across iterations until the dual residual dominates. Project the
        // defect back onto span{F_v}; the complementarity equation absorbs
        // the (second-order) perturbation.
        VectorXd defect = rd;
        for (int k = 0; k < nb; ++k) {
          auto ku = static_cast<std::size_t>(k);
          for (const auto& fv : w.blocks[ku].fvars)
            defect[fv.var] -= dot_entries(fv.entries, outdX[ku]);
        }
        if (me) defect -= w.A.transpose() * dnu;
        VectorXd beta = lltG.solve(defect);
        for (int k = 0; k < nb; ++k) {
          auto ku = static_cast<std::size_t>(k);
          for (const auto& fv : w.blocks[ku].fvars)
            add_entries(outdX[ku], fv.entries, beta[fv.var]);
        }
      }
    };

    // Predictor (affine scaling).
    newton(nullptr, 0.0, dXa, dSa);
    double ap_aff = 1.0, ad_aff = 1.0;
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      ap_aff = std::min(ap_aff, max_step(lltS[ku], dSa[ku], opts.step_fraction));
      ad_aff = std::min(ad_aff, max_step(lltX[ku], dXa[ku], opts.step_fraction));
    }
    double mu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      mu_aff += ((it.X[ku] + ad_aff * dXa[ku]).array() *
                 (it.S[ku] + ap_aff * dSa[ku]).array())
                    .sum();
    }
    mu_aff = std::max(mu_aff / total_dim, 0.0);
    double sigma = std::pow(std::min(1.0, mu_aff / mu), 3);

    // Corrector.
    std::vector<MatrixXd> corr(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      corr[ku] = dXa[ku] * dSa[ku];
    }
    newton(&corr, sigma * mu, dX, dS);

    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      ap = std::min(ap, max_step(lltS[ku], dS[ku], opts.step_fraction));
      ad = std::min(ad, max_step(lltX[ku], dX[ku], opts.step_fraction));
    }
    if (ap < 1e-10 && ad < 1e-10) {
      status = Status::NumericalFailure;
      break;
    }

    std::snprintf(last_steps, sizeof(last_steps), "  ap %.2e ad %.2e sig %.2e",
                  ap, ad, sigma);
    it.y += ap * dy;
    if (me) it.nu += ad * dnu;
    for (int k = 0; k < nb; ++k) {
      auto ku = static_cast<std::size_t>(k);
      it.S[ku] += ap * dS[ku];
      it.X[ku] += ad * dX[ku];
    }
  }

  if (status == Status::Optimal || status == Status::Diverged) {
    sol.X.assign(it.X.begin(), it.X.end());
  } else {
    // Return the best iterate rather than the point the method stalled at.
    if (best_iter >= 0) sol = best;
    if (std::max({sol.rel_gap, sol.primal_infeasibility, sol.dual_infeasibility}) <=
        opts.loose_tol)
      status = Status::NearOptimal;
  }

  // Post-solve dual repair: the certificate dobj - |rd|_1 pays the full l1
  // residual, which can be large when an ill-conditioned solve stalls.
  // Alternate between (a) shifting the equality duals by least squares and
  // absorbing the residual into X along span{F_v} (projection onto the dual
  // feasibility affine set) and (b) projecting X back onto the PSD cone.
  // Every round yields a valid PSD point, so track the best certificate.
  if (gram_ok && !sol.X.empty()) {
    {
      // Dykstra's alternating projections between the dual-feasibility
      // affine set {F.X + A^T nu = c} and the PSD cone. The cone correction
      // term makes the iteration converge to the feasible point nearest the
      // snapshot instead of drifting, so the repaired dual objective stays
      // close to the snapshot's. Every PSD iterate yields a valid
      // certificate dobj - |residual|_1; keep the best.
      auto repair = [&](const Solution& from, int max_rounds) {
        std::vector<MatrixXd> Xr(from.X.begin(), from.X.end());
        std::vector<MatrixXd> corr;
        for (const auto& x : Xr) corr.emplace_back(MatrixXd::Zero(x.rows(), x.cols()));
        VectorXd nu2 = from.eq_duals;
        double prev_res = std::numeric_limits<double>::infinity();
        for (int round = 0; round < max_rounds; ++round) {
          VectorXd rdv = w.c;
          double dobj2 = me ? w.b.dot(nu2) : 0.0;
          for (int k = 0; k < nb; ++k) {
            auto ku = static_cast<std::size_t>(k);
            for (const auto& fv : w.blocks[ku].fvars)
              rdv[fv.var] -= dot_entries(fv.entries, Xr[ku]);
            dobj2 -= dot_entries(w.blocks[ku].f0, Xr[ku]);
          }
          if (me) rdv -= w.A.transpose() * nu2;
          double res = rdv.lpNorm<1>();
          double cert2 = dobj2 - res;
          if (opts.verbose && round % 25 == 0)
            std::printf("repair %3d: res_l1 %.3e cert %.8e\n", round, res, cert2);
          cert_best = std::max(cert_best, cert2);
          // Stop once feasible or once the linear convergence has flattened.
          if (res < 1e-14 || res > 0.9999 * prev_res) break;
          prev_res = res;
          if (me) {
            VectorXd dn = lltAAt.solve(w.A * rdv);
            rdv -= w.A.transpose() * dn;
            nu2 += dn;
          }
          VectorXd beta = lltG.solve(rdv);
          for (int k = 0; k < nb; ++k) {
            auto ku = static_cast<std::size_t>(k);
            for (const auto& fv : w.blocks[ku].fvars)
              add_entries(Xr[ku], fv.entries, beta[fv.var]);
            // Cone step with Dykstra correction.
            Xr[ku] += corr[ku];
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(Xr[ku]);
            if (es.eigenvalues().minCoeff() < 0.0) {
              MatrixXd proj = es.eigenvectors() *
                              es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                              es.eigenvectors().transpose();
              corr[ku] = Xr[ku] - proj;
              Xr[ku] = std::move(proj);
            } else {
              corr[ku].setZero();
            }
          }
        }
      };
      repair(sol, 25);
      if (bestd_iter >= 0 && bestd_iter != best_iter && !bestd.X.empty())
        repair(bestd, 1000);
    }
  }

  sol.status = status;
  sol.iterations = iter;
  sol.certified_dual = cert_best;
  return sol;
}

VerifyReport verify(const Problem& p, const Eigen::VectorXd& y) {
  p.validate();
  if (y.size() != p.nvars) throw std::invalid_argument("verify: wrong y length");
  VerifyReport r;
  r.objective = p.c.dot(y);
  r.min_slack_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& blk : p.blocks) {
    MatrixXd s = MatrixXd::Zero(blk.dim, blk.dim);
    add_entries(s, blk.f0, 1.0);
    for (const auto& fv : blk.fvars) add_entries(s, fv.entries, y[fv.var]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
    r.min_slack_eigenvalue = std::min(r.min_slack_eigenvalue, es.eigenvalues().minCoeff());
  }
  for (const auto& lc : p.equalities) {
    double v = -lc.rhs;
    for (const auto& [var, coef] : lc.coeffs) v += coef * y[var];
    r.max_equality_violation = std::max(r.max_equality_violation, std::abs(v));
  }
  for (const auto& lc : p.inequalities) {
    double v = -lc.rhs;
    for (const auto& [var, coef] : lc.coeffs) v += coef * y[var];
    r.max_inequality_violation = std::max(r.max_inequality_violation, std::max(0.0, -v));
  }
  return r;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  const auto n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = m.real();
  r.bottomRightCorner(n, n) = m.real();
  r.topRightCorner(n, n) = -m.imag();
  r.bottomLeftCorner(n, n) = m.imag();
  return r;
}

namespace {

std::vector<SparseEntry> realify_entries(const std::vector<ComplexSparseEntry>& es, int n) {
  // F[r][c] = v, F[c][r] = conj(v) embeds as Re v on the two diagonal copies
  // and -Im v / +Im v on the off-diagonal copies; keep lower triangle only.
  std::vector<SparseEntry> out;
  for (const auto& e : es) {
    double re = e.value.real(), im = e.value.imag();
    int r = e.row, c = e.col;
    if (r < c) {
      std::swap(r, c);
      im = -im;
    }
    if (re != 0.0) {
      out.push_back({r, c, re});
      out.push_back({n + r, n + c, re});
    }
    if (r == c) {
      if (im != 0.0) throw std::invalid_argument("realify: non-real diagonal");
    } else if (im != 0.0) {
      // lower-left copy holds Im M
      out.push_back({n + r, c, im});
      out.push_back({n + c, r, -im});
    }
  }
  return out;
}

}  // namespace

Block realify_block(const ComplexBlock& b) {
  Block out;
  out.dim = 2 * b.dim;
  out.f0 = realify_entries(b.f0, b.dim);
  for (const auto& [var, es] : b.fvars)
    out.fvars.push_back({var, realify_entries(es, b.dim)});
  std::sort(out.fvars.begin(), out.fvars.end(),
            [](const auto& a, const auto& c) { return a.var < c.var; });
  return out;
}

}  // namespace dicert::sdp
