#include "scvx/conic.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace scvx {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::optimal_inaccurate:
      return "optimal_inaccurate";
    case SolveStatus::primal_infeasible:
      return "primal_infeasible";
    case SolveStatus::dual_infeasible:
      return "dual_infeasible";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

void ConeProblem::validate() const {
  const auto n = c.size();
  auto fail = [](const std::string& m) { throw std::invalid_argument("ConeProblem: " + m); };
  if (A.cols() != n && A.rows() > 0) fail("A column count differs from c");
  if (A.rows() != b.size()) fail("A row count differs from b");
  if (G.cols() != n && G.rows() > 0) fail("G column count differs from c");
  if (G.rows() != h.size()) fail("G row count differs from h");
  if (l < 0) fail("negative orthant size");
  long total = l;
  for (int d : soc_dims) {
    if (d < 1) fail("second-order cone of dimension < 1");
    total += d;
  }
  if (total != G.rows()) fail("cone dimensions do not sum to the rows of G");
  if (!c.allFinite() || !b.allFinite() || !h.allFinite()) fail("non-finite data");
}

namespace {

using Vec = Eigen::VectorXd;

struct Cones {
  int l = 0;
  std::vector<int> dims;
  std::vector<int> offs;
  int m = 0;
  int degree = 0;

  Cones(int l_, const std::vector<int>& d) : l(l_), dims(d) {
    int o = l;
    for (int q : dims) {
      offs.push_back(o);
      o += q;
    }
    m = o;
    degree = l + static_cast<int>(dims.size());
  }
};

// Smallest margin u0 - ||u1|| (SOC) or u_i (orthant) over all blocks.
double cone_margin(const Cones& k, const Vec& u) {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.l; ++i) mn = std::min(mn, u[i]);
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int o = k.offs[c], q = k.dims[c];
    mn = std::min(mn, u[o] - u.segment(o + 1, q - 1).norm());
  }
  return mn;
}

void add_identity(const Cones& k, Vec& u, double a) {
  for (int i = 0; i < k.l; ++i) u[i] += a;
  for (int o : k.offs) u[o] += a;
}

void shift_into_cone(const Cones& k, Vec& u) {
  const double alpha = -cone_margin(k, u);
  if (alpha >= 0.0) {
    add_identity(k, u, 1.0 + alpha);
  }
}

Vec jordan_prod(const Cones& k, const Vec& u, const Vec& v) {
  Vec w(u.size());
  for (int i = 0; i < k.l; ++i) w[i] = u[i] * v[i];
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int o = k.offs[c], q = k.dims[c];
    w[o] = u.segment(o, q).dot(v.segment(o, q));
    w.segment(o + 1, q - 1) = u[o] * v.segment(o + 1, q - 1) + v[o] * u.segment(o + 1, q - 1);
  }
  return w;
}

// x such that lambda o x = v.
Vec jordan_div(const Cones& k, const Vec& lam, const Vec& v) {
  Vec x(v.size());
  for (int i = 0; i < k.l; ++i) x[i] = v[i] / lam[i];
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int o = k.offs[c], q = k.dims[c];
    const double l0 = lam[o];
    const auto l1 = lam.segment(o + 1, q - 1);
    const double det = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * v[o] - l1.dot(v.segment(o + 1, q - 1))) / det;
    x[o] = x0;
    x.segment(o + 1, q - 1) = (v.segment(o + 1, q - 1) - x0 * l1) / l0;
  }
  return x;
}

double max_step(const Cones& k, const Vec& u, const Vec& du) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.l; ++i) {
    if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
  }
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int o = k.offs[c], q = k.dims[c];
    const double u0 = u[o], d0 = du[o];
    const auto u1 = u.segment(o + 1, q - 1);
    const auto d1 = du.segment(o + 1, q - 1);
    const double a = d0 * d0 - d1.squaredNorm();
    const double b = u0 * d0 - u1.dot(d1);
    const double c0 = std::max(0.0, u0 * u0 - u1.squaredNorm());
    const double disc = b * b - a * c0;
    if (a < 0.0 || (b < 0.0 && disc >= 0.0)) {
      const double denom = -b + std::sqrt(std::max(disc, 0.0));
      alpha = std::min(alpha, denom > 0.0 ? c0 / denom : 0.0);
    }
  }
  return alpha;
}

// Nesterov-Todd scaling point for the current (s, z).
struct NtScaling {
  Vec d;                     // orthant: sqrt(s / z)
  std::vector<Vec> wbar;     // SOC: normalized scaling point
  std::vector<double> eta;
  Vec lambda;

  bool compute(const Cones& k, const Vec& s, const Vec& z) {
    d.resize(k.l);
    for (int i = 0; i < k.l; ++i) {
      if (!(s[i] > 0.0 && z[i] > 0.0)) return false;
      d[i] = std::sqrt(s[i] / z[i]);
    }
    wbar.resize(k.dims.size());
    eta.resize(k.dims.size());
    for (std::size_t c = 0; c < k.dims.size(); ++c) {
      const int o = k.offs[c], q = k.dims[c];
      const double sr2 = s[o] * s[o] - s.segment(o + 1, q - 1).squaredNorm();
      const double zr2 = z[o] * z[o] - z.segment(o + 1, q - 1).squaredNorm();
      if (!(sr2 > 0.0 && zr2 > 0.0 && s[o] > 0.0 && z[o] > 0.0)) return false;
      const double sr = std::sqrt(sr2), zr = std::sqrt(zr2);
      const Vec sb = s.segment(o, q) / sr;
      Vec zb = z.segment(o, q) / zr;
      const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
      zb.tail(q - 1) *= -1.0;
      wbar[c] = (sb + zb) / (2.0 * gamma);
      eta[c] = std::sqrt(sr / zr);
    }
    lambda = apply_w(k, z);
    return true;
  }

  Vec apply_w(const Cones& k, const Vec& v) const {
    Vec out(v.size());
    for (int i = 0; i < k.l; ++i) out[i] = d[i] * v[i];
    for (std::size_t c = 0; c < k.dims.size(); ++c) {
      const int o = k.offs[c], q = k.dims[c];
      const Vec& w = wbar[c];
      const auto w1 = w.tail(q - 1);
      const auto v1 = v.segment(o + 1, q - 1);
      const double w1v1 = w1.dot(v1);
      out[o] = eta[c] * (w[0] * v[o] + w1v1);
      out.segment(o + 1, q - 1) = eta[c] * (v[o] * w1 + v1 + (w1v1 / (1.0 + w[0])) * w1);
    }
    return out;
  }

  Vec apply_winv(const Cones& k, const Vec& v) const {
    Vec out(v.size());
    for (int i = 0; i < k.l; ++i) out[i] = v[i] / d[i];
    for (std::size_t c = 0; c < k.dims.size(); ++c) {
      const int o = k.offs[c], q = k.dims[c];
      const Vec& w = wbar[c];
      const auto w1 = w.tail(q - 1);
      const auto v1 = v.segment(o + 1, q - 1);
      const double w1v1 = w1.dot(v1);
      out[o] = (w[0] * v[o] - w1v1) / eta[c];
      out.segment(o + 1, q - 1) = (-v[o] * w1 + v1 + (w1v1 / (1.0 + w[0])) * w1) / eta[c];
    }
    return out;
  }

  Vec apply_w2(const Cones& k, const Vec& v) const { return apply_w(k, apply_w(k, v)); }
};

NtScaling identity_scaling(const Cones& k) {
  NtScaling nt;
  nt.d = Vec::Ones(k.l);
  for (int q : k.dims) {
    Vec w = Vec::Zero(q);
    w[0] = 1.0;
    nt.wbar.push_back(w);
    nt.eta.push_back(1.0);
  }
  return nt;
}

// Quasi-definite KKT system [[dI, A', G'], [A, -dI, 0], [G, 0, -W^2 - dI]].
class Kkt {
 public:
  Kkt(const SpMat& A, const SpMat& G, const Cones& k, double reg, int refine)
      : A_(A), G_(G), At_(A.transpose()), Gt_(G.transpose()), k_(k), reg_(reg), refine_(refine) {
    n_ = static_cast<int>(A.cols());
    p_ = static_cast<int>(A.rows());
    m_ = static_cast<int>(G.rows());
    if (G.cols() != n_) n_ = static_cast<int>(std::max(A.cols(), G.cols()));
  }

  // Retries with a larger static regularization when a pivot vanishes, which
  // happens with linearly dependent equality rows.
  bool factor(const NtScaling& nt) {
    nt_ = &nt;
    double reg = reg_;
    for (int attempt = 0; attempt < 4; ++attempt, reg *= 100.0) {
      if (factor_with(nt, reg)) return true;
    }
    return false;
  }

  bool factor_with(const NtScaling& nt, double reg) {
    const int dim = n_ + p_ + m_;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(A_.nonZeros() + G_.nonZeros() + dim) + w2_nnz());
    for (int i = 0; i < n_; ++i) t.emplace_back(i, i, reg);
    for (int j = 0; j < A_.outerSize(); ++j) {
      for (SpMat::InnerIterator it(A_, j); it; ++it) t.emplace_back(n_ + it.row(), j, it.value());
    }
    for (int j = 0; j < G_.outerSize(); ++j) {
      for (SpMat::InnerIterator it(G_, j); it; ++it) {
        t.emplace_back(n_ + p_ + it.row(), j, it.value());
      }
    }
    for (int i = 0; i < p_; ++i) t.emplace_back(n_ + i, n_ + i, -reg);
    const int zo = n_ + p_;
    for (int i = 0; i < k_.l; ++i) t.emplace_back(zo + i, zo + i, -nt.d[i] * nt.d[i] - reg);
    for (std::size_t c = 0; c < k_.dims.size(); ++c) {
      const int o = k_.offs[c], q = k_.dims[c];
      const Vec& w = nt.wbar[c];
      const double e2 = nt.eta[c] * nt.eta[c];
      for (int jj = 0; jj < q; ++jj) {
        for (int ii = jj; ii < q; ++ii) {
          double v = 2.0 * w[ii] * w[jj];
          if (ii == jj) v += (ii == 0 ? -1.0 : 1.0);
          v *= e2;
          if (ii == jj) v += reg;
          t.emplace_back(zo + o + ii, zo + o + jj, -v);
        }
      }
    }
    K_.resize(dim, dim);
    K_.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(K_);
      analyzed_ = true;
    }
    ldlt_.factorize(K_);
    return ldlt_.info() == Eigen::Success;
  }

  // Solves the unregularized system with iterative refinement. Refinement
  // stops once the residual is at round-off level or stops shrinking.
  Vec solve(const Vec& rhs) const {
    Vec sol = ldlt_.solve(rhs);
    const double floor = 1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    Vec res = rhs - apply(sol);
    double norm = res.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < refine_ && norm > floor; ++it) {
      const Vec cand = sol + ldlt_.solve(res);
      const Vec cres = rhs - apply(cand);
      const double cnorm = cres.lpNorm<Eigen::Infinity>();
      if (!(cnorm < norm)) break;
      const bool slow = cnorm > norm / 5.0;
      sol = cand;
      res = cres;
      norm = cnorm;
      if (slow) break;
    }
    return sol;
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int m() const { return m_; }

 private:
  std::size_t w2_nnz() const {
    std::size_t s = 0;
    for (int q : k_.dims) s += static_cast<std::size_t>(q * (q + 1) / 2);
    return s;
  }

  Vec apply(const Vec& v) const {
    const Vec x = v.head(n_), y = v.segment(n_, p_), z = v.tail(m_);
    Vec out(v.size());
    out.head(n_) = At_ * y + Gt_ * z;
    out.segment(n_, p_) = A_ * x;
    out.tail(m_) = G_ * x - nt_->apply_w2(k_, z);
    return out;
  }

  const SpMat& A_;
  const SpMat& G_;
  SpMat At_, Gt_;
  const Cones& k_;
  double reg_;
  int refine_;
  int n_ = 0, p_ = 0, m_ = 0;
  SpMat K_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
  const NtScaling* nt_ = nullptr;
};

// Ruiz equilibration of [A; G] with one shared factor per SOC block.
struct Equilibration {
  Vec D, E, F;  // rows of A, rows of G, columns

  void run(SpMat& A, SpMat& G, const Cones& k, int passes) {
    const int n = static_cast<int>(std::max(A.cols(), G.cols()));
    D = Vec::Ones(A.rows());
    E = Vec::Ones(G.rows());
    F = Vec::Ones(n);
    for (int pass = 0; pass < passes; ++pass) {
      Vec col = Vec::Zero(n), ra = Vec::Zero(A.rows()), rg = Vec::Zero(G.rows());
      for (int j = 0; j < A.outerSize(); ++j) {
        for (SpMat::InnerIterator it(A, j); it; ++it) {
          const double a = std::abs(it.value());
          col[j] = std::max(col[j], a);
          ra[it.row()] = std::max(ra[it.row()], a);
        }
      }
      for (int j = 0; j < G.outerSize(); ++j) {
        for (SpMat::InnerIterator it(G, j); it; ++it) {
          const double a = std::abs(it.value());
          col[j] = std::max(col[j], a);
          rg[it.row()] = std::max(rg[it.row()], a);
        }
      }
      for (std::size_t c = 0; c < k.dims.size(); ++c) {
        const int o = k.offs[c], q = k.dims[c];
        rg.segment(o, q).setConstant(rg.segment(o, q).maxCoeff());
      }
      auto inv_sqrt = [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; };
      Vec dc(n), da(A.rows()), dg(G.rows());
      for (int j = 0; j < n; ++j) dc[j] = inv_sqrt(col[j]);
      for (Eigen::Index i = 0; i < ra.size(); ++i) da[i] = inv_sqrt(ra[i]);
      for (Eigen::Index i = 0; i < rg.size(); ++i) dg[i] = inv_sqrt(rg[i]);
      A = da.asDiagonal() * A * dc.asDiagonal();
      G = dg.asDiagonal() * G * dc.asDiagonal();
      D.array() *= da.array();
      E.array() *= dg.array();
      F.array() *= dc.array();
    }
  }
};

struct Metrics {
  double pcost = 0, dcost = 0, pres = 0, dres = 0, gap = 0, relgap = 0;
  double pinf_cert = std::numeric_limits<double>::infinity();
  double dinf_cert = std::numeric_limits<double>::infinity();
  bool pinf_candidate = false;
  bool dinf_candidate = false;
};

}  // namespace

ConeSolution InteriorPointSolver::solve(const ConeProblem& prob) const {
  const auto t_start = std::chrono::steady_clock::now();
  prob.validate();
  const SolverSettings& st = settings_;
  const Cones cones(prob.l, prob.soc_dims);
  const int n = prob.num_vars();
  const int p = static_cast<int>(prob.b.size());
  const int m = cones.m;

  SpMat A = prob.A, G = prob.G;
  if (A.cols() != n) A.resize(p, n);
  if (G.cols() != n) G.resize(m, n);
  Equilibration eq;
  eq.run(A, G, cones, st.ruiz_passes);
  const Vec c = eq.F.cwiseProduct(prob.c);
  const Vec b = eq.D.cwiseProduct(prob.b);
  const Vec h = eq.E.cwiseProduct(prob.h);

  const SpMat At = A.transpose(), Gt = G.transpose();
  const SpMat& A0 = prob.A;
  const SpMat& G0 = prob.G;
  const double nbh = std::hypot(prob.b.norm(), prob.h.norm());
  const double nc = prob.c.norm();

  ConeSolution out;
  auto finish = [&](SolveStatus status, const Vec& x, const Vec& y, const Vec& z, const Vec& s,
                    double tau, const Metrics& mt, int iters, const std::string& msg) {
    out.status = status;
    const bool cert = status == SolveStatus::primal_infeasible ||
                      status == SolveStatus::dual_infeasible;
    const double scale = cert ? 1.0 : 1.0 / tau;
    out.x = eq.F.cwiseProduct(x) * scale;
    out.y = eq.D.cwiseProduct(y) * scale;
    out.z = eq.E.cwiseProduct(z) * scale;
    out.s = s.cwiseQuotient(eq.E) * scale;
    out.primal_objective = mt.pcost + prob.objective_offset;
    out.dual_objective = mt.dcost + prob.objective_offset;
    out.pres = mt.pres;
    out.dres = mt.dres;
    out.gap = mt.gap;
    out.iterations = iters;
    out.message = msg;
    out.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
  };

  Kkt kkt(A, G, cones, st.static_reg, st.refine_steps);

  // Initial point from two least-squares style solves with W = I.
  NtScaling nt = identity_scaling(cones);
  if (!kkt.factor(nt)) {
    Metrics mt;
    return finish(SolveStatus::numerical_failure, Vec::Zero(n), Vec::Zero(p), Vec::Zero(m),
                  Vec::Zero(m), 1.0, mt, 0, "initial factorization failed");
  }
  Vec rhs(n + p + m);
  rhs << Vec::Zero(n), b, h;
  Vec sol = kkt.solve(rhs);
  Vec x = sol.head(n);
  Vec s = -sol.tail(m);
  shift_into_cone(cones, s);
  rhs << -c, Vec::Zero(p), Vec::Zero(m);
  sol = kkt.solve(rhs);
  Vec y = sol.segment(n, p);
  Vec z = sol.tail(m);
  shift_into_cone(cones, z);
  double tau = 1.0, kappa = 1.0;

  auto metrics = [&](const Vec& xs, const Vec& ys, const Vec& zs, const Vec& ss, double ta) {
    Metrics mt;
    const Vec xo = eq.F.cwiseProduct(xs);
    const Vec yo = eq.D.cwiseProduct(ys);
    const Vec zo = eq.E.cwiseProduct(zs);
    const Vec so = ss.cwiseQuotient(eq.E);
    const Vec Ax = A0 * xo;
    const Vec Gx = G0 * xo;
    const Vec dual_lin = Vec(A0.transpose() * yo) + Vec(G0.transpose() * zo);
    const double cx = prob.c.dot(xo);
    const double by_hz = prob.b.dot(yo) + prob.h.dot(zo);
    mt.pcost = cx / ta;
    mt.dcost = -by_hz / ta;
    const double xn = xo.norm() / ta, sn = so.norm() / ta, yzn = std::hypot(yo.norm(), zo.norm()) / ta;
    const double rp1 = p > 0 ? (Ax / ta - prob.b).norm() : 0.0;
    const double rp2 = m > 0 ? ((Gx + so) / ta - prob.h).norm() : 0.0;
    mt.pres = std::hypot(rp1, rp2) / std::max(1.0, nbh + xn + sn);
    mt.dres = (dual_lin / ta + prob.c).norm() / std::max(1.0, nc + xn + yzn);
    mt.gap = std::abs(mt.pcost - mt.dcost);
    mt.relgap = mt.gap / std::max(1e-300, std::min(std::abs(mt.pcost), std::abs(mt.dcost)));
    if (by_hz < 0.0) {
      mt.pinf_candidate = true;
      mt.pinf_cert = dual_lin.norm() / (-by_hz);
    }
    if (cx < 0.0) {
      mt.dinf_candidate = true;
      mt.dinf_cert = std::max(Ax.norm(), (Gx + so).norm()) / (-cx);
    }
    return mt;
  };
  auto converged = [&](const Metrics& mt, double ft, double at, double rt) {
    return mt.pres < ft && mt.dres < ft && (mt.gap < at || mt.relgap < rt);
  };

  // Best iterate meeting the reduced-accuracy tolerances, returned when the
  // iteration later stalls or loses accuracy.
  struct Snapshot {
    Vec x, y, z, s;
    double tau = 1.0;
    Metrics mt;
    int iter = -1;
    double merit = std::numeric_limits<double>::infinity();
  } best;
  auto merit = [](const Metrics& mt) {
    return std::max({mt.pres, mt.dres, std::min(mt.gap, mt.relgap)});
  };
  auto fallback = [&](SolveStatus status, const Metrics& mt, int iter, const std::string& msg) {
    if (best.iter >= 0) {
      return finish(SolveStatus::optimal_inaccurate, best.x, best.y, best.z, best.s, best.tau,
                    best.mt, best.iter, msg);
    }
    return finish(status, x, y, z, s, tau, mt, iter, msg);
  };

  Metrics mt;
  for (int iter = 0; iter <= st.max_iters; ++iter) {
    mt = metrics(x, y, z, s, tau);
    if (converged(mt, st.feastol_inacc, st.abstol_inacc, st.reltol_inacc) &&
        merit(mt) < best.merit) {
      best = {x, y, z, s, tau, mt, iter, merit(mt)};
    } else if (best.iter >= 0 && mt.pres > 1e3 * std::max(best.mt.pres, st.feastol)) {
      return fallback(SolveStatus::numerical_failure, mt, iter, "primal residual diverged");
    }
    if (st.verbose) {
      std::fprintf(stderr, "ipm %3d  pcost % .6e  dcost % .6e  gap %.2e  pres %.2e  dres %.2e  k/t %.2e\n",
                   iter, mt.pcost, mt.dcost, mt.gap, mt.pres, mt.dres, kappa / tau);
    }
    if (converged(mt, st.feastol, st.abstol, st.reltol)) {
      return finish(SolveStatus::optimal, x, y, z, s, tau, mt, iter, "");
    }
    if (mt.pinf_candidate && mt.pinf_cert < st.feastol) {
      const double scale = 1.0 / (-(b.dot(y) + h.dot(z)));
      return finish(SolveStatus::primal_infeasible, x * 0.0, y * scale, z * scale, s * 0.0, 1.0,
                    mt, iter, "primal infeasibility certificate found");
    }
    if (mt.dinf_candidate && mt.dinf_cert < st.feastol) {
      const double scale = 1.0 / (-c.dot(x));
      return finish(SolveStatus::dual_infeasible, x * scale, y * 0.0, z * 0.0, s * scale, 1.0, mt,
                    iter, "dual infeasibility certificate found");
    }
    if (iter == st.max_iters) break;

    // Residuals of the embedding.
    const Vec rx = Vec(At * y) + Vec(Gt * z) + c * tau;
    const Vec ry = -(A * x) + b * tau;
    const Vec rz = -(G * x) + h * tau - s;
    const double rt = -c.dot(x) - b.dot(y) - h.dot(z) - kappa;
    const double mu = (s.dot(z) + tau * kappa) / (cones.degree + 1);

    if (!nt.compute(cones, s, z) || !kkt.factor(nt)) {
      return fallback(SolveStatus::numerical_failure, mt, iter, "scaling or factorization failed");
    }
    const Vec& lam = nt.lambda;

    rhs << -c, b, h;
    const Vec sol1 = kkt.solve(rhs);
    const double cbh1 = c.dot(sol1.head(n)) + b.dot(sol1.segment(n, p)) + h.dot(sol1.tail(m));

    struct Dir {
      Vec dx, dy, dz, ds;
      double dtau = 0, dkappa = 0;
    };
    auto direction = [&](double d, const Vec& ds_target, double dk) {
      Vec r(n + p + m);
      const Vec lds = jordan_div(cones, lam, ds_target);
      const Vec wlds = nt.apply_w(cones, lds);
      r << -d * rx, d * ry, d * rz - wlds;
      const Vec sol0 = kkt.solve(r);
      const double cbh0 = c.dot(sol0.head(n)) + b.dot(sol0.segment(n, p)) + h.dot(sol0.tail(m));
      Dir dir;
      dir.dtau = (-d * rt + cbh0 + dk / tau) / (kappa / tau - cbh1);
      const Vec full = sol0 + dir.dtau * sol1;
      dir.dx = full.head(n);
      dir.dy = full.segment(n, p);
      dir.dz = full.tail(m);
      dir.ds = wlds - nt.apply_w2(cones, dir.dz);
      dir.dkappa = (dk - kappa * dir.dtau) / tau;
      return dir;
    };
    auto step_length = [&](const Dir& dir) {
      double a = std::min(max_step(cones, s, dir.ds), max_step(cones, z, dir.dz));
      if (dir.dtau < 0.0) a = std::min(a, -tau / dir.dtau);
      if (dir.dkappa < 0.0) a = std::min(a, -kappa / dir.dkappa);
      return a;
    };

    // Predictor.
    const Vec ds_aff = -jordan_prod(cones, lam, lam);
    const Dir aff = direction(1.0, ds_aff, -kappa * tau);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    Vec ds_cc = ds_aff - jordan_prod(cones, nt.apply_winv(cones, aff.ds), nt.apply_w(cones, aff.dz));
    add_identity(cones, ds_cc, sigma * mu);
    const double dk_cc = -kappa * tau - aff.dkappa * aff.dtau + sigma * mu;
    const Dir dir = direction(1.0 - sigma, ds_cc, dk_cc);
    const double alpha = std::min(1.0, 0.99 * step_length(dir));
    if (!(alpha > 1e-12) || !dir.dx.allFinite()) {
      return fallback(SolveStatus::numerical_failure, mt, iter, "line search stalled");
    }
    x += alpha * dir.dx;
    y += alpha * dir.dy;
    z += alpha * dir.dz;
    s += alpha * dir.ds;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }
  return fallback(SolveStatus::max_iterations, mt, st.max_iters, "iteration limit reached");
}

std::unique_ptr<ConicSolver> make_solver(const std::string& name, const SolverSettings& settings) {
  std::string key = name;
  if (key.empty()) {
    const char* env = std::getenv("SCVX_SOLVER");
    key = env != nullptr && *env != '\0' ? env : "ipm";
  }
  if (key == "ipm") {
    return std::make_unique<InteriorPointSolver>(settings);
  }
  throw std::invalid_argument("unknown conic solver '" + key + "' (available: ipm)");
}

}  // namespace scvx
