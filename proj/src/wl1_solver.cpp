#include "gsm/wl1_solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace gsm {

namespace {

constexpr int kStallCount = 3;
constexpr int kMaxRounds = 200;
constexpr int kGapEvery = 50;
constexpr int kPolishEvery = 20;
constexpr int kPolishSwaps = 5;
constexpr int kPathAfter = 60;

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void check_inputs(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0, const char* who) {
  const std::string name(who);
  if (w.size() != p.d() || x0.size() != p.d()) throw ConfigError(name + ": w and x0 must have length d");
  if (!w.allFinite() || w.minCoeff() < 0.0 || w.maxCoeff() > 1.0 + 1e-12)
    throw ConfigError(name + ": weights must lie in [0, 1]");
  if (!(lambda >= 0.0) || std::isinf(lambda)) throw ConfigError(name + ": requires finite lambda >= 0");
  if (!x0.allFinite()) throw NumericError(name + ": non-finite starting point");
}

// One linear piece of the solution path of
//   1/2 ||A x - y||^2 - <c, x> + t <v, |x|>
// restricted to `support`: x(t) = x_hi + (t_hi - t) dir for t in [t_lo, t_hi].
// ws holds v * sign on the support.
struct PathSegment {
  double t_hi = 0.0;
  double t_lo = 0.0;
  const std::vector<Index>* support = nullptr;
  Vector x_hi;
  Vector dir;
  Vector ws;
};

// Follows the path from the largest useful t down to t_end >= 0 and returns
// the solution at t_end. Coordinates with v = 0 are unpenalized throughout.
// Returns nothing when an active set becomes singular or too large.
template <class Visit>
std::optional<Vector> follow_path(const Matrix& A, const Vector& y, const Vector& c, const Vector& v, double t_end,
                                  Visit&& visit) {
  const Index m = A.cols(), n = A.rows();
  const Vector b = A.transpose() * y + c;
  std::vector<int> state(static_cast<std::size_t>(m), 0);  // 0 inactive, 1 free, 2 penalized
  Vector sign = Vector::Zero(m);
  for (Index i = 0; i < m; ++i)
    if (v[i] == 0.0) state[i] = 1;
  double t = -1.0;
  Index last_removed = -1;
  std::vector<Index> S;
  const int max_steps = static_cast<int>(4 * std::min(n, m) + 50);
  for (int step = 0; step < max_steps; ++step) {
    S.clear();
    for (Index i = 0; i < m; ++i)
      if (state[i] != 0) S.push_back(i);
    const Index s = static_cast<Index>(S.size());
    if (s > n) return std::nullopt;
    Matrix AS(n, s);
    Vector bs(s), ws(s);
    for (Index j = 0; j < s; ++j) {
      AS.col(j) = A.col(S[j]);
      bs[j] = b[S[j]];
      ws[j] = v[S[j]] * sign[S[j]];
    }
    Eigen::LLT<Matrix> llt;
    if (s > 0) {
      llt.compute(AS.transpose() * AS);
      if (llt.info() != Eigen::Success) return std::nullopt;
    }
    auto full = [&](const Vector& xs) {
      Vector x = Vector::Zero(m);
      for (Index j = 0; j < s; ++j) x[S[j]] = xs[j];
      return x;
    };
    if (t < 0.0) {
      const Vector xs = s > 0 ? Vector(llt.solve(bs)) : Vector();
      if (!xs.allFinite()) return std::nullopt;
      const Vector g = s > 0 ? Vector(b - A.transpose() * (AS * xs)) : b;
      double tmax = 0.0;
      Index arg = -1;
      for (Index i = 0; i < m; ++i)
        if (state[i] == 0 && std::abs(g[i]) > tmax * v[i]) {
          tmax = std::abs(g[i]) / v[i];
          arg = i;
        }
      const bool done = arg < 0 || tmax <= t_end;
      t = done ? t_end : tmax;
      visit(PathSegment{t, t, &S, xs, Vector::Zero(s), ws});
      if (done) return full(xs);
      state[arg] = 2;
      sign[arg] = g[arg] > 0.0 ? 1.0 : -1.0;
      continue;
    }
    const Vector xs = llt.solve(Vector(bs - t * ws));
    const Vector dir = llt.solve(ws);
    if (!xs.allFinite() || !dir.allFinite()) return std::nullopt;
    const Vector g = b - A.transpose() * (AS * xs);
    const Vector gv = A.transpose() * (AS * dir);
    double best = t - t_end;
    Index event = -1;
    double event_sign = 0.0;
    for (Index j = 0; j < m; ++j) {
      if (state[j] != 0 || j == last_removed) continue;
      const double up = v[j] - gv[j], down = v[j] + gv[j];
      if (up > 0.0) {
        const double delta = std::max(0.0, (t * v[j] - g[j]) / up);
        if (delta < best) {
          best = delta;
          event = j;
          event_sign = 1.0;
        }
      }
      if (down > 0.0) {
        const double delta = std::max(0.0, (g[j] + t * v[j]) / down);
        if (delta < best) {
          best = delta;
          event = j;
          event_sign = -1.0;
        }
      }
    }
    for (Index j = 0; j < s; ++j) {
      if (state[S[j]] != 2 || dir[j] * sign[S[j]] >= 0.0) continue;
      const double delta = std::max(0.0, -xs[j] / dir[j]);
      if (delta < best) {
        best = delta;
        event = S[j];
        event_sign = 0.0;
      }
    }
    visit(PathSegment{t, t - best, &S, xs, dir, ws});
    if (event < 0) return full(Vector(llt.solve(Vector(bs - t_end * ws))));
    t -= best;
    last_removed = -1;
    if (event_sign == 0.0) {
      state[event] = 0;
      sign[event] = 0.0;
      last_removed = event;
    } else {
      state[event] = 2;
      sign[event] = event_sign;
    }
  }
  return std::nullopt;
}

// Monotone accelerated proximal gradient on the columns W, with periodic
// attempts to solve the sign-fixed optimality conditions on the current
// support exactly.
struct RestrictedFista {
  const Matrix AW;
  const Vector& y;
  Vector thr;
  Vector c;
  double L;

  double value(const Vector& x, const Vector& Ax) const {
    return 0.5 * (Ax - y).squaredNorm() - c.dot(x) + thr.dot(x.cwiseAbs());
  }

  // Exact minimizer for a fixed signed support started from the signs of x,
  // corrected by a few active-set swaps. Accepted only when it satisfies the
  // KKT conditions on W and does not raise F.
  bool polish(Vector& x, Vector& Ax, double& F, double tol) const {
    const Index m = x.size();
    Vector sign = Vector::Zero(m);
    const Index cap = AW.rows() - 1;
    const auto keep = top_k_support(x, std::min<Index>(count_nonzeros(x), std::max<Index>(cap, 1)));
    for (Index i : keep)
      if (x[i] != 0.0) sign[i] = x[i] > 0.0 ? 1.0 : -1.0;
    for (int sweep = 0; sweep < kPolishSwaps; ++sweep) {
      std::vector<Index> S;
      for (Index i = 0; i < m; ++i)
        if (sign[i] != 0.0) S.push_back(i);
      const Index s = static_cast<Index>(S.size());
      if (s == 0 || s > AW.rows()) return false;
      Matrix AS(AW.rows(), s);
      Vector rhs(s);
      for (Index j = 0; j < s; ++j) {
        AS.col(j) = AW.col(S[j]);
        rhs[j] = c[S[j]] - thr[S[j]] * sign[S[j]];
      }
      rhs.noalias() += AS.transpose() * y;
      Eigen::LLT<Matrix> llt(AS.transpose() * AS);
      if (llt.info() != Eigen::Success) return false;
      const Vector z = llt.solve(rhs);
      if (!z.allFinite()) return false;
      Vector xn = Vector::Zero(m);
      bool changed = false;
      for (Index j = 0; j < s; ++j) {
        if (z[j] * sign[S[j]] <= 0.0) {
          sign[S[j]] = 0.0;
          changed = true;
        } else {
          xn[S[j]] = z[j];
        }
      }
      if (changed) continue;
      const Vector Axn = AS * z;
      const Vector g = AW.transpose() * (Axn - y) - c;
      for (Index i = 0; i < m; ++i) {
        if (xn[i] != 0.0) {
          if (std::abs(g[i] + thr[i] * sign[i]) > tol) return false;
        } else if (std::abs(g[i]) - thr[i] > tol) {
          sign[i] = g[i] > 0.0 ? -1.0 : 1.0;
          changed = true;
        }
      }
      if (changed) continue;
      const double Fn = value(xn, Axn);
      if (Fn > F) return false;
      x = xn;
      Ax = Axn;
      F = Fn;
      return true;
    }
    return false;
  }

  // Exact solve by following the solution path down to lambda. Accepted only
  // when it satisfies the KKT conditions on W and does not raise F.
  bool path_solve(Vector& x, Vector& Ax, double& F, double tol) const {
    const auto sol = follow_path(AW, y, c, thr, 1.0, [](const PathSegment&) {});
    if (!sol || !sol->allFinite()) return false;
    const Vector& xn = *sol;
    const Vector Axn = AW * xn;
    const Vector g = AW.transpose() * (Axn - y) - c;
    for (Index i = 0; i < xn.size(); ++i) {
      const double viol = xn[i] == 0.0 ? std::abs(g[i]) - thr[i]
                                       : std::abs(g[i] + thr[i] * (xn[i] > 0.0 ? 1.0 : -1.0));
      if (viol > tol) return false;
    }
    const double Fn = value(xn, Axn);
    if (Fn > F) return false;
    x = xn;
    Ax = Axn;
    F = Fn;
    return true;
  }

  // Returns the iterations used; x is updated in place.
  int run(Vector& x, const InnerSolverConfig& cfg, bool& converged) const {
    const Index m = x.size();
    Vector Ax = AW * x;
    double F = value(x, Ax);
    Vector v = x, Av = Ax, xn(m), g(m);
    double t = 1.0;
    int stall = 0, since_restart = 0;
    converged = false;
    int it = 0;
    while (it < cfg.max_iters) {
      ++it;
      g.noalias() = AW.transpose() * (Av - y);
      g -= c;
      for (Index i = 0; i < m; ++i) xn[i] = soft(v[i] - g[i] / L, thr[i] / L);
      const double step = L * (xn - v).lpNorm<Eigen::Infinity>();
      const Vector Axn = AW * xn;
      const double Fn = value(xn, Axn);
      if (!std::isfinite(Fn)) throw NumericError("solve_wl1_power2: non-finite iterate");
      if (Fn > F) {
        if (t > 1.0) {
          v = x;
          Av = Ax;
          t = 1.0;
          since_restart = 0;
          continue;
        }
        converged = true;
        break;
      }
      const bool grad_restart = (v - xn).dot(xn - x) > 0.0;
      const double rel = (F - Fn) / std::max(std::abs(Fn), 1e-300);
      stall = rel < cfg.rel_obj_tol ? stall + 1 : 0;
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / tn;
      v = xn + beta * (xn - x);
      Av = Axn + beta * (Axn - Ax);
      x = xn;
      Ax = Axn;
      F = Fn;
      t = tn;
      ++since_restart;
      if (grad_restart || (cfg.restart_every > 0 && since_restart >= cfg.restart_every)) {
        v = x;
        Av = Ax;
        t = 1.0;
        since_restart = 0;
      }
      if (step <= cfg.abs_grad_tol) {
        converged = true;
        break;
      }
      if ((it % kPolishEvery == 0 || stall >= kStallCount) && polish(x, Ax, F, cfg.abs_grad_tol)) {
        converged = true;
        break;
      }
      if (it == kPathAfter && path_solve(x, Ax, F, cfg.abs_grad_tol)) {
        converged = true;
        break;
      }
      if (stall >= kStallCount) {
        converged = true;
        break;
      }
    }
    return it;
  }
};

// Feasible dual points for the power-1 problem.
class DualBound {
 public:
  DualBound(const ProblemInstance& p, const Vector& w, double lambda) : p_(p), w_(w), lambda_(lambda) {
    const double wmax = w.maxCoeff();
    for (Index i = 0; i < p.d(); ++i)
      if (w[i] <= 1e-6 * wmax) zero_.push_back(i);
    free_.assign(static_cast<std::size_t>(p.d()), false);
    for (Index i : zero_) free_[i] = true;
    if (!zero_.empty()) {
      Matrix AZ(p.n(), static_cast<Index>(zero_.size()));
      for (std::size_t j = 0; j < zero_.size(); ++j) AZ.col(static_cast<Index>(j)) = p.A().col(zero_[j]);
      Eigen::ColPivHouseholderQR<Matrix> qr(AZ);
      qr.setThreshold(1e-12);
      const Index r = qr.rank();
      Q_ = Matrix(qr.householderQ()).leftCols(r);
    }
  }

  double operator()(const Vector& u) const {
    Vector v = u;
    if (Q_.cols() > 0) v -= Q_ * (Q_.transpose() * u);
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    double s = nv > 1.0 ? 1.0 / nv : 1.0;
    const Vector c = p_.A().transpose() * v;
    for (Index i = 0; i < p_.d(); ++i) {
      if (free_[i]) continue;
      const double a = std::abs(c[i]) * s, cap = lambda_ * w_[i];
      if (a > cap) s *= cap / a;
    }
    return -s * v.dot(p_.y());
  }

 private:
  const ProblemInstance& p_;
  const Vector& w_;
  double lambda_;
  std::vector<Index> zero_;
  std::vector<bool> free_;
  Matrix Q_;
};

struct Power1Candidate {
  Vector x;
  Vector u;
  double primal = kInf;
  double dual = -kInf;
};

// The power-1 minimizer lies on the weighted lasso path with threshold scale
// mu = lambda ||A x - y||; minimizes the power-1 objective along each piece.
std::optional<Power1Candidate> power1_on_path(const ProblemInstance& p, const Vector& w, double lambda,
                                              const DualBound& bound) {
  const Matrix& A = p.A();
  const Vector& y = p.y();
  double best_p = kInf, best_mu = 0.0, best_delta = 0.0;
  Vector best_xs, best_dir, best_r, fallback_u;
  std::vector<Index> best_S;
  auto visit = [&](const PathSegment& seg) {
    const auto& S = *seg.support;
    const Index s = static_cast<Index>(S.size());
    Matrix AS(p.n(), s);
    for (Index j = 0; j < s; ++j) AS.col(j) = A.col(S[j]);
    const Vector r = s > 0 ? Vector(AS * seg.x_hi - y) : Vector(-y);
    const Vector q = s > 0 ? Vector(AS * seg.dir) : Vector::Zero(p.n());
    const double p0 = s > 0 ? seg.ws.dot(seg.x_hi) : 0.0, p1 = s > 0 ? seg.ws.dot(seg.dir) : 0.0;
    const double len = seg.t_hi - seg.t_lo;
    const double a = q.squaredNorm(), b = r.dot(q), c = r.squaredNorm(), m2 = lambda * lambda * p1 * p1;
    std::vector<double> cand{0.0, len};
    const double qa = a * (a - m2), qb = 2.0 * b * (a - m2), qc = b * b - m2 * c;
    if (std::abs(qa) > 1e-300) {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q0 = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        cand.push_back(q0 / qa);
        if (q0 != 0.0) cand.push_back(qc / q0);
      }
    } else if (qb != 0.0) {
      cand.push_back(-qc / qb);
    }
    for (double delta : cand) {
      delta = std::clamp(delta, 0.0, len);
      const double P = (r + delta * q).norm() + lambda * (p0 + delta * p1);
      if (P < best_p) {
        best_p = P;
        best_mu = seg.t_hi - delta;
        best_delta = delta;
        best_S = S;
        best_xs = seg.x_hi;
        best_dir = seg.dir;
        best_r = r + delta * q;
        if (seg.t_hi > 0.0) fallback_u = lambda * r / seg.t_hi;
      }
    }
  };
  // Negligible weights are followed as unpenalized, as in the dual bound.
  Vector v = w;
  const double wmax = w.maxCoeff();
  for (Index i = 0; i < p.d(); ++i)
    if (w[i] <= 1e-6 * wmax) v[i] = 0.0;
  follow_path(A, y, Vector::Zero(p.d()), v, 0.0, visit);
  if (!std::isfinite(best_p)) return std::nullopt;
  Power1Candidate out;
  out.x = Vector::Zero(p.d());
  for (std::size_t j = 0; j < best_S.size(); ++j) {
    const Index jj = static_cast<Index>(j);
    out.x[best_S[j]] = best_xs[jj] + best_delta * best_dir[jj];
  }
  if (!out.x.allFinite()) return std::nullopt;
  const Vector r = A * out.x - y;
  out.primal = r.norm() + lambda * w.dot(out.x.cwiseAbs());
  std::vector<Vector> duals;
  if (best_mu > 0.0) duals.push_back(lambda * best_r / best_mu);
  if (fallback_u.size() == p.n()) duals.push_back(fallback_u);
  if (r.norm() > 0.0) duals.push_back(r / r.norm());
  for (const Vector& u : duals) {
    if (!u.allFinite()) continue;
    const double D = bound(u);
    if (D > out.dual) {
      out.dual = D;
      out.u = u;
    }
  }
  if (out.u.size() != p.n()) out.u = Vector::Zero(p.n());
  return out;
}

}  // namespace

void InnerSolverConfig::validate() const {
  if (max_iters < 1) throw ConfigError("InnerSolverConfig: max_iters must be >= 1");
  if (!(rel_obj_tol > 0.0) || !(abs_grad_tol > 0.0)) throw ConfigError("InnerSolverConfig: tolerances must be > 0");
  if (restart_every < 0) throw ConfigError("InnerSolverConfig: restart_every must be >= 0");
}

Wl1Result solve_wl1_power2(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0,
                           const InnerSolverConfig& cfg, const Vector* linear) {
  cfg.validate();
  check_inputs(p, w, lambda, x0, "solve_wl1_power2");
  if (linear && linear->size() != p.d()) throw ConfigError("solve_wl1_power2: linear term must have length d");
  const Index d = p.d();
  const Vector thr = lambda * w;
  const Vector c = linear ? *linear : Vector::Zero(d);
  const double L = p.spec_norm_sq();

  Wl1Result res;
  Vector x = x0;
  std::vector<bool> in_ws(static_cast<std::size_t>(d), false);
  std::vector<Index> ws;
  for (Index i = 0; i < d; ++i)
    if (x[i] != 0.0) {
      in_ws[i] = true;
      ws.push_back(i);
    }

  bool inner_ok = true;
  for (int round = 0; round < kMaxRounds; ++round) {
    const Vector g = p.A().transpose() * (p.A() * x - p.y()) - c;
    double worst = 0.0;
    std::vector<Index> add;
    for (Index i = 0; i < d; ++i) {
      const double viol = in_ws[i] ? 0.0 : std::abs(g[i]) - thr[i];
      if (viol > cfg.abs_grad_tol) add.push_back(i);
      worst = std::max(worst, viol);
    }
    res.gap = std::max(worst, 0.0);
    if (add.empty() && (round > 0 || ws.empty())) {
      res.converged = inner_ok;
      break;
    }
    for (Index i : add) in_ws[i] = true;
    ws.clear();
    for (Index i = 0; i < d; ++i)
      if (in_ws[i]) ws.push_back(i);
    const Index m = static_cast<Index>(ws.size());
    Matrix AW(p.n(), m);
    Vector xW(m), thrW(m), cW(m);
    for (Index j = 0; j < m; ++j) {
      AW.col(j) = p.A().col(ws[j]);
      xW[j] = x[ws[j]];
      thrW[j] = thr[ws[j]];
      cW[j] = c[ws[j]];
    }
    RestrictedFista solver{std::move(AW), p.y(), std::move(thrW), std::move(cW), L};
    bool ok = false;
    res.iterations += solver.run(xW, cfg, ok);
    inner_ok = ok;
    for (Index j = 0; j < m; ++j) x[ws[j]] = xW[j];
    if (!x.allFinite()) throw NumericError("solve_wl1_power2: non-finite iterate");
  }
  res.x = std::move(x);
  res.objective = 0.5 * (p.A() * res.x - p.y()).squaredNorm() - c.dot(res.x) + thr.dot(res.x.cwiseAbs());
  return res;
}

double power1_dual_bound(const ProblemInstance& p, const Vector& w, double lambda, const Vector& u) {
  if (w.size() != p.d() || u.size() != p.n()) throw ConfigError("power1_dual_bound: size mismatch");
  return DualBound(p, w, lambda)(u);
}

Wl1Result solve_wl1_power1(const ProblemInstance& p, const Vector& w, double lambda, const Vector& x0,
                           const InnerSolverConfig& cfg, const Vector* u0) {
  cfg.validate();
  check_inputs(p, w, lambda, x0, "solve_wl1_power1");
  if (!(lambda > 0.0)) throw ConfigError("solve_wl1_power1: requires lambda > 0");
  if (u0 && u0->size() != p.n()) throw ConfigError("solve_wl1_power1: dual start must have length n");
  const Matrix& A = p.A();
  const Vector& y = p.y();
  const Index d = p.d();
  const Vector thr = lambda * w;
  auto primal = [&](const Vector& x, const Vector& Ax) { return (Ax - y).norm() + thr.dot(x.cwiseAbs()); };

  Vector x = x0, Ax = A * x;
  Vector u;
  if (u0) {
    u = *u0;
  } else {
    const Vector r = Ax - y;
    const double nr = r.norm();
    u = nr > 0.0 ? Vector(r / nr) : Vector::Zero(p.n());
  }
  const double unorm = u.norm();
  if (unorm > 1.0) u /= unorm;

  const double scale = std::max(x.norm(), y.norm() / p.max_col_norm());
  const double root_l = std::sqrt(p.spec_norm_sq());
  double tau = (scale > 0.0 ? scale : 1.0) / root_l;
  double sigma = 1.0 / (tau * p.spec_norm_sq());
  double alpha = 0.5;
  constexpr double kEta = 0.95, kDelta = 1.5;

  const DualBound bound(p, w, lambda);
  Wl1Result res;
  Vector best_x = x, best_u = u;
  double best_p = primal(x, Ax), best_d = bound(u);
  if (const auto exact = power1_on_path(p, w, lambda, bound)) {
    if (exact->primal < best_p) {
      best_p = exact->primal;
      best_x = exact->x;
      x = exact->x;
      Ax = A * x;
    }
    if (exact->dual > best_d) {
      best_d = exact->dual;
      best_u = exact->u;
      u = exact->u;
      if (u.norm() > 1.0) u.normalize();
    }
    if (best_p - best_d <= cfg.rel_obj_tol * std::max(best_p, 1e-300)) {
      res.x = std::move(best_x);
      res.dual = std::move(best_u);
      res.objective = best_p;
      res.gap = std::max(best_p - best_d, 0.0);
      res.converged = true;
      return res;
    }
  }
  Vector ATu = A.transpose() * u, xn(d), un;
  int it = 0;
  while (it < cfg.max_iters) {
    ++it;
    for (Index i = 0; i < d; ++i) xn[i] = soft(x[i] - tau * ATu[i], tau * thr[i]);
    const Vector Axn = A * xn;
    un = u + sigma * (2.0 * Axn - Ax - y);
    const double nu = un.norm();
    if (nu > 1.0) un /= nu;
    const Vector ATun = A.transpose() * un;
    const double pr = ((x - xn) / tau - (ATu - ATun)).norm();
    const double dr = ((u - un) / sigma - (Ax - Axn)).norm();
    x = xn;
    Ax = Axn;
    u = un;
    ATu = ATun;
    if (!x.allFinite() || !u.allFinite()) throw NumericError("solve_wl1_power1: non-finite iterate");
    if (pr > kDelta * dr) {
      tau /= 1.0 - alpha;
      sigma *= 1.0 - alpha;
      alpha *= kEta;
    } else if (pr * kDelta < dr) {
      tau *= 1.0 - alpha;
      sigma /= 1.0 - alpha;
      alpha *= kEta;
    }
    if (it % kGapEvery == 0 || it == cfg.max_iters) {
      const double P = primal(x, Ax);
      if (P < best_p) {
        best_p = P;
        best_x = x;
      }
      const double D = bound(u);
      if (D > best_d) {
        best_d = D;
        best_u = u;
      }
      if (best_p - best_d <= cfg.rel_obj_tol * std::max(best_p, 1e-300)) {
        res.converged = true;
        break;
      }
    }
  }
  res.x = std::move(best_x);
  res.dual = std::move(best_u);
  res.iterations = it;
  res.objective = best_p;
  res.gap = std::max(best_p - best_d, 0.0);
  if (best_p == 0.0) res.converged = true;
  return res;
}

Vector least_squares_on_support(const ProblemInstance& p, const std::vector<Index>& support) {
  Vector x = Vector::Zero(p.d());
  if (support.empty()) return x;
  Matrix AS(p.n(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] < 0 || support[j] >= p.d()) throw ConfigError("least_squares_on_support: index out of range");
    AS.col(static_cast<Index>(j)) = p.A().col(support[j]);
  }
  const Vector u = Eigen::CompleteOrthogonalDecomposition<Matrix>(AS).solve(p.y());
  for (std::size_t j = 0; j < support.size(); ++j) x[support[j]] = u[static_cast<Index>(j)];
  return x;
}

}  // namespace gsm
