#include "oscimark/svr.hpp"

#include <cmath>
#include <limits>

#include "oscimark/errors.hpp"

namespace oscimark {

namespace {

constexpr double kSupportTol = 1e-10;

struct PairPick {
  int i = -1, j = -1;
  double violation = 0.0;
};

// Most-violating feasible pair: i can move up (+), j can move down (-).
PairPick select_pair(const Eigen::VectorXd& beta, const Eigen::VectorXd& g, double C,
                     double eps, int skip) {
  const int n = static_cast<int>(beta.size());
  int i1 = -1, i2 = -1, j1 = -1, j2 = -1;
  double di1 = std::numeric_limits<double>::infinity(), di2 = di1;
  double dj1 = di1, dj2 = di1;
  for (int k = 0; k < n; ++k) {
    if (k == skip) continue;
    if (beta[k] < C) {
      double d = g[k] + (beta[k] >= 0.0 ? eps : -eps);
      if (d < di1) {
        di2 = di1; i2 = i1;
        di1 = d; i1 = k;
      } else if (d < di2) {
        di2 = d; i2 = k;
      }
    }
    if (beta[k] > -C) {
      double d = -g[k] + (beta[k] <= 0.0 ? eps : -eps);
      if (d < dj1) {
        dj2 = dj1; j2 = j1;
        dj1 = d; j1 = k;
      } else if (d < dj2) {
        dj2 = d; j2 = k;
      }
    }
  }
  PairPick pick;
  if (i1 < 0 || j1 < 0) return pick;
  if (i1 != j1) {
    pick.i = i1; pick.j = j1;
    pick.violation = -(di1 + dj1);
  } else {
    double va = (j2 >= 0) ? -(di1 + dj2) : -std::numeric_limits<double>::infinity();
    double vb = (i2 >= 0) ? -(di2 + dj1) : -std::numeric_limits<double>::infinity();
    if (va >= vb && j2 >= 0) {
      pick.i = i1; pick.j = j2; pick.violation = va;
    } else if (i2 >= 0) {
      pick.i = i2; pick.j = j1; pick.violation = vb;
    }
  }
  return pick;
}

// Exact minimizer of the 1-D restriction
//   phi(t) = 0.5 q t^2 + d t + eps(|bi + t| - |bi|) + eps(|bj - t| - |bj|)
// over t in [lo, hi].
double line_search(double q, double d, double bi, double bj, double eps, double lo,
                   double hi) {
  auto phi = [&](double t) {
    return 0.5 * q * t * t + d * t + eps * (std::abs(bi + t) - std::abs(bi)) +
           eps * (std::abs(bj - t) - std::abs(bj));
  };
  double candidates[8];
  int nc = 0;
  candidates[nc++] = lo;
  candidates[nc++] = hi;
  double b1 = -bi, b2 = bj;  // kink locations
  if (b1 > lo && b1 < hi) candidates[nc++] = b1;
  if (b2 > lo && b2 < hi) candidates[nc++] = b2;
  if (q > 0) {
    // stationary point of each smooth piece: t = -(d + eps*(si - sj))/q
    for (double si : {-1.0, 1.0}) {
      for (double sj : {-1.0, 1.0}) {
        double t = -(d + eps * (si - sj)) / q;
        if (t > lo && t < hi && si * (bi + t) >= 0 && sj * (bj - t) >= 0)
          candidates[nc++] = t;
      }
    }
  }
  double best_t = lo;
  double best_v = phi(lo);
  for (int k = 1; k < nc; ++k) {
    double v = phi(candidates[k]);
    if (v < best_v) {
      best_v = v;
      best_t = candidates[k];
    }
  }
  return best_t;
}

// Exact KKT solve on the current support partition: free dual variables and
// the intercept satisfy an equality system; partial steps keep the iterate
// inside the box, and boundary/interior points are reclassified one at a
// time. Returns true when the iterate reaches pairwise KKT tolerance.
bool active_set_polish(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
                       double eps, int skip, double tol, Eigen::VectorXd& beta) {
  const int n = static_cast<int>(y.size());
  const double bound_tol = C * 1e-9;
  enum { kZero, kFree, kBound };
  std::vector<int> state(n, kZero);
  std::vector<double> sgn(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i == skip) continue;
    double b = beta[i];
    if (std::abs(b) >= C - bound_tol) {
      state[i] = kBound;
      sgn[i] = b > 0 ? 1.0 : -1.0;
      beta[i] = sgn[i] * C;
    } else if (b != 0.0) {
      state[i] = kFree;
      sgn[i] = b > 0 ? 1.0 : -1.0;
    }
  }
  const int round_cap = 10 * n + 50;
  for (int round = 0; round < round_cap; ++round) {
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i)
      if (state[i] == kFree) free_idx.push_back(i);
    const int f = static_cast<int>(free_idx.size());
    if (f == 0) {
      // no free variables: the intercept is interval-valued. A nonempty
      // interval certifies optimality; otherwise the minimax intercept
      // exposes the worst violator, which joins the free set.
      Eigen::VectorXd fval = K * beta;
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (i == skip) continue;
        double d = y[i] - fval[i];
        if (state[i] == kZero) {
          lo = std::max(lo, d - eps);
          hi = std::min(hi, d + eps);
        } else if (sgn[i] > 0) {
          hi = std::min(hi, d - eps);
        } else {
          lo = std::max(lo, d + eps);
        }
      }
      if (lo <= hi + tol * 0.5) return true;
      double b = 0.5 * (lo + hi);
      int worst = -1, worst_from = kZero;
      double worst_excess = tol * 0.5;
      for (int i = 0; i < n; ++i) {
        if (i == skip) continue;
        double r = y[i] - fval[i] - b;
        double excess = state[i] == kZero ? std::abs(r) - eps : eps - sgn[i] * r;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = i;
          worst_from = state[i];
        }
      }
      if (worst < 0) return false;
      if (worst_from == kZero) {
        double r = y[worst] - fval[worst] - b;
        sgn[worst] = r > 0 ? 1.0 : -1.0;
      }
      state[worst] = kFree;
      continue;
    }

    double sum_bound = 0.0;
    for (int i = 0; i < n; ++i)
      if (state[i] == kBound) sum_bound += beta[i];

    Eigen::MatrixXd A(f + 1, f + 1);
    Eigen::VectorXd rhs(f + 1);
    for (int t = 0; t < f; ++t) {
      int i = free_idx[t];
      for (int u = 0; u < f; ++u) A(t, u) = K(i, free_idx[u]);
      A(t, f) = 1.0;
      A(f, t) = 1.0;
      double dot_bound = 0.0;
      for (int jj = 0; jj < n; ++jj)
        if (state[jj] == kBound) dot_bound += K(i, jj) * beta[jj];
      rhs[t] = y[i] - eps * sgn[i] - dot_bound;
    }
    A(f, f) = 0.0;
    rhs[f] = -sum_bound;
    // the equations are in outcome units, so the consistency margin must be
    // absolute: scaling by |rhs| (inflated by C-sized bound terms) would let
    // genuinely inconsistent systems slip through at tube width
    const double resid_tol = std::max(0.25 * tol, 1e-12 * rhs.cwiseAbs().maxCoeff());
    Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    if (!sol.allFinite() || (A * sol - rhs).cwiseAbs().maxCoeff() > resid_tol) {
      // singular or ill-conditioned: redo with a rank-revealing
      // factorization, which also exposes the null space
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      sol = lu.solve(rhs);
      if (!sol.allFinite()) return false;
      if ((A * sol - rhs).cwiseAbs().maxCoeff() > resid_tol) {
        // Singular reduced system: the tube equations cannot hold for every
        // free variable at once (rank-deficient kernel). Objective curvature
        // vanishes along null directions, so descend linearly along one until
        // a box face blocks, and retire the blocking variable.
        Eigen::MatrixXd null_basis = lu.kernel();
        if (null_basis.cols() == 0) return false;
        Eigen::VectorXd kb = K * beta;
        Eigen::VectorXd grad(f);
        for (int t = 0; t < f; ++t) {
          int i = free_idx[t];
          grad[t] = kb[i] - y[i] + eps * sgn[i];
        }
        Eigen::MatrixXd P = null_basis.topRows(f);
        Eigen::VectorXd coef = P.transpose() * grad;
        if (coef.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, grad.cwiseAbs().maxCoeff()))
          return false;
        Eigen::VectorXd dir = -(P * coef);
        double step = std::numeric_limits<double>::infinity();
        int blocker = -1, block_dest = kZero;
        for (int t = 0; t < f; ++t) {
          int i = free_idx[t];
          double u = sgn[i] * beta[i];
          double du = sgn[i] * dir[t];
          if (du < 0.0) {
            double s = u / -du;
            if (s < step) {
              step = s;
              blocker = t;
              block_dest = kZero;
            }
          } else if (du > 0.0) {
            double s = (C - u) / du;
            if (s < step) {
              step = s;
              blocker = t;
              block_dest = kBound;
            }
          }
        }
        if (blocker < 0 || !std::isfinite(step)) return false;
        for (int t = 0; t < f; ++t) beta[free_idx[t]] += step * dir[t];
        int i = free_idx[blocker];
        if (block_dest == kZero) {
          beta[i] = 0.0;
          state[i] = kZero;
          sgn[i] = 0.0;
        } else {
          beta[i] = sgn[i] * C;
          state[i] = kBound;
        }
          continue;
      }
    }

    // partial step toward the target in the signed coordinates u = sgn*beta
    double gamma = 1.0;
    int leaving = -1, leave_dest = kZero;
    for (int t = 0; t < f; ++t) {
      int i = free_idx[t];
      double cur_u = sgn[i] * beta[i];
      double tgt_u = sgn[i] * sol[t];
      if (tgt_u < 0.0) {
        double g = cur_u / (cur_u - tgt_u);
        if (g < gamma) {
          gamma = g;
          leaving = t;
          leave_dest = kZero;
        }
      } else if (tgt_u > C) {
        double g = (C - cur_u) / (tgt_u - cur_u);
        if (g < gamma) {
          gamma = g;
          leaving = t;
          leave_dest = kBound;
        }
      }
    }
    if (leaving >= 0) {
      for (int t = 0; t < f; ++t) {
        int i = free_idx[t];
        beta[i] += gamma * (sol[t] - beta[i]);
      }
      int i = free_idx[leaving];
      if (leave_dest == kZero) {
        beta[i] = 0.0;
        state[i] = kZero;
        sgn[i] = 0.0;
      } else {
        beta[i] = sgn[i] * C;
        state[i] = kBound;
      }
      if (gamma == 0.0 && round > 2 * n) return false;  // degenerate cycling
      continue;
    }
    for (int t = 0; t < f; ++t) beta[free_idx[t]] = sol[t];
    const double b = sol[f];

    // full KKT scan; the worst violator joins the free set
    Eigen::VectorXd fval = K * beta;
    int worst = -1, worst_from = kZero;
    double worst_excess = tol * 0.5;
    for (int i = 0; i < n; ++i) {
      if (i == skip || state[i] == kFree) continue;
      double r = y[i] - fval[i] - b;
      if (state[i] == kZero) {
        double excess = std::abs(r) - eps;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = i;
          worst_from = kZero;
        }
      } else {
        double excess = eps - sgn[i] * r;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = i;
          worst_from = kBound;
        }
      }
    }
    if (worst < 0) return true;
    if (worst_from == kZero) {
      double r = y[worst] - fval[worst] - b;
      sgn[worst] = r > 0 ? 1.0 : -1.0;
    }
    state[worst] = kFree;
  }
  return false;
}

}  // namespace

SvrDualResult svr_fit_kernel(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
                             double eps, const Eigen::VectorXd* warm, int skip, double tol,
                             int max_updates) {
  const int n = static_cast<int>(y.size());
  if (K.rows() != n || K.cols() != n)
    throw Error(ErrorKind::Parameter, "kernel matrix size mismatch");
  if (!(C > 0) || !(eps >= 0))
    throw Error(ErrorKind::Parameter, "SVR requires C > 0 and eps >= 0");

  SvrDualResult res;
  res.beta = Eigen::VectorXd::Zero(n);
  if (warm && warm->size() == n) {
    res.beta = *warm;
    for (int k = 0; k < n; ++k) res.beta[k] = std::clamp(res.beta[k], -C, C);
    if (skip >= 0 && res.beta[skip] != 0.0) {
      // redistribute the frozen coefficient to keep sum(beta) = 0, touching
      // as few coordinates as possible so the support pattern survives:
      // already-free coordinates absorb it first, zero coordinates only if
      // the free set runs out of box room
      double excess = res.beta[skip];
      res.beta[skip] = 0.0;
      for (int pass = 0; pass < 2 && excess != 0.0; ++pass) {
        for (int k = 0; k < n && excess != 0.0; ++k) {
          if (k == skip) continue;
          bool is_free = res.beta[k] != 0.0 && std::abs(res.beta[k]) < C;
          if ((pass == 0) != is_free) continue;
          double room = (excess > 0) ? (C - res.beta[k]) : (-C - res.beta[k]);
          if ((excess > 0) != (room > 0) || room == 0.0) continue;
          double take = (excess > 0) ? std::min(excess, room) : std::max(excess, room);
          res.beta[k] += take;
          excess -= take;
        }
      }
    }
  }

  Eigen::VectorXd g = K * res.beta - y;
  int active = (skip >= 0) ? n - 1 : n;
  if (active < 2) {
    res.beta.setZero();
    double acc = 0.0;
    int cnt = 0;
    for (int k = 0; k < n; ++k)
      if (k != skip) {
        acc += y[k];
        ++cnt;
      }
    res.b = cnt ? acc / cnt : 0.0;
    return res;
  }

  int updates = 0;
  const int chunk = 2 * n + 10;
  bool done = false;
  while (!done) {
    // try an exact solve on the support implied by the current iterate; the
    // sweep below repairs the partition whenever the solve does not certify
    Eigen::VectorXd trial = res.beta;
    if (active_set_polish(K, y, C, eps, skip, tol, trial)) {
      Eigen::VectorXd trial_g = K * trial - y;
      PairPick check = select_pair(trial, trial_g, C, eps, skip);
      if (check.i < 0 || check.violation <= tol) {
        res.beta = trial;
        g = trial_g;
        break;
      }
    }
    int in_chunk = 0;
    while (true) {
      PairPick pick = select_pair(res.beta, g, C, eps, skip);
      if (pick.i < 0 || pick.violation <= tol) {
        done = true;
        break;
      }
      if (++updates > max_updates) {
        res.converged = false;
        done = true;
        break;
      }
      const int i = pick.i, j = pick.j;
      double q = K(i, i) + K(j, j) - 2.0 * K(i, j);
      double lo = std::max(-C - res.beta[i], res.beta[j] - C);
      double hi = std::min(C - res.beta[i], res.beta[j] + C);
      double t = line_search(q, g[i] - g[j], res.beta[i], res.beta[j], eps, lo, hi);
      if (t == 0.0) {  // box-blocked; no further progress possible
        done = true;
        break;
      }
      res.beta[i] += t;
      res.beta[j] -= t;
      g += t * (K.col(i) - K.col(j));
      if (++in_chunk >= chunk) break;
    }
  }
  res.n_updates = updates;

  // intercept from free support vectors, else mean residual
  double acc = 0.0;
  int cnt = 0;
  for (int k = 0; k < n; ++k) {
    if (k == skip) continue;
    double bk = res.beta[k];
    if (std::abs(bk) > kSupportTol && std::abs(bk) < C * (1.0 - 1e-9)) {
      acc += -g[k] - eps * (bk > 0 ? 1.0 : -1.0);
      ++cnt;
    }
  }
  if (cnt > 0) {
    res.b = acc / cnt;
  } else {
    // b = mean(y - w'x); note w'x_k = g_k + y_k
    acc = 0.0;
    cnt = 0;
    for (int k = 0; k < n; ++k)
      if (k != skip) {
        acc += -g[k];
        ++cnt;
      }
    res.b = acc / cnt;
  }
  return res;
}

double svr_kkt_violation(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta, double C, double eps, int skip) {
  Eigen::VectorXd g = K * beta - y;
  PairPick pick = select_pair(beta, g, C, eps, skip);
  return pick.i < 0 ? 0.0 : std::max(0.0, pick.violation);
}

SvrModel svr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C, double eps) {
  if (!X.allFinite() || !y.allFinite())
    throw Error(ErrorKind::Data, "non-finite input to SVR");
  if (X.rows() != y.size())
    throw Error(ErrorKind::Parameter, "SVR row count mismatch");
  Eigen::MatrixXd K = X * X.transpose();
  SvrDualResult dual = svr_fit_kernel(K, y, C, eps);
  SvrModel model;
  model.w = X.transpose() * dual.beta;
  model.b = dual.b;
  model.C = C;
  model.eps = eps;
  model.converged = dual.converged;
  model.support_count = 0;
  for (int k = 0; k < dual.beta.size(); ++k)
    if (std::abs(dual.beta[k]) > kSupportTol) ++model.support_count;
  return model;
}

Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.w.size())
    throw Error(ErrorKind::Parameter, "SVR predict dimension mismatch");
  if (X.rows() == 0) return Eigen::VectorXd();
  return (X * model.w).array() + model.b;
}

double svr_primal_objective(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, double C, double eps) {
  double obj = 0.5 * w.squaredNorm();
  Eigen::VectorXd r = y - ((X * w).array() + b).matrix();
  for (int i = 0; i < r.size(); ++i)
    obj += C * std::max(0.0, std::abs(r[i]) - eps);
  return obj;
}

}  // namespace oscimark
