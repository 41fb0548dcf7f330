#include "sdp.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cstdio>

#include <Eigen/Eigenvalues>

namespace dicert {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near_optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::SolverError: return "solver_error";
  }
  return "unknown";
}

namespace {

struct Cone {
  RealMatrix S;  // PSD slack block (may be 0x0)
  Vector lp;     // nonnegative slacks

  double inner(const Cone& o) const {
    double v = 0.0;
    if (S.size() > 0) v += (S.cwiseProduct(o.S)).sum();
    if (lp.size() > 0) v += lp.dot(o.lp);
    return v;
  }
  Cone& axpy(double a, const Cone& o) {
    if (S.size() > 0) S += a * o.S;
    if (lp.size() > 0) lp += a * o.lp;
    return *this;
  }
  double norm() const { return std::sqrt(inner(*this)); }
};

struct EigPair {
  Vector vals;
  RealMatrix vecs;
};

EigPair sym_eig(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  return {es.eigenvalues(), es.eigenvectors()};
}

RealMatrix eig_apply(const EigPair& e, double (*f)(double)) {
  return e.vecs * e.vals.unaryExpr(f).asDiagonal() * e.vecs.transpose();
}

double sqrt_clamped(double v) { return std::sqrt(std::max(v, 1e-300)); }
double inv_sqrt_clamped(double v) { return 1.0 / std::sqrt(std::max(v, 1e-300)); }

// Largest step a with X + a*D staying in the cone; +inf when unconstrained.
double max_step_psd(const EigPair& x_eig, const RealMatrix& d) {
  RealMatrix xi = eig_apply(x_eig, inv_sqrt_clamped);
  Vector ev = Eigen::SelfAdjointEigenSolver<RealMatrix>(xi * d * xi,
                                                        Eigen::EigenvaluesOnly)
                  .eigenvalues();
  double m = ev.minCoeff();
  return m >= 0.0 ? infinity() : -1.0 / m;
}

double max_step_lp(const Vector& x, const Vector& d) {
  double best = infinity();
  for (int i = 0; i < x.size(); ++i) {
    if (d(i) < 0.0) best = std::min(best, -x(i) / d(i));
  }
  return best;
}

// Cholesky factorization/solve on column-major data via LAPACK.
class Cholesky {
 public:
  bool factor(RealMatrix m) {
    m_ = std::move(m);
    int n = static_cast<int>(m_.rows());
    int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, m_.data(), n);
    return info == 0;
  }
  void solve_in_place(RealMatrix& rhs) const {
    int n = static_cast<int>(m_.rows());
    LAPACKE_dpotrs(LAPACK_COL_MAJOR, 'L', n, static_cast<int>(rhs.cols()),
                   m_.data(), n, rhs.data(), n);
  }
  Vector solve(const Vector& rhs) const {
    RealMatrix tmp = rhs;
    solve_in_place(tmp);
    return tmp.col(0);
  }

 private:
  RealMatrix m_;
};

struct Expanded {
  // Full symmetric entry list of one pencil coefficient matrix.
  std::vector<int> p, q;
  std::vector<double> c;
  // LP rows touched by this variable.
  std::vector<int> lp_row;
  std::vector<double> lp_coef;
};

}  // namespace

PresolveResult presolve_fixed_variables(const SDPInstance& instance, double tol) {
  PresolveResult out;
  const int N = instance.num_vars;
  out.free_index.assign(N, 0);
  out.fixed_value.assign(N, 0.0);
  std::vector<bool> fixed(N, false);

  struct Row {
    std::vector<std::pair<int, double>> terms;
    double rhs;
    bool alive = true;
  };
  std::vector<Row> rows;
  for (const auto& r : instance.eq_rows) rows.push_back({r.terms, r.rhs, true});

  bool changed = true;
  while (changed) {
    changed = false;
    for (Row& row : rows) {
      if (!row.alive) continue;
      std::vector<std::pair<int, double>> remaining;
      double rhs = row.rhs;
      for (auto [v, c] : row.terms) {
        if (fixed[v]) rhs -= c * out.fixed_value[v];
        else remaining.push_back({v, c});
      }
      row.terms = std::move(remaining);
      row.rhs = rhs;
      if (row.terms.empty()) {
        if (std::abs(rhs) > tol) {
          out.infeasible = true;
          out.message = "inconsistent equality constraints (residual " +
                        std::to_string(rhs) + ")";
          return out;
        }
        row.alive = false;
        changed = true;
      } else if (row.terms.size() == 1 && std::abs(row.terms[0].second) > 1e-12) {
        int v = row.terms[0].first;
        double value = rhs / row.terms[0].second;
        fixed[v] = true;
        out.fixed_value[v] = value;
        row.alive = false;
        changed = true;
      }
    }
  }

  SDPInstance& red = out.reduced;
  red.psd_dim = instance.psd_dim;
  red.maximize = instance.maximize;
  red.bounded_vars = instance.bounded_vars;
  red.objective_offset = instance.objective_offset;
  int next = 0;
  for (int v = 0; v < N; ++v) out.free_index[v] = fixed[v] ? -1 : next++;
  red.num_vars = next;
  red.pencil.assign(next, {});
  red.objective.assign(next, 0.0);

  std::map<std::pair<int, int>, double> const_entries;
  for (int v = 0; v < N; ++v) {
    if (fixed[v]) {
      for (const auto& e : instance.pencil[v]) {
        const_entries[{e.i, e.j}] += e.c * out.fixed_value[v];
      }
      red.objective_offset += instance.objective[v] * out.fixed_value[v];
    } else {
      red.pencil[out.free_index[v]] = instance.pencil[v];
      red.objective[out.free_index[v]] = instance.objective[v];
    }
  }
  for (auto& [ij, c] : const_entries) {
    if (c != 0.0) red.psd_const.push_back({ij.first, ij.second, c});
  }
  for (const auto& e : instance.psd_const) red.psd_const.push_back(e);

  for (const auto& r : instance.lp_rows) {
    SDPInstance::LinRow nr;
    nr.rhs = r.rhs;
    for (auto [v, c] : r.terms) {
      if (fixed[v]) nr.rhs -= c * out.fixed_value[v];
      else nr.terms.push_back({out.free_index[v], c});
    }
    if (nr.terms.empty()) {
      if (-nr.rhs < -tol) {
        out.infeasible = true;
        out.message = "inequality row violated by fixed variables";
        return out;
      }
      continue;
    }
    red.lp_rows.push_back(std::move(nr));
  }
  for (const Row& row : rows) {
    if (!row.alive) continue;
    SDPInstance::LinRow nr;
    nr.rhs = row.rhs;
    for (auto [v, c] : row.terms) nr.terms.push_back({out.free_index[v], c});
    red.eq_rows.push_back(std::move(nr));
  }
  return out;
}

namespace {

SolveResult solve_sdp_core(const SDPInstance& instance, const SolveOptions& opts) {
  SolveResult res;
  const int N = instance.num_vars;
  const int n = instance.psd_dim;
  const int nlp = static_cast<int>(instance.lp_rows.size());
  const int me = static_cast<int>(instance.eq_rows.size());
  const double sign = instance.maximize ? -1.0 : 1.0;
  if (N <= 0) {
    res.message = "empty problem";
    return res;
  }

  Vector c(N);
  for (int i = 0; i < N; ++i) c(i) = sign * instance.objective[i];

  // Per-variable patterns with both orientations expanded.
  std::vector<Expanded> pat(N);
  for (int k = 0; k < N; ++k) {
    for (const auto& e : instance.pencil[k]) {
      pat[k].p.push_back(e.i);
      pat[k].q.push_back(e.j);
      pat[k].c.push_back(e.c);
      if (e.i != e.j) {
        pat[k].p.push_back(e.j);
        pat[k].q.push_back(e.i);
        pat[k].c.push_back(e.c);
      }
    }
  }
  for (int l = 0; l < nlp; ++l) {
    for (auto [v, coef] : instance.lp_rows[l].terms) {
      pat[v].lp_row.push_back(l);
      pat[v].lp_coef.push_back(coef);
    }
  }

  RealMatrix A = RealMatrix::Zero(me, N);
  Vector b = Vector::Zero(me);
  for (int r = 0; r < me; ++r) {
    for (auto [v, coef] : instance.eq_rows[r].terms) A(r, v) += coef;
    b(r) = instance.eq_rows[r].rhs;
  }
  Vector h_lp(nlp);
  for (int l = 0; l < nlp; ++l) h_lp(l) = -instance.lp_rows[l].rhs;
  RealMatrix C0 = RealMatrix::Zero(n, n);
  for (const auto& e : instance.psd_const) {
    C0(e.i, e.j) += e.c;
    if (e.i != e.j) C0(e.j, e.i) += e.c;
  }

  auto pencil_eval = [&](const Vector& x) {
    Cone out;
    out.S = C0;
    out.lp = Vector::Zero(nlp);
    for (int k = 0; k < N; ++k) {
      for (const auto& e : instance.pencil[k]) {
        out.S(e.i, e.j) += x(k) * e.c;
        if (e.i != e.j) out.S(e.j, e.i) += x(k) * e.c;
      }
      for (size_t t = 0; t < pat[k].lp_row.size(); ++t) {
        out.lp(pat[k].lp_row[t]) += x(k) * pat[k].lp_coef[t];
      }
    }
    for (int l = 0; l < nlp; ++l) out.lp(l) -= instance.lp_rows[l].rhs;
    return out;  // (C0 + M(x), terms.x - rhs) = h - Gx
  };

  // adjoint of the pencil: Astar(V)_i = <C_i, V_S> + sum_l g_il V_l.
  auto astar = [&](const Cone& v) {
    Vector out = Vector::Zero(N);
    for (int k = 0; k < N; ++k) {
      double acc = 0.0;
      for (const auto& e : instance.pencil[k]) {
        acc += e.c * v.S(e.i, e.j);
        if (e.i != e.j) acc += e.c * v.S(e.j, e.i);
      }
      for (size_t t = 0; t < pat[k].lp_row.size(); ++t) {
        acc += pat[k].lp_coef[t] * v.lp(pat[k].lp_row[t]);
      }
      out(k) = acc;
    }
    return out;
  };

  // H_kj = tr(C_k U C_j U) + sum_l g_kl g_jl d_l for the NT metric
  // (U = T^{-1} on the PSD block, d = z/s on the LP block).
  auto build_h = [&](const RealMatrix& U, const Vector& lp_d) {
    RealMatrix H = RealMatrix::Zero(N, N);
    for (int k = 0; k < N; ++k) {
      const Expanded& ek = pat[k];
      for (int j = k; j < N; ++j) {
        const Expanded& ej = pat[j];
        double acc = 0.0;
        for (size_t a = 0; a < ek.p.size(); ++a) {
          const double ca = ek.c[a];
          const double* urow = U.data() + static_cast<ptrdiff_t>(ek.q[a]) * n;
          const double* ucol = U.data() + static_cast<ptrdiff_t>(ek.p[a]) * n;
          for (size_t bidx = 0; bidx < ej.p.size(); ++bidx) {
            acc += ca * ej.c[bidx] * urow[ej.p[bidx]] * ucol[ej.q[bidx]];
          }
        }
        for (size_t a = 0; a < ek.lp_row.size(); ++a) {
          for (size_t bidx = 0; bidx < ej.lp_row.size(); ++bidx) {
            if (ek.lp_row[a] == ej.lp_row[bidx]) {
              acc += ek.lp_coef[a] * ej.lp_coef[bidx] * lp_d(ek.lp_row[a]);
            }
          }
        }
        H(k, j) = acc;
        H(j, k) = acc;
      }
    }
    return H;
  };

  // Solves [H A'; A 0] [dx; dy] = [rx; ry] through the equality Schur
  // complement; A may contain redundant rows.
  struct KktFactors {
    Cholesky h;
    RealMatrix hia;                                       // H^{-1} A'
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> eq;
    bool ok = false;
  };
  auto factor_kkt = [&](RealMatrix Hr) {
    KktFactors f;
    double scale = std::max(1.0, Hr.diagonal().maxCoeff());
    double reg = 1e-13 * scale;
    for (int tries = 0; tries < 6; ++tries) {
      Hr.diagonal().array() += reg;
      if (f.h.factor(Hr)) {
        f.ok = true;
        break;
      }
      reg *= 100.0;
    }
    if (!f.ok) return f;
    if (me > 0) {
      f.hia = A.transpose();
      f.h.solve_in_place(f.hia);
      f.eq.compute(A * f.hia);
    }
    return f;
  };
  auto kkt_solve = [&](const KktFactors& f, const Vector& rx, const Vector& ry,
                       Vector& dx, Vector& dy) {
    if (me > 0) {
      dy = f.eq.solve(f.hia.transpose() * rx - ry);
      dx = f.h.solve(rx - A.transpose() * dy);
    } else {
      dy.resize(0);
      dx = f.h.solve(rx);
    }
  };

  // State.
  Vector x = Vector::Zero(N), y = Vector::Zero(me);
  Cone s, z;
  const double nu = n + nlp;  // cone degree

  auto shift_into_cone = [&](Cone& v) {
    double m = 0.0;
    if (n > 0) {
      m = std::min(m, sym_eig(v.S).vals.minCoeff());
    }
    if (nlp > 0) m = std::min(m, v.lp.minCoeff());
    if (m < 1e-6) {
      double shift = 1.0 - m;
      if (n > 0) v.S.diagonal().array() += shift;
      if (nlp > 0) v.lp.array() += shift;
    }
  };

  {
    // Initial scaling W = I.
    RealMatrix U0 = RealMatrix::Identity(n, n);
    Vector d0 = Vector::Ones(nlp);
    KktFactors f0 = factor_kkt(build_h(U0, d0));
    if (!f0.ok) {
      res.message = "initial factorization failed";
      return res;
    }
    Cone h_cone;
    h_cone.S = C0;
    h_cone.lp = h_lp;
    Vector dy;
    kkt_solve(f0, astar(h_cone), b, x, dy);
    s = pencil_eval(x);
    shift_into_cone(s);

    Vector xd, yd;
    kkt_solve(f0, -c, Vector::Zero(me), xd, yd);
    y = yd;
    // z = G xd = (-M(xd), -terms.xd): strip the constant parts that
    // pencil_eval folds in.
    z = pencil_eval(xd);
    z.S -= C0;
    for (int l = 0; l < nlp; ++l) z.lp(l) += instance.lp_rows[l].rhs;
    z.S = -z.S;
    z.lp = -z.lp;
    shift_into_cone(z);
  }

  double res0_p =
      std::max(1.0, std::sqrt(b.squaredNorm() + h_lp.squaredNorm() +
                              C0.squaredNorm()));
  double res0_d = std::max(1.0, c.norm());

  // Best iterate seen so far; terminal states report it rather than the
  // possibly degraded last point.
  struct Best {
    double score = infinity();
    double pcost = 0, dcost = 0, gap = 0, relgap = 0, pres = 0, dres = 0;
    double rx_norm1 = 0;
    Vector x;
  } best;

  auto classify = [&](const Best& it) {
    if (it.pres <= 10 * opts.tolerance && it.dres <= 10 * opts.tolerance &&
        it.relgap <= opts.tolerance) {
      return SolveStatus::Optimal;
    }
    if (it.pres <= 1e-5 && it.dres <= 1e-5 && it.relgap <= 1e-4) {
      return SolveStatus::NearOptimal;
    }
    // With |x_i| <= 1 the dual value is repaired by its own stationarity
    // residual, so a certified (if slightly weaker) bound survives a sloppy
    // dual; the primal side still has to be trustworthy.
    if (instance.bounded_vars && it.pres <= 1e-5 && it.relgap <= 2e-3 &&
        it.dres <= 1e-2) {
      return SolveStatus::NearOptimal;
    }
    return SolveStatus::SolverError;
  };
  auto repaired_dual = [&](const Best& it) {
    return instance.bounded_vars ? it.dcost - it.rx_norm1 : it.dcost;
  };
  auto report_best = [&](const std::string& msg) {
    res.status = classify(best);
    res.message = msg;
    res.primal_objective = sign * best.pcost + instance.objective_offset;
    res.dual_objective = sign * repaired_dual(best) + instance.objective_offset;
    res.x = best.x.size() ? best.x : x;
    res.gap = best.gap;
    res.rel_gap = best.relgap;
    res.primal_residual = best.pres;
    res.dual_residual = best.dres;
  };
  auto report = [&](SolveStatus st, const std::string& msg, double pcost,
                    double dcost) {
    res.status = st;
    res.message = msg;
    res.primal_objective = sign * pcost + instance.objective_offset;
    res.dual_objective = sign * dcost + instance.objective_offset;
    res.x = x;
  };

  double prev_gap = infinity();
  int stalls = 0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter;

    // Residuals.
    Cone sz = pencil_eval(x);  // h - Gx
    Cone rz = s;
    rz.axpy(-1.0, sz);  // rz = s - (h - Gx) = Gx + s - h
    Vector ry = A * x - b;
    Vector rx = c - astar(z);
    if (me > 0) rx += A.transpose() * y;

    double gap = s.inner(z);
    double pcost = c.dot(x);
    double dcost = -b.dot(y) - (C0.cwiseProduct(z.S)).sum();
    for (int l = 0; l < nlp; ++l) dcost -= h_lp(l) * z.lp(l);

    double pres = std::sqrt(ry.squaredNorm() + rz.inner(rz)) / res0_p;
    double dres = rx.norm() / res0_d;
    double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});
    res.gap = gap;
    res.rel_gap = relgap;
    res.primal_residual = pres;
    res.dual_residual = dres;

    if (opts.verbosity > 0) {
      std::printf("it %3d  pcost % .9e  dcost % .9e  gap %.2e  pres %.2e  dres %.2e\n",
                  iter, pcost, dcost, gap, pres, dres);
    }

    // The effective dual score uses the repaired bound: a small stationarity
    // residual is as good as a feasible dual certificate.
    double dres_eff = instance.bounded_vars
                          ? std::min(dres, rx.lpNorm<1>() /
                                               std::max({1.0, std::abs(pcost),
                                                         std::abs(dcost)}))
                          : dres;
    double score = std::max({pres, dres_eff, relgap});
    if (score < best.score) {
      best = {score, pcost, dcost, gap, relgap, pres, dres, rx.lpNorm<1>(), x};
    }

    if (pres <= opts.tolerance && dres <= opts.tolerance &&
        relgap <= opts.tolerance) {
      best = {0.0, pcost, dcost, gap, relgap, pres, dres, rx.lpNorm<1>(), x};
      report(SolveStatus::Optimal, "converged", pcost, dcost);
      res.dual_objective = sign * repaired_dual(best) + instance.objective_offset;
      return res;
    }

    // Primal infeasibility certificate: z >= 0, A'y + G'z = 0 and
    // h'z + b'y < 0.
    {
      double t = -(b.dot(y)) - (C0.cwiseProduct(z.S)).sum();
      for (int l = 0; l < nlp; ++l) t -= h_lp(l) * z.lp(l);
      // t = -(h'z + b'y) = dcost
      if (t > 0.0) {
        Vector cert = astar(z);
        if (me > 0) cert -= A.transpose() * y;
        if (cert.norm() / t <= 1e-9 * res0_d) {
          report(SolveStatus::Infeasible, "primal infeasibility certificate found",
                 pcost, dcost);
          return res;
        }
      }
    }

    // Nesterov-Todd scaling per block.
    RealMatrix R, Rinv, U;
    EigPair lam_eig;
    RealMatrix lam;
    EigPair s_eig, z_eig;
    if (n > 0) {
      s_eig = sym_eig(s.S);
      if (s_eig.vals.minCoeff() <= 0.0) {
        report_best("primal slack left the cone");
        return res;
      }
      RealMatrix s_half = eig_apply(s_eig, sqrt_clamped);
      RealMatrix mid = s_half * z.S * s_half;
      EigPair mid_eig = sym_eig(mid);
      if (mid_eig.vals.minCoeff() <= 0.0) {
        report_best("dual slack left the cone");
        return res;
      }
      RealMatrix T = s_half * eig_apply(mid_eig, inv_sqrt_clamped) * s_half;
      EigPair t_eig = sym_eig(T);
      R = eig_apply(t_eig, sqrt_clamped);
      Rinv = eig_apply(t_eig, inv_sqrt_clamped);
      U = Rinv * Rinv;  // T^{-1}
      lam = R * z.S * R;
      lam = 0.5 * (lam + lam.transpose());
      lam_eig = sym_eig(lam);
    } else {
      U = RealMatrix::Zero(0, 0);
    }
    Vector w_lp(nlp), lam_lp(nlp);
    for (int l = 0; l < nlp; ++l) {
      if (s.lp(l) <= 0.0 || z.lp(l) <= 0.0) {
        report_best("LP slack left the cone");
        return res;
      }
      w_lp(l) = std::sqrt(s.lp(l) / z.lp(l));
      lam_lp(l) = std::sqrt(s.lp(l) * z.lp(l));
    }
    Vector lp_metric(nlp);
    for (int l = 0; l < nlp; ++l) lp_metric(l) = 1.0 / (w_lp(l) * w_lp(l));

    KktFactors fact = factor_kkt(build_h(U, lp_metric));
    if (!fact.ok) {
      report_best("Schur factorization failed");
      return res;
    }

    double mu = gap / nu;

    // lam o u = d solve.
    auto oinv = [&](const Cone& d) {
      Cone u;
      if (n > 0) {
        RealMatrix dt = lam_eig.vecs.transpose() * d.S * lam_eig.vecs;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            dt(i, j) *= 2.0 / (lam_eig.vals(i) + lam_eig.vals(j));
          }
        }
        u.S = lam_eig.vecs * dt * lam_eig.vecs.transpose();
      } else {
        u.S = RealMatrix::Zero(0, 0);
      }
      u.lp = Vector::Zero(nlp);
      for (int l = 0; l < nlp; ++l) u.lp(l) = d.lp(l) / lam_lp(l);
      return u;
    };

    // Newton solve for rhs (bx, by, bz) and scaled complementarity target d.
    auto newton = [&](const Vector& bx, const Vector& by, const Cone& bz,
                      const Cone& d, Vector& dx, Vector& dy, Cone& ds, Cone& dz) {
      Cone oid = oinv(d);
      Cone woid;  // W^{-T}(lam oinv d): R^{-1} V R^{-1}, lp: /w
      woid.S = n > 0 ? RealMatrix(Rinv * oid.S * Rinv) : RealMatrix::Zero(0, 0);
      woid.lp = Vector::Zero(nlp);
      for (int l = 0; l < nlp; ++l) woid.lp(l) = oid.lp(l) / w_lp(l);
      Cone wbz;  // (W'W)^{-1} bz: U V U, lp: z/s scaling
      wbz.S = n > 0 ? RealMatrix(U * bz.S * U) : RealMatrix::Zero(0, 0);
      wbz.lp = Vector::Zero(nlp);
      for (int l = 0; l < nlp; ++l) wbz.lp(l) = bz.lp(l) * lp_metric(l);

      Vector rhs = bx + astar(woid) - astar(wbz);
      kkt_solve(fact, rhs, by, dx, dy);

      // ds = bz - G dx  (pencil part of G carries a minus sign)
      ds.S = n > 0 ? RealMatrix::Zero(n, n) : RealMatrix::Zero(0, 0);
      ds.lp = Vector::Zero(nlp);
      for (int k = 0; k < N; ++k) {
        for (const auto& e : instance.pencil[k]) {
          ds.S(e.i, e.j) += dx(k) * e.c;
          if (e.i != e.j) ds.S(e.j, e.i) += dx(k) * e.c;
        }
        for (size_t t = 0; t < pat[k].lp_row.size(); ++t) {
          ds.lp(pat[k].lp_row[t]) += dx(k) * pat[k].lp_coef[t];
        }
      }
      ds.S += bz.S;
      ds.lp += bz.lp;

      dz.S = n > 0 ? RealMatrix(woid.S - U * ds.S * U) : RealMatrix::Zero(0, 0);
      dz.lp = Vector::Zero(nlp);
      for (int l = 0; l < nlp; ++l) {
        dz.lp(l) = woid.lp(l) - ds.lp(l) * lp_metric(l);
      }
    };

    auto step_bound = [&](const Cone& ds, const Cone& dz) {
      double a = 1.0;
      if (n > 0) {
        a = std::min(a, max_step_psd(s_eig, ds.S));
        a = std::min(a, max_step_psd(z_eig, dz.S));
      }
      a = std::min(a, max_step_lp(s.lp, ds.lp));
      a = std::min(a, max_step_lp(z.lp, dz.lp));
      return a;
    };
    if (n > 0) z_eig = sym_eig(z.S);

    // Affine direction.
    Cone d_aff;
    d_aff.S = n > 0 ? RealMatrix(-lam * lam) : RealMatrix::Zero(0, 0);
    if (n > 0) d_aff.S = 0.5 * (d_aff.S + d_aff.S.transpose());
    d_aff.lp = -lam_lp.cwiseProduct(lam_lp);
    Vector dx_a, dy_a;
    Cone ds_a, dz_a;
    newton(-rx, -ry, Cone{-rz.S, -rz.lp}, d_aff, dx_a, dy_a, ds_a, dz_a);
    double alpha_aff = step_bound(ds_a, dz_a);

    Cone s_aff = s, z_aff = z;
    s_aff.axpy(alpha_aff, ds_a);
    z_aff.axpy(alpha_aff, dz_a);
    double gap_aff = s_aff.inner(z_aff);
    double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);
    sigma = std::min(1.0, sigma);

    // Mehrotra correction in scaled space.
    Cone us, uz;
    us.S = n > 0 ? RealMatrix(Rinv * ds_a.S * Rinv) : RealMatrix::Zero(0, 0);
    uz.S = n > 0 ? RealMatrix(R * dz_a.S * R) : RealMatrix::Zero(0, 0);
    us.lp = Vector::Zero(nlp);
    uz.lp = Vector::Zero(nlp);
    for (int l = 0; l < nlp; ++l) {
      us.lp(l) = ds_a.lp(l) / w_lp(l);
      uz.lp(l) = dz_a.lp(l) * w_lp(l);
    }
    Cone d_comb;
    if (n > 0) {
      RealMatrix cross = 0.5 * (us.S * uz.S + uz.S * us.S);
      d_comb.S = -lam * lam - cross;
      d_comb.S.diagonal().array() += sigma * mu;
      d_comb.S = 0.5 * (d_comb.S + d_comb.S.transpose());
    } else {
      d_comb.S = RealMatrix::Zero(0, 0);
    }
    d_comb.lp = Vector::Zero(nlp);
    for (int l = 0; l < nlp; ++l) {
      d_comb.lp(l) = -lam_lp(l) * lam_lp(l) - us.lp(l) * uz.lp(l) + sigma * mu;
    }

    Vector dx, dy;
    Cone ds, dz;
    newton(-rx, -ry, Cone{-rz.S, -rz.lp}, d_comb, dx, dy, ds, dz);
    double alpha = std::min(1.0, 0.99 * step_bound(ds, dz));

    // Rounding in the eigenvalue-based step bound can overshoot the cone
    // boundary; back off until both slacks stay strictly interior. A hair
    // outside is nudged back with a diagonal shift, which the infeasible
    // formulation absorbs into the next residual.
    auto interior_or_nudged = [&](Cone& v) {
      if (nlp > 0) {
        double m = v.lp.minCoeff();
        if (m <= 0.0) {
          if (m < -1e-11 * std::max(1.0, v.lp.cwiseAbs().maxCoeff())) return false;
          v.lp.array() += 2.0 * (1e-300 - m) + 1e-13;
        }
      }
      if (n > 0) {
        Eigen::LLT<RealMatrix> llt(v.S);
        if (llt.info() != Eigen::Success) {
          double scale = std::max(1.0, v.S.diagonal().cwiseAbs().maxCoeff());
          double m = sym_eig(v.S).vals.minCoeff();
          if (m < -1e-11 * scale) return false;
          v.S.diagonal().array() += (std::abs(m) + 1e-12 * scale);
        }
      }
      return true;
    };
    bool stepped = false;
    Cone s_cand, z_cand;
    for (int tries = 0; tries < 12; ++tries) {
      s_cand = s;
      z_cand = z;
      s_cand.axpy(alpha, ds);
      z_cand.axpy(alpha, dz);
      if (interior_or_nudged(s_cand) && interior_or_nudged(z_cand)) {
        stepped = true;
        break;
      }
      alpha *= 0.7;
    }
    if (!stepped) {
      report_best("step could not stay interior");
      return res;
    }
    s = s_cand;
    z = z_cand;

    x += alpha * dx;
    if (me > 0) y += alpha * dy;

    if (alpha < 1e-7 || (gap > 0.999 * prev_gap && alpha < 1e-3)) {
      if (++stalls >= 4) {
        report_best("no further progress");
        return res;
      }
    } else {
      stalls = 0;
    }
    prev_gap = gap;
  }

  // Iteration limit: fall back to the best iterate seen.
  report_best("iteration limit reached");
  return res;
}

}  // namespace

SolveResult solve_sdp(const SDPInstance& instance, const SolveOptions& opts) {
  PresolveResult pre = presolve_fixed_variables(instance);
  if (pre.infeasible) {
    SolveResult res;
    res.status = SolveStatus::Infeasible;
    res.message = pre.message;
    return res;
  }

  SolveResult res;
  if (pre.reduced.num_vars == 0) {
    // Everything pinned: feasibility is a plain PSD / sign check.
    res.x = Vector::Zero(0);
    RealMatrix C0 = RealMatrix::Zero(instance.psd_dim, instance.psd_dim);
    for (const auto& e : pre.reduced.psd_const) {
      C0(e.i, e.j) += e.c;
      if (e.i != e.j) C0(e.j, e.i) += e.c;
    }
    bool feasible = true;
    if (instance.psd_dim > 0) {
      feasible = Eigen::SelfAdjointEigenSolver<RealMatrix>(C0, Eigen::EigenvaluesOnly)
                     .eigenvalues()
                     .minCoeff() >= -1e-9;
    }
    for (const auto& r : pre.reduced.lp_rows) feasible &= (-r.rhs >= -1e-9);
    res.status = feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
    res.primal_objective = res.dual_objective = pre.reduced.objective_offset;
    res.message = feasible ? "fully determined by equalities" : "pinned moments infeasible";
  } else {
    res = solve_sdp_core(pre.reduced, opts);
  }

  // Re-expand the moment vector to the caller's indexing.
  Vector full = Vector::Zero(instance.num_vars);
  for (int v = 0; v < instance.num_vars; ++v) {
    if (pre.free_index[v] < 0) {
      full(v) = pre.fixed_value[v];
    } else if (res.x.size() > pre.free_index[v]) {
      full(v) = res.x(pre.free_index[v]);
    }
  }
  res.x = full;
  return res;
}

}  // namespace dicert
