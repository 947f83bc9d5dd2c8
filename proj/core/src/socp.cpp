#include "holostream/socp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace holostream {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Nesterov-Todd scaling point. For the orthant, W is diagonal with entries
// sqrt(s_i / z_i). For a second-order cone, W = eta * [a q'; q I + qq'/(1+a)]
// with a^2 - ||q||^2 = 1, so W and its inverse/squares act in O(d) as
// rank-one corrections of the reflection J = diag(1, -I).
struct SocScaling {
  double eta = 1.0;
  double a = 1.0;
  Eigen::VectorXd q;
};

struct Scaling {
  Eigen::ArrayXd lp_w;  // sqrt(s/z) on the orthant rows
  std::vector<SocScaling> soc;
};

Scaling identity_scaling(const ConeLayout& cones) {
  Scaling sc;
  sc.lp_w = Eigen::ArrayXd::Ones(cones.nonneg);
  sc.soc.reserve(cones.soc.size());
  for (int dim : cones.soc) {
    SocScaling s;
    s.q = Eigen::VectorXd::Zero(dim - 1);
    sc.soc.push_back(std::move(s));
  }
  return sc;
}

// Computes the NT scaling for the current (s, z); false when either iterate
// has drifted off the cone interior, which is a numerical breakdown.
bool compute_scaling(const ConeLayout& cones, const Eigen::VectorXd& s,
                     const Eigen::VectorXd& z, Scaling& sc) {
  for (int i = 0; i < cones.nonneg; ++i) {
    if (!(s(i) > 0.0) || !(z(i) > 0.0)) return false;
    sc.lp_w(i) = std::sqrt(s(i) / z(i));
  }
  int off = cones.nonneg;
  for (std::size_t j = 0; j < cones.soc.size(); ++j) {
    const int dim = cones.soc[j];
    const auto sk = s.segment(off, dim);
    const auto zk = z.segment(off, dim);
    const double sres = sk(0) * sk(0) - sk.tail(dim - 1).squaredNorm();
    const double zres = zk(0) * zk(0) - zk.tail(dim - 1).squaredNorm();
    if (!(sk(0) > 0.0) || !(zk(0) > 0.0) || !(sres > 0.0) || !(zres > 0.0)) {
      return false;
    }
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    const Eigen::VectorXd skbar = sk / snorm;
    const Eigen::VectorXd zkbar = zk / znorm;
    const double gamma = std::sqrt((1.0 + skbar.dot(zkbar)) / 2.0);
    SocScaling& w = sc.soc[j];
    w.eta = std::sqrt(std::sqrt(sres / zres));  // eta^2 = snorm/znorm
    w.a = (skbar(0) + zkbar(0)) / (2.0 * gamma);
    w.q = (skbar.tail(dim - 1) - zkbar.tail(dim - 1)) / (2.0 * gamma);
    off += dim;
  }
  return true;
}

Eigen::VectorXd apply_w(const ConeLayout& cones, const Scaling& sc,
                        const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  out.head(cones.nonneg).array() =
      sc.lp_w * v.head(cones.nonneg).array();
  int off = cones.nonneg;
  for (std::size_t j = 0; j < cones.soc.size(); ++j) {
    const int dim = cones.soc[j];
    const SocScaling& w = sc.soc[j];
    const auto v1 = v.segment(off + 1, dim - 1);
    const double qv = w.q.dot(v1);
    out(off) = w.eta * (w.a * v(off) + qv);
    out.segment(off + 1, dim - 1) =
        w.eta * (v1 + (v(off) + qv / (1.0 + w.a)) * w.q);
    off += dim;
  }
  return out;
}

Eigen::VectorXd apply_w2(const ConeLayout& cones, const Scaling& sc,
                         const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  out.head(cones.nonneg).array() =
      sc.lp_w.square() * v.head(cones.nonneg).array();
  int off = cones.nonneg;
  for (std::size_t j = 0; j < cones.soc.size(); ++j) {
    const int dim = cones.soc[j];
    const SocScaling& w = sc.soc[j];
    const auto v1 = v.segment(off + 1, dim - 1);
    const double eta2 = w.eta * w.eta;
    const double t = w.a * v(off) + w.q.dot(v1);  // wbar' v
    out(off) = eta2 * (2.0 * t * w.a - v(off));
    out.segment(off + 1, dim - 1) = eta2 * (2.0 * t * w.q + v1);
    off += dim;
  }
  return out;
}

Eigen::VectorXd apply_w_inv2(const ConeLayout& cones, const Scaling& sc,
                             const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  out.head(cones.nonneg).array() =
      v.head(cones.nonneg).array() / sc.lp_w.square();
  int off = cones.nonneg;
  for (std::size_t j = 0; j < cones.soc.size(); ++j) {
    const int dim = cones.soc[j];
    const SocScaling& w = sc.soc[j];
    const auto v1 = v.segment(off + 1, dim - 1);
    const double eta2 = w.eta * w.eta;
    const double t = w.a * v(off) - w.q.dot(v1);  // what' v, what = (a, -q)
    out(off) = (2.0 * t * w.a - v(off)) / eta2;
    out.segment(off + 1, dim - 1) = (v1 - 2.0 * t * w.q) / eta2;
    off += dim;
  }
  return out;
}

// Jordan-algebra product: componentwise on the orthant; on a second-order
// cone (u o v)_0 = u'v and (u o v)_1 = u_0 v_1 + v_0 u_1.
Eigen::VectorXd conic_product(const ConeLayout& cones, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v) {
  Eigen::VectorXd out(u.size());
  out.head(cones.nonneg).array() =
      u.head(cones.nonneg).array() * v.head(cones.nonneg).array();
  int off = cones.nonneg;
  for (int dim : cones.soc) {
    const auto uk = u.segment(off, dim);
    const auto vk = v.segment(off, dim);
    out(off) = uk.dot(vk);
    out.segment(off + 1, dim - 1) =
        uk(0) * vk.tail(dim - 1) + vk(0) * uk.tail(dim - 1);
    off += dim;
  }
  return out;
}

// Solves lam o x = d for x (lam in the cone interior).
Eigen::VectorXd conic_division(const ConeLayout& cones,
                               const Eigen::VectorXd& lam,
                               const Eigen::VectorXd& d) {
  Eigen::VectorXd out(lam.size());
  out.head(cones.nonneg).array() =
      d.head(cones.nonneg).array() / lam.head(cones.nonneg).array();
  int off = cones.nonneg;
  for (int dim : cones.soc) {
    const auto lk = lam.segment(off, dim);
    const auto dk = d.segment(off, dim);
    const double rho = lk(0) * lk(0) - lk.tail(dim - 1).squaredNorm();
    const double x0 = (lk(0) * dk(0) - lk.tail(dim - 1).dot(dk.tail(dim - 1))) / rho;
    out(off) = x0;
    out.segment(off + 1, dim - 1) =
        (dk.tail(dim - 1) - x0 * lk.tail(dim - 1)) / lk(0);
    off += dim;
  }
  return out;
}

Eigen::VectorXd cone_identity(const ConeLayout& cones) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cones.rows());
  e.head(cones.nonneg).setOnes();
  int off = cones.nonneg;
  for (int dim : cones.soc) {
    e(off) = 1.0;
    off += dim;
  }
  return e;
}

// Shifts r along the cone identity until it is strictly interior.
Eigen::VectorXd bring_to_cone(const ConeLayout& cones,
                              const Eigen::VectorXd& r) {
  double alpha = -0.99;
  for (int i = 0; i < cones.nonneg; ++i) alpha = std::max(alpha, -r(i));
  int off = cones.nonneg;
  for (int dim : cones.soc) {
    alpha = std::max(alpha, r.segment(off + 1, dim - 1).norm() - r(off));
    off += dim;
  }
  return r + (1.0 + alpha) * cone_identity(cones);
}

// Largest step alpha <= 1 keeping lam + alpha*ds and lam + alpha*dz in the
// cone (both directions live in the scaled space) and tau, kappa positive.
double line_search(const ConeLayout& cones, const Eigen::VectorXd& lam,
                   const Eigen::VectorXd& ds, const Eigen::VectorXd& dz,
                   double tau, double dtau, double kap, double dkap) {
  double alpha = 1.0;
  if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
  if (dkap < 0.0) alpha = std::min(alpha, -kap / dkap);
  for (int i = 0; i < cones.nonneg; ++i) {
    if (ds(i) < 0.0) alpha = std::min(alpha, -lam(i) / ds(i));
    if (dz(i) < 0.0) alpha = std::min(alpha, -lam(i) / dz(i));
  }
  int off = cones.nonneg;
  for (int dim : cones.soc) {
    const auto lk = lam.segment(off, dim);
    const double lknorm2 = lk(0) * lk(0) - lk.tail(dim - 1).squaredNorm();
    const double lknorm = std::sqrt(std::max(lknorm2, 0.0));
    if (!(lknorm > 0.0)) return 0.0;
    const Eigen::VectorXd lkbar = lk / lknorm;
    for (const Eigen::VectorXd* dir : {&ds, &dz}) {
      const auto dk = dir->segment(off, dim);
      const double rho0 = lkbar(0) * dk(0) - lkbar.tail(dim - 1).dot(dk.tail(dim - 1));
      const double factor = (rho0 + dk(0)) / (lkbar(0) + 1.0);
      const double rho1norm =
          (dk.tail(dim - 1) - factor * lkbar.tail(dim - 1)).norm();
      const double bound = (rho1norm - rho0) / lknorm;
      if (bound > 0.0) alpha = std::min(alpha, 1.0 / bound);
    }
    off += dim;
  }
  return alpha;
}

struct IterateStats {
  double pres = kNaN;
  double dres = kNaN;
  double gap = kNaN;
  double relgap = kNaN;
  double pinfres = kNaN;
  double dinfres = kNaN;
  double mu = kNaN;
  double cx = kNaN;
  double hz = kNaN;
};

struct Snapshot {
  Eigen::VectorXd x, s, z;
  double tau = 1.0, kap = 1.0;
  IterateStats stats;
  bool valid = false;
};

}  // namespace

void ConeLayout::validate() const {
  if (nonneg < 0) {
    throw std::invalid_argument("ConeLayout: nonneg dimension must be >= 0");
  }
  for (int d : soc) {
    if (d < 2) {
      throw std::invalid_argument(
          "ConeLayout: second-order cones need dimension >= 2 "
          "(use orthant rows for scalars)");
    }
  }
  if (rows() < 1) {
    throw std::invalid_argument("ConeLayout: cone must have at least one row");
  }
}

void SocpProblem::validate() const {
  cones.validate();
  const Eigen::Index n = cost.size();
  const Eigen::Index m = cones.rows();
  if (n < 1) throw std::invalid_argument("SocpProblem: empty variable vector");
  if (lhs.rows() != m || lhs.cols() != n || rhs.size() != m) {
    throw std::invalid_argument("SocpProblem: G/h dimensions disagree with cones");
  }
  if (!cost.allFinite() || !lhs.allFinite() || !rhs.allFinite()) {
    throw std::invalid_argument("SocpProblem: non-finite problem data");
  }
}

SocpSolution SocpSolver::solve(const SocpProblem& problem) const {
  problem.validate();
  const SocpSettings& cfg = settings_;
  const ConeLayout& cones = problem.cones;
  const Eigen::MatrixXd& G = problem.lhs;
  const Eigen::VectorXd& c = problem.cost;
  const Eigen::VectorXd& h = problem.rhs;
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(h.size());
  const int nlp = cones.nonneg;
  const int nsoc = static_cast<int>(cones.soc.size());
  const double cone_degree = nlp + nsoc + 1;  // +1 for the tau/kappa pair

  // Constant pieces of the per-cone contribution to the normal matrix
  // G' W^-2 G. For a second-order cone block Gk,
  //   Gk' Wk^-2 Gk = eta^-2 (2 u u' - Gk' J Gk),  u = Gk' what,
  // and Gk' J Gk = 2 g0 g0' - Gk' Gk is scaling-independent, so Gk' Gk and g0
  // are cached across iterations.
  std::vector<Eigen::MatrixXd> soc_gram(nsoc);
  std::vector<Eigen::VectorXd> soc_g0(nsoc);
  std::vector<int> soc_off(nsoc);
  {
    int off = nlp;
    for (int j = 0; j < nsoc; ++j) {
      const int dim = cones.soc[j];
      soc_off[j] = off;
      const auto Gk = G.middleRows(off, dim);
      soc_gram[j] = Eigen::MatrixXd::Zero(n, n);
      soc_gram[j].selfadjointView<Eigen::Lower>().rankUpdate(Gk.transpose());
      soc_g0[j] = Gk.row(0).transpose();
      off += dim;
    }
  }

  Scaling sc = identity_scaling(cones);
  Eigen::MatrixXd normal(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;

  // Assembles and factors G' W^-2 G + reg*I for the current scaling.
  const auto factor_normal = [&]() -> bool {
    normal.setZero();
    if (nlp > 0) {
      // Orthant rows enter as G_lp' diag(z/s) G_lp.
      Eigen::MatrixXd scaled =
          G.topRows(nlp).transpose() *
          (1.0 / sc.lp_w).matrix().asDiagonal();
      normal.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    }
    for (int j = 0; j < nsoc; ++j) {
      const SocScaling& w = sc.soc[j];
      const double inv_eta2 = 1.0 / (w.eta * w.eta);
      const int dim = cones.soc[j];
      normal.triangularView<Eigen::Lower>() += inv_eta2 * soc_gram[j];
      Eigen::VectorXd what(dim);
      what(0) = w.a;
      what.tail(dim - 1) = -w.q;
      const Eigen::VectorXd u =
          G.middleRows(soc_off[j], dim).transpose() * what;
      normal.selfadjointView<Eigen::Lower>().rankUpdate(u, 2.0 * inv_eta2);
      normal.selfadjointView<Eigen::Lower>().rankUpdate(soc_g0[j],
                                                        -2.0 * inv_eta2);
    }
    double reg = cfg.static_reg * std::max(1.0, normal.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd regd = normal;
      regd.diagonal().array() += reg;
      llt.compute(regd);
      if (llt.info() == Eigen::Success) return true;
      reg *= 100.0;
    }
    return false;
  };

  // Solves [0 G'; G -W^2] [dx; dz] = [bx; bz] through the normal equations,
  // followed by iterative refinement against the unreduced system.
  const auto solve_kkt = [&](const Eigen::VectorXd& bx,
                             const Eigen::VectorXd& bz, Eigen::VectorXd& dx,
                             Eigen::VectorXd& dz) {
    dx = llt.solve(bx + G.transpose() * apply_w_inv2(cones, sc, bz));
    dz = apply_w_inv2(cones, sc, G * dx - bz);
    for (int round = 0; round < cfg.refine_rounds; ++round) {
      const Eigen::VectorXd ex = bx - G.transpose() * dz;
      const Eigen::VectorXd ez = bz - G * dx + apply_w2(cones, sc, dz);
      const double scale =
          std::max({1.0, bx.lpNorm<Eigen::Infinity>(), bz.lpNorm<Eigen::Infinity>()});
      if (ex.lpNorm<Eigen::Infinity>() < 1e-14 * scale &&
          ez.lpNorm<Eigen::Infinity>() < 1e-14 * scale) {
        break;
      }
      const Eigen::VectorXd cx2 =
          llt.solve(ex + G.transpose() * apply_w_inv2(cones, sc, ez));
      dz += apply_w_inv2(cones, sc, G * cx2 - ez);
      dx += cx2;
    }
  };

  // --- Initialization: central-path start from the identity scaling.
  if (!factor_normal()) {
    SocpSolution bad;
    bad.status = SocpStatus::kNumericalFailure;
    return bad;
  }
  Eigen::VectorXd x(n), s(m), z(m), tmp_x(n), tmp_z(m);
  solve_kkt(Eigen::VectorXd::Zero(n), h, x, tmp_z);
  s = bring_to_cone(cones, -tmp_z);
  solve_kkt(-c, Eigen::VectorXd::Zero(m), tmp_x, tmp_z);
  z = bring_to_cone(cones, tmp_z);
  double tau = 1.0;
  double kap = 1.0;

  const double resx0 = std::max(1.0, c.norm());
  const double resz0 = std::max(1.0, h.norm());
  const Eigen::VectorXd e = cone_identity(cones);

  Eigen::VectorXd x1(n), z1(m), x2(n), z2(m);
  Eigen::VectorXd lam(m), dsaff_by_w(m), wdzaff(m), ds_tilde(m), dlam(m);
  Eigen::VectorXd dx(n), dz(m), wdz(m), ds_by_w(m);

  IterateStats st;
  Snapshot best;
  bool stalled = false;
  bool breakdown = false;
  int iter = 0;

  const auto update_stats = [&]() {
    const Eigen::VectorXd gtz = G.transpose() * z;
    const Eigen::VectorXd rx = -gtz - c * tau;
    const Eigen::VectorXd sgx = s + G * x;
    const Eigen::VectorXd rz = sgx - h * tau;
    st.cx = c.dot(x);
    st.hz = h.dot(z);
    st.gap = s.dot(z);
    st.mu = (st.gap + kap * tau) / cone_degree;
    const double nx = x.norm();
    const double ns = s.norm();
    const double nz = z.norm();
    st.pres = rz.norm() / std::max(resz0 + nx + ns, 1.0) / tau;
    st.dres = rx.norm() / std::max(resx0 + nz, 1.0) / tau;
    st.relgap = kNaN;
    if (st.cx < 0.0) {
      st.relgap = st.gap / (-st.cx);
    } else if (st.hz < 0.0) {
      st.relgap = st.gap / (-st.hz);
    }
    st.pinfres = kNaN;
    if (st.hz / std::max(nz, 1.0) < -cfg.reltol) {
      st.pinfres = gtz.norm() / std::max(nz, 1.0);
    }
    st.dinfres = kNaN;
    if (st.cx / std::max(nx, 1.0) < -cfg.reltol) {
      st.dinfres = sgx.norm() / std::max(nx + ns, 1.0);
    }
  };

  const auto classify = [&](double feastol, double abstol,
                            double reltol) -> SocpStatus {
    if (st.pres < feastol && st.dres < feastol &&
        (st.gap < abstol || st.relgap < reltol)) {
      return SocpStatus::kOptimal;
    }
    if (tau < kap && std::isfinite(st.pinfres) && st.pinfres < feastol) {
      return SocpStatus::kPrimalInfeasible;
    }
    if (tau < kap && std::isfinite(st.dinfres) && st.dinfres < feastol) {
      return SocpStatus::kDualInfeasible;
    }
    return SocpStatus::kNumericalFailure;  // caller reinterprets
  };

  SocpStatus final_status = SocpStatus::kMaxIterations;
  bool accurate = false;

  for (iter = 0; iter <= cfg.max_iterations; ++iter) {
    update_stats();
    if (!std::isfinite(st.mu) || !(tau > 0.0) || !(kap > 0.0)) {
      breakdown = true;
      break;
    }
    const SocpStatus verdict = classify(cfg.feastol, cfg.abstol, cfg.reltol);
    if (verdict != SocpStatus::kNumericalFailure) {
      final_status = verdict;
      accurate = true;
      break;
    }
    if (!best.valid ||
        std::max(st.pres, st.dres) <
            std::max(best.stats.pres, best.stats.dres)) {
      best = Snapshot{x, s, z, tau, kap, st, true};
    }
    if (iter == cfg.max_iterations) break;

    if (!compute_scaling(cones, s, z, sc) || !factor_normal()) {
      breakdown = true;
      break;
    }
    lam = apply_w(cones, sc, z);

    const Eigen::VectorXd rx = -G.transpose() * z - c * tau;
    const Eigen::VectorXd rz = s + G * x - h * tau;
    const double rt = kap + st.cx + st.hz;

    solve_kkt(-c, h, x1, z1);
    const double dtau_denom = kap / tau - c.dot(x1) - h.dot(z1);
    if (!std::isfinite(dtau_denom) || dtau_denom == 0.0) {
      breakdown = true;
      break;
    }

    // Predictor: pure Newton step on the affine system.
    solve_kkt(rx, s - rz, x2, z2);
    const double dtauaff = (rt - kap + c.dot(x2) + h.dot(z2)) / dtau_denom;
    const Eigen::VectorXd dzaff = z2 + dtauaff * z1;
    wdzaff = apply_w(cones, sc, dzaff);
    dsaff_by_w = -wdzaff - lam;
    const double dkapaff = -kap - kap / tau * dtauaff;
    const double alpha_aff = line_search(cones, lam, dsaff_by_w, wdzaff, tau,
                                         dtauaff, kap, dkapaff);
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3),
                                    cfg.sigma_min, cfg.sigma_max);

    // Corrector: recenters toward sigma*mu with the Mehrotra cross term.
    ds_tilde = conic_product(cones, lam, lam) +
               conic_product(cones, dsaff_by_w, wdzaff) - sigma * st.mu * e;
    const double bkap = kap * tau + dkapaff * dtauaff - sigma * st.mu;
    dlam = conic_division(cones, lam, ds_tilde);
    solve_kkt((1.0 - sigma) * rx,
              -(1.0 - sigma) * rz + apply_w(cones, sc, dlam), x2, z2);
    const double dtau = ((1.0 - sigma) * rt - bkap / tau + c.dot(x2) +
                         h.dot(z2)) /
                        dtau_denom;
    dx = x2 + dtau * x1;
    dz = z2 + dtau * z1;
    wdz = apply_w(cones, sc, dz);
    ds_by_w = -(dlam + wdz);
    const double dkap = -(bkap + kap * dtau) / tau;

    double alpha = line_search(cones, lam, ds_by_w, wdz, tau, dtau, kap, dkap) *
                   cfg.step_scale;
    alpha = std::min(alpha, 1.0);
    if (!(alpha > cfg.step_min)) {
      stalled = true;
      break;
    }

    x += alpha * dx;
    z += alpha * dz;
    tau += alpha * dtau;
    kap += alpha * dkap;
    s = apply_w(cones, sc, lam + alpha * ds_by_w);
  }

  // Fall back to the best iterate seen when the last one is unusable or
  // strictly worse, then retry classification at the relaxed tolerances.
  if (!accurate) {
    if (best.valid && (!std::isfinite(st.pres) ||
                       std::max(st.pres, st.dres) >
                           std::max(best.stats.pres, best.stats.dres))) {
      x = best.x;
      s = best.s;
      z = best.z;
      tau = best.tau;
      kap = best.kap;
      st = best.stats;
    }
    const SocpStatus verdict =
        classify(cfg.feastol_inacc, cfg.abstol_inacc, cfg.reltol_inacc);
    if (verdict != SocpStatus::kNumericalFailure) {
      final_status = verdict;
    } else if (breakdown || stalled) {
      final_status = SocpStatus::kNumericalFailure;
    } else {
      final_status = SocpStatus::kMaxIterations;
    }
  }

  SocpSolution sol;
  sol.status = final_status;
  sol.inaccurate = !accurate && (final_status == SocpStatus::kOptimal ||
                                 final_status == SocpStatus::kPrimalInfeasible ||
                                 final_status == SocpStatus::kDualInfeasible);
  sol.iterations = iter;
  sol.gap = st.gap;
  sol.primal_residual = st.pres;
  sol.dual_residual = st.dres;
  switch (final_status) {
    case SocpStatus::kOptimal:
      sol.x = x / tau;
      sol.s = s / tau;
      sol.z = z / tau;
      sol.objective = c.dot(sol.x);
      break;
    case SocpStatus::kPrimalInfeasible:
      // Farkas certificate: G'z ~ 0, h'z < 0; normalize h'z = -1.
      sol.x = x;
      sol.s = s;
      sol.z = (st.hz < 0.0) ? Eigen::VectorXd(z / -st.hz) : z;
      sol.objective = kNaN;
      break;
    case SocpStatus::kDualInfeasible:
      // Unboundedness ray: G x + s ~ 0, c'x < 0; normalize c'x = -1.
      if (st.cx < 0.0) {
        sol.x = x / -st.cx;
        sol.s = s / -st.cx;
      } else {
        sol.x = x;
        sol.s = s;
      }
      sol.z = z;
      sol.objective = kNaN;
      break;
    default:
      sol.x = x;
      sol.s = s;
      sol.z = z;
      sol.objective = kNaN;
      break;
  }
  return sol;
}

}  // namespace holostream
