#include "holostream/beamform.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace holostream {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Column of the real-valued decision vector holding Re/Im of w_{k}(i) for the
// stacked index i in [0, aps*antennas). Layout: [t, Re w_0(0), Im w_0(0), ...].
int re_col(int k, int i, int stacked) { return 1 + 2 * (k * stacked + i); }
int im_col(int k, int i, int stacked) { return 2 + 2 * (k * stacked + i); }

// Largest SINR user k could see with every AP pouring its full budget into
// coherent service of k alone: (sum_m ||h_{k,m}|| sqrt(P_m))^2 / sigma^2.
double sinr_upper_bound(const BeamformingProblem& p, int k) {
  const int I = p.antennas;
  double amp = 0.0;
  for (int m = 0; m < p.aps; ++m) {
    amp += p.channels[k].segment(static_cast<Eigen::Index>(m) * I, I).norm() *
           std::sqrt(p.ap_power(m));
  }
  return amp * amp / p.noise_power;
}

double user_sinr(const BeamformingProblem& p,
                 const std::vector<Eigen::VectorXcd>& w, int k) {
  double desired = 0.0;
  double interference = 0.0;
  for (int j = 0; j < p.users; ++j) {
    const double pw = std::norm(p.channels[k].dot(w[j]));
    if (j == k) {
      desired = pw;
    } else {
      interference += pw;
    }
  }
  return desired / (interference + p.noise_power);
}

}  // namespace

void BeamformingProblem::validate() const {
  if (users < 1 || aps < 1 || antennas < 1) {
    throw std::invalid_argument("BeamformingProblem: dimensions must be >= 1");
  }
  const Eigen::Index stacked = static_cast<Eigen::Index>(aps) * antennas;
  if (static_cast<int>(channels.size()) != users) {
    throw std::invalid_argument("BeamformingProblem: one channel per user");
  }
  for (const auto& h : channels) {
    if (h.size() != stacked || !h.allFinite()) {
      throw std::invalid_argument(
          "BeamformingProblem: channels must be finite, length aps*antennas");
    }
  }
  if (sinr_target.size() != users || (sinr_target.array() <= 0.0).any()) {
    throw std::invalid_argument(
        "BeamformingProblem: need one positive SINR target per user");
  }
  if (ap_power.size() != aps || (ap_power.array() <= 0.0).any() ||
      !ap_power.allFinite()) {
    throw std::invalid_argument(
        "BeamformingProblem: need one positive power budget per AP");
  }
  if (!(noise_power > 0.0)) {
    throw std::invalid_argument("BeamformingProblem: noise_power must be > 0");
  }
}

BeamformingProblem build_problem(const ChannelRealization& ch,
                                 const Eigen::VectorXd& sinr_target,
                                 const Eigen::VectorXd& ap_power,
                                 const NoiseModel& noise) {
  noise.validate();
  BeamformingProblem p;
  p.users = ch.users();
  p.aps = ch.aps();
  p.antennas = ch.antennas();
  p.channels.reserve(p.users);
  for (int k = 0; k < p.users; ++k) p.channels.push_back(ch.stacked(k));
  p.sinr_target = sinr_target;
  p.ap_power = ap_power;
  p.noise_power = noise.power();
  p.validate();
  return p;
}

BeamformerSolution solve_beamforming(const BeamformingProblem& problem,
                                     const SocpSolver& solver) {
  problem.validate();
  const int K = problem.users;
  const int M = problem.aps;
  const int I = problem.antennas;
  const int stacked = M * I;

  BeamformerSolution out;
  out.total_power = kNaN;

  // Interference-free power bound: cheap certificate for hopeless targets
  // (also the only path that admits infinite targets).
  for (int k = 0; k < K; ++k) {
    if (!(problem.sinr_target(k) <= sinr_upper_bound(problem, k))) {
      out.status = BeamStatus::kInfeasible;
      return out;
    }
  }

  // Work with noise-normalized channels (unit noise power): keeps the cone
  // data O(1) regardless of physical units.
  const double noise_scale = 1.0 / std::sqrt(problem.noise_power);
  const int n = 1 + 2 * K * stacked;
  const int sinr_rows = 2 * K;          // per user
  const int power_rows = 1 + 2 * K * I; // per AP
  const int m_rows = (1 + 2 * K * stacked) + K * sinr_rows + M * power_rows;

  SocpProblem socp;
  socp.cost = Eigen::VectorXd::Zero(n);
  socp.cost(0) = 1.0;  // minimize the norm epigraph t
  socp.lhs = Eigen::MatrixXd::Zero(m_rows, n);
  socp.rhs = Eigen::VectorXd::Zero(m_rows);
  socp.cones.nonneg = 0;
  socp.cones.soc.reserve(1 + K + M);

  int row = 0;
  // Objective cone: (t, all beamformer coordinates).
  socp.cones.soc.push_back(1 + 2 * K * stacked);
  for (int v = 0; v < 1 + 2 * K * stacked; ++v) {
    socp.lhs(row, v) = -1.0;
    ++row;
  }
  // SINR cones: Re(h_k' w_k) >= sqrt(G_k) * || [cross terms, sigma] ||.
  for (int k = 0; k < K; ++k) {
    socp.cones.soc.push_back(sinr_rows);
    const Eigen::VectorXcd hk = problem.channels[k] * noise_scale;
    const double root_gamma = std::sqrt(problem.sinr_target(k));
    for (int i = 0; i < stacked; ++i) {  // s_0 = Re(h_k' w_k)
      socp.lhs(row, re_col(k, i, stacked)) = -hk(i).real();
      socp.lhs(row, im_col(k, i, stacked)) = -hk(i).imag();
    }
    ++row;
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      for (int i = 0; i < stacked; ++i) {  // Re(h_k' w_j) scaled
        socp.lhs(row, re_col(j, i, stacked)) = -root_gamma * hk(i).real();
        socp.lhs(row, im_col(j, i, stacked)) = -root_gamma * hk(i).imag();
      }
      ++row;
      for (int i = 0; i < stacked; ++i) {  // Im(h_k' w_j) scaled
        socp.lhs(row, re_col(j, i, stacked)) = root_gamma * hk(i).imag();
        socp.lhs(row, im_col(j, i, stacked)) = -root_gamma * hk(i).real();
      }
      ++row;
    }
    socp.rhs(row) = root_gamma;  // unit-noise term
    ++row;
  }
  // Per-AP power cones: sqrt(P_m) >= || all coordinates served by AP m ||.
  for (int m = 0; m < M; ++m) {
    socp.cones.soc.push_back(power_rows);
    socp.rhs(row) = std::sqrt(problem.ap_power(m));
    ++row;
    for (int k = 0; k < K; ++k) {
      for (int i = m * I; i < (m + 1) * I; ++i) {
        socp.lhs(row, re_col(k, i, stacked)) = -1.0;
        ++row;
        socp.lhs(row, im_col(k, i, stacked)) = -1.0;
        ++row;
      }
    }
  }

  const SocpSolution sol = solver.solve(socp);
  out.iterations = sol.iterations;
  switch (sol.status) {
    case SocpStatus::kPrimalInfeasible:
      out.status = BeamStatus::kInfeasible;
      return out;
    case SocpStatus::kOptimal:
      break;
    default:
      out.status = BeamStatus::kNumericalFailure;
      return out;
  }

  out.w.assign(K, Eigen::VectorXcd::Zero(stacked));
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < stacked; ++i) {
      out.w[k](i) = std::complex<double>(sol.x(re_col(k, i, stacked)),
                                         sol.x(im_col(k, i, stacked)));
    }
    // Canonical phase: make h_k' w_k real nonnegative exactly. A common
    // rotation of w_k moves no power and no SINR.
    const std::complex<double> inner = problem.channels[k].dot(out.w[k]);
    const double mag = std::abs(inner);
    if (mag > 0.0) out.w[k] *= std::conj(inner) / mag;
  }
  out.total_power = 0.0;
  for (int k = 0; k < K; ++k) out.total_power += out.w[k].squaredNorm();
  out.status = BeamStatus::kFeasible;

  // An optimizer that only met the relaxed tolerances must still hand back a
  // deployable beamformer; otherwise report the failure honestly.
  if (sol.inaccurate && !verify_solution(problem, out, 1e-3)) {
    out.status = BeamStatus::kNumericalFailure;
    out.w.clear();
    out.total_power = kNaN;
  }
  return out;
}

bool verify_solution(const BeamformingProblem& problem,
                     const BeamformerSolution& solution, double tol) {
  problem.validate();
  if (!(tol >= 0.0)) {
    throw std::invalid_argument("verify_solution: tol must be >= 0");
  }
  if (solution.status != BeamStatus::kFeasible) return false;
  const int stacked = problem.aps * problem.antennas;
  if (static_cast<int>(solution.w.size()) != problem.users) return false;
  for (const auto& wk : solution.w) {
    if (wk.size() != stacked || !wk.allFinite()) return false;
  }
  for (int m = 0; m < problem.aps; ++m) {
    double used = 0.0;
    for (int k = 0; k < problem.users; ++k) {
      used += solution.w[k]
                  .segment(static_cast<Eigen::Index>(m) * problem.antennas,
                           problem.antennas)
                  .squaredNorm();
    }
    if (used > problem.ap_power(m) * (1.0 + tol)) return false;
  }
  for (int k = 0; k < problem.users; ++k) {
    if (user_sinr(problem, solution.w, k) <
        problem.sinr_target(k) * (1.0 - tol)) {
      return false;
    }
  }
  return true;
}

BeamformerSolution solve_sum_power_duality(const BeamformingProblem& problem,
                                           const DualityOptions& opts) {
  problem.validate();
  const int K = problem.users;
  const int stacked = problem.aps * problem.antennas;

  BeamformerSolution out;
  out.total_power = kNaN;

  // Noise-normalized channels; virtual uplink powers lambda then live on an
  // O(1) scale and the divergence bound is unit-independent.
  std::vector<Eigen::VectorXcd> h(K);
  for (int k = 0; k < K; ++k) {
    h[k] = problem.channels[k] / std::sqrt(problem.noise_power);
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXcd phi(stacked, stacked);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    phi = Eigen::MatrixXcd::Identity(stacked, stacked);
    for (int j = 0; j < K; ++j) {
      phi.noalias() += lambda(j) * (h[j] * h[j].adjoint());
    }
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(phi);
    Eigen::VectorXd next(K);
    for (int k = 0; k < K; ++k) {
      // Exclude user k's own term via the rank-one update identity:
      //   h' (Phi - l h h')^-1 h = q / (1 - l q),  q = h' Phi^-1 h.
      const double q = h[k].dot(ldlt.solve(h[k])).real();
      const double own = 1.0 - lambda(k) * q;
      const double effective = q / own;
      if (!(effective > 0.0) || !std::isfinite(effective)) {
        out.status = BeamStatus::kNumericalFailure;
        return out;
      }
      next(k) = problem.sinr_target(k) / effective;
    }
    if (next.sum() > opts.divergence_bound) {
      out.status = BeamStatus::kInfeasible;
      out.iterations = iter + 1;
      return out;
    }
    const double change = (next - lambda).cwiseAbs().maxCoeff() /
                          std::max(1.0, next.cwiseAbs().maxCoeff());
    lambda = next;
    if (change < opts.tol) break;
  }
  out.iterations = iter + 1;
  if (iter == opts.max_iterations) {
    out.status = BeamStatus::kNumericalFailure;
    return out;
  }

  // MMSE directions at the fixed point (the k-th own term only rescales).
  phi = Eigen::MatrixXcd::Identity(stacked, stacked);
  for (int j = 0; j < K; ++j) {
    phi.noalias() += lambda(j) * (h[j] * h[j].adjoint());
  }
  const Eigen::LDLT<Eigen::MatrixXcd> ldlt(phi);
  std::vector<Eigen::VectorXcd> u(K);
  for (int k = 0; k < K; ++k) {
    u[k] = ldlt.solve(h[k]);
    u[k] /= u[k].norm();
  }

  // Exact downlink powers: enforce SINR equality through a K x K system.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      const double gain = std::norm(h[k].dot(u[j]));
      A(k, j) = (j == k) ? gain / problem.sinr_target(k) : -gain;
    }
  }
  const Eigen::VectorXd p = A.partialPivLu().solve(Eigen::VectorXd::Ones(K));
  if (!p.allFinite() || (p.array() < 0.0).any()) {
    out.status = BeamStatus::kNumericalFailure;
    return out;
  }

  out.w.assign(K, Eigen::VectorXcd::Zero(stacked));
  out.total_power = 0.0;
  for (int k = 0; k < K; ++k) {
    out.w[k] = std::sqrt(p(k)) * u[k];
    const std::complex<double> inner = problem.channels[k].dot(out.w[k]);
    const double mag = std::abs(inner);
    if (mag > 0.0) out.w[k] *= std::conj(inner) / mag;
    out.total_power += p(k);
  }
  out.status = BeamStatus::kFeasible;
  return out;
}

}  // namespace holostream
