#pragma once

#include <Eigen/Dense>
#include <vector>

#include "holostream/channel.hpp"
#include "holostream/socp.hpp"

namespace holostream {

// Min-power multi-AP beamforming instance: find per-user transmit vectors
// w_k (stacked AP-major, length aps*antennas) minimizing total power subject
// to per-user SINR floors and per-AP power budgets.
struct BeamformingProblem {
  int users = 0;
  int aps = 0;
  int antennas = 0;
  std::vector<Eigen::VectorXcd> channels;  // stacked h_k, one per user
  Eigen::VectorXd sinr_target;             // Gamma_k > 0 (may be +inf)
  Eigen::VectorXd ap_power;                // P_m > 0 [W]
  double noise_power = 0.0;                // n0 * W [W]

  void validate() const;
};

enum class BeamStatus { kFeasible, kInfeasible, kNumericalFailure };

struct BeamformerSolution {
  BeamStatus status = BeamStatus::kNumericalFailure;
  std::vector<Eigen::VectorXcd> w;  // per user, stacked AP-major; empty unless feasible
  double total_power = 0.0;         // sum_k ||w_k||^2; NaN unless feasible
  int iterations = 0;               // interior-point (or fixed-point) iterations
};

// Packs a channel realization and per-user SINR floors into a problem.
BeamformingProblem build_problem(const ChannelRealization& ch,
                                 const Eigen::VectorXd& sinr_target,
                                 const Eigen::VectorXd& ap_power,
                                 const NoiseModel& noise);

// Solves the min-power program as a second-order cone program:
//
//   minimize   t
//   s.t.       || stack_k w_k ||              <= t
//              Re(h_k' w_k) >= sqrt(Gamma_k) ||[ {h_k' w_j}_{j != k}, sigma ]||
//              || stack_k w_{k,m} ||          <= sqrt(P_m)        for each AP m
//
// The SINR rows restrict h_k' w_k to be real nonnegative, which costs no
// generality (each w_k can absorb a unit phase); returned beamformers are
// rotated so h_k' w_k is exactly real. A closed-form power bound that ignores
// interference rejects wildly infeasible targets before the cone solve.
BeamformerSolution solve_beamforming(const BeamformingProblem& problem,
                                     const SocpSolver& solver = SocpSolver());

// Checks a feasible solution against the problem: per-AP power within
// P_m * (1 + tol) and per-user SINR at least Gamma_k * (1 - tol).
bool verify_solution(const BeamformingProblem& problem,
                     const BeamformerSolution& solution, double tol);

struct DualityOptions {
  int max_iterations = 20000;
  double tol = 1e-13;            // relative fixed-point stopping threshold
  double divergence_bound = 1e9; // declared infeasible past this virtual power
};

// Independent reference solver for the SUM-power relaxation (per-AP budgets
// ignored): iterates the standard uplink power fixed point
//   lambda_k <- Gamma_k / (h_k' (sigma^2 I + sum_{j != k} lambda_j h_j h_j')^-1 h_k),
// whose convergence is equivalent to feasibility, then recovers downlink
// beamformers from the MMSE directions and a K x K power rebalance. Used to
// cross-validate the cone solver on instances whose AP budgets are slack.
BeamformerSolution solve_sum_power_duality(const BeamformingProblem& problem,
                                           const DualityOptions& opts = {});

}  // namespace holostream
