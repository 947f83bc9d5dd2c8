#pragma once

#include <Eigen/Dense>
#include <vector>

namespace holostream {

// Conic program in inequality form:
//
//   minimize    c'x
//   subject to  G x + s = h,   s in K,
//
// where K is a product of a nonnegative orthant of dimension `nonneg`
// followed by second-order cones of the listed dimensions, in row order.
// A second-order cone of dimension d holds vectors (s0, s1) with
// s0 >= ||s1||_2, s1 of length d-1.
struct ConeLayout {
  int nonneg = 0;
  std::vector<int> soc;

  int rows() const {
    int m = nonneg;
    for (int d : soc) m += d;
    return m;
  }
  void validate() const;
};

struct SocpProblem {
  Eigen::VectorXd cost;  // c, length n
  Eigen::MatrixXd lhs;   // G, m x n
  Eigen::VectorXd rhs;   // h, length m
  ConeLayout cones;

  void validate() const;
};

enum class SocpStatus {
  kOptimal,
  kPrimalInfeasible,
  kDualInfeasible,
  kMaxIterations,
  kNumericalFailure,
};

struct SocpSolution {
  SocpStatus status = SocpStatus::kNumericalFailure;
  bool inaccurate = false;  // converged only to the relaxed tolerances
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd z;  // dual cone multipliers
  double objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

struct SocpSettings {
  int max_iterations = 100;
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-4;  // fallbacks when progress stalls
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  double step_scale = 0.99;     // fraction of the max cone step taken
  double step_min = 1e-7;       // below this the iteration has stalled
  double sigma_min = 1e-4;
  double sigma_max = 0.9999;
  int refine_rounds = 2;        // iterative refinement passes per KKT solve
  double static_reg = 1e-10;    // relative Tikhonov term on the normal matrix
};

// Primal-dual interior-point solver on the homogeneous self-dual embedding,
// with Nesterov-Todd scalings and a Mehrotra predictor-corrector step. Each
// iteration reduces the KKT system to the dense normal matrix G' W^-2 G,
// exploiting the fact that per-cone scaling blocks are rank-one corrections
// of +-identity. Certificates: status reports primal or dual infeasibility
// when the embedding converges to tau = 0, kappa > 0.
//
// solve() keeps all state on the stack, so one solver instance may be shared
// across threads.
class SocpSolver {
 public:
  SocpSolver() = default;
  explicit SocpSolver(const SocpSettings& settings) : settings_(settings) {}

  SocpSolution solve(const SocpProblem& problem) const;

  const SocpSettings& settings() const { return settings_; }

 private:
  SocpSettings settings_;
};

}  // namespace holostream
