#pragma once

// Second-order cone programs in standard form
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,   s in K = R+^l x Q^{q_1} x ... x Q^{q_k}
//
// and an interior-point solver for them.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace scvx {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct ConeProblem {
  Eigen::VectorXd c;
  SpMat A;
  Eigen::VectorXd b;
  SpMat G;
  Eigen::VectorXd h;
  int l = 0;                   // leading nonnegative-orthant rows of G
  std::vector<int> soc_dims;   // following second-order cone block sizes
  double objective_offset = 0.0;

  int num_vars() const { return static_cast<int>(c.size()); }
  /// Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
};

enum class SolveStatus {
  optimal,
  optimal_inaccurate,
  primal_infeasible,
  dual_infeasible,
  max_iterations,
  numerical_failure,
};

const char* to_string(SolveStatus s);
inline bool is_solved(SolveStatus s) {
  return s == SolveStatus::optimal || s == SolveStatus::optimal_inaccurate;
}

struct SolverSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-4;
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  int max_iters = 100;
  int ruiz_passes = 15;
  double static_reg = 1e-8;
  int refine_steps = 10;
  bool verbose = false;
};

struct ConeSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x, y, z, s;
  double primal_objective = 0.0;  // c'x + objective_offset
  double dual_objective = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double solve_time = 0.0;  // s
  std::string message;
};

class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  virtual ConeSolution solve(const ConeProblem& problem) const = 0;
};

/// Homogeneous self-dual embedding with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector.
class InteriorPointSolver final : public ConicSolver {
 public:
  explicit InteriorPointSolver(SolverSettings settings = {}) : settings_(settings) {}
  std::string name() const override { return "ipm"; }
  ConeSolution solve(const ConeProblem& problem) const override;
  const SolverSettings& settings() const { return settings_; }

 private:
  SolverSettings settings_;
};

/// Known names: "ipm". An empty name reads SCVX_SOLVER, defaulting to "ipm".
std::unique_ptr<ConicSolver> make_solver(const std::string& name = "",
                                         const SolverSettings& settings = {});

/// Writes the program in the Conic Benchmark Format (CBF, version 3).
void write_cbf(const ConeProblem& problem, std::ostream& out);

}  // namespace scvx
