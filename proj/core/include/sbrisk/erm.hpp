#pragma once

#include <cstddef>
#include <vector>

#include "sbrisk/class_spec.hpp"
#include "sbrisk/distributions.hpp"
#include "sbrisk/geometry.hpp"

namespace sbrisk {

struct ErmOptions {
  double tol = 1e-10;             // projected-gradient residual target
  std::size_t max_iterations = 100000;
  bool record_objective = false;  // keep the accepted objective values
};

struct ErmResult {
  Vector t_hat;
  double empirical_risk = 0.0;  // (1/N) sum (<t_hat, X_i> - Y_i)^2
  std::size_t iterations = 0;
  double kkt_residual = 0.0;    // |t - P(t - grad/L)|_2 at t_hat
  double lipschitz = 0.0;       // L used for the step 1/L
  bool converged = false;
  std::vector<double> objective_trace;
};

/// (1/N) sum (<t, X_i> - Y_i)^2.
[[nodiscard]] double empirical_risk(const Eigen::Ref<const Vector>& t, const Sample& sample);

/// Largest eigenvalue of the symmetric positive semidefinite `gram` by power
/// iteration, stopped at 1e-6 relative change (the estimate is a lower bound).
[[nodiscard]] double power_iteration_max_eigenvalue(const Eigen::Ref<const Matrix>& gram);

/// Empirical risk minimisation of the squared loss over radius * B_1^n.
///
/// Accelerated projected gradient with fixed step 1/L, where L is twice the
/// top eigenvalue of the empirical second-moment matrix (power iteration,
/// inflated by 1% to cover its one-sided error, and grown if a plain step
/// ever fails to descend). The momentum is reset whenever a step would
/// increase the objective by more than rounding error, so accepted
/// objective values are non-increasing up to rounding. Stops when the
/// projected-gradient residual drops to `tol`; `converged` is false if the
/// iteration cap is hit first.
[[nodiscard]] ErmResult solve_erm(const Sample& sample, const ClassSpec& cls, const ErmOptions& options = {});

/// P_N of the excess loss (f - f*)^2 + 2 xi (f - f*) with xi_i = <t0, X_i> - Y_i.
[[nodiscard]] double excess_loss(const Eigen::Ref<const Vector>& t, const ClassSpec& cls, const Sample& sample);

struct BruteForceOptions {
  double resolution = 5e-3;
  std::size_t refinement_steps = 100;
};

/// Exhaustive grid search over radius * B_1^n (n <= 4) followed by projected
/// gradient refinement from the best grid point. Test oracle for solve_erm;
/// it uses an exact eigendecomposition for its step size.
[[nodiscard]] Vector brute_force_erm(const Sample& sample, const ClassSpec& cls, const BruteForceOptions& options = {});

}  // namespace sbrisk
