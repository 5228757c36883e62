#include "sbrisk/erm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace sbrisk {

namespace {

void check_shapes(const Sample& sample, const ClassSpec& cls) {
  validate(cls);
  if (sample.dim() != cls.n) {
    throw std::invalid_argument("dimension mismatch: sample has " + std::to_string(sample.dim()) +
                                " columns, class has n = " + std::to_string(cls.n));
  }
  if (static_cast<std::size_t>(sample.responses.size()) != sample.size()) {
    throw std::invalid_argument("dimension mismatch: responses and design rows differ");
  }
  if (sample.size() == 0) throw std::invalid_argument("sample must contain at least one observation");
  if (!sample.design.allFinite() || !sample.responses.allFinite()) {
    throw std::invalid_argument("sample contains non-finite values");
  }
}

// Squared loss in Gram form: f(t) = t'Gt - 2b't + c.
struct Quadratic {
  Matrix gram;
  Vector linear;
  double constant = 0.0;

  Quadratic(const Sample& s) {
    const double inv_n = 1.0 / static_cast<double>(s.size());
    gram = (s.design.transpose() * s.design) * inv_n;
    linear = (s.design.transpose() * s.responses) * inv_n;
    constant = s.responses.squaredNorm() * inv_n;
  }

  [[nodiscard]] double value(const Vector& t) const {
    return t.dot(gram * t) - 2.0 * linear.dot(t) + constant;
  }
  [[nodiscard]] Vector gradient(const Vector& t) const { return 2.0 * (gram * t - linear); }

  // f(c) - f(x) = d'(G(c + x) - 2b) with d = c - x; accurate when d is tiny,
  // unlike the difference of two rounded objective values. `rounding` is
  // the size of the change that rounding in c alone can produce.
  [[nodiscard]] double change(const Vector& c, const Vector& x, double* rounding) const {
    const Vector d = c - x;
    const Vector g = gram * (c + x) - 2.0 * linear;
    *rounding = 64.0 * std::numeric_limits<double>::epsilon() * (c.norm() + x.norm()) * g.norm();
    return d.dot(g);
  }
};

}  // namespace

double empirical_risk(const Eigen::Ref<const Vector>& t, const Sample& sample) {
  return (sample.design * t - sample.responses).squaredNorm() / static_cast<double>(sample.size());
}

double power_iteration_max_eigenvalue(const Eigen::Ref<const Matrix>& gram) {
  const Eigen::Index n = gram.rows();
  if (n == 0) return 0.0;
  // Deterministic start with no special alignment to the coordinate axes.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector w = gram * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

ErmResult solve_erm(const Sample& sample, const ClassSpec& cls, const ErmOptions& options) {
  check_shapes(sample, cls);
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_erm: tol must be positive");

  const Eigen::Index n = static_cast<Eigen::Index>(cls.n);
  ErmResult result;
  if (cls.radius == 0.0) {
    result.t_hat = Vector::Zero(n);
    result.empirical_risk = empirical_risk(result.t_hat, sample);
    result.converged = true;
    return result;
  }

  const Quadratic f(sample);
  double lip = 2.0 * 1.01 * power_iteration_max_eigenvalue(f.gram);
  const double R = cls.radius;

  result.lipschitz = lip;
  if (lip == 0.0) {
    // Zero design: every feasible point is optimal.
    result.t_hat = Vector::Zero(n);
    result.empirical_risk = empirical_risk(result.t_hat, sample);
    result.converged = true;
    return result;
  }

  auto residual_at = [&](const Vector& t) { return (t - project_l1(t - f.gradient(t) / lip, R)).norm(); };

  Vector x = Vector::Zero(n);
  Vector y = x;
  double momentum = 1.0;
  if (options.record_objective) result.objective_trace.push_back(f.value(x));

  std::size_t it = 0;
  bool plain_step = true;
  double residual = residual_at(x);
  while (residual > options.tol && it < options.max_iterations) {
    ++it;
    Vector candidate = project_l1(y - f.gradient(y) / lip, R);
    double rounding = 0.0;
    const double delta = f.change(candidate, x, &rounding);
    if (delta > rounding) {
      // A plain step can only fail to descend if L underestimates the
      // curvature; otherwise drop the momentum and retry from x.
      if (plain_step) lip *= 1.5;
      y = x;
      momentum = 1.0;
      plain_step = true;
      continue;
    }
    plain_step = false;
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = candidate + ((momentum - 1.0) / next_momentum) * (candidate - x);
    x = std::move(candidate);
    momentum = next_momentum;
    if (options.record_objective) result.objective_trace.push_back(f.value(x));
    residual = residual_at(x);
  }

  result.lipschitz = lip;
  result.t_hat = std::move(x);
  result.iterations = it;
  result.kkt_residual = residual;
  result.converged = residual <= options.tol;
  result.empirical_risk = empirical_risk(result.t_hat, sample);
  return result;
}

double excess_loss(const Eigen::Ref<const Vector>& t, const ClassSpec& cls, const Sample& sample) {
  check_shapes(sample, cls);
  if (t.size() != static_cast<Eigen::Index>(cls.n)) {
    throw std::invalid_argument("excess_loss: dimension mismatch");
  }
  const Vector diff = sample.design * (t - cls.t0);
  const Vector xi = sample.design * cls.t0 - sample.responses;
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  return diff.squaredNorm() * inv_n + 2.0 * xi.dot(diff) * inv_n;
}

Vector brute_force_erm(const Sample& sample, const ClassSpec& cls, const BruteForceOptions& options) {
  check_shapes(sample, cls);
  if (cls.n > 4) throw std::invalid_argument("brute_force_erm: n must be at most 4");
  if (!(options.resolution > 0.0)) throw std::invalid_argument("brute_force_erm: resolution must be positive");
  const int n = static_cast<int>(cls.n);
  const double R = cls.radius;
  if (R == 0.0) return Vector::Zero(n);

  const Quadratic f(sample);
  const auto steps = static_cast<long>(std::floor(R / options.resolution));
  const double h = R / static_cast<double>(steps == 0 ? 1 : steps);
  const long m = steps == 0 ? 1 : steps;

  // Odometer over {-m..m}^n, pruned to the l1 ball.
  std::vector<long> idx(n, -m);
  Vector point(n);
  Vector best = Vector::Zero(n);
  double best_value = f.value(best);
  for (;;) {
    long l1 = 0;
    for (int k = 0; k < n; ++k) l1 += std::abs(idx[k]);
    if (l1 <= m) {
      for (int k = 0; k < n; ++k) point[k] = static_cast<double>(idx[k]) * h;
      const double v = f.value(point);
      if (v < best_value) {
        best_value = v;
        best = point;
      }
    }
    int k = 0;
    while (k < n && idx[k] == m) idx[k++] = -m;
    if (k == n) break;
    ++idx[k];
  }

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(f.gram, Eigen::EigenvaluesOnly);
  const double lip = 2.0 * eig.eigenvalues().maxCoeff();
  if (lip <= 0.0) return best;
  Vector x = best;
  for (std::size_t s = 0; s < options.refinement_steps; ++s) {
    x = project_l1(x - f.gradient(x) / lip, R);
  }
  return x;
}

}  // namespace sbrisk
