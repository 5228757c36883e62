#include "sbrisk/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbrisk/empirical_process.hpp"
#include "sbrisk/parallel.hpp"
#include "sbrisk/stats.hpp"

namespace sbrisk {

namespace {

constexpr std::size_t kMinDraws = 1000;

struct Direction {
  Vector t;                           // unit vector
  std::vector<Eigen::Index> support;  // nonzero coordinates
  bool structured = false;
};

Direction sparse_direction(Eigen::Index n, std::vector<std::pair<Eigen::Index, double>> entries) {
  Direction d;
  d.t = Vector::Zero(n);
  for (const auto& [i, v] : entries) {
    d.t[i] = v;
    d.support.push_back(i);
  }
  d.t.normalize();
  d.structured = true;
  return d;
}

Vector random_unit(Eigen::Index n, Engine& eng) {
  std::normal_distribution<double> normal;
  Vector t(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) t[i] = normal(eng);
    const double norm = t.norm();
    if (norm > 0.0) return t / norm;
  }
}

std::vector<Direction> build_directions(std::size_t dim, const DirectionOptions& options) {
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Direction> dirs;
  for (std::size_t d = 0; d < options.random_directions; ++d) {
    Engine eng = make_engine(options.seed, StreamTag::kDirections, d);
    Direction dir;
    dir.t = random_unit(n, eng);
    dir.support.resize(dim);
    for (Eigen::Index i = 0; i < n; ++i) dir.support[static_cast<std::size_t>(i)] = i;
    dirs.push_back(std::move(dir));
  }
  if (options.include_basis) {
    for (Eigen::Index i = 0; i < n; ++i) dirs.push_back(sparse_direction(n, {{i, 1.0}}));
  }
  if (options.include_pairs) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      dirs.push_back(sparse_direction(n, {{i, 1.0}, {i + 1, 1.0}}));
      dirs.push_back(sparse_direction(n, {{i, 1.0}, {i + 1, -1.0}}));
    }
  }
  if (dirs.empty()) throw std::invalid_argument("direction set is empty");
  return dirs;
}

// |<X, t>| for `draws` fresh design vectors; only the support of t is sampled.
std::vector<double> abs_projections(const DesignSpec& design, const Direction& dir, std::size_t draws, Engine& eng) {
  CoordinateSampler coordinate(design);
  std::vector<double> out(draws);
  for (std::size_t k = 0; k < draws; ++k) {
    double dot = 0.0;
    for (Eigen::Index i : dir.support) dot += dir.t[i] * coordinate(eng);
    out[k] = std::abs(dot);
  }
  return out;
}

std::vector<std::vector<double>> all_projections(const DesignSpec& design, const std::vector<Direction>& dirs,
                                                 const DirectionOptions& options) {
  std::vector<std::vector<double>> out(dirs.size());
  parallel_for(dirs.size(), options.workers, [&](std::size_t d) {
    Engine eng = make_engine(options.seed, StreamTag::kProbes, d);
    out[d] = abs_projections(design, dirs[d], options.draws, eng);
  });
  return out;
}

double lp_norm(const std::vector<double>& abs_values, double p) {
  std::vector<double> powered(abs_values.size());
  if (p == 2.0) {
    for (std::size_t k = 0; k < abs_values.size(); ++k) powered[k] = abs_values[k] * abs_values[k];
    return std::sqrt(mean(powered));
  }
  if (p == 1.0) return mean(abs_values);
  for (std::size_t k = 0; k < abs_values.size(); ++k) powered[k] = std::pow(abs_values[k], p);
  return std::pow(mean(powered), 1.0 / p);
}

void check_direction_options(const DesignSpec& design, const DirectionOptions& options) {
  validate(design);
  if (options.draws < kMinDraws) {
    throw std::invalid_argument("at least " + std::to_string(kMinDraws) + " draws per direction are required");
  }
}

}  // namespace

nlohmann::json to_json(const SmallBallEstimate& e) {
  return {{"u", e.u},
          {"q_hat", e.q_hat},
          {"q_random", e.q_random},
          {"q_structured", e.q_structured},
          {"directions", e.directions},
          {"draws", e.draws},
          {"stderr", e.std_error},
          {"flags", e.flags}};
}

SmallBallProfile::SmallBallProfile(const DesignSpec& design, const DirectionOptions& options) {
  check_direction_options(design, options);
  const std::vector<Direction> dirs = build_directions(design.n, options);
  projections_ = all_projections(design, dirs, options);
  for (auto& p : projections_) std::sort(p.begin(), p.end());
  structured_.reserve(dirs.size());
  for (const auto& d : dirs) structured_.push_back(d.structured);
  draws_ = options.draws;
}

SmallBallEstimate SmallBallProfile::estimate(double u) const {
  if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("estimate_Q: u must be finite and >= 0");
  SmallBallEstimate e;
  e.u = u;
  e.directions = projections_.size();
  e.draws = draws_;
  bool any_random = false;
  bool any_structured = false;
  for (std::size_t d = 0; d < projections_.size(); ++d) {
    const auto& p = projections_[d];
    const auto below = static_cast<std::size_t>(std::lower_bound(p.begin(), p.end(), u) - p.begin());
    const double q = static_cast<double>(p.size() - below) / static_cast<double>(p.size());
    if (structured_[d]) {
      e.q_structured = std::min(e.q_structured, q);
      any_structured = true;
    } else {
      e.q_random = std::min(e.q_random, q);
      any_random = true;
    }
    if (q < e.q_hat) e.q_hat = q;
  }
  e.std_error = std::sqrt(e.q_hat * (1.0 - e.q_hat) / static_cast<double>(draws_));
  if (any_random && any_structured && e.q_structured < e.q_random) e.flags.emplace_back("structured_undercut");
  return e;
}

SmallBallEstimate estimate_Q(const DesignSpec& design, double u, const DirectionOptions& options) {
  return SmallBallProfile(design, options).estimate(u);
}

double direction_small_ball(const DesignSpec& design, const Eigen::Ref<const Vector>& t, double u, std::size_t draws,
                            std::uint64_t seed) {
  validate(design);
  if (static_cast<std::size_t>(t.size()) != design.n) throw std::invalid_argument("direction has the wrong length");
  require_finite(t, "direction");
  const double norm = t.norm();
  if (norm == 0.0) throw std::invalid_argument("direction must be nonzero");
  if (draws < kMinDraws) throw std::invalid_argument("at least 1000 draws are required");
  Direction dir;
  dir.t = t / norm;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0) dir.support.push_back(i);
  }
  Engine eng = make_engine(seed, StreamTag::kProbes);
  const std::vector<double> p = abs_projections(design, dir, draws, eng);
  const auto hits = std::count_if(p.begin(), p.end(), [&](double v) { return v >= u; });
  return static_cast<double>(hits) / static_cast<double>(draws);
}

double paley_zygmund_Q(double kappa2, double p, double u) {
  if (!(p > 2.0)) throw std::invalid_argument("paley_zygmund_Q: p must exceed 2");
  if (!(kappa2 >= 1.0)) throw std::invalid_argument("paley_zygmund_Q: kappa2 must be >= 1");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("paley_zygmund_Q: u must lie in [0, 1]");
  return std::pow((1.0 - u * u) / (kappa2 * kappa2), p / (p - 2.0));
}

MomentRatio moment_ratio_p2(const DesignSpec& design, double p, const DirectionOptions& options) {
  check_direction_options(design, options);
  if (!(p >= 2.0)) throw std::invalid_argument("moment_ratio_p2: p must be >= 2");
  const std::vector<Direction> dirs = build_directions(design.n, options);
  const auto proj = all_projections(design, dirs, options);
  MomentRatio out;
  for (const auto& values : proj) {
    const double l2 = lp_norm(values, 2.0);
    if (l2 == 0.0) continue;
    out.value = std::max(out.value, p == 2.0 ? l2 / l2 : lp_norm(values, p) / l2);
  }
  out.coordinate_norm = std::pow(coordinate_abs_moment(design, p), 1.0 / p);
  out.bound = kMomentRatioConstant * std::sqrt(p) * out.coordinate_norm;
  out.within_bound = out.value <= out.bound;
  return out;
}

double l2_l1_ratio(const DesignSpec& design, const DirectionOptions& options) {
  check_direction_options(design, options);
  const std::vector<Direction> dirs = build_directions(design.n, options);
  const auto proj = all_projections(design, dirs, options);
  double out = 0.0;
  for (const auto& values : proj) {
    const double l1 = lp_norm(values, 1.0);
    if (l1 > 0.0) out = std::max(out, lp_norm(values, 2.0) / l1);
  }
  return out;
}

SmallBallVerification verify_empirical_smallball(const DesignSpec& design, const ClassSpec& cls, double tau, double r,
                                                 std::size_t N, std::size_t trials,
                                                 const SmallBallVerifyOptions& options) {
  validate(design);
  validate(cls);
  if (design.n != cls.n) throw std::invalid_argument("design and class dimensions differ");
  if (!(tau >= 0.0)) throw std::invalid_argument("verify_empirical_smallball: tau must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("verify_empirical_smallball: r must be positive");
  if (r > 2.0 * cls.radius * (1.0 + kRadiusSlack)) {
    throw std::invalid_argument("verify_empirical_smallball: r exceeds the diameter 2R of the class");
  }
  if (N == 0 || trials == 0) throw std::invalid_argument("verify_empirical_smallball: N and trials must be positive");
  if (options.probes < 100) throw std::invalid_argument("verify_empirical_smallball: at least 100 probes are required");

  SmallBallVerification out;
  out.tau = tau;
  out.r = r;
  out.probes = options.probes;
  out.q_hat = options.q_hat >= 0.0 ? options.q_hat : estimate_Q(design, 2.0 * tau, options.directions).q_hat;
  const double n_rows = static_cast<double>(N);
  out.threshold = n_rows * out.q_hat / 4.0;
  out.required = 1.0 - 2.0 * std::exp(-n_rows * out.q_hat * out.q_hat / 2.0) - 0.05;

  // Probe directions have |t|_1 <= 2R at |t|_2 = r: keep the k largest
  // coordinates of a random direction with k <= (2R / r)^2.
  const auto n = static_cast<Eigen::Index>(cls.n);
  const double ratio = 2.0 * cls.radius / r;
  const auto k_max = static_cast<Eigen::Index>(std::clamp(std::floor(ratio * ratio * (1.0 + 1e-12)), 1.0,
                                                          static_cast<double>(n)));

  out.rows.resize(trials);
  parallel_for(trials, options.workers, [&](std::size_t j) {
    const std::uint64_t seed = trial_seed(options.seed, j);
    const Matrix x = sample_design(design, N, seed);
    Engine eng = make_engine(seed, StreamTag::kProbes);
    std::size_t min_count = N;
    auto probe = [&](const Vector& unit) {
      const Vector h = r * unit;
      const double level = tau * h.norm();
      const Vector values = x * h;
      const auto count = static_cast<std::size_t>((values.array().abs() >= level).count());
      min_count = std::min(min_count, count);
    };
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < n && used < options.probes / 2; ++i, ++used) probe(Vector::Unit(n, i));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    while (used < options.probes) {
      Vector t = random_unit(n, eng);
      if (k_max < n) {
        for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::nth_element(order.begin(), order.begin() + (k_max - 1), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return std::abs(t[a]) > std::abs(t[b]); });
        Vector sparse = Vector::Zero(n);
        for (Eigen::Index q = 0; q < k_max; ++q) sparse[order[static_cast<std::size_t>(q)]] = t[order[static_cast<std::size_t>(q)]];
        t = sparse.normalized();
      }
      probe(t);
      ++used;
    }
    out.rows[j] = {j, min_count, out.threshold, static_cast<double>(min_count) >= out.threshold};
  });

  const auto passes = std::count_if(out.rows.begin(), out.rows.end(), [](const auto& row) { return row.pass; });
  out.success_fraction = static_cast<double>(passes) / static_cast<double>(trials);
  out.passed = out.success_fraction >= out.required;
  return out;
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid(20);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = 0.05 * std::pow(20.0, static_cast<double>(k) / 19.0);
  }
  grid.back() = 1.0;
  return grid;
}

TauChoice choose_tau(const DesignSpec& design, const std::vector<double>& tau_grid, const DirectionOptions& options) {
  if (tau_grid.empty()) throw std::invalid_argument("choose_tau: empty grid");
  for (double tau : tau_grid) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("choose_tau: grid values must be positive");
  }
  const SmallBallProfile profile(design, options);
  TauChoice out;
  out.grid = tau_grid;
  double best = -1.0;
  for (double tau : tau_grid) {
    const double q = profile.estimate(2.0 * tau).q_hat;
    out.q_values.push_back(q);
    const double crit = tau * tau * q;
    if (crit > best) {
      best = crit;
      out.tau = tau;
      out.q_hat = q;
    }
  }
  if (best <= 0.0) out.flags.emplace_back("no_small_ball");
  out.gamma = out.tau * out.tau * out.q_hat / 16.0;
  return out;
}

}  // namespace sbrisk
