#include "sbrisk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "sbrisk/erm.hpp"
#include "sbrisk/parallel.hpp"
#include "sbrisk/stats.hpp"

namespace sbrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

NoiseSpec with_sigma(NoiseSpec noise, double sigma) {
  noise.sigma = sigma;
  if (sigma == 0.0) return NoiseSpec::zero();
  return noise;
}

double noise_level(const NoiseSpec& noise) {
  if (noise.kind == NoiseKind::kZero || noise.sigma == 0.0) return 0.0;
  return l21_norm(noise).value;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNaN;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

ProportionEstimate proportion(std::size_t count, std::size_t trials) {
  ProportionEstimate p;
  p.count = count;
  p.trials = trials;
  p.estimate = static_cast<double>(count) / static_cast<double>(trials);
  p.interval = wilson_interval(count, trials);
  return p;
}

}  // namespace

std::string_view kind_name(TruthKind kind) { return kind == TruthKind::kZero ? "zero" : "spike"; }

TruthKind truth_from_name(std::string_view name) {
  if (name == "zero") return TruthKind::kZero;
  if (name == "spike") return TruthKind::kSpike;
  throw std::invalid_argument("unknown truth '" + std::string(name) + "' (expected zero or spike)");
}

Vector make_truth(TruthKind kind, std::size_t n, double radius) {
  Vector t0 = Vector::Zero(static_cast<Eigen::Index>(n));
  if (kind == TruthKind::kSpike && n > 0) t0[0] = 0.5 * radius;
  return t0;
}

void validate(const SweepConfig& c) {
  if (c.N_grid.empty() || c.n_grid.empty() || c.R_grid.empty() || c.sigma_grid.empty()) {
    throw std::invalid_argument("sweep grids must be nonempty");
  }
  if (c.trials < 20) throw std::invalid_argument("sweep needs at least 20 trials per cell");
  if (!(c.tol > 0.0)) throw std::invalid_argument("sweep tolerance must be positive");
  for (auto N : c.N_grid) {
    if (N == 0) throw std::invalid_argument("sweep N values must be positive");
  }
  for (auto n : c.n_grid) {
    DesignSpec d = c.design;
    d.n = n;
    validate(d);
  }
  for (double R : c.R_grid) {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("sweep R values must be positive");
  }
  for (double s : c.sigma_grid) validate(with_sigma(c.noise, s));
}

nlohmann::json to_json(const SweepConfig& c) {
  return {{"design", to_json(c.design)},
          {"noise", to_json(c.noise)},
          {"N", c.N_grid},
          {"n", c.n_grid},
          {"R", c.R_grid},
          {"sigma", c.sigma_grid},
          {"truth", kind_name(c.truth)},
          {"trials", c.trials},
          {"tol", c.tol},
          {"c1", c.constants.c1},
          {"c2", c.constants.c2},
          {"c3", c.constants.c3},
          {"seed", c.seed}};
}

SweepResult run_persistence_sweep(const SweepConfig& config) {
  validate(config);
  SweepResult result;
  for (auto n : config.n_grid) {
    for (double R : config.R_grid) {
      for (double sigma : config.sigma_grid) {
        for (auto N : config.N_grid) {
          SweepCell cell;
          cell.n = n;
          cell.N = N;
          cell.R = R;
          cell.sigma = sigma;
          cell.trials = config.trials;
          cell.noise_l21 = noise_level(with_sigma(config.noise, sigma));
          result.cells.push_back(std::move(cell));
        }
      }
    }
  }

  const std::size_t per_cell = config.trials;
  const std::size_t total = result.cells.size() * per_cell;
  std::vector<double> errors(total);
  std::vector<char> converged(total);
  parallel_for(total, config.workers, [&](std::size_t task) {
    const SweepCell& cell = result.cells[task / per_cell];
    const std::size_t j = task % per_cell;
    DesignSpec design = config.design;
    design.n = cell.n;
    const ClassSpec cls{cell.n, cell.R, make_truth(config.truth, cell.n, cell.R)};
    const Sample sample = draw_sample(cls, design, with_sigma(config.noise, cell.sigma), cell.N,
                                      trial_seed(config.seed, j));
    // The residual bounds the error only up to 1 / lambda_min of the
    // empirical covariance, so the solve runs 100x below tol.
    ErmOptions opts;
    opts.tol = kSweepResidualFactor * config.tol;
    const ErmResult fit = solve_erm(sample, cls, opts);
    errors[task] = (fit.t_hat - cls.t0).squaredNorm();
    converged[task] = fit.converged ? 1 : 0;
  });

  std::vector<double> ratio_v;
  std::vector<double> ratio_rho;
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    SweepCell& cell = result.cells[c];
    cell.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(c * per_cell),
                       errors.begin() + static_cast<std::ptrdiff_t>((c + 1) * per_cell));
    cell.converged = static_cast<std::size_t>(
        std::count(converged.begin() + static_cast<std::ptrdiff_t>(c * per_cell),
                   converged.begin() + static_cast<std::ptrdiff_t>((c + 1) * per_cell), 1));
    cell.flagged = static_cast<double>(per_cell - cell.converged) > 0.05 * static_cast<double>(per_cell);
    cell.median_error = median(cell.errors);
    cell.q90_error = quantile(cell.errors, 0.9);
    RateInputs in = config.constants;
    in.N = static_cast<double>(cell.N);
    in.n = static_cast<double>(cell.n);
    in.R = cell.R;
    in.sigma = cell.noise_l21;
    cell.rho = rho_N(in);
    cell.v = v1_v2(in);
    for (double e : cell.errors) {
      if (cell.v.max() > 0.0) ratio_v.push_back(e / cell.v.max());
      if (cell.rho.value > 0.0) ratio_rho.push_back(e / cell.rho.value);
    }
  }
  result.fitted_c_v = ratio_v.empty() ? kNaN : quantile(ratio_v, 0.9);
  result.fitted_c_rho = ratio_rho.empty() ? kNaN : quantile(ratio_rho, 0.9);

  // Slopes per (n, R, sigma) group, cells ordered by N within the group.
  std::map<std::tuple<std::size_t, double, double>, std::vector<const SweepCell*>> groups;
  for (const auto& cell : result.cells) groups[{cell.n, cell.R, cell.sigma}].push_back(&cell);
  for (const auto& [key, cells] : groups) {
    SlopeFit fit;
    std::tie(fit.n, fit.R, fit.sigma) = key;
    std::vector<double> x, med, vmax, rho;
    std::vector<double> x1, m1, x2, m2;
    for (const SweepCell* c : cells) {
      const double N = static_cast<double>(c->N);
      x.push_back(N);
      med.push_back(c->median_error);
      vmax.push_back(c->v.max());
      rho.push_back(c->rho.value);
      if (c->v.v2_branch == 1) {
        x1.push_back(N);
        m1.push_back(c->median_error);
      } else {
        x2.push_back(N);
        m2.push_back(c->median_error);
      }
    }
    fit.empirical = slope_of(x, med);
    fit.predicted_v = slope_of(x, vmax);
    fit.predicted_rho = slope_of(x, rho);
    fit.v2_branch1 = slope_of(x1, m1);
    fit.v2_branch2 = slope_of(x2, m2);
    result.slopes.push_back(fit);
  }
  return result;
}

Report to_report(const SweepResult& result, const SweepConfig& config) {
  Report report;
  report.kind = "persistence";
  report.columns = {"n",   "N",   "R",         "sigma",     "noise_l21", "trials", "converged", "median_error",
                    "q90_error", "rho_N", "rho_branch", "v1", "v2", "v_max", "v2_branch", "flagged"};
  for (const auto& c : result.cells) {
    report.add_row({c.n, c.N, c.R, c.sigma, c.noise_l21, c.trials, c.converged, c.median_error, c.q90_error,
                    c.rho.value, c.rho.branch, c.v.v1, c.v.v2, c.v.max(), c.v.v2_branch, c.flagged});
  }
  report.config = to_json(config);
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& s : result.slopes) {
    slopes.push_back({{"n", s.n},
                      {"R", s.R},
                      {"sigma", s.sigma},
                      {"empirical", json_number(s.empirical)},
                      {"predicted_v", json_number(s.predicted_v)},
                      {"predicted_rho", json_number(s.predicted_rho)},
                      {"v2_branch1", json_number(s.v2_branch1)},
                      {"v2_branch2", json_number(s.v2_branch2)}});
  }
  const auto flagged = std::count_if(result.cells.begin(), result.cells.end(), [](const auto& c) { return c.flagged; });
  report.summary = {{"fitted_c_v", json_number(result.fitted_c_v)},
                    {"fitted_c_rho", json_number(result.fitted_c_rho)},
                    {"slopes", std::move(slopes)},
                    {"flagged_cells", flagged}};
  return report;
}

CounterexampleResult run_counterexample(const CounterexampleConfig& config) {
  const CounterexampleSpec spec{config.N};
  validate(spec);
  if (config.trials == 0) throw std::invalid_argument("counterexample needs at least one trial");
  CounterexampleResult out;
  out.N = config.N;
  out.second_moment = counterexample_second_moment(spec);

  std::vector<double> sums(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t j) {
    Engine eng = make_engine(config.seed, StreamTag::kCounterexample, j);
    double s = 0.0;
    for (std::size_t i = 0; i < config.N; ++i) {
      const double z = draw_counterexample(spec, eng);
      s += z * z;
    }
    sums[j] = s;
  });

  const double n = static_cast<double>(config.N);
  const double ez2 = out.second_moment;
  std::size_t two_sided = 0;
  std::size_t one_sided = 0;
  for (double s : sums) {
    const double pn = s / n;
    if (std::abs(pn - ez2) > ez2 / 2.0) ++two_sided;
    if (pn < ez2 / 2.0) ++one_sided;
  }
  out.empirical_second_moment = pairwise_sum(sums) / (n * static_cast<double>(config.trials));
  out.two_sided = proportion(two_sided, config.trials);
  out.one_sided = proportion(one_sided, config.trials);
  return out;
}

Report to_report(const CounterexampleResult& r, const CounterexampleConfig& config) {
  Report report;
  report.kind = "counterexample";
  report.columns = {"statistic", "estimate", "lower", "upper", "reference", "relation"};
  const double n = static_cast<double>(r.N);
  report.add_row({"two_sided_deviation", r.two_sided.estimate, r.two_sided.interval.lower,
                  r.two_sided.interval.upper, 1.0 / (4.0 * n), ">="});
  report.add_row({"one_sided_failure", r.one_sided.estimate, r.one_sided.interval.lower,
                  r.one_sided.interval.upper, 1e-3, "<="});
  report.add_row({"second_moment", r.empirical_second_moment, nullptr, nullptr, r.second_moment, "~"});
  report.config = {{"N", config.N}, {"trials", config.trials}, {"seed", config.seed}};
  report.summary = {{"two_sided_count", r.two_sided.count},
                    {"one_sided_count", r.one_sided.count},
                    {"second_moment_relative_error",
                     std::abs(r.empirical_second_moment - r.second_moment) / r.second_moment}};
  return report;
}

void validate(const MainTheoremConfig& c) {
  validate(c.design);
  validate(c.noise);
  if (c.N == 0) throw std::invalid_argument("verify-main: N must be positive");
  if (!(c.R > 0.0)) throw std::invalid_argument("verify-main: R must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw std::invalid_argument("verify-main: delta must lie in (0, 1)");
  if (c.trials == 0 || c.beta_trials == 0) throw std::invalid_argument("verify-main: trial counts must be positive");
  if (c.tau_grid.empty()) throw std::invalid_argument("verify-main: tau grid is empty");
}

nlohmann::json to_json(const MainTheoremConfig& c) {
  return {{"design", to_json(c.design)},
          {"noise", to_json(c.noise)},
          {"n", c.design.n},
          {"N", c.N},
          {"R", c.R},
          {"truth", kind_name(c.truth)},
          {"delta", c.delta},
          {"trials", c.trials},
          {"beta_trials", c.beta_trials},
          {"alpha_trials", c.alpha_trials},
          {"tau_grid", c.tau_grid},
          {"directions", c.directions.random_directions},
          {"draws", c.directions.draws},
          {"tol", c.tol},
          {"seed", c.seed}};
}

MainTheoremResult verify_main_theorem(const MainTheoremConfig& config) {
  validate(config);
  MainTheoremResult out;
  const ClassSpec cls{config.design.n, config.R, make_truth(config.truth, config.design.n, config.R)};

  DirectionOptions dirs = config.directions;
  dirs.seed = derive_seed(config.seed, StreamTag::kGeneric, 1);
  dirs.workers = config.workers;
  out.tau = choose_tau(config.design, config.tau_grid, dirs);
  out.flags.insert(out.flags.end(), out.tau.flags.begin(), out.tau.flags.end());
  const double q = out.tau.q_hat;
  if (q <= 0.0) {
    out.flags.emplace_back("no_small_ball");
    return out;
  }
  out.gamma_alpha = out.tau.tau * out.tau.tau * q / 16.0;
  out.gamma_beta = out.tau.tau * q / 16.0;

  LocalizedSupConfig mc{cls, config.design, config.noise, config.N, config.beta_trials,
                        derive_seed(config.seed, StreamTag::kGeneric, 2), config.workers};
  out.beta = beta_star(mc, out.gamma_beta);
  const double alpha_delta = config.delta / 4.0;
  mc.trials = config.alpha_trials > 0 ? config.alpha_trials
                                      : static_cast<std::size_t>(std::ceil(50.0 / alpha_delta));
  mc.seed = derive_seed(config.seed, StreamTag::kGeneric, 3);
  out.alpha = alpha_star(mc, out.gamma_alpha, alpha_delta);
  for (const auto* est : {&out.alpha, &out.beta}) {
    for (const auto& f : est->flags) out.flags.push_back(std::string(kind_name(est->kind)) + ":" + f);
  }
  out.bound = 2.0 * std::max(out.alpha.value, out.beta.value);

  const std::uint64_t verify_seed = derive_seed(config.seed, StreamTag::kGeneric, 4);
  out.errors.resize(config.trials);
  parallel_for(config.trials, config.workers, [&](std::size_t j) {
    const Sample sample = draw_sample(cls, config.design, config.noise, config.N, trial_seed(verify_seed, j));
    ErmOptions opts;
    opts.tol = config.tol;
    out.errors[j] = (solve_erm(sample, cls, opts).t_hat - cls.t0).norm();
  });
  out.covered = static_cast<std::size_t>(
      std::count_if(out.errors.begin(), out.errors.end(), [&](double e) { return e <= out.bound; }));
  out.frequency = static_cast<double>(out.covered) / static_cast<double>(config.trials);
  const double n_rows = static_cast<double>(config.N);
  out.required = 1.0 - config.delta - 2.0 * std::exp(-n_rows * q * q / 2.0) - 0.05;
  out.passed = out.frequency >= out.required;
  return out;
}

Report to_report(const MainTheoremResult& r, const MainTheoremConfig& config) {
  Report report;
  report.kind = "verify-main";
  report.columns = {"trial", "error", "bound", "covered"};
  for (std::size_t j = 0; j < r.errors.size(); ++j) {
    report.add_row({j, r.errors[j], r.bound, r.errors[j] <= r.bound});
  }
  report.config = to_json(config);
  report.summary = {{"tau", r.tau.tau},
                    {"q_hat", r.tau.q_hat},
                    {"gamma_alpha", r.gamma_alpha},
                    {"gamma_beta", r.gamma_beta},
                    {"alpha", to_json(r.alpha)},
                    {"beta", to_json(r.beta)},
                    {"bound", r.bound},
                    {"covered", r.covered},
                    {"frequency", r.frequency},
                    {"required", r.required},
                    {"passed", r.passed},
                    {"flags", r.flags}};
  return report;
}

}  // namespace sbrisk
