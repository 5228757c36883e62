#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "sbrisk/empirical_process.hpp"
#include "sbrisk/erm.hpp"
#include "sbrisk/experiments.hpp"
#include "sbrisk/parallel.hpp"
#include "sbrisk/rates.hpp"
#include "sbrisk/report.hpp"
#include "sbrisk/smallball.hpp"
#include "sbrisk/version_space.hpp"

namespace sbrisk::cli {

using nlohmann::json;

namespace {

// Keys whose value is a distribution record, replaced whole on merge.
bool is_record_key(const std::string& key) { return key == "design" || key == "noise"; }

std::string type_label(const json& j) {
  if (j.is_number()) return "number";
  if (j.is_boolean()) return "boolean";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Outcome {
  Report report;
  std::string summary;
  bool statistical_failure = false;
};

struct Context {
  json config;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 0;
};

// Typed accessors: the merge step has already checked types against the
// defaults, so these only enforce ranges.
std::size_t count_at(const json& c, const char* key) {
  const double v = c.at(key).get<double>();
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

double real_at(const json& c, const char* key) { return c.at(key).get<double>(); }

std::vector<std::size_t> counts_at(const json& c, const char* key) {
  std::vector<std::size_t> out;
  for (const auto& v : c.at(key)) {
    if (!v.is_number() || v.get<double>() < 1.0 || v.get<double>() != std::floor(v.get<double>())) {
      throw ConfigError(std::string("'") + key + "' must hold positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::vector<double> reals_at(const json& c, const char* key) {
  std::vector<double> out;
  for (const auto& v : c.at(key)) {
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ClassSpec class_at(const json& c, std::size_t n) {
  const double R = real_at(c, "R");
  return ClassSpec{n, R, make_truth(truth_from_name(c.at("truth").get<std::string>()), n, R)};
}

RateInputs rate_constants(const json& c) {
  RateInputs in;
  in.c1 = real_at(c, "c1");
  in.c2 = real_at(c, "c2");
  in.c3 = real_at(c, "c3");
  return in;
}

DirectionOptions direction_options(const json& c, std::uint64_t seed, std::size_t workers) {
  DirectionOptions d;
  d.random_directions = count_at(c, "directions");
  d.draws = count_at(c, "draws");
  d.seed = seed;
  d.workers = workers;
  return d;
}

Outcome run_erm(const Context& ctx) {
  const json& c = ctx.config;
  const std::size_t n = count_at(c, "n");
  const ClassSpec cls = class_at(c, n);
  const DesignSpec design = design_from_json(c.at("design"), n);
  const NoiseSpec noise = noise_from_json(c.at("noise"));
  const Sample sample = draw_sample(cls, design, noise, count_at(c, "N"), ctx.seed);
  ErmOptions opts;
  opts.tol = real_at(c, "tol");
  opts.max_iterations = count_at(c, "max_iterations");
  const ErmResult fit = solve_erm(sample, cls, opts);

  Outcome o;
  o.report.kind = "erm";
  o.report.columns = {"coordinate", "t_hat", "t0"};
  for (Eigen::Index i = 0; i < fit.t_hat.size(); ++i) o.report.add_row({i, fit.t_hat[i], cls.t0[i]});
  const double err = (fit.t_hat - cls.t0).norm();
  o.report.summary = {{"empirical_risk", fit.empirical_risk}, {"iterations", fit.iterations},
                      {"kkt_residual", fit.kkt_residual},     {"converged", fit.converged},
                      {"lipschitz", fit.lipschitz},           {"excess_loss", excess_loss(fit.t_hat, cls, sample)},
                      {"error_l2", err}};
  o.summary = "erm: risk=" + fmt(fit.empirical_risk) + " error_l2=" + fmt(err) + " iterations=" +
              std::to_string(fit.iterations) + (fit.converged ? " converged" : " NOT converged");
  o.statistical_failure = !fit.converged;
  return o;
}

Outcome fixed_point_outcome(const FixedPointEstimate& e) {
  Outcome o;
  o.report.kind = std::string(kind_name(e.kind));
  o.report.columns = {"kind", "value", "lower", "upper", "trials", "stderr", "flags"};
  std::string flags;
  for (const auto& f : e.flags) flags += (flags.empty() ? "" : ";") + f;
  o.report.add_row({std::string(kind_name(e.kind)), e.value, e.lower, e.upper, e.trials, e.std_error, flags});
  o.report.summary = to_json(e);
  o.summary = std::string(kind_name(e.kind)) + ": value=" + fmt(e.value) + " bracket=[" + fmt(e.lower) + ", " +
              fmt(e.upper) + "] trials=" + std::to_string(e.trials) + (flags.empty() ? "" : " flags=" + flags);
  return o;
}

LocalizedSupConfig localized_config(const Context& ctx, bool with_noise) {
  const json& c = ctx.config;
  const std::size_t n = count_at(c, "n");
  LocalizedSupConfig mc;
  mc.cls = class_at(c, n);
  mc.design = design_from_json(c.at("design"), n);
  mc.noise = with_noise ? noise_from_json(c.at("noise")) : NoiseSpec::zero();
  mc.N = count_at(c, "N");
  mc.trials = count_at(c, "trials");
  mc.seed = ctx.seed;
  mc.workers = ctx.workers;
  return mc;
}

Outcome run_beta_like(const Context& ctx, bool kstar) {
  const json& c = ctx.config;
  FixedPointOptions opts;
  opts.r_lo = real_at(c, "r_lo");
  opts.r_hi = real_at(c, "r_hi");
  opts.relative_width = real_at(c, "relative_width");
  const LocalizedSupConfig mc = localized_config(ctx, false);
  const double gamma = real_at(c, "gamma");
  return fixed_point_outcome(kstar ? k_star(mc, gamma, opts) : beta_star(mc, gamma, opts));
}

Outcome run_alpha(const Context& ctx) {
  const json& c = ctx.config;
  AlphaOptions opts;
  opts.s_min = real_at(c, "s_min");
  opts.s_max = real_at(c, "s_max");
  opts.ratio = real_at(c, "ratio");
  return fixed_point_outcome(alpha_star(localized_config(ctx, true), real_at(c, "gamma"), real_at(c, "delta"), opts));
}

Outcome run_smallball(const Context& ctx) {
  const json& c = ctx.config;
  const std::size_t n = count_at(c, "n");
  const DesignSpec design = design_from_json(c.at("design"), n);
  const std::string mode = c.at("mode").get<std::string>();
  const DirectionOptions dirs = direction_options(c, derive_seed(ctx.seed, StreamTag::kGeneric, 1), ctx.workers);
  Outcome o;
  if (mode == "estimate") {
    const SmallBallProfile profile(design, dirs);
    o.report.kind = "smallball";
    o.report.columns = {"u", "q_hat", "q_random", "q_structured", "stderr", "flags"};
    for (double u : reals_at(c, "u")) {
      const SmallBallEstimate e = profile.estimate(u);
      o.report.add_row({u, e.q_hat, e.q_random, e.q_structured, e.std_error,
                        e.flags.empty() ? std::string() : e.flags.front()});
    }
    const TauChoice tau = choose_tau(design, default_tau_grid(), dirs);
    o.report.summary = {{"tau", tau.tau}, {"q_hat_2tau", tau.q_hat}, {"gamma", tau.gamma}, {"flags", tau.flags}};
    o.summary = "smallball: tau=" + fmt(tau.tau) + " Q(2tau)=" + fmt(tau.q_hat) + " gamma=" + fmt(tau.gamma);
    return o;
  }
  if (mode != "verify") throw ConfigError("'mode' must be \"estimate\" or \"verify\"");
  const ClassSpec cls = class_at(c, n);
  double tau = real_at(c, "tau");
  if (tau <= 0.0) tau = choose_tau(design, default_tau_grid(), dirs).tau;
  SmallBallVerifyOptions opts;
  opts.probes = count_at(c, "probes");
  opts.directions = dirs;
  opts.seed = derive_seed(ctx.seed, StreamTag::kGeneric, 2);
  opts.workers = ctx.workers;
  const SmallBallVerification v =
      verify_empirical_smallball(design, cls, tau, real_at(c, "r"), count_at(c, "N"), count_at(c, "trials"), opts);
  o.report.kind = "smallball-verify";
  o.report.columns = {"trial", "min_count", "threshold", "pass"};
  for (const auto& row : v.rows) o.report.add_row({row.trial, row.min_count, row.threshold, row.pass});
  o.report.summary = {{"tau", v.tau},         {"r", v.r},
                      {"q_hat", v.q_hat},     {"threshold", v.threshold},
                      {"success_fraction", v.success_fraction}, {"required", v.required},
                      {"passed", v.passed}};
  o.summary = "smallball verify: success=" + fmt(v.success_fraction) + " required=" + fmt(v.required) +
              (v.passed ? " PASS" : " FAIL");
  o.statistical_failure = !v.passed;
  return o;
}

Outcome run_version_space(const Context& ctx) {
  const json& c = ctx.config;
  const std::size_t n = count_at(c, "n");
  const ClassSpec cls = class_at(c, n);
  const DesignSpec design = design_from_json(c.at("design"), n);
  const std::size_t N = count_at(c, "N");
  const std::size_t trials = count_at(c, "trials");
  if (trials == 0) throw ConfigError("'trials' must be positive");
  std::vector<VersionSpaceProbe> probes(trials);
  parallel_for(trials, ctx.workers, [&](std::size_t j) {
    const std::uint64_t seed = trial_seed(ctx.seed, j);
    VersionSpaceOptions opts;
    opts.probes = count_at(c, "probes");
    opts.sparse_probes = count_at(c, "sparse_probes");
    opts.seed = seed;
    probes[j] = version_diameter(sample_design(design, N, seed), cls, opts);
  });
  Outcome o;
  o.report.kind = "version-space";
  o.report.columns = {"trial", "radius_lb", "diameter_lb", "nullspace_dim", "directions"};
  double largest = 0.0;
  for (std::size_t j = 0; j < trials; ++j) {
    const auto& p = probes[j];
    o.report.add_row({j, p.radius_lb, 2.0 * p.radius_lb, p.nullspace_dim, p.directions});
    largest = std::max(largest, p.radius_lb);
  }
  o.report.summary = {{"max_radius_lb", largest}};
  o.summary = "version-space: max radius_lb=" + fmt(largest) + " over " + std::to_string(trials) + " trials";
  return o;
}

Outcome run_rates(const Context& ctx) {
  const json& c = ctx.config;
  RateInputs in;
  in.N = real_at(c, "N");
  in.n = real_at(c, "n");
  in.R = real_at(c, "R");
  in.sigma = real_at(c, "sigma");
  in.c1 = real_at(c, "c1");
  in.c2 = real_at(c, "c2");
  in.c3 = real_at(c, "c3");
  const RhoRate rho = rho_N(in);
  const VRates v = v1_v2(in);
  Outcome o;
  o.report.kind = "rates";
  o.report.columns = {"quantity", "value", "branch"};
  o.report.add_row({"rho_N", rho.value, rho.branch});
  o.report.add_row({"v1", v.v1, v.v1_branch});
  o.report.add_row({"v2", v.v2, v.v2_branch});
  o.report.add_row({"exponent", v.exponent, nullptr});
  const std::size_t d = count_at(c, "d");
  if (d > 0) {
    o.report.add_row({"lemma_dsum_bound",
                      lemma_dsum_bound(static_cast<std::size_t>(in.n), d, real_at(c, "kappa"), real_at(c, "C")),
                      nullptr});
  }
  std::vector<std::string> warnings = rho.warnings;
  warnings.insert(warnings.end(), v.warnings.begin(), v.warnings.end());
  o.report.summary = {{"rho_N", to_json(rho)}, {"v", to_json(v)}, {"warnings", warnings}};
  o.summary = "rates: rho_N=" + fmt(rho.value) + " v1=" + fmt(v.v1) + " v2=" + fmt(v.v2) +
              " max(v1,v2)=" + fmt(v.max());
  return o;
}

Outcome run_persistence(const Context& ctx) {
  const json& c = ctx.config;
  SweepConfig s;
  s.n_grid = counts_at(c, "n");
  if (s.n_grid.empty()) throw ConfigError("'n' must be nonempty");
  s.design = design_from_json(c.at("design"), s.n_grid.front());
  s.noise = noise_from_json(c.at("noise"));
  s.N_grid = counts_at(c, "N");
  s.R_grid = reals_at(c, "R");
  s.sigma_grid = reals_at(c, "sigma");
  s.truth = truth_from_name(c.at("truth").get<std::string>());
  s.trials = count_at(c, "trials");
  s.tol = real_at(c, "tol");
  s.constants = rate_constants(c);
  s.seed = ctx.seed;
  s.workers = ctx.workers;
  const SweepResult r = run_persistence_sweep(s);
  Outcome o;
  o.report = to_report(r, s);
  std::string slopes;
  for (const auto& f : r.slopes) slopes += " slope(sigma=" + fmt(f.sigma) + ")=" + fmt(f.empirical);
  o.summary = "persistence: " + std::to_string(r.cells.size()) + " cells, fitted c=" + fmt(r.fitted_c_v) + slopes;
  o.statistical_failure = o.report.summary.at("flagged_cells").get<long>() > 0;
  return o;
}

Outcome run_counterexample_cmd(const Context& ctx) {
  const json& c = ctx.config;
  CounterexampleConfig cfg;
  cfg.N = count_at(c, "N");
  cfg.trials = count_at(c, "trials");
  cfg.seed = ctx.seed;
  cfg.workers = ctx.workers;
  const CounterexampleResult r = run_counterexample(cfg);
  Outcome o;
  o.report = to_report(r, cfg);
  const double n = static_cast<double>(r.N);
  o.summary = "counterexample: two_sided=" + fmt(r.two_sided.estimate) + " [" + fmt(r.two_sided.interval.lower) +
              ", " + fmt(r.two_sided.interval.upper) + "] one_sided=" + fmt(r.one_sided.estimate) + " [" +
              fmt(r.one_sided.interval.lower) + ", " + fmt(r.one_sided.interval.upper) + "] EZ2=" +
              fmt(r.empirical_second_moment) + " (exact " + fmt(r.second_moment) + ")";
  o.statistical_failure = r.one_sided.estimate > 1e-3 || r.two_sided.estimate < 1.0 / (4.0 * n);
  return o;
}

Outcome run_verify_main(const Context& ctx) {
  const json& c = ctx.config;
  MainTheoremConfig m;
  const std::size_t n = count_at(c, "n");
  m.design = design_from_json(c.at("design"), n);
  m.noise = noise_from_json(c.at("noise"));
  m.N = count_at(c, "N");
  m.R = real_at(c, "R");
  m.truth = truth_from_name(c.at("truth").get<std::string>());
  m.delta = real_at(c, "delta");
  m.trials = count_at(c, "trials");
  m.beta_trials = count_at(c, "beta_trials");
  m.alpha_trials = count_at(c, "alpha_trials");
  m.directions.random_directions = count_at(c, "directions");
  m.directions.draws = count_at(c, "draws");
  m.tol = real_at(c, "tol");
  m.seed = ctx.seed;
  m.workers = ctx.workers;
  const MainTheoremResult r = verify_main_theorem(m);
  Outcome o;
  o.report = to_report(r, m);
  o.summary = "verify-main: frequency=" + fmt(r.frequency) + " required=" + fmt(r.required) + " bound=" +
              fmt(r.bound) + " (alpha=" + fmt(r.alpha.value) + ", beta=" + fmt(r.beta.value) + ")" +
              (r.passed ? " PASS" : " FAIL");
  o.statistical_failure = !r.passed;
  return o;
}

const std::map<std::string, Outcome (*)(const Context&)>& handlers() {
  static const std::map<std::string, Outcome (*)(const Context&)> table{
      {"erm", run_erm},
      {"beta", [](const Context& c) { return run_beta_like(c, false); }},
      {"kstar", [](const Context& c) { return run_beta_like(c, true); }},
      {"alpha", run_alpha},
      {"smallball", run_smallball},
      {"version-space", run_version_space},
      {"rates", run_rates},
      {"persistence", run_persistence},
      {"counterexample", run_counterexample_cmd},
      {"verify-main", run_verify_main},
  };
  return table;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(path + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"erm",           "beta",  "alpha",       "kstar",          "smallball",
                                              "version-space", "rates", "persistence", "counterexample", "verify-main"};
  return names;
}

json default_config(const std::string& sub) {
  const json rademacher = {{"kind", "rademacher"}};
  const json gaussian = {{"kind", "gaussian"}};
  const json seed = kDefaultSeed;
  if (sub == "erm") {
    return {{"n", 3},         {"N", 6},      {"R", 1.0},           {"design", rademacher},
            {"noise", {{"kind", "gaussian"}, {"sigma", 0.5}}},     {"truth", "zero"},
            {"tol", 1e-10},   {"max_iterations", 100000},          {"seed", seed}};
  }
  if (sub == "beta" || sub == "kstar") {
    return {{"n", 64},       {"N", 512},          {"R", 1.0},           {"design", rademacher},
            {"truth", "zero"}, {"gamma", 0.05},   {"trials", 200},      {"r_lo", 0.0},
            {"r_hi", 0.0},   {"relative_width", 1e-2}, {"seed", seed}};
  }
  if (sub == "alpha") {
    return {{"n", 32},       {"N", 256},     {"R", 1.0},    {"design", rademacher},
            {"noise", {{"kind", "gaussian"}, {"sigma", 0.5}}}, {"truth", "zero"},
            {"gamma", 0.05}, {"delta", 0.1}, {"trials", 1000}, {"s_min", 0.0},
            {"s_max", 0.0},  {"ratio", 1.1}, {"seed", seed}};
  }
  if (sub == "smallball") {
    return {{"n", 32},      {"design", gaussian}, {"mode", "estimate"}, {"u", {0.0, 0.25, 0.5, 1.0}},
            {"directions", 500}, {"draws", 1000}, {"R", 1.0},           {"truth", "zero"},
            {"tau", 0.0},   {"r", 1.0},           {"N", 256},           {"trials", 100},
            {"probes", 100}, {"seed", seed}};
  }
  if (sub == "version-space") {
    return {{"n", 64},          {"N", 16},           {"R", 1.0},  {"design", rademacher}, {"truth", "zero"},
            {"probes", 1000},   {"sparse_probes", 1000}, {"trials", 1}, {"seed", seed}};
  }
  if (sub == "rates") {
    return {{"N", 100}, {"n", 100}, {"R", 1.0},     {"sigma", 0.5}, {"c1", 1.0}, {"c2", 1.0},
            {"c3", 1.0}, {"d", 0},  {"kappa", 1.0}, {"C", 1.0}};
  }
  if (sub == "persistence") {
    return {{"design", rademacher},
            {"noise", {{"kind", "scaled_sign"}, {"sigma", 0.5}}},
            {"N", {512, 1024, 2048, 4096, 8192, 16384}},
            {"n", {64}},
            {"R", {1.0}},
            {"sigma", {0.5}},
            {"truth", "zero"},
            {"trials", 50},
            {"tol", 1e-10},
            {"c1", 1.0},
            {"c2", 1.0},
            {"c3", 1.0},
            {"seed", seed}};
  }
  if (sub == "counterexample") return {{"N", 100}, {"trials", 100000}, {"seed", seed}};
  if (sub == "verify-main") {
    return {{"n", 32},         {"N", 512},          {"R", 1.0},         {"design", gaussian},
            {"noise", {{"kind", "gaussian"}, {"sigma", 0.5}}},           {"truth", "zero"},
            {"delta", 0.1},    {"trials", 200},     {"beta_trials", 200}, {"alpha_trials", 0},
            {"directions", 500}, {"draws", 1000},   {"tol", 1e-10},     {"seed", seed}};
  }
  throw ConfigError("unknown subcommand '" + sub + "'");
}

void merge_strict(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) throw ConfigError("config must be a JSON object" + (prefix.empty() ? "" : " at " + prefix));
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[key];
    if (is_record_key(key) && prefix.empty()) {
      if (!value.is_object()) throw ConfigError("'" + path + "' must be an object");
      slot = value;
      continue;
    }
    if (type_label(slot) != type_label(value)) {
      throw ConfigError("'" + path + "' must be a " + type_label(slot) + ", got " + type_label(value));
    }
    if (slot.is_object()) {
      merge_strict(slot, value, path);
    } else {
      slot = value;
    }
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  // Build the nested overlay {"a": {"b": value}} and merge it.
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (parts.size() >= 2 && is_record_key(parts.front())) {
    if (!config.contains(parts.front())) throw ConfigError("unknown config key '" + parts.front() + "'");
    json* slot = &config[parts.front()];
    for (std::size_t i = 1; i < parts.size(); ++i) slot = &(*slot)[parts[i]];
    *slot = value;
    return;
  }
  json overlay = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) overlay = json{{*it, overlay}};
  merge_strict(config, overlay);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-ball risk bounds for l1-constrained least squares: estimators and experiments", "sbrisk"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format;
  std::optional<std::size_t> workers;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> direct;

  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " subcommand");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "Master seed (default 0x5EED = 24301)");
    sub->add_option("--output", output, "Report path ('-' for standard output)");
    sub->add_option("--format", format, "Report format: csv or json (default from the output extension)");
    sub->add_option("--workers", workers, "Worker threads (default: SBRISK_WORKERS or 1)");
    sub->add_option("--set", overrides, "Override a config key: key.path=value (repeatable)");
    const json defaults = default_config(name);
    for (const char* flag : {"n", "N", "R", "sigma", "trials", "gamma", "delta", "tau", "r", "u"}) {
      const bool top = defaults.contains(flag);
      const bool in_noise = std::string(flag) == "sigma" && defaults.contains("noise");
      if (!top && !in_noise) continue;
      sub->add_option_function<std::string>(
          std::string("--") + flag,
          [&direct, flag, top](const std::string& v) { direct[top ? flag : std::string("noise.") + flag] = v; },
          std::string("Shortcut for --set ") + (top ? flag : std::string("noise.") + flag) + "=VALUE");
    }
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    json config = default_config(name);
    if (!config_path.empty()) merge_strict(config, read_config_file(config_path));
    for (const auto& [key, value] : direct) apply_override(config, key + "=" + value);
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) {
      if (!config.contains("seed")) throw ConfigError("subcommand '" + name + "' takes no seed");
      config["seed"] = *seed;
    }

    Context ctx;
    ctx.config = config;
    if (config.contains("seed")) {
      if (!config.at("seed").is_number_unsigned() && !config.at("seed").is_number_integer()) {
        throw ConfigError("'seed' must be an integer");
      }
      ctx.seed = config.at("seed").get<std::uint64_t>();
    }
    ctx.workers = workers.value_or(0);

    Outcome outcome;
    try {
      outcome = handlers().at(name)(ctx);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    } catch (const std::out_of_range& e) {
      throw ConfigError(e.what());
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    } catch (const json::exception& e) {
      throw ConfigError(e.what());
    }
    outcome.report.config = config;

    if (!output.empty()) {
      ReportFormat fmt_kind = ReportFormat::kJson;
      if (!format.empty()) {
        fmt_kind = parse_format(format);
      } else if (output.size() >= 4 && output.compare(output.size() - 4, 4, ".csv") == 0) {
        fmt_kind = ReportFormat::kCsv;
      }
      if (output == "-") {
        out << format_report(outcome.report, fmt_kind);
      } else {
        emit_report(outcome.report, output, fmt_kind);
      }
    } else if (!format.empty()) {
      (void)parse_format(format);
    }
    // Keep stdout parseable when the report itself goes there.
    (output == "-" ? err : out) << outcome.summary << '\n';
    return outcome.statistical_failure ? kExitStatistical : kExitOk;
  } catch (const ConfigError& e) {
    err << "sbrisk " << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "sbrisk " << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "sbrisk " << name << ": error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sbrisk::cli
