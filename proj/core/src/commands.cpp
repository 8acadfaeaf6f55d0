#include "stochblow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "stochblow/energy.hpp"
#include "stochblow/oracles.hpp"
#include "stochblow/report_io.hpp"

namespace stochblow {

using ojson = nlohmann::ordered_json;

namespace {

ojson jnum(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }
ojson jopt(const std::optional<double>& x) { return x ? jnum(*x) : ojson(nullptr); }

ojson header(const ExperimentConfig& c, const char* command) {
  ojson j;
  j["config_hash"] = c.hash();
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

std::filesystem::path emit(CommandResult& r, const std::string& name, const std::string& content) {
  const auto path = r.run_dir / name;
  write_text(path, content);
  r.files.push_back(path);
  return path;
}

void emit_config(CommandResult& r, const ExperimentConfig& c) {
  emit(r, "config.json", c.effective_json(2, false) + "\n");
}

ojson criterion_json(const CriterionReport& rep) {
  ojson j;
  j["mode"] = to_string(rep.mode);
  j["verdict"] = to_string(rep.verdict);
  j["lhs"] = jnum(rep.lhs);
  ojson comps = ojson::object();
  for (const auto& c : rep.components) comps[c.name] = jnum(c.value);
  j["components"] = comps;
  j["note"] = rep.note;
  if (rep.mode == CriterionMode::multiplicative) {
    j["kappa"] = jnum(rep.kappa);
    j["lambda1"] = jnum(rep.lambda1);
    j["kappa_window_ok"] = rep.kappa_window_ok.value_or(false);
    j["kappa_margin"] = jnum(rep.kappa_margin);
  } else {
    j["noise_grad_energy"] = jnum(rep.grad_energy);
    j["noise_flat_energy"] = jnum(rep.flat_energy);
  }
  j["epsilon"] = jnum(rep.epsilon);
  j["delta"] = jnum(rep.delta);
  j["v0"] = jnum(rep.v0);
  j["j0"] = jnum(rep.j0);
  j["k_min"] = jopt(rep.k_min);
  j["k_used"] = jopt(rep.k_used);
  j["tstar_bound"] = jopt(rep.tstar_bound);
  return j;
}

std::string criterion_text(const CriterionReport& rep) {
  std::ostringstream o;
  o << "criterion (" << to_string(rep.mode) << "): " << to_string(rep.verdict) << "\n";
  for (const auto& c : rep.components) o << "  " << c.name << " = " << format_number(c.value) << "\n";
  o << "  lhs = " << format_number(rep.lhs) << "\n";
  if (rep.mode == CriterionMode::multiplicative)
    o << "  kappa = " << format_number(rep.kappa) << ", alpha*lambda1 - kappa = " << format_number(rep.kappa_margin)
      << "\n";
  if (rep.k_min) o << "  K_min = " << format_number(*rep.k_min) << "\n";
  if (rep.tstar_bound) o << "  blow-up time bound = " << format_number(*rep.tstar_bound) << "\n";
  if (!rep.note.empty()) o << "  note: " << rep.note << "\n";
  return o.str();
}

ojson balance_json(const BalanceReport& b) {
  ojson j;
  j["identity"] = b.identity;
  j["pass"] = b.pass;
  j["inequality"] = b.inequality;
  j["max_abs_gap"] = jnum(b.max_abs_gap);
  j["tolerance"] = jnum(b.tolerance);
  j["scale"] = jnum(b.scale);
  j["max_abs_discretization"] = jnum(b.max_abs_discretization);
  j["window_end"] = b.times.empty() ? ojson(nullptr) : jnum(b.times.back());
  j["theta_checks"] = b.theta_checks;
  j["theta_max_residual"] = jnum(b.theta_max_residual);
  j["note"] = b.note;
  return j;
}

ojson tau_summary(const EnsembleEstimate& est) {
  const auto taus = est.tau_samples();
  ojson j;
  j["count"] = taus.size();
  j["min"] = taus.empty() ? ojson(nullptr) : jnum(taus.front());
  j["median"] = taus.empty() ? ojson(nullptr) : jnum(taus[(taus.size() - 1) / 2]);
  j["max"] = taus.empty() ? ojson(nullptr) : jnum(taus.back());
  return j;
}

}  // namespace

void apply_overrides(ExperimentConfig& config, const CommandOptions& options) {
  if (options.out_dir) config.output_directory = *options.out_dir;
  if (options.seed) config.master_seed = *options.seed;
  if (options.threads) config.threads = std::max(1u, *options.threads);
  if (!options.axes.empty()) config.sweep = options.axes;
}

std::filesystem::path run_directory(const ExperimentConfig& config) {
  return std::filesystem::path(config.output_directory) / config.hash();
}

CommandResult cmd_criterion(const ExperimentConfig& config) {
  CommandResult r;
  r.run_dir = run_directory(config);
  const auto problem = config.problem();
  const auto rep = evaluate_criterion(config.initial_field(problem.grid), problem, config.criterion_options());
  ojson j = header(config, "criterion");
  j.update(criterion_json(rep));
  emit_config(r, config);
  emit(r, "criterion.json", j.dump(2) + "\n");
  r.summary = criterion_text(rep);
  return r;
}

CommandResult cmd_simulate(const ExperimentConfig& config) {
  CommandResult r;
  r.run_dir = run_directory(config);
  const auto problem = config.problem();
  PathOptions opts;
  opts.horizon = config.horizon;
  opts.threshold = config.threshold;
  opts.record_stride = config.record_stride;
  const auto rec = simulate_path(problem, config.initial_field(problem.grid), config.scheme, opts,
                                 config.master_seed, 0);

  CsvTable csv(config.hash(), {"time", "l2sq", "h1sq", "lmp1", "jump_flag"});
  for (const auto& s : rec.samples)
    csv.add_row({format_number(s.time), format_number(s.l2sq), format_number(s.h1sq), format_number(s.lmp1),
                 s.jump ? "1" : "0"});
  ojson j = header(config, "simulate");
  j["path_index"] = 0;
  j["master_seed"] = config.master_seed;
  j["samples"] = rec.samples.size();
  j["jumps"] = rec.jumps.size();
  j["halvings"] = rec.halvings;
  j["blowup"] = {{"detected", rec.blowup.detected},
                 {"tau", rec.blowup.detected ? jnum(rec.blowup.tau) : ojson(nullptr)},
                 {"trigger", rec.blowup.trigger}};
  const auto& last = rec.samples.back();
  j["final"] = {{"time", jnum(last.time)}, {"l2sq", jnum(last.l2sq)}};
  emit_config(r, config);
  emit(r, "trajectory.csv", csv.str());
  emit(r, "trajectory.json", j.dump(2) + "\n");

  std::ostringstream o;
  o << "simulated one path: " << rec.samples.size() << " samples, " << rec.jumps.size() << " jumps\n";
  if (rec.blowup.detected)
    o << "  blow-up detected at t = " << format_number(rec.blowup.tau) << " (" << rec.blowup.trigger << ")\n";
  else
    o << "  no blow-up up to t = " << format_number(last.time) << ", |u|^2 = " << format_number(last.l2sq) << "\n";
  r.summary = o.str();
  return r;
}

CommandResult cmd_ensemble(const ExperimentConfig& config) {
  CommandResult r;
  r.run_dir = run_directory(config);
  const auto problem = config.problem();
  const auto u0 = config.initial_field(problem.grid);
  const auto est = run_ensemble(config.ensemble_config(), problem, u0);
  const auto ms = detect_mean_square_blowup(est, config.ms_threshold);

  CsvTable csv(config.hash(), {"time", "v_mean", "v_se", "g_mean", "p_mean", "blowup_frac"});
  for (std::size_t k = 0; k < est.times.size(); ++k)
    csv.add_numbers({est.times[k], est.v.mean[k], est.v.se[k], est.g.mean[k], est.p.mean[k], est.blowup_fraction[k]});

  std::optional<CriterionReport> crit;
  std::string crit_error;
  try {
    crit = evaluate_criterion(u0, problem, config.criterion_options());
  } catch (const std::exception& e) {
    crit_error = e.what();
  }

  ojson j = header(config, "ensemble");
  j["paths"] = est.paths;
  j["failed_paths"] = est.failed_paths;
  j["censored_paths"] = est.censored_count();
  j["final_blowup_fraction"] = jnum(est.blowup_fraction.back());
  j["ms_threshold"] = jnum(config.ms_threshold);
  j["tau_ms"] = jopt(ms.tau_ms);
  j["trigger"] = ms.trigger;
  j["ci_time"] = jopt(ms.ci_time);
  j["fraction_time"] = jopt(ms.fraction_time);
  ojson sens = ojson::array();
  for (double f : {1e-4, 1e-2, 1.0, 1e2}) {
    const auto s = detect_mean_square_blowup(est, config.ms_threshold * f);
    sens.push_back({{"ms_threshold", jnum(config.ms_threshold * f)}, {"tau_ms", jopt(s.tau_ms)}, {"trigger", s.trigger}});
  }
  j["threshold_sensitivity"] = sens;
  j["tau_samples"] = tau_summary(est);
  std::size_t halvings = 0;
  ojson failures = ojson::array();
  for (const auto& o : est.outcomes) {
    halvings += o.halvings;
    if (!o.error.empty() && failures.size() < 20) failures.push_back({{"path", o.path}, {"error", o.error}});
  }
  j["halvings"] = halvings;
  j["failures"] = failures;
  if (crit) {
    j["criterion"] = {{"verdict", to_string(crit->verdict)},
                      {"lhs", jnum(crit->lhs)},
                      {"k_min", jopt(crit->k_min)},
                      {"tstar_bound", jopt(crit->tstar_bound)}};
  } else {
    j["criterion"] = {{"error", crit_error}};
  }

  emit_config(r, config);
  emit(r, "ensemble.csv", csv.str());
  emit(r, "ensemble.json", j.dump(2) + "\n");
  if (config.svg) {
    SvgSeries s;
    s.title = "mean square norm, " + std::to_string(est.paths) + " paths";
    s.y_label = "E|u|^2 (log10)";
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      if (est.v.count[k] == 0) break;
      s.times.push_back(est.times[k]);
      s.mean.push_back(est.v.mean[k]);
      s.lower.push_back(est.v.mean[k] - 1.96 * est.v.se[k]);
      s.upper.push_back(est.v.mean[k] + 1.96 * est.v.se[k]);
    }
    if (crit && crit->tstar_bound) {
      s.marker = crit->tstar_bound;
      s.marker_label = "T* bound";
    }
    emit(r, "ensemble.svg", render_svg(s));
  }

  std::ostringstream o;
  o << "ensemble of " << est.paths << " paths: " << est.censored_count() << " blew up, " << est.failed_paths
    << " failed\n";
  if (ms.tau_ms)
    o << "  mean-square blow-up at t = " << format_number(*ms.tau_ms) << " (" << ms.trigger << ")\n";
  else
    o << "  no mean-square blow-up detected up to t = " << format_number(config.horizon) << "\n";
  r.summary = o.str();
  return r;
}

CommandResult cmd_verify(const ExperimentConfig& config) {
  CommandResult r;
  r.run_dir = run_directory(config);
  const auto problem = config.problem();
  const auto u0 = config.initial_field(problem.grid);
  EnsembleConfig ens = config.ensemble_config();
  ens.paths = config.verify.paths;
  ens.record_stride = 1;

  ojson j = header(config, "verify");
  bool pass = true;
  std::ostringstream o;

  std::vector<BalanceKind> kinds;
  if (is_additive(problem.noise))
    kinds = {BalanceKind::l2, BalanceKind::grad, BalanceKind::lmp1};
  else
    kinds = {BalanceKind::multiplicative, BalanceKind::lmp1};
  ojson balances = ojson::array();
  for (auto kind : kinds) {
    const auto b = ito_balance(kind, problem, u0, ens, config.verify.order_constant);
    balances.push_back(balance_json(b));
    pass = pass && b.pass;
    o << "  " << (b.pass ? "PASS " : "FAIL ") << b.identity << ": gap " << format_number(b.max_abs_gap)
      << " <= " << format_number(b.tolerance) << (b.note.empty() ? "" : " (" + b.note + ")") << "\n";
  }
  j["balances"] = balances;

  const auto theta = taylor_theta_property(config.verify.theta_triples, config.master_seed);
  const Field one{1.0}, unit{1.0};
  const auto scalar = taylor_remainder_theta(one, unit, 3.0);
  const bool scalar_ok = std::abs(scalar.theta - (std::sqrt(11.0 / 6.0) - 1.0)) <= 1e-9;
  j["taylor_remainder"] = {{"triples", theta.triples},
                           {"failures", theta.failures},
                           {"max_relative_residual", jnum(theta.max_relative_residual)},
                           {"scalar_theta", jnum(scalar.theta)},
                           {"pass", theta.pass && scalar_ok}};
  pass = pass && theta.pass && scalar_ok;
  o << "  " << (theta.pass && scalar_ok ? "PASS " : "FAIL ") << "taylor_remainder_theta: " << theta.triples
    << " triples, max residual " << format_number(theta.max_relative_residual) << "\n";

  const double T = config.horizon;
  const std::vector<double> times{0.5 * T, T};
  const double mdt = T / 1000.0;
  const auto frozen = problem.grid.sample([&](double x) { return std::sin(M_PI * x / config.length); });
  const AdditiveNoise* add = std::get_if<AdditiveNoise>(&problem.noise);
  const auto mart = martingale_checks(problem.levy, add ? *add : AdditiveNoise::none(), problem.grid, frozen, times,
                                      config.verify.martingale_streams, config.master_seed, mdt);
  ojson mj = ojson::array();
  for (const auto& c : mart.checks)
    mj.push_back({{"name", c.name},
                  {"time", jnum(c.time)},
                  {"mean", jnum(c.mean)},
                  {"se", jnum(c.se)},
                  {"variance", jnum(c.variance)},
                  {"variance_expected", jnum(c.variance_expected)},
                  {"variance_se", jnum(c.variance_se)},
                  {"pass", c.mean_pass && c.variance_pass}});
  j["martingale"] = {{"pass", mart.pass}, {"checks", mj}};
  pass = pass && mart.pass;
  o << "  " << (mart.pass ? "PASS " : "FAIL ") << "martingale checks (" << mart.checks.size() << ")\n";

  if (const auto* mul = std::get_if<MultiplicativeNoise>(&problem.noise)) {
    const double sdt = T / 1000.0;
    const auto law = scalar_second_moment_law(*mul, problem.levy, 1.0, times, config.verify.martingale_streams,
                                              config.master_seed, sdt, config.threads);
    ojson lj = ojson::array();
    for (const auto& c : law.checks)
      lj.push_back({{"time", jnum(c.time)},
                    {"estimate", jnum(c.estimate)},
                    {"se", jnum(c.se)},
                    {"expected", jnum(c.expected)},
                    {"pass", c.pass}});
    j["moment_law"] = {{"rate", jnum(law.rate)}, {"pass", law.pass}, {"checks", lj}};
    pass = pass && law.pass;
    o << "  " << (law.pass ? "PASS " : "FAIL ") << "scalar second-moment law\n";
  } else {
    j["moment_law"] = nullptr;
  }

  j["pass"] = pass;
  emit_config(r, config);
  emit(r, "verify.json", j.dump(2) + "\n");
  r.summary = std::string(pass ? "oracle suite passed\n" : "oracle suite FAILED\n") + o.str();
  r.exit_code = pass ? kExitOk : kExitOracleFailure;
  return r;
}

CommandResult cmd_sweep(const ExperimentConfig& config) {
  if (config.sweep.empty()) throw ConfigError("sweep.axes", "no sweep axis given (config or --axis)");
  for (const auto& a : config.sweep)
    if (a.values.empty()) throw ConfigError("sweep.axes", "sweep axis '" + a.name + "' must not be empty");
  if (config.sweep.size() > 2) throw ConfigError("sweep.axes", "at most two axes are supported");

  CommandResult r;
  r.run_dir = run_directory(config);
  std::vector<std::string> cols;
  for (const auto& a : config.sweep) cols.push_back(a.name);
  for (const char* c : {"verdict", "lhs", "kappa", "kappa_window_ok", "blowup_fraction", "tau_ms", "error"})
    cols.emplace_back(c);
  CsvTable csv(config.hash(), cols);
  ojson cells = ojson::array();

  const std::size_t n0 = config.sweep[0].values.size();
  const std::size_t n1 = config.sweep.size() > 1 ? config.sweep[1].values.size() : 1;
  std::size_t errors = 0;
  std::ostringstream o;
  for (std::size_t a = 0; a < n0; ++a) {
    for (std::size_t b = 0; b < n1; ++b) {
      ExperimentConfig cell = config;
      double noise_scale = 1.0;
      std::vector<double> coords;
      for (std::size_t ax = 0; ax < config.sweep.size(); ++ax) {
        const double v = config.sweep[ax].values[ax == 0 ? a : b];
        coords.push_back(v);
        if (config.sweep[ax].name == "amplitude") cell.initial.amplitude = v;
        else noise_scale = v;
      }
      std::vector<std::string> row;
      for (double c : coords) row.push_back(format_number(c));
      ojson cj;
      for (std::size_t ax = 0; ax < coords.size(); ++ax) cj[config.sweep[ax].name] = jnum(coords[ax]);
      try {
        const auto problem = cell.problem(noise_scale);
        const auto u0 = cell.initial_field(problem.grid);
        const auto rep = evaluate_criterion(u0, problem, cell.criterion_options());
        const auto est = run_ensemble(cell.ensemble_config(), problem, u0);
        const auto ms = detect_mean_square_blowup(est, cell.ms_threshold);
        const bool mult = rep.mode == CriterionMode::multiplicative;
        row.push_back(to_string(rep.verdict));
        row.push_back(format_number(rep.lhs));
        row.push_back(mult ? format_number(rep.kappa) : "");
        row.push_back(mult ? (rep.kappa_window_ok.value_or(false) ? "1" : "0") : "");
        row.push_back(format_number(est.blowup_fraction.back()));
        row.push_back(ms.tau_ms ? format_number(*ms.tau_ms) : "");
        row.push_back("");
        cj["verdict"] = to_string(rep.verdict);
        cj["lhs"] = jnum(rep.lhs);
        cj["kappa"] = mult ? jnum(rep.kappa) : ojson(nullptr);
        cj["kappa_window_ok"] = mult ? ojson(rep.kappa_window_ok.value_or(false)) : ojson(nullptr);
        cj["blowup_fraction"] = jnum(est.blowup_fraction.back());
        cj["tau_ms"] = jopt(ms.tau_ms);
        cj["trigger"] = ms.trigger;
        cj["error"] = nullptr;
      } catch (const std::exception& e) {
        ++errors;
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        for (int k = 0; k < 6; ++k) row.push_back("");
        row.push_back(msg);
        cj["error"] = e.what();
      }
      csv.add_row(row);
      cells.push_back(cj);
    }
  }

  ojson j = header(config, "sweep");
  ojson axes = ojson::array();
  for (const auto& a : config.sweep) axes.push_back({{"name", a.name}, {"values", a.values}});
  j["axes"] = axes;
  j["cells"] = cells;
  j["failed_cells"] = errors;
  emit_config(r, config);
  emit(r, "sweep.csv", csv.str());
  emit(r, "sweep.json", j.dump(2) + "\n");
  o << "sweep over " << n0 * n1 << " cells, " << errors << " failed\n";
  r.summary = o.str();
  return r;
}

}  // namespace stochblow
