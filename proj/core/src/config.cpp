#include "stochblow/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stochblow {

using nlohmann::json;

namespace {

std::string join_messages(const std::vector<Violation>& v) {
  std::string s = "invalid configuration:";
  for (const auto& x : v) s += "\n  " + x.location + ": " + x.message;
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Reader {
 public:
  Reader(bool strict, std::vector<Violation>& violations, std::vector<std::string>& warnings)
      : strict_(strict), violations_(violations), warnings_(warnings) {}

  void error(const std::string& at, const std::string& msg) { violations_.push_back({at, msg}); }

  void keys(const json& obj, const std::string& at, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) return;
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
      if (ok.count(k)) continue;
      const std::string where = at.empty() ? k : at + "." + k;
      if (strict_) {
        error(where, "unknown key");
      } else {
        warnings_.push_back(where + ": unknown key ignored");
      }
    }
  }

  const json* object(const json& parent, const std::string& at, const char* key, bool required) {
    const std::string where = at.empty() ? key : at + "." + key;
    if (!parent.contains(key)) {
      if (required) error(where, "section is required");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      error(where, "must be an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number(const json& obj, const std::string& at, const char* key, bool required) {
    const std::string where = at + "." + key;
    if (!obj.contains(key)) {
      if (required) error(where, "is required (no default for this parameter)");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(where, "must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(where, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& at, const char* key) {
    const std::string where = at + "." + key;
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      error(where, "must be an integer");
      return std::nullopt;
    }
    return v.get<std::int64_t>();
  }

  std::optional<std::string> string(const json& obj, const std::string& at, const char* key, bool required) {
    const std::string where = at + "." + key;
    if (!obj.contains(key)) {
      if (required) error(where, "is required");
      return std::nullopt;
    }
    if (!obj.at(key).is_string()) {
      error(where, "must be a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& at, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_boolean()) {
      error(at + "." + key, "must be true or false");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

 private:
  bool strict_;
  std::vector<Violation>& violations_;
  std::vector<std::string>& warnings_;
};

void positive(Reader& r, const std::string& at, double x, const char* what = "must be > 0") {
  if (!(x > 0.0)) r.error(at, what);
}

std::function<double(double)> eta_profile(const std::string& profile, double scale) {
  if (profile == "linear") return [scale](double z) { return scale * z; };
  if (profile == "abs") return [scale](double z) { return scale * std::abs(z); };
  return [scale](double) { return scale; };
}

json levy_json(const LevySpec& l) {
  json j = json::object();
  j["type"] = l.type;
  if (l.type == "atoms") {
    j["atoms"] = json::array();
    for (const auto& a : l.atoms) j["atoms"].push_back({{"mark", a.mark}, {"rate", a.rate}});
  } else if (l.type == "truncated_stable") {
    j["c"] = l.stable.c;
    j["alpha"] = l.stable.alpha;
    j["r_min"] = l.stable.r_min;
    j["r_max"] = l.stable.r_max;
  }
  return j;
}

json noise_json(const NoiseSpec& n) {
  json j = json::object();
  j["family"] = n.family;
  if (n.family == "additive") {
    j["preset"] = n.preset;
    if (n.preset == "decaying_sine") {
      j["sigma_amplitude"] = n.sigma_amplitude;
      j["eta_amplitude"] = n.eta_amplitude;
      j["decay_rate"] = n.decay_rate;
      j["mode"] = n.mode;
      j["decay_horizon"] = n.decay_horizon;
    }
  } else {
    j["sigma"] = n.sigma;
    j["eta_profile"] = n.eta_profile;
    j["eta_scale"] = n.eta_scale;
  }
  return j;
}

json effective(const ExperimentConfig& c, bool with_execution) {
  json j = json::object();
  j["schema_version"] = c.schema_version;
  j["model"] = {{"alpha", c.model.alpha}, {"beta", c.model.beta}, {"m", c.model.m}};
  j["grid"] = {{"length", c.length}, {"nodes", c.nodes}};
  j["initial"] = {{"preset", c.initial.preset}, {"amplitude", c.initial.amplitude}, {"mode", c.initial.mode}};
  j["noise"] = noise_json(c.noise);
  j["levy"] = levy_json(c.levy);
  j["scheme"] = {{"dt", c.scheme.dt},
                 {"jump_mode", to_string(c.scheme.jump_mode)},
                 {"threshold", c.threshold},
                 {"guard", c.scheme.guard},
                 {"max_halvings", c.scheme.max_halvings}};
  j["ensemble"] = {{"paths", c.paths},
                   {"master_seed", c.master_seed},
                   {"horizon", c.horizon},
                   {"record_stride", c.record_stride},
                   {"ms_threshold", c.ms_threshold}};
  j["criterion"] = {{"eigenvalue", c.eigenvalue == EigenvalueFlavor::continuum ? "continuum" : "discrete"},
                    {"k_override", c.k_override ? json(*c.k_override) : json(nullptr)}};
  json axes = json::array();
  for (const auto& a : c.sweep) axes.push_back({{"name", a.name}, {"values", a.values}});
  j["sweep"] = {{"axes", axes}};
  j["verify"] = {{"paths", c.verify.paths},
                 {"martingale_streams", c.verify.martingale_streams},
                 {"theta_triples", c.verify.theta_triples},
                 {"order_constant", c.verify.order_constant}};
  if (with_execution) {
    j["ensemble"]["threads"] = c.threads;
    j["output"] = {{"directory", c.output_directory}, {"svg", c.svg}};
  }
  return j;
}

void parse_axis_json(Reader& r, const json& a, const std::string& at, std::vector<SweepAxis>& out) {
  if (!a.is_object()) {
    r.error(at, "axis must be an object with name and values");
    return;
  }
  r.keys(a, at, {"name", "values"});
  SweepAxis axis;
  if (auto s = r.string(a, at, "name", true)) axis.name = *s;
  if (!axis.name.empty() && axis.name != "amplitude" && axis.name != "noise_scale")
    r.error(at + ".name", "unknown axis '" + axis.name + "' (expected amplitude or noise_scale)");
  if (!a.contains("values") || !a.at("values").is_array()) {
    r.error(at + ".values", "must be an array of numbers");
  } else {
    for (const auto& v : a.at("values")) {
      if (!v.is_number()) {
        r.error(at + ".values", "must contain numbers only");
        return;
      }
      axis.values.push_back(v.get<double>());
    }
    if (axis.values.empty()) r.error(at + ".values", "sweep axis must not be empty");
  }
  out.push_back(std::move(axis));
}

}  // namespace

ConfigError::ConfigError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

ConfigError::ConfigError(std::string location, std::string message)
    : ConfigError(std::vector<Violation>{{std::move(location), std::move(message)}}) {}

std::function<double(double)> InitialSpec::function(double length) const {
  const double c = amplitude;
  const double k = mode * M_PI / length;
  return [c, k](double x) { return c * std::sin(k * x); };
}

LevyMeasure LevySpec::build() const {
  if (type == "atoms") return LevyMeasure(FiniteAtoms{atoms});
  if (type == "truncated_stable") return LevyMeasure(stable);
  return LevyMeasure{};
}

SpdeProblem ExperimentConfig::problem(double noise_scale) const {
  const IntervalGrid g = grid();
  LevyMeasure levy_measure = levy.build();
  if (noise.family == "multiplicative") {
    MultiplicativeNoise mul(noise.sigma * noise_scale, eta_profile(noise.eta_profile, noise.eta_scale * noise_scale),
                            levy_measure, "multiplicative_" + noise.eta_profile);
    return SpdeProblem{g, model, mul, levy_measure};
  }
  AdditiveNoise add = AdditiveNoise::none();
  if (noise.preset == "decaying_sine")
    add = AdditiveNoise::decaying_sine(noise.sigma_amplitude * noise_scale, noise.eta_amplitude * noise_scale,
                                       noise.decay_rate, noise.mode, length, noise.decay_horizon);
  return SpdeProblem{g, model, add, levy_measure};
}

Field ExperimentConfig::initial_field(const IntervalGrid& g) const { return g.sample(initial.function(length)); }

EnsembleConfig ExperimentConfig::ensemble_config() const {
  EnsembleConfig e;
  e.paths = paths;
  e.master_seed = master_seed;
  e.scheme = scheme;
  e.horizon = horizon;
  e.record_stride = record_stride;
  e.threshold = threshold;
  e.threads = threads;
  return e;
}

CriterionOptions ExperimentConfig::criterion_options() const { return {eigenvalue, k_override}; }

std::string ExperimentConfig::effective_json(int indent, bool with_execution) const {
  return effective(*this, with_execution).dump(indent);
}

std::string ExperimentConfig::hash() const {
  const std::string canon = effective(*this, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text, bool strict) {
  std::vector<Violation> v;
  ExperimentConfig c;
  Reader r(strict, v, c.warnings);

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "config must be a JSON object");

  if (!root.contains("schema_version")) {
    v.push_back({"schema_version", "is required (this build reads schema_version " +
                                       std::to_string(kSchemaVersion) + ")"});
  } else if (!root.at("schema_version").is_number_integer()) {
    v.push_back({"schema_version", "must be an integer"});
  } else if (root.at("schema_version").get<int>() != kSchemaVersion) {
    const int got = root.at("schema_version").get<int>();
    throw ConfigError("schema_version",
                        "unsupported schema_version " + std::to_string(got) + "; this build reads version " +
                            std::to_string(kSchemaVersion) +
                            ". Migration: set schema_version to 1 and check section names against the "
                            "documented schema (model, grid, initial, noise, levy, scheme, ensemble, criterion, "
                            "sweep, verify, output)");
  }

  r.keys(root, "", {"schema_version", "model", "grid", "initial", "noise", "levy", "scheme", "ensemble", "criterion",
                    "sweep", "verify", "output"});

  if (const json* m = r.object(root, "", "model", true)) {
    r.keys(*m, "model", {"alpha", "beta", "m"});
    if (auto x = r.number(*m, "model", "alpha", true)) {
      c.model.alpha = *x;
      if (!(*x > 0.0)) r.error("model.alpha", "theorem hypotheses require alpha > 0 (got " + fmt(*x) + ")");
    }
    if (auto x = r.number(*m, "model", "beta", true)) {
      c.model.beta = *x;
      if (!(*x > 0.0)) r.error("model.beta", "theorem hypotheses require beta > 0 (got " + fmt(*x) + ")");
    }
    if (auto x = r.number(*m, "model", "m", true)) {
      c.model.m = *x;
      if (!(*x > 1.0)) r.error("model.m", "theorem hypotheses require m > 1 (got " + fmt(*x) + ")");
    }
  }

  if (const json* g = r.object(root, "", "grid", true)) {
    r.keys(*g, "grid", {"length", "nodes"});
    if (auto x = r.number(*g, "grid", "length", true)) {
      c.length = *x;
      positive(r, "grid.length", *x);
    }
    if (!g->contains("nodes")) {
      r.error("grid.nodes", "is required");
    } else if (auto n = r.integer(*g, "grid", "nodes")) {
      if (*n < 2) r.error("grid.nodes", "must be >= 2");
      else c.nodes = static_cast<std::size_t>(*n);
    }
  }

  if (const json* i = r.object(root, "", "initial", true)) {
    r.keys(*i, "initial", {"preset", "amplitude", "mode"});
    if (auto s = r.string(*i, "initial", "preset", true)) {
      c.initial.preset = *s;
      if (*s != "sine") r.error("initial.preset", "unknown preset '" + *s + "' (expected sine)");
    }
    if (auto x = r.number(*i, "initial", "amplitude", true)) c.initial.amplitude = *x;
    if (auto k = r.integer(*i, "initial", "mode")) {
      if (*k < 1) r.error("initial.mode", "must be >= 1");
      else c.initial.mode = static_cast<int>(*k);
    }
  }

  if (const json* l = r.object(root, "", "levy", false)) {
    r.keys(*l, "levy", {"type", "atoms", "c", "alpha", "r_min", "r_max"});
    if (auto s = r.string(*l, "levy", "type", true)) {
      c.levy.type = *s;
      if (*s == "atoms") {
        if (!l->contains("atoms") || !l->at("atoms").is_array() || l->at("atoms").empty()) {
          r.error("levy.atoms", "must be a nonempty array of {mark, rate}");
        } else {
          std::size_t idx = 0;
          for (const auto& a : l->at("atoms")) {
            const std::string at = "levy.atoms[" + std::to_string(idx++) + "]";
            if (!a.is_object()) {
              r.error(at, "must be an object");
              continue;
            }
            r.keys(a, at, {"mark", "rate"});
            auto z = r.number(a, at, "mark", true);
            auto q = r.number(a, at, "rate", true);
            if (z && *z == 0.0) r.error(at + ".mark", "must be nonzero (the measure has no mass at 0)");
            if (q && !(*q > 0.0)) r.error(at + ".rate", "must be > 0");
            if (z && q) c.levy.atoms.push_back({*z, *q});
          }
        }
      } else if (*s == "truncated_stable") {
        if (auto x = r.number(*l, "levy", "c", false)) c.levy.stable.c = *x;
        if (auto x = r.number(*l, "levy", "alpha", false)) c.levy.stable.alpha = *x;
        if (auto x = r.number(*l, "levy", "r_min", false)) c.levy.stable.r_min = *x;
        if (auto x = r.number(*l, "levy", "r_max", false)) c.levy.stable.r_max = *x;
        positive(r, "levy.c", c.levy.stable.c);
        if (!(c.levy.stable.alpha > 0.0 && c.levy.stable.alpha < 2.0)) r.error("levy.alpha", "must lie in (0, 2)");
        if (!(c.levy.stable.r_min > 0.0 && c.levy.stable.r_min < c.levy.stable.r_max))
          r.error("levy.r_min", "must satisfy 0 < r_min < r_max");
      } else if (*s != "none") {
        r.error("levy.type", "unknown type '" + *s + "' (expected none, atoms or truncated_stable)");
      }
    }
  }

  if (const json* n = r.object(root, "", "noise", true)) {
    r.keys(*n, "noise", {"family", "preset", "sigma_amplitude", "eta_amplitude", "decay_rate", "mode",
                         "decay_horizon", "sigma", "eta_profile", "eta_scale"});
    if (auto f = r.string(*n, "noise", "family", true)) {
      c.noise.family = *f;
      if (*f == "additive") {
        if (auto p = r.string(*n, "noise", "preset", true)) {
          c.noise.preset = *p;
          if (*p == "decaying_sine") {
            if (auto x = r.number(*n, "noise", "sigma_amplitude", true)) c.noise.sigma_amplitude = *x;
            if (auto x = r.number(*n, "noise", "eta_amplitude", false)) c.noise.eta_amplitude = *x;
            if (auto x = r.number(*n, "noise", "decay_rate", true)) {
              c.noise.decay_rate = *x;
              positive(r, "noise.decay_rate", *x, "must be > 0 so the noise energy is finite");
            }
            if (auto k = r.integer(*n, "noise", "mode")) {
              if (*k < 1) r.error("noise.mode", "must be >= 1");
              else c.noise.mode = static_cast<int>(*k);
            }
            if (auto x = r.number(*n, "noise", "decay_horizon", false)) {
              c.noise.decay_horizon = *x;
              positive(r, "noise.decay_horizon", *x);
            }
          } else if (*p != "none") {
            r.error("noise.preset", "unknown additive preset '" + *p + "' (expected none or decaying_sine)");
          }
        }
      } else if (*f == "multiplicative") {
        if (auto x = r.number(*n, "noise", "sigma", true)) c.noise.sigma = *x;
        if (auto p = r.string(*n, "noise", "eta_profile", false)) {
          c.noise.eta_profile = *p;
          if (*p != "constant" && *p != "linear" && *p != "abs")
            r.error("noise.eta_profile", "unknown profile '" + *p + "' (expected constant, linear or abs)");
        }
        if (auto x = r.number(*n, "noise", "eta_scale", false)) c.noise.eta_scale = *x;
      } else {
        r.error("noise.family", "unknown family '" + *f + "' (expected additive or multiplicative)");
      }
    }
  }

  if (const json* s = r.object(root, "", "scheme", false)) {
    r.keys(*s, "scheme", {"dt", "jump_mode", "threshold", "guard", "max_halvings"});
    if (auto x = r.number(*s, "scheme", "dt", false)) c.scheme.dt = *x;
    positive(r, "scheme.dt", c.scheme.dt);
    if (auto m = r.string(*s, "scheme", "jump_mode", false)) {
      if (*m == "fixed_grid") c.scheme.jump_mode = JumpMode::fixed_grid;
      else if (*m == "jump_adapted") c.scheme.jump_mode = JumpMode::jump_adapted;
      else r.error("scheme.jump_mode", "unknown mode '" + *m + "' (expected fixed_grid or jump_adapted)");
    }
    if (auto x = r.number(*s, "scheme", "threshold", false)) c.threshold = *x;
    positive(r, "scheme.threshold", c.threshold);
    if (auto x = r.number(*s, "scheme", "guard", false)) c.scheme.guard = *x;
    positive(r, "scheme.guard", c.scheme.guard);
    if (auto k = r.integer(*s, "scheme", "max_halvings")) {
      if (*k < 0 || *k > 200) r.error("scheme.max_halvings", "must lie in [0, 200]");
      else c.scheme.max_halvings = static_cast<int>(*k);
    }
  }

  if (const json* e = r.object(root, "", "ensemble", false)) {
    r.keys(*e, "ensemble", {"paths", "master_seed", "horizon", "record_stride", "threads", "ms_threshold"});
    if (auto k = r.integer(*e, "ensemble", "paths")) {
      if (*k < 1) r.error("ensemble.paths", "must be >= 1");
      else c.paths = static_cast<std::size_t>(*k);
    }
    if (e->contains("master_seed")) {
      const auto& sv = e->at("master_seed");
      if (sv.is_number_unsigned()) c.master_seed = sv.get<std::uint64_t>();
      else r.error("ensemble.master_seed", "must be a nonnegative integer");
    }
    if (auto x = r.number(*e, "ensemble", "horizon", false)) c.horizon = *x;
    positive(r, "ensemble.horizon", c.horizon);
    if (auto k = r.integer(*e, "ensemble", "record_stride")) {
      if (*k < 1) r.error("ensemble.record_stride", "must be >= 1");
      else c.record_stride = static_cast<std::size_t>(*k);
    }
    if (auto k = r.integer(*e, "ensemble", "threads")) {
      if (*k < 1 || *k > 1024) r.error("ensemble.threads", "must lie in [1, 1024]");
      else c.threads = static_cast<unsigned>(*k);
    }
    if (auto x = r.number(*e, "ensemble", "ms_threshold", false)) c.ms_threshold = *x;
    positive(r, "ensemble.ms_threshold", c.ms_threshold);
  }

  if (const json* k = r.object(root, "", "criterion", false)) {
    r.keys(*k, "criterion", {"eigenvalue", "k_override"});
    if (auto s = r.string(*k, "criterion", "eigenvalue", false)) {
      if (*s == "continuum") c.eigenvalue = EigenvalueFlavor::continuum;
      else if (*s == "discrete") c.eigenvalue = EigenvalueFlavor::discrete;
      else r.error("criterion.eigenvalue", "expected continuum or discrete");
    }
    if (k->contains("k_override") && !k->at("k_override").is_null()) {
      if (auto x = r.number(*k, "criterion", "k_override", false)) {
        c.k_override = *x;
        positive(r, "criterion.k_override", *x);
      }
    }
  }

  if (const json* s = r.object(root, "", "sweep", false)) {
    r.keys(*s, "sweep", {"axes"});
    if (s->contains("axes")) {
      const auto& axes = s->at("axes");
      if (!axes.is_array()) {
        r.error("sweep.axes", "must be an array");
      } else {
        for (std::size_t i = 0; i < axes.size(); ++i)
          parse_axis_json(r, axes[i], "sweep.axes[" + std::to_string(i) + "]", c.sweep);
        if (c.sweep.size() > 2) r.error("sweep.axes", "at most two axes are supported");
      }
    }
  }

  if (const json* s = r.object(root, "", "verify", false)) {
    r.keys(*s, "verify", {"paths", "martingale_streams", "theta_triples", "order_constant"});
    if (auto k = r.integer(*s, "verify", "paths")) {
      if (*k < 2) r.error("verify.paths", "must be >= 2");
      else c.verify.paths = static_cast<std::size_t>(*k);
    }
    if (auto k = r.integer(*s, "verify", "martingale_streams")) {
      if (*k < 2) r.error("verify.martingale_streams", "must be >= 2");
      else c.verify.martingale_streams = static_cast<std::size_t>(*k);
    }
    if (auto k = r.integer(*s, "verify", "theta_triples")) {
      if (*k < 1) r.error("verify.theta_triples", "must be >= 1");
      else c.verify.theta_triples = static_cast<std::size_t>(*k);
    }
    if (auto x = r.number(*s, "verify", "order_constant", false)) {
      c.verify.order_constant = *x;
      if (*x < 0.0) r.error("verify.order_constant", "must be >= 0");
    }
  }

  if (const json* o = r.object(root, "", "output", false)) {
    r.keys(*o, "output", {"directory", "svg"});
    if (auto s = r.string(*o, "output", "directory", false)) c.output_directory = *s;
    if (auto b = r.boolean(*o, "output", "svg")) c.svg = *b;
  }

  // Cross-field checks that need the assembled objects.
  if (v.empty()) {
    LevyMeasure measure;
    try {
      measure = c.levy.build();
    } catch (const std::exception& e) {
      v.push_back({"levy", e.what()});
    }
    if (v.empty() && c.noise.family == "multiplicative") {
      try {
        [[maybe_unused]] MultiplicativeNoise probe(c.noise.sigma, eta_profile(c.noise.eta_profile, c.noise.eta_scale), measure);
      } catch (const std::exception& e) {
        v.push_back({"noise.eta_profile", std::string("eta(z) must be >= 0 on the support of the Levy measure: ") +
                                              e.what()});
      }
    }
    if (c.horizon < c.scheme.dt) v.push_back({"ensemble.horizon", "must be at least one time step"});
  }

  if (!v.empty()) throw ConfigError(std::move(v));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), strict);
}

SweepAxis parse_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw ConfigError("--axis", "expected name=v1,v2,...");
  SweepAxis axis;
  axis.name = std::string(spec.substr(0, eq));
  std::vector<Violation> v;
  if (axis.name != "amplitude" && axis.name != "noise_scale")
    v.push_back({"--axis", "unknown axis '" + axis.name + "' (expected amplitude or noise_scale)"});
  std::string rest(spec.substr(eq + 1));
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double x = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      axis.values.push_back(x);
    } catch (const std::exception&) {
      v.push_back({"--axis", "not a number: '" + item + "'"});
    }
  }
  if (axis.values.empty()) v.push_back({"--axis", "sweep axis must not be empty"});
  if (!v.empty()) throw ConfigError(std::move(v));
  return axis;
}

}  // namespace stochblow
