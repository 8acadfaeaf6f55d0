#include "stochblow/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace stochblow {

namespace {

/// Welford accumulator; fed in path order so the result does not depend on
/// how paths were scheduled.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, m2 / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

struct PathSummary {
  PathOutcome outcome;
  std::vector<double> v, g, p;
  std::vector<std::vector<double>> channels;
  double captured = std::numeric_limits<double>::quiet_NaN();
};

struct SeriesAccumulator {
  std::vector<Moments> at;
  explicit SeriesAccumulator(std::size_t k) : at(k) {}
  void add(const std::vector<double>& values) {
    const std::size_t n = std::min(values.size(), at.size());
    for (std::size_t k = 0; k < n; ++k) at[k].add(values[k]);
  }
  SeriesStat finish() const {
    SeriesStat s;
    for (const auto& m : at) {
      s.mean.push_back(m.n ? m.mean : std::numeric_limits<double>::quiet_NaN());
      s.se.push_back(m.se());
      s.count.push_back(m.n);
    }
    return s;
  }
};

void validate_config(const EnsembleConfig& c) {
  if (c.paths == 0) throw std::invalid_argument("ensemble needs at least one path");
  if (!(c.horizon > 0.0)) throw std::invalid_argument("ensemble horizon must be positive");
  if (c.record_stride == 0) throw std::invalid_argument("record_stride must be >= 1");
  if (!(c.scheme.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(c.threshold > 0.0)) throw std::invalid_argument("blow-up threshold must be positive");
  if (c.shared_brownian_dt && !(*c.shared_brownian_dt > 0.0))
    throw std::invalid_argument("shared Brownian step must be positive");
}

PathSummary run_one(const EnsembleConfig& config, const SpdeProblem& problem, const Field& u0,
                    const PathObserver* observer, std::size_t index, std::optional<std::size_t> capture) {
  PathSummary s;
  s.outcome.path = index;
  try {
    PathOptions opts;
    opts.horizon = config.horizon;
    opts.threshold = config.threshold;
    opts.record_stride = config.record_stride;
    opts.store_fields = observer && observer->needs_fields;
    std::optional<BrownianPath> shared;
    if (config.shared_brownian_dt) {
      const double fine = *config.shared_brownian_dt;
      const auto steps = static_cast<std::size_t>(std::llround(config.horizon / fine));
      RngStream rng(config.master_seed, index, 3);
      shared.emplace(fine, steps, rng);
      opts.brownian = &*shared;
    }
    const auto rec = simulate_path(problem, u0, config.scheme, opts, config.master_seed, index);
    s.outcome.blowup = rec.blowup.detected;
    s.outcome.tau = rec.blowup.tau;
    s.outcome.trigger = rec.blowup.trigger;
    s.outcome.halvings = rec.halvings;
    for (std::size_t idx : rec.grid_samples) {
      const auto& smp = rec.samples[idx];
      s.v.push_back(smp.l2sq);
      s.g.push_back(smp.h1sq);
      s.p.push_back(smp.lmp1);
    }
    if (capture && *capture < s.v.size()) s.captured = s.v[*capture];
    if (observer) s.channels = observer->evaluate(rec);
  } catch (const std::exception& e) {
    s.outcome.error = e.what();
    s.v.clear();
    s.g.clear();
    s.p.clear();
    s.channels.clear();
  }
  return s;
}

EnsembleEstimate run_impl(const EnsembleConfig& config, const SpdeProblem& problem, const Field& u0,
                          const PathObserver* observer, std::optional<std::size_t> capture,
                          std::vector<double>* captured) {
  validate_config(config);
  EnsembleEstimate est;
  est.times = record_times(config.horizon, config.scheme.dt, config.record_stride);
  est.paths = config.paths;
  const std::size_t K = est.times.size();
  const std::size_t channels = observer ? observer->channels.size() : 0;
  if (observer) est.channel_names = observer->channels;

  SeriesAccumulator v(K), g(K), p(K);
  std::vector<SeriesAccumulator> ch(channels, SeriesAccumulator(K));
  if (captured) captured->assign(config.paths, std::numeric_limits<double>::quiet_NaN());

  const std::size_t chunk = std::max<std::size_t>(1, config.chunk);
  const unsigned threads = std::max(1u, config.threads);
  std::vector<PathSummary> buffer;
  for (std::size_t begin = 0; begin < config.paths; begin += chunk) {
    const std::size_t end = std::min(config.paths, begin + chunk);
    buffer.assign(end - begin, PathSummary{});
    auto work = [&](std::atomic<std::size_t>& next) {
      for (std::size_t i = next++; i < end - begin; i = next++)
        buffer[i] = run_one(config, problem, u0, observer, begin + i, capture);
    };
    std::atomic<std::size_t> next{0};
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(threads, end - begin));
    if (used <= 1) {
      work(next);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < used; ++t) pool.emplace_back(work, std::ref(next));
      for (auto& th : pool) th.join();
    }
    for (auto& s : buffer) {
      if (!s.outcome.error.empty()) ++est.failed_paths;
      v.add(s.v);
      g.add(s.g);
      p.add(s.p);
      for (std::size_t c = 0; c < channels && c < s.channels.size(); ++c) ch[c].add(s.channels[c]);
      if (captured) (*captured)[s.outcome.path] = s.captured;
      est.outcomes.push_back(std::move(s.outcome));
    }
  }

  est.v = v.finish();
  est.g = g.finish();
  est.p = p.finish();
  for (const auto& c : ch) est.channels.push_back(c.finish());

  const std::size_t valid = config.paths - est.failed_paths;
  auto taus = est.tau_samples();
  est.blowup_fraction.resize(K, 0.0);
  std::size_t idx = 0;
  for (std::size_t k = 0; k < K; ++k) {
    while (idx < taus.size() && taus[idx] <= est.times[k]) ++idx;
    est.blowup_fraction[k] = valid ? static_cast<double>(idx) / static_cast<double>(valid) : 0.0;
  }
  return est;
}

}  // namespace

std::vector<double> EnsembleEstimate::tau_samples() const {
  std::vector<double> t;
  for (const auto& o : outcomes)
    if (o.error.empty() && o.blowup) t.push_back(o.tau);
  std::sort(t.begin(), t.end());
  return t;
}

std::size_t EnsembleEstimate::censored_count() const {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += (o.error.empty() && o.blowup) ? 1 : 0;
  return n;
}

std::vector<double> record_times(double horizon, double dt, std::size_t stride) {
  if (!(horizon > 0.0) || !(dt > 0.0) || stride == 0) throw std::invalid_argument("invalid record grid");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> t{0.0};
  for (std::size_t k = 1; k <= steps; ++k)
    if (k % stride == 0 || k == steps) t.push_back(k == steps ? horizon : static_cast<double>(k) * dt);
  return t;
}

EnsembleEstimate run_ensemble(const EnsembleConfig& config, const SpdeProblem& problem, const Field& u0,
                              const PathObserver* observer) {
  return run_impl(config, problem, u0, observer, std::nullopt, nullptr);
}

MeanSquareBlowup detect_mean_square_blowup(const EnsembleEstimate& est, double ms_threshold, double z) {
  MeanSquareBlowup r;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    if (est.v.count[k] == 0) continue;
    if (est.v.mean[k] - z * est.v.se[k] > ms_threshold) {
      r.ci_time = est.times[k];
      break;
    }
  }
  const auto taus = est.tau_samples();
  const std::size_t valid = est.paths - est.failed_paths;
  const std::size_t half = (valid + 1) / 2;
  if (valid > 0 && taus.size() >= half) r.fraction_time = taus[half - 1];

  if (r.ci_time && (!r.fraction_time || *r.ci_time <= *r.fraction_time)) {
    r.tau_ms = r.ci_time;
    r.trigger = "ci_threshold";
  } else if (r.fraction_time) {
    r.tau_ms = r.fraction_time;
    r.trigger = "blowup_fraction";
  }
  return r;
}

ConvergenceTable convergence_study(const EnsembleConfig& base, const SpdeProblem& problem,
                                   const std::function<double(double)>& initial,
                                   std::span<const Refinement> refinements, double t_check,
                                   std::optional<double> reference, double ms_threshold) {
  if (refinements.empty()) throw std::invalid_argument("convergence study needs at least one refinement");
  if (!(t_check > 0.0) || t_check > base.horizon) throw std::invalid_argument("t_check must lie in (0, horizon]");
  double finest = refinements[0].dt;
  for (const auto& r : refinements) finest = std::min(finest, r.dt);

  ConvergenceTable table;
  table.t_check = t_check;
  std::vector<std::vector<double>> per_path;
  for (const auto& ref : refinements) {
    SpdeProblem prob{IntervalGrid(problem.grid.length(), ref.nodes), problem.params, problem.noise, problem.levy};
    EnsembleConfig cfg = base;
    cfg.scheme.dt = ref.dt;
    cfg.paths = ref.paths;
    if (!cfg.shared_brownian_dt) cfg.shared_brownian_dt = finest;
    const auto times = record_times(cfg.horizon, cfg.scheme.dt, cfg.record_stride);
    std::size_t k = 0;
    while (k < times.size() && std::abs(times[k] - t_check) > 1e-9 * std::max(1.0, t_check)) ++k;
    if (k == times.size()) throw std::invalid_argument("t_check is not a record time of every refinement");

    std::vector<double> captured;
    const auto est = run_impl(cfg, prob, prob.grid.sample(initial), nullptr, k, &captured);
    ConvergenceRow row;
    row.refinement = ref;
    row.h = prob.grid.spacing();
    row.v_hat = est.v.mean[k];
    row.v_se = est.v.se[k];
    row.tau_ms = detect_mean_square_blowup(est, ms_threshold).tau_ms;
    table.rows.push_back(row);
    per_path.push_back(std::move(captured));
  }

  const std::size_t last = table.rows.size() - 1;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    if (reference) {
      row.error = row.v_hat - *reference;
      row.error_se = row.v_se;
      continue;
    }
    Moments diff;
    const std::size_t n = std::min(per_path[r].size(), per_path[last].size());
    for (std::size_t i = 0; i < n; ++i) {
      const double a = per_path[r][i], b = per_path[last][i];
      if (std::isfinite(a) && std::isfinite(b)) diff.add(a - b);
    }
    row.error = diff.n ? diff.mean : std::numeric_limits<double>::quiet_NaN();
    row.error_se = diff.se();
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r + 1 < table.rows.size(); ++r) {
    const auto& a = table.rows[r];
    const auto& b = table.rows[r + 1];
    const bool dt = a.refinement.dt != b.refinement.dt;
    const bool h = a.refinement.nodes != b.refinement.nodes;
    const bool m = a.refinement.paths != b.refinement.paths;
    double order = nan;
    std::string kind = "mixed";
    auto ratio_order = [&](double ea, double eb, double sa, double sb) {
      if (!(std::abs(ea) > 0.0) || !(std::abs(eb) > 0.0) || sa == sb) return nan;
      return std::log(std::abs(ea) / std::abs(eb)) / std::log(sa / sb);
    };
    if (dt && !h && !m) {
      kind = "dt";
      order = ratio_order(a.error, b.error, a.refinement.dt, b.refinement.dt);
    } else if (h && !dt && !m) {
      kind = "h";
      order = ratio_order(a.error, b.error, a.h, b.h);
    } else if (m && !dt && !h) {
      kind = "M";
      order = ratio_order(a.v_se, b.v_se, static_cast<double>(b.refinement.paths),
                          static_cast<double>(a.refinement.paths));
    }
    table.order_kind.push_back(kind);
    table.observed_order.push_back(order);
  }
  return table;
}

}  // namespace stochblow
