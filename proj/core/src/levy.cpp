#include "stochblow/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stochblow/quadrature.hpp"

namespace stochblow {

namespace {

void validate(const FiniteAtoms& a) {
  for (const auto& atom : a.atoms) {
    if (!std::isfinite(atom.mark) || atom.mark == 0.0)
      throw std::invalid_argument("Levy atom mark must be finite and nonzero (no atom at 0)");
    if (!(atom.rate > 0.0) || !std::isfinite(atom.rate))
      throw std::invalid_argument("Levy atom rate must be positive and finite");
  }
}

void validate(const TruncatedStable& s) {
  if (!(s.c > 0.0)) throw std::invalid_argument("truncated stable: c must be positive");
  if (!(s.alpha > 0.0 && s.alpha < 2.0))
    throw std::invalid_argument("truncated stable: alpha must lie in (0, 2)");
  if (!(s.r_min > 0.0)) throw std::invalid_argument("truncated stable: r_min must be positive");
  if (!(s.r_max > s.r_min) || !std::isfinite(s.r_max))
    throw std::invalid_argument("truncated stable: r_max must be finite and exceed r_min");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ∫_{a}^{b} c z^{-1-α} dz on one half-line.
double stable_half_mass(const TruncatedStable& s) {
  return s.c * (std::pow(s.r_min, -s.alpha) - std::pow(s.r_max, -s.alpha)) / s.alpha;
}

}  // namespace

LevyMeasure::LevyMeasure() : spec_(FiniteAtoms{}) {}

LevyMeasure::LevyMeasure(FiniteAtoms atoms) : spec_(std::move(atoms)) {
  validate(std::get<FiniteAtoms>(spec_));
  build_rule();
}

LevyMeasure::LevyMeasure(TruncatedStable density) : spec_(density) {
  validate(density);
  build_rule();
}

bool LevyMeasure::is_zero() const { return total_rate() == 0.0; }

std::string LevyMeasure::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{[&](const FiniteAtoms& a) {
                          if (a.atoms.empty()) {
                            os << "none";
                            return;
                          }
                          os << "atoms{";
                          for (std::size_t i = 0; i < a.atoms.size(); ++i)
                            os << (i ? ", " : "") << "(" << a.atoms[i].mark << ", " << a.atoms[i].rate << ")";
                          os << "}";
                        },
                        [&](const TruncatedStable& s) {
                          os << "truncated_stable{c=" << s.c << ", alpha=" << s.alpha << ", r=[" << s.r_min
                             << ", " << s.r_max << "]}";
                        }},
             spec_);
  return os.str();
}

double LevyMeasure::total_rate() const {
  return std::visit(Overloaded{[](const FiniteAtoms& a) {
                                 double s = 0.0;
                                 for (const auto& atom : a.atoms) s += atom.rate;
                                 return s;
                               },
                               [](const TruncatedStable& s) { return 2.0 * stable_half_mass(s); }},
                    spec_);
}

double LevyMeasure::integrate(const std::function<double(double)>& g) const {
  return std::visit(
      Overloaded{[&](const FiniteAtoms& a) {
                   double s = 0.0;
                   for (const auto& atom : a.atoms) {
                     const double v = g(atom.mark);
                     if (!std::isfinite(v)) throw std::domain_error("integrand is not finite on the support");
                     s += v * atom.rate;
                   }
                   return s;
                 },
                 [&](const TruncatedStable& s) {
                   // z = e^u on each half-line: c z^{-1-α} dz = c e^{-α u} du.
                   auto integrand = [&](double u) {
                     const double z = std::exp(u);
                     return s.c * std::exp(-s.alpha * u) * (g(z) + g(-z));
                   };
                   auto res = integrate_adaptive(integrand, std::log(s.r_min), std::log(s.r_max), 1e-10, 1e-300);
                   return res.value;
                 }},
      spec_);
}

double LevyMeasure::levy_moment() const {
  return integrate([](double z) { return std::min(z * z, 1.0); });
}

void LevyMeasure::build_rule() {
  rule_.clear();
  cumulative_.clear();
  std::visit(Overloaded{[&](const FiniteAtoms& a) {
                          double acc = 0.0;
                          for (const auto& atom : a.atoms) {
                            rule_.emplace_back(atom.mark, atom.rate);
                            acc += atom.rate;
                            cumulative_.push_back(acc);
                          }
                        },
                        [&](const TruncatedStable& s) {
                          for (auto [u, w] : kronrod_rule(std::log(s.r_min), std::log(s.r_max), 4)) {
                            const double z = std::exp(u);
                            const double weight = w * s.c * std::exp(-s.alpha * u);
                            rule_.emplace_back(z, weight);
                            rule_.emplace_back(-z, weight);
                          }
                        }},
             spec_);
}

double LevyMeasure::sample_mark(RngStream& rng) const {
  return std::visit(
      Overloaded{[&](const FiniteAtoms& a) {
                   const double target = rng.uniform() * cumulative_.back();
                   auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
                   const auto idx = std::min<std::size_t>(it - cumulative_.begin(), a.atoms.size() - 1);
                   return a.atoms[idx].mark;
                 },
                 [&](const TruncatedStable& s) {
                   // Inverse CDF of r^{-1-α} on [r_min, r_max], then a fair sign.
                   const double lo = std::pow(s.r_min, -s.alpha);
                   const double hi = std::pow(s.r_max, -s.alpha);
                   const double r = std::pow(lo - rng.uniform() * (lo - hi), -1.0 / s.alpha);
                   return rng.uniform() < 0.5 ? -r : r;
                 }},
      spec_);
}

std::vector<JumpEvent> LevyMeasure::sample_jumps(double horizon, RngStream& rng) const {
  if (!(horizon > 0.0)) throw std::invalid_argument("jump horizon must be positive");
  std::vector<JumpEvent> events;
  const double rate = total_rate();
  if (rate == 0.0) return events;
  double t = rng.exponential(rate);
  while (t <= horizon) {
    events.push_back({t, sample_mark(rng)});
    t += rng.exponential(rate);
  }
  return events;
}

std::vector<double> LevyMeasure::support_points(std::size_t per_side) const {
  return std::visit(Overloaded{[](const FiniteAtoms& a) {
                                 std::vector<double> pts;
                                 for (const auto& atom : a.atoms) pts.push_back(atom.mark);
                                 return pts;
                               },
                               [&](const TruncatedStable& s) {
                                 std::vector<double> pts;
                                 const double la = std::log(s.r_min), lb = std::log(s.r_max);
                                 for (std::size_t i = 0; i < per_side; ++i) {
                                   const double z = std::exp(la + (lb - la) * i / (per_side - 1));
                                   pts.push_back(z);
                                   pts.push_back(-z);
                                 }
                                 return pts;
                               }},
                    spec_);
}

double total_rate(const LevyMeasure& levy) { return levy.total_rate(); }

double integral_against_levy(const LevyMeasure& levy, const std::function<double(double)>& g) {
  return levy.integrate(g);
}

std::vector<JumpEvent> sample_jumps(const LevyMeasure& levy, double horizon, RngStream& rng) {
  return levy.sample_jumps(horizon, rng);
}

}  // namespace stochblow
