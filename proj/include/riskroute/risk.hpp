#pragma once

// Risk functionals over travel-time laws. Discrete laws are evaluated
// exactly; normal laws use closed forms where one exists.

#include <riskroute/dist.hpp>
#include <riskroute/normal.hpp>
#include <riskroute/risk_spec.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace riskroute {

namespace detail {

inline void require_level(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput(std::string(who) + ": p must lie in (0,1)");
}

// tail[i] = P(X ≥ x_i); tail[n] = 0.
inline std::vector<double> upper_tail(const DiscreteDist& d) {
  std::vector<double> tail(d.size() + 1, 0.0);
  for (std::size_t i = d.size(); i-- > 0;) tail[i] = tail[i + 1] + d.probs()[i];
  return tail;
}

// Choquet integral of the ordered values y_1 < ... < y_n under the
// distorted decumulative h(P(X > x_i)):
//   y_1 + Σ_i h(P(X > x_i)) (y_{i+1} - y_i).
// Splitting the real line at 0 as in the textbook definition gives the
// same value because h(1) = 1.
inline double choquet(const DiscreteDist& d, const std::vector<double>& values,
                      const DistortionFn& h) {
  const auto tail = upper_tail(d);
  double acc = values.front();
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    acc += h(tail[i + 1]) * (values[i + 1] - values[i]);
  }
  return acc;
}

}  // namespace detail

/// (1/β) ln E e^{βX}; the mean when β = 0.
inline double entropic(const Distribution& x, double beta) {
  if (!std::isfinite(beta)) throw InvalidInput("entropic: beta must be finite");
  if (x.is_constant()) return x.constant_value();
  if (x.is_normal()) return x.normal().mean() + 0.5 * beta * x.normal().variance();
  const DiscreteDist& d = x.discrete();
  if (beta == 0.0) return stats(x).mean;
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.probs()[i] > 0.0) shift = std::max(shift, beta * d.support()[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum += d.probs()[i] * std::exp(beta * d.support()[i] - shift);
  }
  return (shift + std::log(sum)) / beta;
}

inline double mean_var(const Distribution& x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("mean_var: gamma must be > 0");
  const Stats s = stats(x);
  return s.mean + gamma * s.variance;
}

inline double mean_stdev(const Distribution& x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("mean_stdev: gamma must be > 0");
  const Stats s = stats(x);
  return s.mean + gamma * std::sqrt(s.variance);
}

/// inf{m : P(X ≤ m) ≥ 1 - p}.
inline double value_at_risk(const Distribution& x, double p) {
  detail::require_level(p, "value_at_risk");
  if (x.is_constant()) return x.constant_value();
  if (x.is_normal()) return x.normal().mean() + x.normal().stddev() * normal::quantile(1.0 - p);
  const DiscreteDist& d = x.discrete();
  const double target = 1.0 - p - kMassTolerance;
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d.probs()[i];
    if (acc >= target) return d.support()[i];
  }
  return d.max();
}

/// (1/p) inf_z { E(X - z)_+ + p z }, minimized over the support points
/// (the objective is convex piecewise linear with kinks there).
inline double avar_dual(const DiscreteDist& d, double p) {
  detail::require_level(p, "avar_dual");
  double best = std::numeric_limits<double>::infinity();
  double above_mass = 0.0;   // P(X > x_k)
  double above_first = 0.0;  // E(X; X > x_k)
  for (std::size_t k = d.size(); k-- > 0;) {
    const double z = d.support()[k];
    best = std::min(best, above_first - z * above_mass + p * z);
    above_mass += d.probs()[k];
    above_first += d.probs()[k] * z;
  }
  return best / p;
}

/// Average of VaR_q over q ∈ (0, p]: the mean of the worst p-mass, with the
/// boundary atom entering at fractional weight.
inline double avar(const Distribution& x, double p) {
  detail::require_level(p, "avar");
  if (x.is_constant()) return x.constant_value();
  if (x.is_normal()) {
    const double z = normal::quantile(1.0 - p);
    return x.normal().mean() + x.normal().stddev() * normal::pdf(z) / p;
  }
  const DiscreteDist& d = x.discrete();
  double remaining = p;
  double acc = 0.0;
  for (std::size_t i = d.size(); i-- > 0 && remaining > 0.0;) {
    const double take = std::min(d.probs()[i], remaining);
    acc += take * d.support()[i];
    remaining -= take;
  }
  const double tail = acc / p;
  const double dual = avar_dual(d, p);
  if (std::abs(tail - dual) > 1e-9 * std::max(1.0, std::abs(tail))) {
    throw InternalError("avar: quantile and dual evaluations disagree");
  }
  return tail;
}

/// E(X | X ≥ VaR_p(X)).
inline double tce(const Distribution& x, double p) {
  detail::require_level(p, "tce");
  if (x.is_constant()) return x.constant_value();
  if (x.is_normal()) return avar(x, p);
  const DiscreteDist& d = x.discrete();
  const double v = value_at_risk(x, p);
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.support()[i] >= v) {
      mass += d.probs()[i];
      first += d.probs()[i] * d.support()[i];
    }
  }
  if (mass <= kZeroMass) throw ZeroMassError("tce: empty upper tail");
  return first / mass;
}

/// ∫_{-∞}^0 [h(P(X>x)) - 1] dx + ∫_0^∞ h(P(X>x)) dx on a finite law.
inline double distortion_measure(const Distribution& x, const DistortionFn& h) {
  if (x.is_constant()) return x.constant_value();
  const DiscreteDist d = x.require_finite("distortion_measure");
  return detail::choquet(d, {d.support().begin(), d.support().end()}, h);
}

/// c⁻¹(E c(X)).
inline double certainty_equivalent(const Distribution& x, const UtilityFn& c) {
  using K = UtilityFn::Kind;
  if (c.kind() == K::identity) return stats(x).mean;
  if (c.kind() == K::exponential) return entropic(x, c.beta());
  const DiscreteDist d = x.require_finite("certainty_equivalent");
  for (double v : d.support()) {
    if (!c.in_domain(v)) throw DomainError("certainty_equivalent: support leaves utility domain");
  }
  if (x.is_constant()) return x.constant_value();
  double expected = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) expected += d.probs()[i] * c.value(d.support()[i]);
  return c.inverse(expected);
}

/// c⁻¹ of the distorted expectation of c(X).
inline double rank_dependent(const Distribution& x, const UtilityFn& c, const DistortionFn& h) {
  const DiscreteDist d = x.require_finite("rank_dependent");
  for (double v : d.support()) {
    if (!c.in_domain(v)) throw DomainError("rank_dependent: support leaves utility domain");
  }
  if (x.is_constant()) return x.constant_value();
  if (c.kind() == UtilityFn::Kind::exponential) {
    // (1/β) ln of the Choquet integral of e^{βX}, scaled by e^{-s} with s
    // the largest exponent so nothing overflows.
    const double beta = c.beta();
    const double s = std::max(beta * d.min(), beta * d.max());
    std::vector<double> scaled(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) scaled[i] = std::exp(beta * d.support()[i] - s);
    return (s + std::log(detail::choquet(d, scaled, h))) / beta;
  }
  std::vector<double> utilities(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) utilities[i] = c.value(d.support()[i]);
  return c.inverse(detail::choquet(d, utilities, h));
}

/// Uniform dispatch over RiskMeasureSpec.
inline double evaluate(const RiskMeasureSpec& spec, const Distribution& x) {
  using K = RiskMeasureSpec::Kind;
  switch (spec.kind()) {
    case K::entropic:
      return entropic(x, spec.param());
    case K::mean_var:
      return mean_var(x, spec.param());
    case K::mean_stdev:
      return mean_stdev(x, spec.param());
    case K::var:
      return value_at_risk(x, spec.param());
    case K::avar:
      return avar(x, spec.param());
    case K::tce:
      return tce(x, spec.param());
    case K::distortion:
      return distortion_measure(x, spec.distortion_fn());
    case K::cert_equiv:
      return certainty_equivalent(x, spec.utility_fn());
    case K::rank_dep:
      return rank_dependent(x, spec.utility_fn(), spec.distortion_fn());
  }
  throw InvalidInput("evaluate: unknown risk measure");
}

}  // namespace riskroute
