#pragma once

// Self-contained reproductions of the three worked examples: the
// mean-stdev route-choice paradox, the AVaR counterexample with normal
// laws, and the Allais lotteries.

#include <riskroute/consistency.hpp>
#include <riskroute/normal.hpp>
#include <riskroute/risk.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace riskroute {

struct GoldenReport {
  std::string name;
  std::map<std::string, double> values;
  std::vector<std::pair<std::string, bool>> checks;

  bool passed() const {
    for (const auto& [_, ok] : checks) {
      if (!ok) return false;
    }
    return true;
  }
  std::string verdict() const { return passed() ? "pass" : "fail"; }
};

inline json to_json(const GoldenReport& r) {
  json checks = json::object();
  for (const auto& [k, ok] : r.checks) checks[k] = ok;
  return {{"golden", r.name}, {"values", r.values}, {"checks", checks}, {"verdict", r.verdict()}};
}

namespace detail {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/// Bisection for an increasing or decreasing f with a sign change on [lo, hi].
template <class F>
double bisect_root(F f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw InternalError("bisect_root: no sign change");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Route s→d through X or Y, then the common independent leg Z.
/// X ~ N(11, 1), Y ~ N(10, 5), Z ~ N(10, 2) (variances); mean_stdev(1).
inline GoldenReport golden_fig1(int buckets = kDefaultBuckets) {
  GoldenReport r{"fig1", {}, {}};
  const auto spec = RiskMeasureSpec::mean_stdev(1.0);
  const NormalDist x = NormalDist::from_variance(11.0, 1.0);
  const NormalDist y = NormalDist::from_variance(10.0, 5.0);
  const NormalDist z = NormalDist::from_variance(10.0, 2.0);
  const NormalDist xz = NormalDist::from_variance(21.0, 3.0);
  const NormalDist yz = NormalDist::from_variance(20.0, 7.0);

  const double rx = evaluate(spec, x);
  const double ry = evaluate(spec, y);
  const double rxz = evaluate(spec, xz);
  const double ryz = evaluate(spec, yz);
  r.values = {{"rho_X", rx}, {"rho_Y", ry}, {"rho_X+Z", rxz}, {"rho_Y+Z", ryz}};
  r.checks.emplace_back("rho_X = 12", detail::near(rx, 12.0, kClosedFormTolerance));
  r.checks.emplace_back("rho_Y = 10+sqrt5", detail::near(ry, 10.0 + std::sqrt(5.0), kClosedFormTolerance));
  r.checks.emplace_back("rho_X+Z = 21+sqrt3",
                        detail::near(rxz, 21.0 + std::sqrt(3.0), kClosedFormTolerance));
  r.checks.emplace_back("rho_Y+Z = 20+sqrt7",
                        detail::near(ryz, 20.0 + std::sqrt(7.0), kClosedFormTolerance));
  r.checks.emplace_back("reversal", rx < ry && rxz > ryz);

  // Bounded re-enactment: shift by a common constant so the negative mass
  // is negligible, truncate to [0, M], condition, then undo the shift.
  constexpr double c = 10.0;
  constexpr double upper = 100.0;
  auto bounded = [&](const NormalDist& n) {
    const DiscreteDist d = discretize(NormalDist(n.mean() + c, n.stddev()), buckets);
    return truncate_conditional(d, 0.0, upper);
  };
  const DiscreteDist bx = bounded(x);
  const DiscreteDist by = bounded(y);
  const DiscreteDist bz = bounded(z);
  const double dx = evaluate(spec, bx) - c;
  const double dy = evaluate(spec, by) - c;
  const double dxz = evaluate(spec, convolve(bx, bz)) - 2 * c;
  const double dyz = evaluate(spec, convolve(by, bz)) - 2 * c;
  r.values.insert({{"disc_rho_X", dx}, {"disc_rho_Y", dy}, {"disc_rho_X+Z", dxz},
                   {"disc_rho_Y+Z", dyz}});
  r.checks.emplace_back("disc_rho_X", detail::near(dx, rx, kDiscretizedTolerance));
  r.checks.emplace_back("disc_rho_Y", detail::near(dy, ry, kDiscretizedTolerance));
  r.checks.emplace_back("disc_rho_X+Z", detail::near(dxz, rxz, kDiscretizedTolerance));
  r.checks.emplace_back("disc_rho_Y+Z", detail::near(dyz, ryz, kDiscretizedTolerance));
  r.checks.emplace_back("disc_reversal", dx < dy && dxz > dyz);
  return r;
}

/// Level p at which AVaR_p(N(μ, σ²)) = μ + σ, i.e. φ(Φ⁻¹(1−p))/p = 1.
inline double avar_one_sigma_level() {
  return detail::bisect_root(
      [](double p) { return normal::pdf(normal::quantile(1.0 - p)) / p - 1.0; }, 0.01, 0.99,
      1e-12);
}

/// X, Y ~ N(10, 1) in series versus Z ~ N(20, 3), under AVaR at the level
/// where AVaR = μ + σ. Evaluating X and Y separately prefers Z; merging
/// them into U = X + Y ~ N(20, 2) displaces Z.
inline GoldenReport golden_fig4() {
  GoldenReport r{"fig4", {}, {}};
  const double p = avar_one_sigma_level();
  const auto spec = RiskMeasureSpec::avar(p);
  const NormalDist x = NormalDist::from_variance(10.0, 1.0);
  const NormalDist z = NormalDist::from_variance(20.0, 3.0);
  const NormalDist u = NormalDist::from_variance(20.0, 2.0);
  const double iterated = 2.0 * evaluate(spec, x);
  const double rz = evaluate(spec, z);
  const double ru = evaluate(spec, u);
  r.values = {{"p_star", p}, {"rho_X+rho_Y", iterated}, {"rho_Z", rz}, {"rho_U", ru}};
  r.checks.emplace_back("iterated = 22", detail::near(iterated, 22.0, kComposedTolerance));
  r.checks.emplace_back("rho_Z = 20+sqrt3", detail::near(rz, 20.0 + std::sqrt(3.0), kComposedTolerance));
  r.checks.emplace_back("rho_U = 20+sqrt2", detail::near(ru, 20.0 + std::sqrt(2.0), kComposedTolerance));
  r.checks.emplace_back("iterated prefers Z", iterated > rz);
  r.checks.emplace_back("merged prefers U", ru < rz);
  return r;
}

/// X = 50; Y = 35 w.p. 0.8, 100 w.p. 0.2; Z = 100; lotteries at p = 0.25.
inline GoldenReport golden_allais() {
  GoldenReport r{"allais", {}, {}};
  const DiscreteDist x = DiscreteDist::point(50.0);
  const DiscreteDist y({35.0, 100.0}, {0.8, 0.2});
  const DiscreteDist z = DiscreteDist::point(100.0);
  const Distribution lx = mixture(0.25, x, z);
  const Distribution ly = mixture(0.25, y, z);
  const double ex = stats(x).mean;
  const double ey = stats(y).mean;
  const double elx = stats(lx).mean;
  const double ely = stats(ly).mean;
  r.values = {{"E_X", ex}, {"E_Y", ey}, {"E_L(X)", elx}, {"E_L(Y)", ely}};
  r.checks.emplace_back("E_X = 50", detail::near(ex, 50.0, kClosedFormTolerance));
  r.checks.emplace_back("E_Y = 48", detail::near(ey, 48.0, kClosedFormTolerance));
  r.checks.emplace_back("E_L(X) = 87.5", detail::near(elx, 87.5, kClosedFormTolerance));
  r.checks.emplace_back("E_L(Y) = 87", detail::near(ely, 87.0, kClosedFormTolerance));
  r.checks.emplace_back("mixing preserves order", (ex > ey) == (elx > ely));
  return r;
}

}  // namespace riskroute
