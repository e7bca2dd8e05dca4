#pragma once

// Brute-force checks of additive consistency, the Bernoulli-sum functional
// equation for distortions, and translation invariance of utility-based
// functionals. Every check returns the violations it found; an empty list
// means the property held on every probe.

#include <riskroute/coupling.hpp>
#include <riskroute/dist_json.hpp>
#include <riskroute/ensemble.hpp>
#include <riskroute/risk.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

namespace riskroute {

/// Closed-form identities.
inline constexpr double kClosedFormTolerance = 1e-12;
/// Composed floating-point arithmetic.
inline constexpr double kComposedTolerance = 1e-9;
/// Re-enactments on discretized normal laws.
inline constexpr double kDiscretizedTolerance = 1e-2;

struct ViolationReport {
  std::string property;
  json witness;
  double lhs;
  double rhs;
  double gap;
};

inline json to_json(const ViolationReport& r) {
  return {{"property", r.property}, {"witness", r.witness}, {"lhs", r.lhs}, {"rhs", r.rhs},
          {"gap", r.gap}};
}

inline ViolationReport violation_report_from_json(const json& j) {
  try {
    return {j.at("property").get<std::string>(), j.at("witness"), j.at("lhs").get<double>(),
            j.at("rhs").get<double>(), j.at("gap").get<double>()};
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("violation report JSON: ") + e.what());
  }
}

/// Canonical order: by serialized witness, then property name.
inline void sort_reports(std::vector<ViolationReport>& reports) {
  std::vector<std::tuple<std::string, std::string, std::size_t>> keys;
  keys.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    keys.emplace_back(reports[i].witness.dump(), reports[i].property, i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<ViolationReport> sorted;
  sorted.reserve(reports.size());
  for (const auto& k : keys) sorted.push_back(std::move(reports[std::get<2>(k)]));
  reports = std::move(sorted);
}

inline std::size_t count_property(const std::vector<ViolationReport>& reports,
                                  const std::string& property) {
  return static_cast<std::size_t>(std::count_if(
      reports.begin(), reports.end(), [&](const auto& r) { return r.property == property; }));
}

namespace detail {

inline void report_equality(std::vector<ViolationReport>& out, const std::string& property,
                            json witness, double lhs, double rhs, double tol) {
  const double gap = std::abs(lhs - rhs);
  if (!(gap <= tol)) out.push_back({property, std::move(witness), lhs, rhs, gap});
}

inline void report_inequality(std::vector<ViolationReport>& out, const std::string& property,
                              json witness, double lhs, double rhs, double tol) {
  const double gap = std::max(0.0, lhs - rhs);
  if (!(gap <= tol)) out.push_back({property, std::move(witness), lhs, rhs, gap});
}

/// Sum of doubles without intermediate rounding (Shewchuk partials).
inline double exact_sum(std::initializer_list<double> values) {
  std::vector<double> partials;
  for (double x : values) {
    std::size_t used = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }
  double total = 0.0;
  for (double v : partials) total += v;
  return total;
}

}  // namespace detail

/// ρ(X ⊛ Y) − ρ(X) − ρ(Y) for independent X and Y.
inline double additivity_residual(const RiskMeasureSpec& spec, const DiscreteDist& x,
                                  const DiscreteDist& y) {
  return evaluate(spec, convolve(x, y)) - evaluate(spec, x) - evaluate(spec, y);
}

/// Searches the given (X, Y, Z) triples, Z independent of (X, Y), for
/// preference reversals: ρ(X) ≤ ρ(Y) yet ρ(X+Z) > ρ(Y+Z) + tol. Both
/// orientations of each pair are tried.
inline std::vector<ViolationReport> check_additive_consistency(
    const RiskMeasureSpec& spec, const std::vector<std::array<DiscreteDist, 3>>& triples,
    double tol = kClosedFormTolerance) {
  std::vector<ViolationReport> out;
  for (const auto& [x, y, z] : triples) {
    const double rx = evaluate(spec, x);
    const double ry = evaluate(spec, y);
    const double rxz = evaluate(spec, convolve(x, z));
    const double ryz = evaluate(spec, convolve(y, z));
    auto probe = [&](const DiscreteDist& better, const DiscreteDist& worse, double rb, double rw,
                     double rbz, double rwz) {
      if (rb > rw) return;
      json witness = {{"spec", spec.to_string()},
                      {"X", to_json(better)},
                      {"Y", to_json(worse)},
                      {"Z", to_json(z)},
                      {"rho_X", rb},
                      {"rho_Y", rw}};
      detail::report_inequality(out, "additive_consistency", std::move(witness), rbz, rwz, tol);
    };
    probe(x, y, rx, ry, rxz, ryz);
    probe(y, x, ry, rx, ryz, rxz);
  }
  sort_reports(out);
  return out;
}

inline std::vector<ViolationReport> check_additive_consistency(const RiskMeasureSpec& spec,
                                                               const TestEnsemble& ensemble) {
  return check_additive_consistency(spec, ensemble_triples(ensemble));
}

/// Additivity residuals above tol over the ensemble's independent pairs.
inline std::vector<ViolationReport> check_additivity(const RiskMeasureSpec& spec,
                                                     const TestEnsemble& ensemble,
                                                     double tol = kComposedTolerance) {
  std::vector<ViolationReport> out;
  for (const auto& [x, y] : ensemble_pairs(ensemble)) {
    const double lhs = evaluate(spec, convolve(x, y));
    const double rhs = evaluate(spec, x) + evaluate(spec, y);
    detail::report_equality(out, "additivity",
                            {{"spec", spec.to_string()}, {"X", to_json(x)}, {"Y", to_json(y)}}, lhs,
                            rhs, tol);
  }
  sort_reports(out);
  return out;
}

/// P(B_p + B_q > x) for independent Bernoullis, case by case:
/// 1 below 0, 1 − (1−p)(1−q) on [0,1), pq on [1,2), 0 from 2 on.
inline double bernoulli_sum_decumulative(double p, double q, double x) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw InvalidInput("bernoulli_sum_decumulative: p, q must lie in [0,1]");
  }
  if (x < 0.0) return 1.0;
  if (x < 1.0) return 1.0 - (1.0 - p) * (1.0 - q);
  if (x < 2.0) return p * q;
  return 0.0;
}

/// h(1 − p̄q̄) + h(pq) − h(p) − h(q), where p̄ = 1 − p.
///
/// The argument 1 − p̄q̄ = p + q − pq is carried as an exact sum of doubles;
/// when h is the identity the whole residual is summed exactly.
inline double efin_residual(const DistortionFn& h, double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    throw InvalidInput("efin_residual: p, q must lie in [0,1]");
  }
  const double pq_hi = p * q;
  const double pq_lo = std::fma(p, q, -pq_hi);
  if (h.is_identity()) return detail::exact_sum({p, q, -pq_hi, -pq_lo, pq_hi, pq_lo, -p, -q});
  const double union_prob = detail::exact_sum({p, q, -pq_hi, -pq_lo});
  return detail::exact_sum({h(union_prob), h(pq_hi), -h(p), -h(q)});
}

struct TranslationProbe {
  double z;
  double p;
  double m;
};

/// z ∈ {−3..3}\{0}, p ∈ {0.1..0.9}, m ∈ {−5..5}.
inline std::vector<TranslationProbe> default_translation_grid() {
  std::vector<TranslationProbe> grid;
  for (int z = -3; z <= 3; ++z) {
    if (z == 0) continue;
    for (int p = 1; p <= 9; ++p) {
      for (int m = -5; m <= 5; ++m) grid.push_back({double(z), p / 10.0, double(m)});
    }
  }
  return grid;
}

/// ρ_c(zB_p + m) − ρ_c(zB_p) − m at each grid point.
inline std::vector<ViolationReport> verify_translation_invariance(
    const UtilityFn& c, const std::vector<TranslationProbe>& grid,
    double tol = kComposedTolerance) {
  std::vector<ViolationReport> out;
  for (const auto& g : grid) {
    if (!(g.p > 0.0 && g.p < 1.0) || g.z == 0.0) {
      throw InvalidInput("verify_translation_invariance: need p in (0,1) and z != 0");
    }
    const DiscreteDist x = DiscreteDist::bernoulli(g.p, g.z);
    const double lhs = certainty_equivalent(shift(x, g.m), c);
    const double rhs = certainty_equivalent(x, c) + g.m;
    detail::report_equality(out, "translation_invariance",
                            {{"utility", c.to_string()}, {"z", g.z}, {"p", g.p}, {"m", g.m}}, lhs,
                            rhs, tol);
  }
  sort_reports(out);
  return out;
}

/// Two checks of ρ_c^h on scaled Bernoullis over the ensemble probes:
///   rankdep_translation: ρ(zB_p + m) = ρ(zB_p) + m
///   rankdep_additivity:  ρ(zB_p + zB_q) = c⁻¹(h(p)c(z)) + c⁻¹(h(q)c(z))
/// The left sides use the general evaluator on the exact laws; the right
/// side of the additivity check uses the scaled-Bernoulli closed form.
inline std::vector<ViolationReport> verify_rank_dependent(const UtilityFn& c, const DistortionFn& h,
                                                          const TestEnsemble& ensemble,
                                                          double tol = kComposedTolerance) {
  std::vector<ViolationReport> out;
  for (const auto& t : ensemble_probes(ensemble)) {
    const json witness = {{"utility", c.to_string()}, {"distortion", h.to_string()},
                          {"z", t.z},  {"p", t.p}, {"q", t.q}, {"m", t.m}};
    const DiscreteDist zp = DiscreteDist::bernoulli(t.p, t.z);
    const DiscreteDist zq = DiscreteDist::bernoulli(t.q, t.z);
    detail::report_equality(out, "rankdep_translation", witness, rank_dependent(shift(zp, t.m), c, h),
                            rank_dependent(zp, c, h) + t.m, tol);
    const double cz = c.value(t.z);
    detail::report_equality(out, "rankdep_additivity", witness,
                            rank_dependent(convolve(zp, zq), c, h),
                            c.inverse(h(t.p) * cz) + c.inverse(h(t.q) * cz), tol);
  }
  sort_reports(out);
  return out;
}

/// Axiom sweep for one spec over the ensemble: normalization on constants,
/// and (where the measure claims them) translation invariance, monotonicity
/// on pointwise-ordered couplings, positive homogeneity; law invariance;
/// the AVaR dual representation for avar specs.
inline std::vector<ViolationReport> check_axioms(const RiskMeasureSpec& spec,
                                                 const TestEnsemble& ensemble) {
  std::vector<ViolationReport> out;
  EnsembleRng rng(ensemble.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::string name = spec.to_string();
  for (const auto& [x, y] : ensemble_pairs(ensemble)) {
    const json wx = {{"spec", name}, {"X", to_json(x)}};
    const double rx = evaluate(spec, x);

    const double m = rng.uniform(ensemble.value_lo, ensemble.value_hi);
    detail::report_equality(out, "normalization", {{"spec", name}, {"m", m}},
                            evaluate(spec, Distribution::constant(m)), m, kComposedTolerance);

    if (spec.is_translation_invariant()) {
      const double shift_by = std::round(rng.uniform(-5.0, 5.0));
      json w = wx;
      w["m"] = shift_by;
      detail::report_equality(out, "translation_invariance", std::move(w),
                              evaluate(spec, shift(x, shift_by)), rx + shift_by,
                              kComposedTolerance);
    }

    if (spec.is_monotone()) {
      // Y' = X + |bump| on every outcome of the comonotone coupling of X, Y.
      const auto coupled = comonotone_couple(x, y).with_column(
          "W", [](std::span<const double> r) { return r[0] + std::abs(r[1] - r[0]) * 0.25; });
      json w = wx;
      w["Y"] = to_json(y);
      detail::report_inequality(out, "monotonicity", std::move(w), rx,
                                evaluate(spec, coupled.marginal("W")), kClosedFormTolerance);
    }

    if (spec.is_positively_homogeneous()) {
      const double lambda = rng.uniform(0.1, 4.0);
      json w = wx;
      w["lambda"] = lambda;
      detail::report_equality(out, "positive_homogeneity", std::move(w),
                              evaluate(spec, scale(x, lambda)), lambda * rx, kComposedTolerance);
    }

    // A second copy of X on a product space has the same law.
    const auto joint = product_couple(CoupledSample::single("X", x), y, "Y");
    detail::report_equality(out, "law_invariance", wx, evaluate(spec, joint.marginal("X")), rx,
                            kComposedTolerance);

    if (spec.kind() == RiskMeasureSpec::Kind::avar) {
      detail::report_equality(out, "avar_dual", wx, rx, avar_dual(x, spec.param()),
                              kComposedTolerance);
    }
  }
  sort_reports(out);
  return out;
}

/// X uniform on {0, 1/n, ..., 1} and Y = (1 + X)/2 on the same outcomes,
/// so X ≤ Y pointwise.
inline CoupledSample uniform_coupled_pair(int n = 100) {
  if (n < 1) throw InvalidInput("uniform_coupled_pair: n must be >= 1");
  std::vector<double> probs(static_cast<std::size_t>(n) + 1, 1.0 / (n + 1));
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= n; ++k) {
    const double x = static_cast<double>(k) / n;
    rows.push_back({x, 0.5 * (1.0 + x)});
  }
  return CoupledSample({"X", "Y"}, std::move(probs), std::move(rows));
}

/// Monotonicity on one coupling: if column `lo` ≤ column `hi` on every
/// outcome, reports ρ(lo) > ρ(hi).
inline std::vector<ViolationReport> check_monotone_pair(const RiskMeasureSpec& spec,
                                                        const CoupledSample& sample,
                                                        const std::string& lo,
                                                        const std::string& hi,
                                                        double tol = kClosedFormTolerance) {
  std::vector<ViolationReport> out;
  if (!sample.almost_surely_leq(lo, hi)) return out;
  const DiscreteDist a = sample.marginal(lo);
  const DiscreteDist b = sample.marginal(hi);
  detail::report_inequality(out, "monotonicity",
                            {{"spec", spec.to_string()}, {lo, to_json(a)}, {hi, to_json(b)}},
                            evaluate(spec, a), evaluate(spec, b), tol);
  return out;
}

/// Grid sweep of efin_residual over p, q ∈ {0, 1/(n-1), ..., 1}; reports
/// |residual| > tol with lhs = h(1 − p̄q̄) + h(pq) and rhs = h(p) + h(q).
inline std::vector<ViolationReport> check_efin(const DistortionFn& h, int n = 101, double tol = 0.0) {
  if (n < 2) throw InvalidInput("check_efin: need at least two grid points");
  std::vector<ViolationReport> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p = static_cast<double>(i) / (n - 1);
      const double q = static_cast<double>(j) / (n - 1);
      const double r = efin_residual(h, p, q);
      if (std::abs(r) > tol) {
        const double rhs = h(p) + h(q);
        out.push_back({"efin", {{"distortion", h.to_string()}, {"p", p}, {"q", q}}, rhs + r, rhs,
                       std::abs(r)});
      }
    }
  }
  sort_reports(out);
  return out;
}

}  // namespace riskroute
