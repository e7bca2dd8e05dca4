#include <gtest/gtest.h>

#include <riskroute/coupling.hpp>
#include <riskroute/risk.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

using namespace riskroute;

namespace {

const DiscreteDist kThreeAtoms({1.0, 2.0, 3.0}, {0.5, 0.3, 0.2});
const DiscreteDist kFairCoin({0.0, 1.0}, {0.5, 0.5});

std::vector<RiskMeasureSpec> all_specs() {
  return {RiskMeasureSpec::entropic(0.0),
          RiskMeasureSpec::entropic(1.3),
          RiskMeasureSpec::entropic(-0.7),
          RiskMeasureSpec::mean_var(0.5),
          RiskMeasureSpec::mean_stdev(1.0),
          RiskMeasureSpec::var(0.1),
          RiskMeasureSpec::avar(0.25),
          RiskMeasureSpec::tce(0.3),
          RiskMeasureSpec::distortion(DistortionFn::identity()),
          RiskMeasureSpec::distortion(DistortionFn::power(0.5)),
          RiskMeasureSpec::distortion(DistortionFn::avar_cap(0.2)),
          RiskMeasureSpec::distortion(
              DistortionFn::piecewise_linear({{0.0, 0.0}, {0.3, 0.6}, {1.0, 1.0}})),
          RiskMeasureSpec::cert_equiv(UtilityFn::identity()),
          RiskMeasureSpec::cert_equiv(UtilityFn::exponential(0.4)),
          RiskMeasureSpec::cert_equiv(UtilityFn::cubic_test()),
          RiskMeasureSpec::rank_dep(UtilityFn::exponential(0.3), DistortionFn::power(0.7)),
          RiskMeasureSpec::rank_dep(UtilityFn::cubic_test(), DistortionFn::avar_cap(0.4))};
}

}  // namespace

// --- entropic ---------------------------------------------------------------

TEST(Entropic, ConstantIsItself) {
  for (double beta : {-3.0, 0.0, 0.5, 10.0}) {
    EXPECT_EQ(entropic(Distribution::constant(4.25), beta), 4.25);
  }
}

TEST(Entropic, FairCoinByHand) {
  EXPECT_NEAR(entropic(kFairCoin, 1.0), std::log((1.0 + std::numbers::e) / 2.0), 1e-15);
  EXPECT_NEAR(entropic(kFairCoin, 1.0), 0.620115, 1e-6);
}

TEST(Entropic, NormalClosedFormAgainstQuadrature) {
  const NormalDist x(10.0, 2.0);
  EXPECT_DOUBLE_EQ(entropic(x, 1.0), 12.0);
  // E e^{X} by the composite midpoint rule over mean ± 20 std.
  const int n = 200000;
  double acc = 0.0;
  const double lo = -20.0;
  const double h = 40.0 / n;
  for (int k = 0; k < n; ++k) {
    const double z = lo + (k + 0.5) * h;
    acc += oracle::phi_pdf(z) * std::exp(10.0 + 2.0 * z) * h;
  }
  EXPECT_NEAR(std::log(acc), 12.0, 1e-9);
}

TEST(Entropic, DiscretizedNormalConvergesToClosedForm) {
  // Equal-probability buckets collapse the upper tail, which dominates
  // E e^{βX} when βσ is large; the error shrinks as buckets are added.
  const NormalDist x(10.0, 2.0);
  double previous_error = 1.0;
  for (int buckets : {512, 2048, 8192}) {
    const double err = 12.0 - entropic(discretize(x, buckets), 1.0);
    EXPECT_GT(err, 0.0);
    EXPECT_LT(err, previous_error);
    previous_error = err;
  }
  EXPECT_LT(12.0 - entropic(discretize(x, 512), 1.0), 0.04);
  // At small βσ the 512-atom law is already within 1e-3.
  EXPECT_NEAR(entropic(discretize(NormalDist(10.0, 0.5), 512), 1.0), 10.125, 1e-3);
}

TEST(Entropic, LargeExponentsDoNotOverflow) {
  const DiscreteDist x({0.0, 400.0}, {0.5, 0.5});
  const double v = entropic(x, 5.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 400.0 + std::log(0.5) / 5.0, 1e-9);
  EXPECT_NEAR(entropic(x, -5.0), std::log(0.5) / -5.0, 1e-9);
}

TEST(EntropicProperty, AdditiveOverIndependentSums) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = oracle::random_discrete(rng);
    const auto b = oracle::random_discrete(rng);
    for (double beta : {-2.0, -0.5, 0.5, 2.0}) {
      EXPECT_NEAR(entropic(convolve(a, b), beta), entropic(a, beta) + entropic(b, beta), 1e-9);
    }
  }
}

// --- mean-risk ---------------------------------------------------------------

TEST(MeanRisk, IntroductionValues) {
  EXPECT_DOUBLE_EQ(mean_stdev(NormalDist::from_variance(11.0, 1.0), 1.0), 12.0);
  EXPECT_NEAR(mean_stdev(NormalDist::from_variance(20.0, 7.0), 1.0), 22.6458, 1e-4);
  EXPECT_DOUBLE_EQ(mean_stdev(NormalDist::from_variance(20.0, 7.0), 1.0), 20.0 + std::sqrt(7.0));
  EXPECT_EQ(mean_var(Distribution::constant(3.0), 2.0), 3.0);
  EXPECT_THROW(mean_var(kFairCoin, 0.0), InvalidInput);
}

// --- VaR / AVaR / TCE --------------------------------------------------------

TEST(ValueAtRisk, DiscreteScanAndConstants) {
  EXPECT_EQ(value_at_risk(kThreeAtoms, 0.2), 2.0);
  EXPECT_EQ(value_at_risk(kThreeAtoms, 0.19), 3.0);
  EXPECT_EQ(value_at_risk(kThreeAtoms, 0.6), 1.0);
  EXPECT_EQ(value_at_risk(Distribution::constant(7.0), 0.3), 7.0);
  EXPECT_THROW(value_at_risk(kThreeAtoms, 1.0), InvalidInput);
}

TEST(ValueAtRisk, NormalAgainstBisection) {
  const double v = value_at_risk(NormalDist(0.0, 1.0), 0.05);
  EXPECT_NEAR(v, oracle::bisect_quantile(0.95), 1e-12);
  EXPECT_NEAR(v, 1.6448536269514722, 1e-12);
}

TEST(Avar, DiscreteTailAverage) {
  EXPECT_DOUBLE_EQ(avar(kThreeAtoms, 0.2), 3.0);
  // Worst 40%: 0.2 at 3 and 0.2 at 2.
  EXPECT_NEAR(avar(kThreeAtoms, 0.4), 2.5, 1e-15);
  EXPECT_EQ(avar(Distribution::constant(-2.0), 0.5), -2.0);
}

TEST(Avar, NormalAgainstQuantileQuadrature) {
  const double v = avar(NormalDist(0.0, 1.0), 0.05);
  EXPECT_NEAR(v, oracle::phi_pdf(oracle::bisect_quantile(0.95)) / 0.05, 1e-12);
  EXPECT_NEAR(v, 2.0627128075074275, 1e-12);
  const double q = oracle::quantile_integral(
      [](double u) { return oracle::bisect_quantile(1.0 - u); }, 0.05, 20000);
  EXPECT_NEAR(v, q, 1e-3);
}

TEST(AvarProperty, QuantileIntegralAndDualAgree) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> level(0.01, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = oracle::random_discrete(rng);
    const double p = level(rng);
    const double v = avar(x, p);
    EXPECT_NEAR(v, avar_dual(x, p), 1e-9);
    // VaR_q is piecewise constant, so a fine midpoint rule is accurate to
    // roughly one atom-width of q.
    const auto atoms = oracle::atoms_of(x);
    const double q = oracle::quantile_integral(
        [&](double u) { return oracle::discrete_quantile(atoms, 1.0 - u); }, p, 20000);
    EXPECT_NEAR(v, q, 20.0 * 2.0 / 20000);
  }
}

TEST(Tce, NormalEqualsAvar) {
  const NormalDist n(0.0, 1.0);
  EXPECT_NEAR(tce(n, 0.05), avar(n, 0.05), 1e-9);
  EXPECT_EQ(tce(Distribution::constant(1.5), 0.2), 1.5);
  EXPECT_DOUBLE_EQ(tce(DiscreteDist({0.0, 10.0}, {0.9, 0.1}), 0.05), 10.0);
  // Atom at VaR is included whole: E(X | X ≥ 2) on the three-atom law.
  EXPECT_NEAR(tce(kThreeAtoms, 0.2), (0.3 * 2.0 + 0.2 * 3.0) / 0.5, 1e-15);
}

// --- distortion --------------------------------------------------------------

TEST(DistortionFnTest, ValidatesShape) {
  EXPECT_THROW(DistortionFn::power(0.0), InvalidInput);
  EXPECT_THROW(DistortionFn::avar_cap(1.0), InvalidInput);
  EXPECT_THROW(DistortionFn::piecewise_linear({{0.0, 0.0}, {0.5, 0.8}, {0.7, 0.6}, {1.0, 1.0}}),
               InvalidInput);
  EXPECT_THROW(DistortionFn::piecewise_linear({{0.0, 0.1}, {1.0, 1.0}}), InvalidInput);
  const auto h = DistortionFn::piecewise_linear({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
  EXPECT_DOUBLE_EQ(h(0.25), 0.4);
  EXPECT_DOUBLE_EQ(h(0.75), 0.9);
  EXPECT_DOUBLE_EQ(h(1.0), 1.0);
  EXPECT_DOUBLE_EQ(h(0.0), 0.0);
}

TEST(DistortionMeasure, IdentityIsMean) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_discrete(rng, -10.0, 10.0);
    EXPECT_NEAR(distortion_measure(x, DistortionFn::identity()), stats(x).mean, 1e-12);
  }
}

TEST(DistortionMeasure, AvarCapMatchesAvar) {
  EXPECT_NEAR(distortion_measure(kThreeAtoms, DistortionFn::avar_cap(0.2)), 3.0, 1e-15);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> level(0.01, 0.99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = oracle::random_discrete(rng, -10.0, 10.0);
    const double p = level(rng);
    EXPECT_NEAR(distortion_measure(x, DistortionFn::avar_cap(p)), avar(x, p), 1e-9);
  }
}

TEST(DistortionMeasure, ConstantsAndNormals) {
  EXPECT_EQ(distortion_measure(Distribution::constant(-3.0), DistortionFn::power(0.3)), -3.0);
  EXPECT_THROW(distortion_measure(NormalDist(0.0, 1.0), DistortionFn::identity()),
               UnsupportedDistribution);
}

TEST(DistortionMeasure, SplitIntegralOracle) {
  // Literal evaluation of both half-line integrals with a fine Riemann sum.
  const DiscreteDist x({-2.0, -0.5, 1.0, 3.0}, {0.1, 0.4, 0.3, 0.2});
  const auto h = DistortionFn::power(0.6);
  const int n = 400000;
  const double lo = -3.0;
  const double hi = 4.0;
  const double step = (hi - lo) / n;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = lo + (k + 0.5) * step;
    const double s = h(decumulative(x, t));
    acc += (t < 0.0 ? s - 1.0 : s) * step;
  }
  EXPECT_NEAR(distortion_measure(x, h), acc, 1e-4);
}

// --- certainty equivalents and rank-dependent utilities ----------------------

TEST(UtilityFnTest, InverseRoundTrips) {
  for (const auto& c : {UtilityFn::identity(), UtilityFn::exponential(0.8),
                        UtilityFn::exponential(-1.5), UtilityFn::cubic_test(),
                        UtilityFn::table({{-1.0, -2.0}, {0.0, 0.0}, {2.0, 1.0}})}) {
    EXPECT_EQ(c.value(0.0), 0.0);
    for (int k = -10; k <= 20; ++k) {
      const double x = k / 10.0;
      if (!c.in_domain(x)) continue;
      EXPECT_NEAR(c.inverse(c.value(x)), x, 1e-9) << c.to_string() << " at " << x;
    }
  }
  EXPECT_THROW(UtilityFn::table({{1.0, 0.0}, {2.0, 1.0}}), InvalidInput);
  EXPECT_THROW(UtilityFn::exponential(0.0), InvalidInput);
}

TEST(CertaintyEquivalent, Basics) {
  EXPECT_NEAR(certainty_equivalent(kThreeAtoms, UtilityFn::identity()), stats(kThreeAtoms).mean,
              1e-15);
  EXPECT_NEAR(certainty_equivalent(kFairCoin, UtilityFn::exponential(1.0)), 0.6201145069582775,
              1e-12);
  // x + x³ = 1 solved independently by bisection.
  const double root = oracle::bisect([](double x) { return x + x * x * x; }, 1.0, 0.0, 1.0);
  EXPECT_NEAR(certainty_equivalent(kFairCoin, UtilityFn::cubic_test()), root, 1e-11);
  EXPECT_NEAR(root, 0.68233, 1e-5);
}

TEST(CertaintyEquivalent, ExponentialMatchesEntropicViaGenericRoute) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_discrete(rng, -5.0, 5.0);
    for (double beta : {-1.0, 0.3, 1.0}) {
      const auto c = UtilityFn::exponential(beta);
      // Direct c⁻¹(E c(X)) with the public value/inverse pair.
      double expected = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) expected += x.probs()[i] * c.value(x.support()[i]);
      EXPECT_NEAR(certainty_equivalent(x, c), c.inverse(expected), 1e-9);
      EXPECT_NEAR(certainty_equivalent(x, c), entropic(x, beta), 1e-9);
    }
  }
}

TEST(CertaintyEquivalent, DomainErrors) {
  const auto c = UtilityFn::table({{-1.0, -1.0}, {0.0, 0.0}, {2.0, 3.0}});
  EXPECT_THROW(certainty_equivalent(DiscreteDist({0.0, 3.0}, {0.5, 0.5}), c), DomainError);
  EXPECT_NEAR(certainty_equivalent(DiscreteDist({0.0, 2.0}, {0.5, 0.5}), c), 1.0, 1e-12);
  EXPECT_THROW(certainty_equivalent(NormalDist(0.0, 1.0), UtilityFn::cubic_test()),
               UnsupportedDistribution);
  EXPECT_NEAR(certainty_equivalent(NormalDist(1.0, 2.0), UtilityFn::exponential(0.5)), 2.0, 1e-12);
}

TEST(RankDependent, ReducesToSpecialCases) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_discrete(rng, -3.0, 3.0);
    EXPECT_NEAR(rank_dependent(x, UtilityFn::identity(), DistortionFn::identity()), stats(x).mean,
                1e-12);
    const auto h = DistortionFn::power(0.4);
    EXPECT_NEAR(rank_dependent(x, UtilityFn::identity(), h), distortion_measure(x, h), 1e-12);
    for (const auto& c : {UtilityFn::exponential(0.9), UtilityFn::cubic_test()}) {
      EXPECT_NEAR(rank_dependent(x, c, DistortionFn::identity()), certainty_equivalent(x, c), 1e-9);
    }
  }
}

TEST(RankDependent, ScaledBernoulliClosedForm) {
  for (const auto& c : {UtilityFn::exponential(1.0), UtilityFn::cubic_test(), UtilityFn::identity()}) {
    for (const auto& h : {DistortionFn::power(0.5), DistortionFn::avar_cap(0.3)}) {
      for (double p : {0.1, 0.5, 0.8}) {
        for (double z : {0.5, 2.0}) {
          EXPECT_NEAR(rank_dependent(DiscreteDist::bernoulli(p, z), c, h),
                      c.inverse(h(p) * c.value(z)), 1e-9);
        }
      }
    }
  }
  EXPECT_NEAR(rank_dependent(kFairCoin, UtilityFn::exponential(1.0), DistortionFn::avar_cap(0.5)),
              1.0, 1e-12);
}

// --- dispatch and grammar ----------------------------------------------------

TEST(Evaluate, Dispatch) {
  EXPECT_NEAR(evaluate(RiskMeasureSpec::entropic(0.0), kThreeAtoms), stats(kThreeAtoms).mean, 1e-15);
  EXPECT_DOUBLE_EQ(evaluate(RiskMeasureSpec::mean_stdev(1.0), NormalDist::from_variance(10.0, 5.0)),
                   10.0 + std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(evaluate(RiskMeasureSpec::avar(0.2), kThreeAtoms), 3.0);
}

TEST(RiskSpecGrammar, ParsesAndPrints) {
  for (const char* text :
       {"entropic:0.5", "entropic:-2", "mean_var:8", "mean_stdev:1", "var:0.1", "avar:0.05",
        "tce:0.2", "distortion:identity", "distortion:power:0.5", "distortion:avar_cap:0.2",
        "cert:exp:1", "cert:identity", "cert:cubic", "rankdep:exp:1:power:0.5",
        "rankdep:identity:identity", "rankdep:cubic:avar_cap:0.3"}) {
    const auto spec = RiskMeasureSpec::parse(text);
    EXPECT_EQ(spec.to_string(), text);
    EXPECT_EQ(RiskMeasureSpec::parse(spec.to_string()), spec);
  }
  for (const char* bad : {"", "entropic", "entropic:x", "var:1.5", "mean_var:0", "cert:exp",
                          "rankdep:exp:1", "distortion:power:0.5:1", "nope:1", "entropic:inf"}) {
    EXPECT_THROW(RiskMeasureSpec::parse(bad), InvalidInput) << bad;
  }
}

TEST(RiskSpecGrammar, AdditivityFlags) {
  EXPECT_TRUE(RiskMeasureSpec::parse("entropic:0.5").is_additive());
  EXPECT_TRUE(RiskMeasureSpec::parse("cert:exp:2").is_additive());
  EXPECT_TRUE(RiskMeasureSpec::parse("rankdep:exp:2:identity").is_additive());
  EXPECT_FALSE(RiskMeasureSpec::parse("rankdep:exp:2:power:0.5").is_additive());
  EXPECT_FALSE(RiskMeasureSpec::parse("mean_stdev:1").is_additive());
  EXPECT_FALSE(RiskMeasureSpec::parse("avar:0.1").is_additive());
}

// --- axioms as properties ----------------------------------------------------

TEST(RiskAxioms, NormalizationOnConstants) {
  for (const auto& spec : all_specs()) {
    for (double m : {-7.5, 0.0, 3.0, 12.25}) {
      EXPECT_NEAR(evaluate(spec, Distribution::constant(m)), m, 1e-12) << spec.to_string();
      EXPECT_NEAR(evaluate(spec, DiscreteDist::point(m)), m, 1e-9) << spec.to_string();
    }
  }
}

TEST(RiskAxioms, TranslationInvariance) {
  std::mt19937_64 rng(71);
  for (const auto& spec : all_specs()) {
    if (!spec.is_translation_invariant()) continue;
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = oracle::random_discrete(rng);
      const double base = evaluate(spec, x);
      for (int m = -5; m <= 5; ++m) {
        EXPECT_NEAR(evaluate(spec, shift(x, m)), base + m, 1e-9) << spec.to_string();
      }
    }
  }
}

TEST(RiskAxioms, MonotonicityOnCoupledSamples) {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> bump(0.0, 3.0);
  for (const auto& spec : all_specs()) {
    if (!spec.is_monotone()) continue;
    for (int trial = 0; trial < 100; ++trial) {
      const auto base = CoupledSample::single("X", oracle::random_discrete(rng));
      const double b = bump(rng);
      const auto xy = base.with_column("Y", [b](std::span<const double> r) {
        return r[0] + b * (0.5 + 0.5 * std::sin(r[0]));
      });
      ASSERT_TRUE(xy.almost_surely_leq("X", "Y"));
      EXPECT_LE(evaluate(spec, xy.marginal("X")), evaluate(spec, xy.marginal("Y")) + 1e-12)
          << spec.to_string();
    }
  }
}

TEST(RiskAxioms, MeanVarianceMonotonicityFails) {
  // Discrete analogue of X ~ U[0,1] and Y = (1+X)/2.
  std::vector<double> support;
  std::vector<double> probs;
  for (int k = 0; k <= 100; ++k) {
    support.push_back(k / 100.0);
    probs.push_back(1.0 / 101.0);
  }
  const auto x = CoupledSample::single("X", DiscreteDist(support, probs));
  const auto xy = x.with_column("Y", [](std::span<const double> r) { return (1.0 + r[0]) / 2.0; });
  ASSERT_TRUE(xy.almost_surely_leq("X", "Y"));
  EXPECT_LT(mean_var(xy.marginal("Y"), 8.0), mean_var(xy.marginal("X"), 8.0));
  EXPECT_LT(mean_stdev(xy.marginal("Y"), 8.0), mean_stdev(xy.marginal("X"), 8.0));
}

TEST(RiskAxioms, PositiveHomogeneity) {
  std::mt19937_64 rng(91);
  for (const auto& spec : all_specs()) {
    if (!spec.is_positively_homogeneous()) continue;
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = oracle::random_discrete(rng);
      for (double lambda : {0.25, 1.0, 3.5}) {
        EXPECT_NEAR(evaluate(spec, scale(x, lambda)), lambda * evaluate(spec, x), 1e-9)
            << spec.to_string();
      }
    }
  }
}

TEST(RiskAxioms, LawInvariance) {
  // Same marginal, different outcome spaces.
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_discrete(rng);
    const auto z = oracle::random_discrete(rng);
    const auto joint = product_couple(CoupledSample::single("X", x), z);
    const auto doubled = joint.with_column("X2", [](std::span<const double> r) { return r[0]; });
    for (const auto& spec : all_specs()) {
      EXPECT_NEAR(evaluate(spec, doubled.marginal("X")), evaluate(spec, doubled.marginal("X2")),
                  1e-12);
      EXPECT_NEAR(evaluate(spec, joint.marginal("X")), evaluate(spec, x), 1e-9) << spec.to_string();
    }
  }
}
