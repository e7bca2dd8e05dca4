#pragma once

// Exact travel-time laws: finite discrete, normal and degenerate, plus the
// probabilistic operations the rest of the library is built on.

#include <riskroute/errors.hpp>
#include <riskroute/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace riskroute {

/// Support points closer than this are treated as one atom.
inline constexpr double kMergeTolerance = 1e-9;
/// Allowed deviation of a total probability mass from one.
inline constexpr double kMassTolerance = 1e-12;
/// Conditioning events at or below this mass are rejected.
inline constexpr double kZeroMass = 1e-15;
/// Default atom count when a normal law has to be made discrete.
inline constexpr int kDefaultBuckets = 512;
/// Half-width, in standard deviations, of the discretized normal range.
inline constexpr double kDiscretizationWidth = 8.0;

struct Atom {
  double value;
  double prob;
};

/// Finite law with strictly increasing support.
class DiscreteDist {
 public:
  DiscreteDist(std::vector<double> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    validate();
  }

  /// Sorts, drops zero-probability atoms and merges values closer than
  /// kMergeTolerance (the merged atom keeps the smallest value).
  static DiscreteDist from_atoms(std::vector<Atom> atoms) {
    std::erase_if(atoms, [](const Atom& a) { return a.prob == 0.0; });
    for (const auto& a : atoms) {
      if (!std::isfinite(a.value) || !(a.prob >= 0.0)) {
        throw InvalidInput("discrete law: atoms need finite values and nonnegative probabilities");
      }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<double> support;
    std::vector<double> probs;
    support.reserve(atoms.size());
    probs.reserve(atoms.size());
    double anchor = 0.0;
    for (const auto& a : atoms) {
      if (!support.empty() && a.value - anchor <= kMergeTolerance) {
        probs.back() += a.prob;
        continue;
      }
      anchor = a.value;
      support.push_back(a.value);
      probs.push_back(a.prob);
    }
    return DiscreteDist(std::move(support), std::move(probs));
  }

  static DiscreteDist point(double m) { return DiscreteDist({m}, {1.0}); }

  /// z·B_p: the value z with probability p, zero otherwise.
  static DiscreteDist bernoulli(double p, double z = 1.0) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("bernoulli: p must lie in [0,1]");
    return from_atoms({{0.0, 1.0 - p}, {z, p}});
  }

  std::span<const double> support() const { return support_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }
  double min() const { return support_.front(); }
  double max() const { return support_.back(); }

  std::vector<Atom> atoms() const {
    std::vector<Atom> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = {support_[i], probs_[i]};
    return out;
  }

  friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;

 private:
  void validate() const {
    if (support_.empty()) throw InvalidInput("discrete law: empty support");
    if (support_.size() != probs_.size()) {
      throw InvalidInput("discrete law: support and probs differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (!std::isfinite(support_[i])) throw InvalidInput("discrete law: non-finite support value");
      if (i > 0 && !(support_[i] > support_[i - 1])) {
        throw InvalidInput("discrete law: support must be strictly increasing");
      }
      if (!(probs_[i] >= 0.0)) throw InvalidInput("discrete law: negative probability");
      total += probs_[i];
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "discrete law: probabilities sum to " << total;
      throw InvalidInput(msg.str());
    }
  }

  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Gaussian law. The second parameter is the standard deviation; use
/// from_variance for the N(mean, variance) notation.
class NormalDist {
 public:
  NormalDist(double mean, double stddev) : mean_(mean), stddev_(stddev) {
    if (!std::isfinite(mean) || !std::isfinite(stddev) || !(stddev > 0.0)) {
      throw InvalidInput("normal law: need finite mean and std > 0");
    }
  }
  static NormalDist from_variance(double mean, double variance) {
    return NormalDist(mean, std::sqrt(variance));
  }

  double mean() const { return mean_; }
  double stddev() const { return stddev_; }
  double variance() const { return stddev_ * stddev_; }

  friend bool operator==(const NormalDist&, const NormalDist&) = default;

 private:
  double mean_;
  double stddev_;
};

struct Constant {
  double value;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// Equal-probability quantile discretization of a normal law restricted to
/// mean ± kDiscretizationWidth·std; each atom sits at its bucket's
/// conditional mean.
inline DiscreteDist discretize(const NormalDist& x, int buckets = kDefaultBuckets) {
  if (buckets < 1) throw InvalidInput("discretize: need at least one bucket");
  const double lo_u = normal::cdf(-kDiscretizationWidth);
  const double hi_u = normal::cdf(kDiscretizationWidth);
  const double mass = (hi_u - lo_u) / buckets;
  std::vector<double> edges(static_cast<std::size_t>(buckets) + 1);
  edges.front() = -kDiscretizationWidth;
  edges.back() = kDiscretizationWidth;
  for (int k = 1; k < buckets; ++k) edges[k] = normal::quantile(lo_u + k * mass);
  std::vector<Atom> atoms(static_cast<std::size_t>(buckets));
  for (int k = 0; k < buckets; ++k) {
    const double z = (normal::pdf(edges[k]) - normal::pdf(edges[k + 1])) / mass;
    atoms[k] = {x.mean() + x.stddev() * z, 1.0 / buckets};
  }
  return DiscreteDist::from_atoms(std::move(atoms));
}

/// A prospect: discrete, normal, or a constant.
class Distribution {
 public:
  enum class Kind { discrete, normal, constant };

  Distribution(DiscreteDist d) : v_(std::move(d)) {}  // NOLINT(google-explicit-constructor)
  Distribution(NormalDist n) : v_(n) {}               // NOLINT(google-explicit-constructor)
  Distribution(Constant c) : v_(c) {                  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(c.value)) throw InvalidInput("constant law: value must be finite");
  }
  static Distribution constant(double m) { return Distribution(Constant{m}); }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_discrete() const { return kind() == Kind::discrete; }
  bool is_normal() const { return kind() == Kind::normal; }
  bool is_constant() const { return kind() == Kind::constant; }
  /// Discrete or constant: an exact finite law is available.
  bool is_finite() const { return !is_normal(); }

  const DiscreteDist& discrete() const { return std::get<DiscreteDist>(v_); }
  const NormalDist& normal() const { return std::get<NormalDist>(v_); }
  double constant_value() const { return std::get<Constant>(v_).value; }

  /// Exact finite law for discrete/constant inputs; normals are discretized.
  DiscreteDist to_discrete(int buckets = kDefaultBuckets) const {
    switch (kind()) {
      case Kind::discrete:
        return discrete();
      case Kind::constant:
        return DiscreteDist::point(constant_value());
      case Kind::normal:
        return discretize(normal(), buckets);
    }
    return DiscreteDist::point(0.0);
  }

  /// Finite law; throws UnsupportedDistribution for normals.
  DiscreteDist require_finite(const char* who) const {
    if (is_normal()) {
      throw UnsupportedDistribution(std::string(who) +
                                    ": normal input must be discretized and truncated first");
    }
    return to_discrete();
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::variant<DiscreteDist, NormalDist, Constant> v_;
};

/// Law of the independent sum.
inline DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& b) {
  std::vector<Atom> atoms;
  atoms.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      atoms.push_back({a.support()[i] + b.support()[j], a.probs()[i] * b.probs()[j]});
    }
  }
  return DiscreteDist::from_atoms(std::move(atoms));
}

/// Law of X + m.
inline Distribution shift(const Distribution& x, double m) {
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return Distribution::constant(x.constant_value() + m);
    case Distribution::Kind::normal:
      return NormalDist(x.normal().mean() + m, x.normal().stddev());
    case Distribution::Kind::discrete: {
      auto atoms = x.discrete().atoms();
      for (auto& a : atoms) a.value += m;
      return DiscreteDist::from_atoms(std::move(atoms));
    }
  }
  return x;
}

/// Law of λX for λ > 0.
inline Distribution scale(const Distribution& x, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("scale: factor must be positive");
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return Distribution::constant(x.constant_value() * lambda);
    case Distribution::Kind::normal:
      return NormalDist(x.normal().mean() * lambda, x.normal().stddev() * lambda);
    case Distribution::Kind::discrete: {
      auto atoms = x.discrete().atoms();
      for (auto& a : atoms) a.value *= lambda;
      return DiscreteDist::from_atoms(std::move(atoms));
    }
  }
  return x;
}

/// Conditional law of X given lo ≤ X ≤ hi.
inline DiscreteDist truncate_conditional(const Distribution& x, double lo, double hi,
                                         int buckets = kDefaultBuckets) {
  const DiscreteDist d = x.to_discrete(buckets);
  std::vector<Atom> kept;
  double mass = 0.0;
  for (const auto& a : d.atoms()) {
    if (a.value >= lo && a.value <= hi) {
      kept.push_back(a);
      mass += a.prob;
    }
  }
  if (mass <= kZeroMass) throw ZeroMassError("truncate_conditional: interval carries no mass");
  if (kept.size() == d.size()) return d;
  for (auto& a : kept) a.prob /= mass;
  return DiscreteDist::from_atoms(std::move(kept));
}

/// The lottery whose CDF is p·F_X + (1-p)·F_Z.
inline Distribution mixture(double p, const Distribution& x, const Distribution& z) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("mixture: p must lie in [0,1]");
  if (p == 1.0) return x;
  if (p == 0.0) return z;
  std::vector<Atom> atoms;
  for (auto a : x.to_discrete().atoms()) atoms.push_back({a.value, p * a.prob});
  for (auto a : z.to_discrete().atoms()) atoms.push_back({a.value, (1.0 - p) * a.prob});
  return DiscreteDist::from_atoms(std::move(atoms));
}

struct Stats {
  double mean;
  double variance;
  double min;
  double max;
};

inline Stats stats(const Distribution& x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return {x.constant_value(), 0.0, x.constant_value(), x.constant_value()};
    case Distribution::Kind::normal:
      return {x.normal().mean(), x.normal().variance(), -inf, inf};
    case Distribution::Kind::discrete:
      break;
  }
  const DiscreteDist& d = x.discrete();
  double mean = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) mean += d.probs()[i] * d.support()[i];
  double var = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dev = d.support()[i] - mean;
    var += d.probs()[i] * dev * dev;
  }
  return {mean, var, d.min(), d.max()};
}

/// P(X ≤ t).
inline double cdf(const Distribution& x, double t) {
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return t >= x.constant_value() ? 1.0 : 0.0;
    case Distribution::Kind::normal:
      return normal::cdf((t - x.normal().mean()) / x.normal().stddev());
    case Distribution::Kind::discrete:
      break;
  }
  double acc = 0.0;
  const DiscreteDist& d = x.discrete();
  for (std::size_t i = 0; i < d.size() && d.support()[i] <= t; ++i) acc += d.probs()[i];
  return std::min(acc, 1.0);
}

/// P(X > t), summed directly from the upper tail.
inline double decumulative(const Distribution& x, double t) {
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return t < x.constant_value() ? 1.0 : 0.0;
    case Distribution::Kind::normal:
      return normal::cdf(-(t - x.normal().mean()) / x.normal().stddev());
    case Distribution::Kind::discrete:
      break;
  }
  double acc = 0.0;
  const DiscreteDist& d = x.discrete();
  for (std::size_t i = d.size(); i-- > 0 && d.support()[i] > t;) acc += d.probs()[i];
  return std::min(acc, 1.0);
}

}  // namespace riskroute
