#pragma once

// Seeded generators for property checks. Draws use only the raw 64-bit
// output of std::mt19937_64, whose sequence is fixed by the standard, so a
// seed reproduces the same ensemble on every platform.

#include <riskroute/dist.hpp>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace riskroute {

struct TestEnsemble {
  std::uint64_t seed = 42;
  int count = 1000;
  int atoms_min = 2;
  int atoms_max = 6;
  double value_lo = 0.0;
  double value_hi = 20.0;

  void validate() const {
    if (count < 0) throw InvalidInput("ensemble: negative count");
    if (atoms_min < 1 || atoms_max < atoms_min) throw InvalidInput("ensemble: bad atom range");
    if (!(value_hi > value_lo)) throw InvalidInput("ensemble: bad value range");
  }
};

class EnsembleRng {
 public:
  explicit EnsembleRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Finite law with atoms_min..atoms_max atoms in the value range and
  /// normalized uniform weights.
  DiscreteDist law(const TestEnsemble& e) {
    const int n = integer(e.atoms_min, e.atoms_max);
    std::vector<Atom> atoms(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& a : atoms) {
      a.value = uniform(e.value_lo, e.value_hi);
      a.prob = 0.05 + unit();
      total += a.prob;
    }
    for (auto& a : atoms) a.prob /= total;
    return DiscreteDist::from_atoms(std::move(atoms));
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::array<DiscreteDist, 2>> ensemble_pairs(const TestEnsemble& e) {
  e.validate();
  EnsembleRng rng(e.seed);
  std::vector<std::array<DiscreteDist, 2>> out;
  out.reserve(static_cast<std::size_t>(e.count));
  for (int k = 0; k < e.count; ++k) {
    auto a = rng.law(e);
    auto b = rng.law(e);
    out.push_back({std::move(a), std::move(b)});
  }
  return out;
}

inline std::vector<std::array<DiscreteDist, 3>> ensemble_triples(const TestEnsemble& e) {
  e.validate();
  EnsembleRng rng(e.seed);
  std::vector<std::array<DiscreteDist, 3>> out;
  out.reserve(static_cast<std::size_t>(e.count));
  for (int k = 0; k < e.count; ++k) {
    auto x = rng.law(e);
    auto y = rng.law(e);
    auto z = rng.law(e);
    out.push_back({std::move(x), std::move(y), std::move(z)});
  }
  return out;
}

/// Scaled-Bernoulli probe (z·B_p, z·B_q, shift m) used by the utility checks.
struct BernoulliProbe {
  double z;
  double p;
  double q;
  double m;
};

/// z uniform on [max(value_lo, 0.05), value_hi], p and q on [0.02, 0.98],
/// m on [-5, 5].
inline std::vector<BernoulliProbe> ensemble_probes(const TestEnsemble& e) {
  e.validate();
  EnsembleRng rng(e.seed);
  std::vector<BernoulliProbe> out;
  out.reserve(static_cast<std::size_t>(e.count));
  const double z_lo = std::max(e.value_lo, 0.05);
  for (int k = 0; k < e.count; ++k) {
    BernoulliProbe t{};
    t.z = rng.uniform(z_lo, std::max(e.value_hi, z_lo + 1.0));
    t.p = rng.uniform(0.02, 0.98);
    t.q = rng.uniform(0.02, 0.98);
    t.m = rng.uniform(-5.0, 5.0);
    out.push_back(t);
  }
  return out;
}

}  // namespace riskroute
