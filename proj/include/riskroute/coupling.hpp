#pragma once

// Joint finite laws over named variables sharing one outcome space. Used
// for almost-sure comparisons, independence and comonotonicity.

#include <riskroute/dist.hpp>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace riskroute {

class CoupledSample {
 public:
  /// rows[k][c] is the value of column c on outcome k.
  CoupledSample(std::vector<std::string> names, std::vector<double> outcome_probs,
                std::vector<std::vector<double>> rows)
      : names_(std::move(names)), probs_(std::move(outcome_probs)), rows_(std::move(rows)) {
    if (probs_.empty()) throw InvalidInput("coupled sample: no outcomes");
    if (rows_.size() != probs_.size()) throw InvalidInput("coupled sample: row count mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      if (!(probs_[k] >= 0.0)) throw InvalidInput("coupled sample: negative probability");
      if (rows_[k].size() != names_.size()) throw InvalidInput("coupled sample: ragged row");
      total += probs_[k];
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw InvalidInput("coupled sample: outcome probabilities must sum to 1");
    }
    for (std::size_t c = 0; c < names_.size(); ++c) {
      for (std::size_t c2 = c + 1; c2 < names_.size(); ++c2) {
        if (names_[c] == names_[c2]) throw InvalidInput("coupled sample: duplicate column " + names_[c]);
      }
    }
  }

  /// One column whose outcomes are the atoms of d.
  static CoupledSample single(std::string name, const DiscreteDist& d) {
    std::vector<std::vector<double>> rows;
    for (double v : d.support()) rows.push_back({v});
    return CoupledSample({std::move(name)}, {d.probs().begin(), d.probs().end()}, std::move(rows));
  }

  std::size_t outcomes() const { return probs_.size(); }
  std::size_t columns() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> row(std::size_t k) const { return rows_[k]; }
  double value(std::size_t k, std::size_t c) const { return rows_[k][c]; }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t c = 0; c < names_.size(); ++c) {
      if (names_[c] == name) return c;
    }
    throw InvalidInput("coupled sample: no column named " + name);
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t c = index_of(name);
    std::vector<double> out(outcomes());
    for (std::size_t k = 0; k < outcomes(); ++k) out[k] = rows_[k][c];
    return out;
  }

  DiscreteDist marginal(const std::string& name) const {
    const std::size_t c = index_of(name);
    std::vector<Atom> atoms(outcomes());
    for (std::size_t k = 0; k < outcomes(); ++k) atoms[k] = {rows_[k][c], probs_[k]};
    return DiscreteDist::from_atoms(std::move(atoms));
  }

  /// Adds a column computed pointwise from each outcome's existing values.
  CoupledSample with_column(std::string name,
                            const std::function<double(std::span<const double>)>& f) const {
    auto names = names_;
    auto rows = rows_;
    for (auto& r : rows) r.push_back(f(r));
    names.push_back(std::move(name));
    return CoupledSample(std::move(names), probs_, std::move(rows));
  }

  /// a ≤ b on every outcome of positive probability.
  bool almost_surely_leq(const std::string& a, const std::string& b) const {
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    for (std::size_t k = 0; k < outcomes(); ++k) {
      if (probs_[k] > 0.0 && rows_[k][ia] > rows_[k][ib]) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> probs_;
  std::vector<std::vector<double>> rows_;
};

/// Appends a column distributed as z and independent of every existing
/// column; the outcome space becomes the Cartesian product.
inline CoupledSample product_couple(const CoupledSample& xy, const Distribution& z,
                                    const std::string& name = "Z") {
  const DiscreteDist zd = z.require_finite("product_couple");
  auto names = xy.names();
  names.push_back(name);
  std::vector<double> probs;
  std::vector<std::vector<double>> rows;
  probs.reserve(xy.outcomes() * zd.size());
  rows.reserve(xy.outcomes() * zd.size());
  for (std::size_t k = 0; k < xy.outcomes(); ++k) {
    for (std::size_t j = 0; j < zd.size(); ++j) {
      probs.push_back(xy.probs()[k] * zd.probs()[j]);
      std::vector<double> r(xy.row(k).begin(), xy.row(k).end());
      r.push_back(zd.support()[j]);
      rows.push_back(std::move(r));
    }
  }
  return CoupledSample(std::move(names), std::move(probs), std::move(rows));
}

/// Quantile coupling: both columns are nondecreasing in a shared uniform rank.
inline CoupledSample comonotone_couple(const DiscreteDist& x, const DiscreteDist& y,
                                       const std::string& x_name = "X",
                                       const std::string& y_name = "Y") {
  std::vector<double> probs;
  std::vector<std::vector<double>> rows;
  std::size_t i = 0;
  std::size_t j = 0;
  double left_x = x.probs()[0];
  double left_y = y.probs()[0];
  while (i < x.size() && j < y.size()) {
    const double m = std::min(left_x, left_y);
    if (m > 0.0) {
      probs.push_back(m);
      rows.push_back({x.support()[i], y.support()[j]});
    }
    left_x -= m;
    left_y -= m;
    // Residues at the rounding level are absorbed into the next atom.
    const bool next_x = left_x <= kZeroMass;
    const bool next_y = left_y <= kZeroMass;
    if (next_x && ++i < x.size()) left_x += x.probs()[i];
    if (next_y && ++j < y.size()) left_y += y.probs()[j];
    if (!next_x && !next_y) break;
  }
  return CoupledSample({x_name, y_name}, std::move(probs), std::move(rows));
}

}  // namespace riskroute
