#pragma once

// Stochastic networks: nodes, arcs carrying either a fixed travel-time law
// or a load-dependent family, and origin-destination demands. Arc times
// are independent of one another.

#include <riskroute/dist.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riskroute {

/// Travel-time law as a function of the arc load y ≥ 0.
///   normal_affine:   N(mean0 + mean_slope·y, var0 + var_slope·y)  (variance)
///   discrete_scaled: base · (1 + slope·y)
class LatencyFamily {
 public:
  enum class Kind { normal_affine, discrete_scaled };

  static LatencyFamily normal_affine(double mean0, double mean_slope, double var0,
                                     double var_slope) {
    if (!std::isfinite(mean0) || !std::isfinite(mean_slope) || !std::isfinite(var0) ||
        !std::isfinite(var_slope)) {
      throw InvalidInput("normal_affine: parameters must be finite");
    }
    if (mean_slope < 0.0 || var0 < 0.0 || var_slope < 0.0) {
      throw InvalidInput("normal_affine: mean_slope, var0, var_slope must be >= 0");
    }
    LatencyFamily f(Kind::normal_affine);
    f.mean0_ = mean0;
    f.mean_slope_ = mean_slope;
    f.var0_ = var0;
    f.var_slope_ = var_slope;
    return f;
  }

  static LatencyFamily discrete_scaled(DiscreteDist base, double slope) {
    if (!(slope >= 0.0) || !std::isfinite(slope)) {
      throw InvalidInput("discrete_scaled: slope must be finite and >= 0");
    }
    LatencyFamily f(Kind::discrete_scaled);
    f.base_ = std::move(base);
    f.slope_ = slope;
    return f;
  }

  Kind kind() const { return kind_; }
  double mean0() const { return mean0_; }
  double mean_slope() const { return mean_slope_; }
  double var0() const { return var0_; }
  double var_slope() const { return var_slope_; }
  const DiscreteDist& base() const { return base_; }
  double slope() const { return slope_; }

  Distribution at(double y) const {
    if (!(y >= 0.0)) throw InvalidInput("latency family: load must be >= 0");
    if (kind_ == Kind::discrete_scaled) {
      const double factor = 1.0 + slope_ * y;
      return factor == 1.0 ? Distribution(base_) : scale(base_, factor);
    }
    const double mean = mean0_ + mean_slope_ * y;
    const double var = var0_ + var_slope_ * y;
    if (var == 0.0) return Distribution::constant(mean);
    return NormalDist::from_variance(mean, var);
  }

 private:
  explicit LatencyFamily(Kind kind) : kind_(kind), base_(DiscreteDist::point(0.0)) {}

  Kind kind_;
  double mean0_ = 0.0;
  double mean_slope_ = 0.0;
  double var0_ = 0.0;
  double var_slope_ = 0.0;
  DiscreteDist base_;
  double slope_ = 0.0;
};

struct Arc {
  std::string id;
  std::string tail;
  std::string head;
  std::optional<Distribution> dist;
  std::optional<LatencyFamily> family;

  /// Travel-time law at load y (a fixed law ignores y).
  Distribution law(double y = 0.0) const { return dist ? *dist : family->at(y); }
};

struct Demand {
  std::string origin;
  std::string dest;
  double rate;
};

class Network {
 public:
  Network() = default;

  void add_node(const std::string& id) {
    if (id.empty()) throw InvalidInput("network: empty node id");
    if (node_index_.count(id)) throw InvalidInput("network: duplicate node '" + id + "'");
    node_index_[id] = nodes_.size();
    nodes_.push_back(id);
    out_.emplace_back();
  }

  void add_arc(std::string id, const std::string& tail, const std::string& head,
               Distribution dist) {
    push_arc({std::move(id), tail, head, std::move(dist), std::nullopt});
  }

  void add_arc(std::string id, const std::string& tail, const std::string& head,
               LatencyFamily family) {
    push_arc({std::move(id), tail, head, std::nullopt, std::move(family)});
  }

  void add_demand(const std::string& origin, const std::string& dest, double rate) {
    require_node(origin);
    require_node(dest);
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("network: demand rate must be >= 0");
    demands_.push_back({origin, dest, rate});
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<Demand>& demands() const { return demands_; }

  bool has_node(const std::string& id) const { return node_index_.count(id) != 0; }
  std::size_t node_index(const std::string& id) const {
    require_node(id);
    return node_index_.at(id);
  }
  std::size_t arc_index(const std::string& id) const {
    const auto it = arc_index_.find(id);
    if (it == arc_index_.end()) throw InvalidInput("network: unknown arc '" + id + "'");
    return it->second;
  }
  const Arc& arc(const std::string& id) const { return arcs_[arc_index(id)]; }
  /// Indices of arcs leaving node `n` (by node index), in insertion order.
  const std::vector<std::size_t>& out_arcs(std::size_t n) const { return out_[n]; }

  void require_node(const std::string& id) const {
    if (!node_index_.count(id)) throw InvalidInput("network: unknown node '" + id + "'");
  }

 private:
  void push_arc(Arc a) {
    if (a.id.empty()) throw InvalidInput("network: empty arc id");
    if (arc_index_.count(a.id)) throw InvalidInput("network: duplicate arc '" + a.id + "'");
    require_node(a.tail);
    require_node(a.head);
    arc_index_[a.id] = arcs_.size();
    out_[node_index_.at(a.tail)].push_back(arcs_.size());
    arcs_.push_back(std::move(a));
  }

  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> node_index_;
  std::vector<Arc> arcs_;
  std::map<std::string, std::size_t> arc_index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<Demand> demands_;
};

/// A path as its node sequence and the arcs between consecutive nodes
/// (parallel arcs make the node sequence alone ambiguous).
struct Path {
  std::vector<std::string> nodes;
  std::vector<std::string> arcs;

  bool operator==(const Path&) const = default;
  /// Deterministic tie-break: node-id sequence, then arc-id sequence.
  bool operator<(const Path& o) const {
    if (nodes != o.nodes) return nodes < o.nodes;
    return arcs < o.arcs;
  }
};

struct PathResult {
  Path path;
  double value;
};

/// Checks that `p` chains head→tail through existing arcs of `g` and
/// visits no node twice.
inline void validate_path(const Network& g, const Path& p) {
  if (p.nodes.empty() || p.nodes.size() != p.arcs.size() + 1) {
    throw InvalidInput("path: need one more node than arcs");
  }
  for (const auto& n : p.nodes) g.require_node(n);
  for (std::size_t i = 0; i < p.arcs.size(); ++i) {
    const Arc& a = g.arc(p.arcs[i]);
    if (a.tail != p.nodes[i] || a.head != p.nodes[i + 1]) {
      throw InvalidInput("path: arc '" + a.id + "' does not join " + p.nodes[i] + " -> " +
                         p.nodes[i + 1]);
    }
  }
  std::vector<std::string> sorted = p.nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInput("path: repeats a node");
  }
}

}  // namespace riskroute
