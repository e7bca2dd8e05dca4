#pragma once

// Risk-minimizing paths. For an additive measure the path risk splits into
// arc weights ρ(τ_a) and an ordinary shortest-path search applies; for any
// other measure only exhaustive enumeration over simple paths is exact.

#include <riskroute/network.hpp>
#include <riskroute/risk.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riskroute {

inline constexpr std::size_t kMaxEnumeratedPaths = 100000;

namespace detail {

/// Path costs this close are ties, settled by the path order.
inline bool costs_tie(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool better_path(double ca, const Path& pa, double cb, const Path& pb) {
  if (!costs_tie(ca, cb)) return ca < cb;
  return pa < pb;
}

inline bool visits(const Path& p, const std::string& node) {
  return std::find(p.nodes.begin(), p.nodes.end(), node) != p.nodes.end();
}

inline Path extend(const Path& p, const Arc& a) {
  Path q = p;
  q.nodes.push_back(a.head);
  q.arcs.push_back(a.id);
  return q;
}

inline const Distribution& static_law(const Arc& a) {
  if (!a.dist) throw InvalidInput("arc '" + a.id + "' has a load-dependent law, not a fixed one");
  return *a.dist;
}

struct Label {
  double cost;
  Path path;
};

inline PathResult label_setting(const Network& g, std::size_t s, std::size_t d,
                                const std::vector<double>& w) {
  const std::size_t n = g.nodes().size();
  std::vector<std::optional<Label>> label(n);
  std::vector<bool> done(n, false);
  label[s] = Label{0.0, Path{{g.nodes()[s]}, {}}};
  while (true) {
    std::optional<std::size_t> u;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || !label[v]) continue;
      if (!u || better_path(label[v]->cost, label[v]->path, label[*u]->cost, label[*u]->path)) {
        u = v;
      }
    }
    if (!u || *u == d) break;
    done[*u] = true;
    for (std::size_t ai : g.out_arcs(*u)) {
      const Arc& a = g.arcs()[ai];
      const std::size_t v = g.node_index(a.head);
      if (done[v] || visits(label[*u]->path, a.head)) continue;
      const double cost = label[*u]->cost + w[ai];
      Path path = extend(label[*u]->path, a);
      if (!label[v] || better_path(cost, path, label[v]->cost, label[v]->path)) {
        label[v] = Label{cost, std::move(path)};
      }
    }
  }
  if (!label[d]) throw NoPathError("no path " + g.nodes()[s] + " -> " + g.nodes()[d]);
  return {label[d]->path, label[d]->cost};
}

inline PathResult label_correcting(const Network& g, std::size_t s, std::size_t d,
                                   const std::vector<double>& w) {
  const std::size_t n = g.nodes().size();
  const auto& arcs = g.arcs();
  const double inf = std::numeric_limits<double>::infinity();

  // Cost-only Bellman-Ford: one extra improving round means a negative
  // cycle reachable from s.
  std::vector<double> dist(n, inf);
  dist[s] = 0.0;
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
      const std::size_t u = g.node_index(arcs[ai].tail);
      const std::size_t v = g.node_index(arcs[ai].head);
      if (dist[u] == inf) continue;
      const double cand = dist[u] + w[ai];
      if (cand < dist[v] && !costs_tie(cand, dist[v])) {
        dist[v] = cand;
        changed = true;
      }
    }
    if (!changed) break;
    if (round == n) throw NegativeCycleError("negative cycle reachable from " + g.nodes()[s]);
  }

  // With no negative cycle the optimum is a simple path; propagate full
  // labels so ties resolve by path order.
  std::vector<std::optional<Label>> label(n);
  label[s] = Label{0.0, Path{{g.nodes()[s]}, {}}};
  const std::size_t max_rounds = n * std::max<std::size_t>(arcs.size(), 1) + 1;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
      const Arc& a = arcs[ai];
      const std::size_t u = g.node_index(a.tail);
      const std::size_t v = g.node_index(a.head);
      if (!label[u] || visits(label[u]->path, a.head)) continue;
      const double cost = label[u]->cost + w[ai];
      Path path = extend(label[u]->path, a);
      if (!label[v] || better_path(cost, path, label[v]->cost, label[v]->path)) {
        label[v] = Label{cost, std::move(path)};
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (!label[d]) throw NoPathError("no path " + g.nodes()[s] + " -> " + g.nodes()[d]);
  return {label[d]->path, label[d]->cost};
}

}  // namespace detail

/// w_a = ρ(τ_a) for every arc; arcs must carry fixed laws.
inline std::map<std::string, double> arc_weights(const Network& g, const RiskMeasureSpec& spec) {
  std::map<std::string, double> w;
  for (const auto& a : g.arcs()) w[a.id] = evaluate(spec, detail::static_law(a));
  return w;
}

/// Minimum-weight simple path for explicit arc weights (indexed like
/// g.arcs()). Label-setting when every weight is nonnegative, label-correcting
/// otherwise.
inline PathResult shortest_path_by_weights(const Network& g, const std::string& s,
                                           const std::string& d, const std::vector<double>& w) {
  if (w.size() != g.arcs().size()) throw InvalidInput("shortest_path: one weight per arc");
  for (double x : w) {
    if (!std::isfinite(x)) throw InvalidInput("shortest_path: weights must be finite");
  }
  const std::size_t si = g.node_index(s);
  const std::size_t di = g.node_index(d);
  const bool negative = std::any_of(w.begin(), w.end(), [](double x) { return x < 0.0; });
  return negative ? detail::label_correcting(g, si, di, w) : detail::label_setting(g, si, di, w);
}

/// Weights ρ(τ_a) in arc order, regardless of whether ρ is additive.
inline std::vector<double> separable_weights(const Network& g, const RiskMeasureSpec& spec) {
  std::vector<double> w;
  w.reserve(g.arcs().size());
  for (const auto& a : g.arcs()) w.push_back(evaluate(spec, detail::static_law(a)));
  return w;
}

/// Risk-minimizing s→d path for an additive measure, where
/// ρ(T_p) = Σ_{a∈p} ρ(τ_a).
inline PathResult shortest_path(const Network& g, const std::string& s, const std::string& d,
                                const RiskMeasureSpec& spec) {
  if (!spec.is_additive()) {
    throw NonAdditiveSpecError("shortest_path: '" + spec.to_string() +
                               "' is not additive over independent arcs, so path risk does not "
                               "split into arc weights; use optimal_path_bruteforce");
  }
  return shortest_path_by_weights(g, s, d, separable_weights(g, spec));
}

/// T_p as a finite law: arc laws convolved in path order, normals
/// discretized first.
inline DiscreteDist path_time_distribution(const Network& g, const Path& p,
                                           int buckets = kDefaultBuckets) {
  validate_path(g, p);
  DiscreteDist total = DiscreteDist::point(0.0);
  for (const auto& id : p.arcs) total = convolve(total, detail::static_law(g.arc(id)).to_discrete(buckets));
  return total;
}

/// T_p exactly when every arc is normal or constant (a normal or a
/// constant), otherwise path_time_distribution.
inline Distribution path_time_law(const Network& g, const Path& p, int buckets = kDefaultBuckets) {
  validate_path(g, p);
  double mean = 0.0;
  double var = 0.0;
  for (const auto& id : p.arcs) {
    const Distribution& x = detail::static_law(g.arc(id));
    if (x.is_discrete()) return path_time_distribution(g, p, buckets);
    if (x.is_constant()) {
      mean += x.constant_value();
    } else {
      mean += x.normal().mean();
      var += x.normal().variance();
    }
  }
  if (var == 0.0) return Distribution::constant(mean);
  return NormalDist::from_variance(mean, var);
}

/// Every simple s→d path, sorted by node sequence then arc sequence.
inline std::vector<Path> enumerate_paths(const Network& g, const std::string& s,
                                         const std::string& d,
                                         std::size_t max_count = kMaxEnumeratedPaths) {
  g.require_node(s);
  g.require_node(d);
  std::vector<Path> out;
  std::vector<bool> on_path(g.nodes().size(), false);
  Path current{{s}, {}};
  std::function<void(std::size_t)> dfs = [&](std::size_t u) {
    if (g.nodes()[u] == d) {
      if (out.size() >= max_count) {
        throw CapacityError("enumerate_paths: more than " + std::to_string(max_count) +
                            " simple paths");
      }
      out.push_back(current);
      return;
    }
    on_path[u] = true;
    for (std::size_t ai : g.out_arcs(u)) {
      const Arc& a = g.arcs()[ai];
      const std::size_t v = g.node_index(a.head);
      if (on_path[v]) continue;
      current.nodes.push_back(a.head);
      current.arcs.push_back(a.id);
      dfs(v);
      current.nodes.pop_back();
      current.arcs.pop_back();
    }
    on_path[u] = false;
  };
  dfs(g.node_index(s));
  std::sort(out.begin(), out.end());
  return out;
}

/// Exact minimizer of ρ(T_p) over simple paths, for any measure.
inline PathResult optimal_path_bruteforce(const Network& g, const std::string& s,
                                          const std::string& d, const RiskMeasureSpec& spec,
                                          std::size_t max_count = kMaxEnumeratedPaths) {
  const auto paths = enumerate_paths(g, s, d, max_count);
  if (paths.empty()) throw NoPathError("no path " + s + " -> " + d);
  std::optional<PathResult> best;
  for (const auto& p : paths) {
    const double v = evaluate(spec, path_time_law(g, p));
    if (!best || detail::better_path(v, p, best->value, best->path)) best = PathResult{p, v};
  }
  return *best;
}

}  // namespace riskroute
