#pragma once

// Risk-averse network equilibrium. Each arc's risk-adjusted cost
// σ_a(y) = ρ(F_a(y)) must be nondecreasing in the load y. Non-atomic users
// reach a Wardrop equilibrium, found by conditional-gradient descent on the
// Beckmann objective Σ_a ∫₀^{y_a} σ_a; atomic users play a congestion game
// with Rosenthal potential Σ_a Σ_{z=0}^{n_a} σ_a(z).

#include <riskroute/routing.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace riskroute {

// ------------------------------------------------------------- link costs

namespace detail {

inline double link_cost_unchecked(const LatencyFamily& f, const RiskMeasureSpec& spec, double y) {
  if (f.kind() == LatencyFamily::Kind::normal_affine &&
      spec.kind() == RiskMeasureSpec::Kind::entropic) {
    return (f.mean0() + f.mean_slope() * y) + 0.5 * spec.param() * (f.var0() + f.var_slope() * y);
  }
  return evaluate(spec, f.at(y));
}

inline double arc_cost_unchecked(const Arc& a, const RiskMeasureSpec& spec, double y) {
  if (a.dist) return evaluate(spec, *a.dist);
  return link_cost_unchecked(*a.family, spec, y);
}

}  // namespace detail

inline constexpr int kMonotonicityGrid = 16;

/// Rejects a family whose cost decreases anywhere on an even grid over
/// [0, y_max].
inline void check_monotone(const LatencyFamily& f, const RiskMeasureSpec& spec, double y_max) {
  double prev = detail::link_cost_unchecked(f, spec, 0.0);
  for (int k = 1; k <= kMonotonicityGrid; ++k) {
    const double y = y_max * k / kMonotonicityGrid;
    const double cur = detail::link_cost_unchecked(f, spec, y);
    if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      throw MonotonicityError("link cost under " + spec.to_string() + " decreases from " +
                              std::to_string(prev) + " to " + std::to_string(cur) +
                              " near load " + std::to_string(y));
    }
    prev = cur;
  }
}

/// σ(y) = ρ(F(y)); closed form for normal_affine under an entropic measure.
inline double link_cost(const LatencyFamily& f, const RiskMeasureSpec& spec, double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw InvalidInput("link_cost: load must be >= 0");
  check_monotone(f, spec, std::max(1.0, y));
  return detail::link_cost_unchecked(f, spec, y);
}

/// Validates every family arc of g over [0, y_max].
inline void check_network_monotone(const Network& g, const RiskMeasureSpec& spec, double y_max) {
  for (const auto& a : g.arcs()) {
    if (a.family) check_monotone(*a.family, spec, std::max(1.0, y_max));
  }
}

// -------------------------------------------------------------- quadrature

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const GaussLegendre<32>& gauss_legendre_32() {
  static const GaussLegendre<32> rule;
  return rule;
}

/// ∫₀^y σ(z) dz for one arc.
inline double arc_cost_integral(const Arc& a, const RiskMeasureSpec& spec, double y) {
  if (y == 0.0) return 0.0;
  if (a.dist) return evaluate(spec, *a.dist) * y;
  const LatencyFamily& f = *a.family;
  if (f.kind() == LatencyFamily::Kind::normal_affine &&
      spec.kind() == RiskMeasureSpec::Kind::entropic) {
    const double c0 = f.mean0() + 0.5 * spec.param() * f.var0();
    const double c1 = f.mean_slope() + 0.5 * spec.param() * f.var_slope();
    return c0 * y + 0.5 * c1 * y * y;
  }
  const auto& rule = gauss_legendre_32();
  double acc = 0.0;
  for (int i = 0; i < 32; ++i) {
    acc += rule.weights[i] * detail::link_cost_unchecked(f, spec, 0.5 * y * (rule.nodes[i] + 1.0));
  }
  return 0.5 * y * acc;
}

// -------------------------------------------------------------- flows

struct PathFlow {
  std::string origin;
  std::string dest;
  Path path;
  double flow;
};

struct FlowAssignment {
  std::map<std::string, double> link_flows;
  std::vector<PathFlow> path_flows;
};

/// Checks y_a = Σ_{p∋a} x_p and Σ_{p∈P_k} x_p = g_k (1e-9, scaled by demand).
inline void check_flow_conservation(const Network& g, const FlowAssignment& f) {
  double scale_ref = 1.0;
  for (const auto& dm : g.demands()) scale_ref = std::max(scale_ref, dm.rate);
  const double tol = 1e-9 * scale_ref;
  std::map<std::string, double> from_paths;
  for (const auto& a : g.arcs()) from_paths[a.id] = 0.0;
  std::map<std::pair<std::string, std::string>, double> od_total;
  for (const auto& pf : f.path_flows) {
    if (pf.flow < -tol) throw InvalidInput("flow: negative path flow");
    validate_path(g, pf.path);
    if (pf.path.nodes.front() != pf.origin || pf.path.nodes.back() != pf.dest) {
      throw InvalidInput("flow: path does not join its OD pair");
    }
    for (const auto& id : pf.path.arcs) from_paths[id] += pf.flow;
    od_total[{pf.origin, pf.dest}] += pf.flow;
  }
  for (const auto& [id, y] : from_paths) {
    const auto it = f.link_flows.find(id);
    const double got = it == f.link_flows.end() ? 0.0 : it->second;
    if (std::abs(got - y) > tol) throw InvalidInput("flow: link flow on '" + id + "' mismatches paths");
  }
  std::map<std::pair<std::string, std::string>, double> od_demand;
  for (const auto& dm : g.demands()) od_demand[{dm.origin, dm.dest}] += dm.rate;
  for (const auto& [od, rate] : od_demand) {
    if (std::abs(od_total[od] - rate) > tol) {
      throw InvalidInput("flow: path flows for " + od.first + " -> " + od.second +
                         " do not sum to the demand");
    }
  }
}

/// Σ_a ∫₀^{y_a} σ_a(z) dz.
inline double beckmann_objective(const Network& g, const RiskMeasureSpec& spec,
                                 const FlowAssignment& flows) {
  double total = 0.0;
  for (const auto& a : g.arcs()) {
    const auto it = flows.link_flows.find(a.id);
    const double y = it == flows.link_flows.end() ? 0.0 : it->second;
    total += arc_cost_integral(a, spec, y);
  }
  return total;
}

inline double path_cost(const Network& g, const RiskMeasureSpec& spec, const Path& p,
                        const std::map<std::string, double>& link_flows) {
  double c = 0.0;
  for (const auto& id : p.arcs) {
    const auto it = link_flows.find(id);
    c += detail::arc_cost_unchecked(g.arc(id), spec, it == link_flows.end() ? 0.0 : it->second);
  }
  return c;
}

namespace detail {

inline std::vector<double> arc_costs(const Network& g, const RiskMeasureSpec& spec,
                                     const std::vector<double>& y) {
  std::vector<double> c(g.arcs().size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = arc_cost_unchecked(g.arcs()[i], spec, y[i]);
  return c;
}

inline std::map<std::string, double> to_link_map(const Network& g, const std::vector<double>& y) {
  std::map<std::string, double> m;
  for (std::size_t i = 0; i < y.size(); ++i) m[g.arcs()[i].id] = y[i];
  return m;
}

inline double total_demand(const Network& g) {
  double t = 0.0;
  for (const auto& dm : g.demands()) t += dm.rate;
  return t;
}

}  // namespace detail

/// Largest excess, over paths carrying flow, of path cost over the cheapest
/// path for the same OD pair.
inline double wardrop_violation(const Network& g, const RiskMeasureSpec& spec,
                                const FlowAssignment& flows) {
  std::vector<double> y(g.arcs().size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto it = flows.link_flows.find(g.arcs()[i].id);
    if (it != flows.link_flows.end()) y[i] = it->second;
  }
  const auto costs = detail::arc_costs(g, spec, y);
  std::map<std::pair<std::string, std::string>, double> od_min;
  double worst = 0.0;
  for (const auto& pf : flows.path_flows) {
    if (!(pf.flow > 0.0)) continue;
    const auto key = std::make_pair(pf.origin, pf.dest);
    auto it = od_min.find(key);
    if (it == od_min.end()) {
      it = od_min.emplace(key, shortest_path_by_weights(g, pf.origin, pf.dest, costs).value).first;
    }
    double c = 0.0;
    for (const auto& id : pf.path.arcs) c += costs[g.arc_index(id)];
    worst = std::max(worst, c - it->second);
  }
  return worst;
}

struct EquilibriumResult {
  FlowAssignment flows;
  std::vector<double> gap_trace;
  std::vector<double> objective_trace;
  int iterations = 0;
  double relative_gap() const { return gap_trace.empty() ? 0.0 : gap_trace.back(); }
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, EquilibriumResult best)
      : Error(what), best_(std::move(best)) {}
  const EquilibriumResult& best() const { return best_; }

 private:
  EquilibriumResult best_;
};

/// Conditional-gradient (Frank-Wolfe) descent on the Beckmann objective
/// with an exact line search. Stops when the relative gap
///   [Σ_a σ_a(y_a)y_a − Σ_k g_k·SP_k] / Σ_a σ_a(y_a)y_a
/// is at most tol.
inline EquilibriumResult frank_wolfe_solve(const Network& g, const RiskMeasureSpec& spec,
                                           double tol = 1e-6, int max_iter = 200) {
  if (!spec.is_additive()) {
    throw NonAdditiveSpecError("frank_wolfe_solve: '" + spec.to_string() +
                               "' does not split path risk into arc costs");
  }
  if (!(tol >= 0.0) || max_iter < 1) throw InvalidInput("frank_wolfe_solve: bad tol or max_iter");
  check_network_monotone(g, spec, detail::total_demand(g));

  const std::size_t m = g.arcs().size();
  const auto& demands = g.demands();
  // Path flows keyed per demand by path; the AON step adds at most one path
  // per demand per iteration.
  std::vector<std::map<Path, double>> x(demands.size());
  std::vector<double> y(m, 0.0);

  auto all_or_nothing = [&](const std::vector<double>& costs, std::vector<double>& y_aon,
                            std::vector<PathResult>& best) {
    y_aon.assign(m, 0.0);
    best.clear();
    for (const auto& dm : demands) {
      best.push_back(shortest_path_by_weights(g, dm.origin, dm.dest, costs));
      for (const auto& id : best.back().path.arcs) y_aon[g.arc_index(id)] += dm.rate;
    }
  };

  std::vector<double> y_aon;
  std::vector<PathResult> best;
  all_or_nothing(detail::arc_costs(g, spec, y), y_aon, best);
  y = y_aon;
  for (std::size_t k = 0; k < demands.size(); ++k) x[k][best[k].path] = demands[k].rate;

  EquilibriumResult result;
  auto snapshot = [&]() {
    FlowAssignment f;
    f.link_flows = detail::to_link_map(g, y);
    for (std::size_t k = 0; k < demands.size(); ++k) {
      for (const auto& [p, flow] : x[k]) {
        if (flow > 0.0) f.path_flows.push_back({demands[k].origin, demands[k].dest, p, flow});
      }
    }
    return f;
  };

  double best_gap = std::numeric_limits<double>::infinity();
  FlowAssignment best_flows;
  for (int it = 1; it <= max_iter; ++it) {
    const auto costs = detail::arc_costs(g, spec, y);
    all_or_nothing(costs, y_aon, best);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += costs[i] * y[i];
    double lower = 0.0;
    for (std::size_t k = 0; k < demands.size(); ++k) lower += demands[k].rate * best[k].value;
    const double gap = total > 0.0 ? std::max(0.0, (total - lower) / total) : 0.0;
    result.gap_trace.push_back(gap);
    result.objective_trace.push_back(beckmann_objective(g, spec, {detail::to_link_map(g, y), {}}));
    result.iterations = it;
    if (gap <= tol) {
      result.flows = snapshot();
      return result;
    }
    if (gap < best_gap) {
      best_gap = gap;
      best_flows = snapshot();
    }

    // Exact line search on φ(α) = Beckmann(y + α d): φ' is nondecreasing.
    std::vector<double> dir(m);
    for (std::size_t i = 0; i < m; ++i) dir[i] = y_aon[i] - y[i];
    auto slope = [&](double alpha) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (dir[i] == 0.0) continue;
        const double yi = std::max(0.0, y[i] + alpha * dir[i]);
        s += detail::arc_cost_unchecked(g.arcs()[i], spec, yi) * dir[i];
      }
      return s;
    };
    double alpha = 1.0;
    if (slope(1.0) > 0.0) {
      double lo = 0.0;
      double hi = 1.0;
      for (int b = 0; b < 50; ++b) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? hi : lo) = mid;
      }
      alpha = 0.5 * (lo + hi);
    }
    for (std::size_t i = 0; i < m; ++i) y[i] = std::max(0.0, y[i] + alpha * dir[i]);
    for (std::size_t k = 0; k < demands.size(); ++k) {
      for (auto& [p, flow] : x[k]) flow *= 1.0 - alpha;
      x[k][best[k].path] += alpha * demands[k].rate;
    }
  }
  result.flows = std::move(best_flows);
  throw NonConvergence("frank_wolfe_solve: best relative gap " + detail::format_number(best_gap) +
                           " above " + detail::format_number(tol) + " after " +
                           std::to_string(max_iter) + " iterations",
                       std::move(result));
}

// ------------------------------------------------------- congestion game

struct Player {
  std::string origin;
  std::string dest;
};

struct CongestionGame {
  Network network;
  RiskMeasureSpec spec;
  std::vector<Player> players;
};

/// One chosen path per player, in player order.
using AtomicProfile = std::vector<Path>;

/// n players; player i travels the OD pair of demand i mod |demands|.
inline CongestionGame make_game(Network g, const RiskMeasureSpec& spec, int n) {
  if (n < 0) throw InvalidInput("atomic game: negative player count");
  if (g.demands().empty() && n > 0) throw InvalidInput("atomic game: network has no demands");
  std::vector<Player> players;
  for (int i = 0; i < n; ++i) {
    const auto& dm = g.demands()[static_cast<std::size_t>(i) % g.demands().size()];
    players.push_back({dm.origin, dm.dest});
  }
  check_network_monotone(g, spec, n);
  return {std::move(g), spec, std::move(players)};
}

/// n_a = |{i : a ∈ p_i}|, indexed like the network's arcs.
inline std::vector<int> arc_loads(const CongestionGame& game, const AtomicProfile& profile) {
  if (profile.size() != game.players.size()) throw InvalidInput("profile: one path per player");
  std::vector<int> n(game.network.arcs().size(), 0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    validate_path(game.network, profile[i]);
    if (profile[i].nodes.front() != game.players[i].origin ||
        profile[i].nodes.back() != game.players[i].dest) {
      throw InvalidInput("profile: path of player " + std::to_string(i) + " misses its OD pair");
    }
    for (const auto& id : profile[i].arcs) ++n[game.network.arc_index(id)];
  }
  return n;
}

inline double atomic_arc_cost(const CongestionGame& game, std::size_t arc, int load) {
  return detail::arc_cost_unchecked(game.network.arcs()[arc], game.spec, load);
}

/// Φ = Σ_a Σ_{z=0}^{n_a} σ_a(z), including the z = 0 terms.
inline double rosenthal_potential(const CongestionGame& game, const AtomicProfile& profile) {
  const auto n = arc_loads(game, profile);
  double phi = 0.0;
  for (std::size_t a = 0; a < n.size(); ++a) {
    for (int z = 0; z <= n[a]; ++z) phi += atomic_arc_cost(game, a, z);
  }
  return phi;
}

/// Cost to player i: Σ_{a∈p_i} σ_a(n_a).
inline double player_cost(const CongestionGame& game, const AtomicProfile& profile, std::size_t i) {
  const auto n = arc_loads(game, profile);
  double c = 0.0;
  for (const auto& id : profile[i].arcs) {
    const std::size_t a = game.network.arc_index(id);
    c += atomic_arc_cost(game, a, n[a]);
  }
  return c;
}

/// Everyone on their cheapest path at zero load.
inline AtomicProfile initial_profile(const CongestionGame& game) {
  std::vector<double> w(game.network.arcs().size());
  for (std::size_t a = 0; a < w.size(); ++a) w[a] = atomic_arc_cost(game, a, 1);
  AtomicProfile p;
  for (const auto& pl : game.players) {
    p.push_back(shortest_path_by_weights(game.network, pl.origin, pl.dest, w).path);
  }
  return p;
}

struct BestResponseMove {
  std::size_t player;
  Path from;
  Path to;
  double cost_before;
  double cost_after;
  double potential;  // after the move
};

struct BestResponseResult {
  AtomicProfile profile;
  std::vector<BestResponseMove> moves;
  std::vector<double> potential_trace;  // Φ at the start, then after each move
};

/// Round-robin best responses in player order. A player switches only to a
/// strictly cheaper path given everyone else's current loads.
inline BestResponseResult best_response_dynamics(const CongestionGame& game, AtomicProfile start,
                                                 int max_rounds = 1000) {
  BestResponseResult r{std::move(start), {}, {}};
  auto loads = arc_loads(game, r.profile);
  r.potential_trace.push_back(rosenthal_potential(game, r.profile));
  const auto& g = game.network;
  for (int round = 0; round < max_rounds; ++round) {
    bool moved = false;
    for (std::size_t i = 0; i < game.players.size(); ++i) {
      for (const auto& id : r.profile[i].arcs) --loads[g.arc_index(id)];
      std::vector<double> w(g.arcs().size());
      for (std::size_t a = 0; a < w.size(); ++a) w[a] = atomic_arc_cost(game, a, loads[a] + 1);
      double current = 0.0;
      for (const auto& id : r.profile[i].arcs) current += w[g.arc_index(id)];
      const auto br = shortest_path_by_weights(g, game.players[i].origin, game.players[i].dest, w);
      if (br.value < current && !detail::costs_tie(br.value, current)) {
        BestResponseMove mv{i, r.profile[i], br.path, current, br.value, 0.0};
        r.profile[i] = br.path;
        mv.potential = rosenthal_potential(game, r.profile);
        if (!(mv.potential < r.potential_trace.back())) {
          throw InternalError("best_response_dynamics: potential did not decrease");
        }
        r.potential_trace.push_back(mv.potential);
        r.moves.push_back(std::move(mv));
        moved = true;
      }
      for (const auto& id : r.profile[i].arcs) ++loads[g.arc_index(id)];
    }
    if (!moved) return r;
  }
  throw InternalError("best_response_dynamics: no equilibrium after " +
                      std::to_string(max_rounds) + " rounds");
}

/// True when no player can strictly lower their cost by switching to any
/// other simple path (exhaustive).
inline bool is_nash(const CongestionGame& game, const AtomicProfile& profile) {
  const auto& g = game.network;
  const auto loads = arc_loads(game, profile);
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    auto others = loads;
    for (const auto& id : profile[i].arcs) --others[g.arc_index(id)];
    auto cost_of = [&](const Path& p) {
      double c = 0.0;
      for (const auto& id : p.arcs) {
        const std::size_t a = g.arc_index(id);
        c += atomic_arc_cost(game, a, others[a] + 1);
      }
      return c;
    };
    const double current = cost_of(profile[i]);
    for (const auto& p : enumerate_paths(g, game.players[i].origin, game.players[i].dest)) {
      const double c = cost_of(p);
      if (c < current && !detail::costs_tie(c, current)) return false;
    }
  }
  return true;
}

}  // namespace riskroute
