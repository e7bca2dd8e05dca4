#pragma once

// JSON for networks, latency families, paths and flow assignments.
//
//   network: {"nodes":[...],
//             "arcs":[{"id","tail","head","dist":{...}} | {..., "family":{...}}],
//             "demands":[{"origin","dest","rate"}]}
//   family:  {"kind":"normal_affine","mean0","mean_slope","var0","var_slope"}
//            {"kind":"discrete_scaled","base":{distribution},"slope"}
//   flows:   {"link_flows":{id: y}, "path_flows":[{"origin","dest","nodes","arcs","flow"}]}

#include <riskroute/dist_json.hpp>
#include <riskroute/equilibrium.hpp>
#include <riskroute/network.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace riskroute {

inline json to_json(const LatencyFamily& f) {
  if (f.kind() == LatencyFamily::Kind::normal_affine) {
    return {{"kind", "normal_affine"}, {"mean0", f.mean0()},   {"mean_slope", f.mean_slope()},
            {"var0", f.var0()},        {"var_slope", f.var_slope()}};
  }
  return {{"kind", "discrete_scaled"}, {"base", to_json(Distribution(f.base()))}, {"slope", f.slope()}};
}

inline LatencyFamily latency_family_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "normal_affine") {
      return LatencyFamily::normal_affine(j.at("mean0").get<double>(), j.at("mean_slope").get<double>(),
                                          j.at("var0").get<double>(), j.at("var_slope").get<double>());
    }
    if (kind == "discrete_scaled") {
      const Distribution base = distribution_from_json(j.at("base"));
      return LatencyFamily::discrete_scaled(base.require_finite("discrete_scaled"),
                                            j.at("slope").get<double>());
    }
    throw InvalidInput("latency family: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("latency family JSON: ") + e.what());
  }
}

inline json to_json(const Network& g) {
  json arcs = json::array();
  for (const auto& a : g.arcs()) {
    json ja = {{"id", a.id}, {"tail", a.tail}, {"head", a.head}};
    if (a.dist) {
      ja["dist"] = to_json(*a.dist);
    } else {
      ja["family"] = to_json(*a.family);
    }
    arcs.push_back(std::move(ja));
  }
  json demands = json::array();
  for (const auto& d : g.demands()) {
    demands.push_back({{"origin", d.origin}, {"dest", d.dest}, {"rate", d.rate}});
  }
  return {{"nodes", g.nodes()}, {"arcs", arcs}, {"demands", demands}};
}

inline Network network_from_json(const json& j) {
  try {
    Network g;
    for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
    for (const auto& a : j.at("arcs")) {
      const auto id = a.at("id").get<std::string>();
      const auto tail = a.at("tail").get<std::string>();
      const auto head = a.at("head").get<std::string>();
      const bool has_dist = a.contains("dist");
      if (has_dist == a.contains("family")) {
        throw InvalidInput("arc '" + id + "': exactly one of \"dist\" and \"family\" required");
      }
      if (has_dist) {
        g.add_arc(id, tail, head, distribution_from_json(a.at("dist")));
      } else {
        g.add_arc(id, tail, head, latency_family_from_json(a.at("family")));
      }
    }
    if (j.contains("demands")) {
      for (const auto& d : j.at("demands")) {
        g.add_demand(d.at("origin").get<std::string>(), d.at("dest").get<std::string>(),
                     d.at("rate").get<double>());
      }
    }
    return g;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("network JSON: ") + e.what());
  }
}

inline json to_json(const Path& p) { return {{"nodes", p.nodes}, {"arcs", p.arcs}}; }

inline Path path_from_json(const json& j) {
  try {
    return {j.at("nodes").get<std::vector<std::string>>(), j.at("arcs").get<std::vector<std::string>>()};
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("path JSON: ") + e.what());
  }
}

inline json to_json(const FlowAssignment& f) {
  json paths = json::array();
  for (const auto& pf : f.path_flows) {
    paths.push_back({{"origin", pf.origin},
                     {"dest", pf.dest},
                     {"nodes", pf.path.nodes},
                     {"arcs", pf.path.arcs},
                     {"flow", pf.flow}});
  }
  return {{"link_flows", f.link_flows}, {"path_flows", paths}};
}

inline FlowAssignment flow_assignment_from_json(const json& j) {
  try {
    FlowAssignment f;
    f.link_flows = j.at("link_flows").get<std::map<std::string, double>>();
    for (const auto& p : j.at("path_flows")) {
      f.path_flows.push_back({p.at("origin").get<std::string>(), p.at("dest").get<std::string>(),
                              path_from_json(p), p.at("flow").get<double>()});
    }
    return f;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("flow JSON: ") + e.what());
  }
}

/// Reads a whole file; InvalidInput if it cannot be opened.
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

inline Network load_network(const std::string& path) {
  return network_from_json(parse_json_text(read_file(path), path));
}

}  // namespace riskroute
