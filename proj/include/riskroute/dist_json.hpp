#pragma once

// Distribution <-> JSON:
//   {"type":"discrete","support":[...],"probs":[...]}
//   {"type":"normal","mean":m,"std":s}
//   {"type":"constant","value":v}

#include <riskroute/dist.hpp>

#include <json.hpp>

#include <string>

namespace riskroute {

using json = nlohmann::json;

inline json to_json(const Distribution& x) {
  switch (x.kind()) {
    case Distribution::Kind::constant:
      return {{"type", "constant"}, {"value", x.constant_value()}};
    case Distribution::Kind::normal:
      return {{"type", "normal"}, {"mean", x.normal().mean()}, {"std", x.normal().stddev()}};
    case Distribution::Kind::discrete: {
      const auto& d = x.discrete();
      return {{"type", "discrete"},
              {"support", std::vector<double>(d.support().begin(), d.support().end())},
              {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
    }
  }
  return {};
}

inline Distribution distribution_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return Distribution::constant(j.at("value").get<double>());
    if (type == "normal") return NormalDist(j.at("mean").get<double>(), j.at("std").get<double>());
    if (type == "discrete") {
      return DiscreteDist(j.at("support").get<std::vector<double>>(),
                          j.at("probs").get<std::vector<double>>());
    }
    throw InvalidInput("distribution: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("distribution JSON: ") + e.what());
  }
}

}  // namespace riskroute
