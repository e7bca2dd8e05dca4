#pragma once

// Batch command-line front end. run() takes the arguments after the program
// name and writes results to `out`, diagnostics to `err`.
//
// Exit codes: 0 success, 1 failed check or computation, 2 usage error,
// 3 unreadable or invalid input file.

#include <riskroute/consistency.hpp>
#include <riskroute/golden.hpp>
#include <riskroute/io.hpp>
#include <riskroute/routing.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace riskroute::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kInputFile = 3 };

/// v rounded to 12 significant digits.
inline double round_output(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  double back = 0.0;
  std::from_chars(buf, res.ptr, back);
  return back;
}

/// Shortest decimal that reads back as v, capped at 12 significant digits.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), round_output(v));
  return std::string(buf, res.ptr);
}

namespace detail {

struct UsageError : Error {
  using Error::Error;
};
struct InputFileError : Error {
  using Error::Error;
};

inline RiskMeasureSpec parse_risk(const std::string& text) {
  try {
    return RiskMeasureSpec::parse(text);
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("--risk: ") + e.what());
  }
}

template <class F>
auto load_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw InputFileError(e.what());
  }
}

inline Network network_arg(const std::string& path) {
  return load_input([&] { return load_network(path); });
}

/// Inline JSON when the argument starts with '{', otherwise a file path.
inline Distribution distribution_arg(const std::string& arg) {
  return load_input([&] {
    const auto first = arg.find_first_not_of(" \t\r\n");
    const bool inline_json = first != std::string::npos && arg[first] == '{';
    const std::string text = inline_json ? arg : read_file(arg);
    return distribution_from_json(parse_json_text(text, inline_json ? "--dist" : arg));
  });
}

/// Compact JSON with floats in shortest round-trip form (nlohmann's own
/// float printer is not always shortest).
inline void dump_to(const json& j, std::string& s) {
  switch (j.type()) {
    case json::value_t::object: {
      s += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) s += ',';
        first = false;
        s += json(k).dump();
        s += ':';
        dump_to(v, s);
      }
      s += '}';
      break;
    }
    case json::value_t::array: {
      s += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) s += ',';
        dump_to(j[i], s);
      }
      s += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        s += "null";
        break;
      }
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      s.append(buf, res.ptr);
      break;
    }
    default:
      s += j.dump();
  }
}

inline std::string dump(const json& j) {
  std::string s;
  dump_to(j, s);
  return s;
}

inline json path_json(const PathResult& r) {
  json j = to_json(r.path);
  j["value"] = round_output(r.value);
  return j;
}

inline json report_json(const ViolationReport& r) {
  json j = to_json(r);
  j["lhs"] = round_output(r.lhs);
  j["rhs"] = round_output(r.rhs);
  j["gap"] = round_output(r.gap);
  return j;
}

/// One suite case: its reports and whether they matched the expectation.
struct SuiteCase {
  std::string label;
  std::vector<ViolationReport> reports;
  bool expect_empty;
  bool met() const { return reports.empty() == expect_empty; }
};

inline std::vector<SuiteCase> run_suite(const std::string& suite, const TestEnsemble& e) {
  std::vector<SuiteCase> cases;
  if (suite == "axioms") {
    for (const auto& spec :
         {RiskMeasureSpec::entropic(0.5), RiskMeasureSpec::entropic(-1.0),
          RiskMeasureSpec::mean_var(0.5), RiskMeasureSpec::mean_stdev(1.0), RiskMeasureSpec::var(0.1),
          RiskMeasureSpec::avar(0.1), RiskMeasureSpec::tce(0.25),
          RiskMeasureSpec::distortion(DistortionFn::power(0.5)),
          RiskMeasureSpec::distortion(DistortionFn::avar_cap(0.2)),
          RiskMeasureSpec::cert_equiv(UtilityFn::cubic_test()),
          RiskMeasureSpec::rank_dep(UtilityFn::exponential(0.2), DistortionFn::power(0.7))}) {
      cases.push_back({spec.to_string(), check_axioms(spec, e), true});
    }
    const auto spec = RiskMeasureSpec::mean_var(8.0);
    cases.push_back({"mean_var:8 on the coupled uniform pair",
                     check_monotone_pair(spec, uniform_coupled_pair(100), "X", "Y"), false});
  } else if (suite == "additivity") {
    cases.push_back({"entropic:0.5", check_additive_consistency(RiskMeasureSpec::entropic(0.5), e), true});
    for (const auto& spec :
         {RiskMeasureSpec::mean_stdev(1.0), RiskMeasureSpec::var(0.1), RiskMeasureSpec::avar(0.1)}) {
      cases.push_back({spec.to_string(), check_additive_consistency(spec, e), false});
    }
  } else if (suite == "efin") {
    cases.push_back({"identity", check_efin(DistortionFn::identity(), 101, 0.0), true});
    cases.push_back({"power:0.5", check_efin(DistortionFn::power(0.5), 101, 0.01), false});
    cases.push_back({"avar_cap:0.2", check_efin(DistortionFn::avar_cap(0.2), 101, 0.01), false});
  } else if (suite == "vnm") {
    const auto grid = default_translation_grid();
    cases.push_back({"exp:0.7", verify_translation_invariance(UtilityFn::exponential(0.7), grid), true});
    cases.push_back({"identity", verify_translation_invariance(UtilityFn::identity(), grid), true});
    cases.push_back({"cubic", verify_translation_invariance(UtilityFn::cubic_test(), grid, 1e-3), false});
  } else if (suite == "rankdep") {
    auto split = [](std::vector<ViolationReport> all, const std::string& property) {
      std::vector<ViolationReport> keep;
      for (auto& r : all) {
        if (r.property == property) keep.push_back(std::move(r));
      }
      return keep;
    };
    const auto exp_id = verify_rank_dependent(UtilityFn::exponential(0.5), DistortionFn::identity(), e);
    const auto id_pow = verify_rank_dependent(UtilityFn::identity(), DistortionFn::power(0.5), e);
    const auto exp_pow = verify_rank_dependent(UtilityFn::exponential(1.0), DistortionFn::power(0.5), e);
    cases.push_back({"exp:0.5 identity", exp_id, true});
    cases.push_back({"identity power:0.5 translation", split(id_pow, "rankdep_translation"), true});
    cases.push_back({"identity power:0.5 additivity", split(id_pow, "rankdep_additivity"), false});
    cases.push_back({"exp:1 power:0.5 additivity", split(exp_pow, "rankdep_additivity"), false});
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return cases;
}

inline void print_golden(const GoldenReport& r, const std::string& confirmation, std::ostream& out) {
  for (const auto& [name, value] : r.values) out << name << " " << format_number(value) << "\n";
  for (const auto& [name, ok] : r.checks) out << (ok ? "ok   " : "FAIL ") << name << "\n";
  out << (r.passed() ? confirmation : std::string("CHECK FAILED")) << "\n";
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk measures, consistency checks and risk-averse routing on stochastic networks",
               "riskroute"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* eval = app.add_subcommand("eval", "Evaluate a risk measure on a distribution");
  std::string dist_arg, risk_arg;
  eval->add_option("--dist", dist_arg, "Distribution JSON file or inline JSON")->required();
  eval->add_option("--risk", risk_arg, "Risk measure, e.g. entropic:0.5")->required();
  eval->callback([&] {
    action = [&] {
      const auto spec = detail::parse_risk(risk_arg);
      const auto x = detail::distribution_arg(dist_arg);
      out << format_number(evaluate(spec, x)) << "\n";
      return int(kOk);
    };
  });

  std::string net_arg, from_arg, to_arg;
  auto* path = app.add_subcommand("path", "Risk-minimizing path for an additive measure");
  path->add_option("--net", net_arg, "Network JSON file")->required();
  path->add_option("--from", from_arg, "Origin node")->required();
  path->add_option("--to", to_arg, "Destination node")->required();
  path->add_option("--risk", risk_arg, "Additive risk measure")->required();
  path->callback([&] {
    action = [&] {
      const auto spec = detail::parse_risk(risk_arg);
      const auto g = detail::network_arg(net_arg);
      try {
        out << detail::dump(detail::path_json(shortest_path(g, from_arg, to_arg, spec))) << "\n";
      } catch (const NonAdditiveSpecError& e) {
        throw detail::UsageError(e.what());
      }
      return int(kOk);
    };
  });

  bool compare = false;
  auto* brute = app.add_subcommand("bruteforce-path", "Exact risk-minimizing path for any measure");
  brute->add_option("--net", net_arg, "Network JSON file")->required();
  brute->add_option("--from", from_arg, "Origin node")->required();
  brute->add_option("--to", to_arg, "Destination node")->required();
  brute->add_option("--risk", risk_arg, "Risk measure")->required();
  brute->add_flag("--compare", compare,
                  "Also report the arc-weight path and flag when it is not optimal");
  brute->callback([&] {
    action = [&] {
      const auto spec = detail::parse_risk(risk_arg);
      const auto g = detail::network_arg(net_arg);
      const auto best = optimal_path_bruteforce(g, from_arg, to_arg, spec);
      if (!compare) {
        out << detail::dump(detail::path_json(best)) << "\n";
        return int(kOk);
      }
      const auto sep = shortest_path_by_weights(g, from_arg, to_arg, separable_weights(g, spec));
      json js = to_json(sep.path);
      js["weight_sum"] = round_output(sep.value);
      const double sep_value = evaluate(spec, path_time_law(g, sep.path));
      js["value"] = round_output(sep_value);
      const bool paradox = !(sep.path == best.path) && sep_value > best.value &&
                           !riskroute::detail::costs_tie(sep_value, best.value);
      out << detail::dump({{"bruteforce", detail::path_json(best)}, {"arc_weights", js},
                           {"paradox", paradox}})
          << "\n";
      return int(kOk);
    };
  });

  double tol = 1e-6;
  int max_iter = 200;
  auto* eq = app.add_subcommand("equilibrium", "Risk-averse Wardrop equilibrium (Frank-Wolfe)");
  eq->add_option("--net", net_arg, "Network JSON file with families and demands")->required();
  eq->add_option("--risk", risk_arg, "Additive risk measure")->required();
  eq->add_option("--tol", tol, "Relative-gap tolerance")->capture_default_str();
  eq->add_option("--max-iter", max_iter, "Iteration limit")->capture_default_str();
  eq->callback([&] {
    action = [&] {
      const auto spec = detail::parse_risk(risk_arg);
      const auto g = detail::network_arg(net_arg);
      auto emit = [&](const EquilibriumResult& r, double gap) {
        json j = to_json(r.flows);
        for (auto& [id, y] : j["link_flows"].items()) y = round_output(y.get<double>());
        for (auto& p : j["path_flows"]) p["flow"] = round_output(p["flow"].get<double>());
        j["relative_gap"] = round_output(gap);
        j["iterations"] = r.iterations;
        out << detail::dump(j) << "\n";
      };
      try {
        const auto r = frank_wolfe_solve(g, spec, tol, max_iter);
        emit(r, r.relative_gap());
      } catch (const NonAdditiveSpecError& e) {
        throw detail::UsageError(e.what());
      } catch (const NonConvergence& e) {
        // The attached flows are the iterate with the smallest gap.
        const auto& trace = e.best().gap_trace;
        emit(e.best(), *std::min_element(trace.begin(), trace.end()));
        err << "riskroute: " << e.what() << "\n";
        return int(kFailed);
      }
      return int(kOk);
    };
  });

  int players = 2;
  int max_rounds = 1000;
  auto* atomic = app.add_subcommand("atomic", "Best-response dynamics in the atomic routing game");
  atomic->add_option("--net", net_arg, "Network JSON file with families and demands")->required();
  atomic->add_option("--players", players, "Number of players (OD pairs cycle through demands)")
      ->required();
  atomic->add_option("--risk", risk_arg, "Risk measure")->required();
  atomic->add_option("--max-rounds", max_rounds, "Round limit")->capture_default_str();
  atomic->callback([&] {
    action = [&] {
      const auto spec = detail::parse_risk(risk_arg);
      const auto game = make_game(detail::network_arg(net_arg), spec, players);
      const auto r = best_response_dynamics(game, initial_profile(game), max_rounds);
      json profile = json::array();
      for (std::size_t i = 0; i < r.profile.size(); ++i) {
        json p = to_json(r.profile[i]);
        p["player"] = i;
        p["cost"] = round_output(player_cost(game, r.profile, i));
        profile.push_back(std::move(p));
      }
      json trace = json::array();
      for (double phi : r.potential_trace) trace.push_back(round_output(phi));
      const bool nash = is_nash(game, r.profile);
      out << detail::dump({{"profile", profile},
                           {"potential_trace", trace},
                           {"moves", r.moves.size()},
                           {"nash", nash}})
          << "\n";
      return nash ? int(kOk) : int(kFailed);
    };
  });

  std::string suite;
  TestEnsemble ensemble;
  auto* check = app.add_subcommand("check", "Property-check suite; prints violation reports");
  check->add_option("--suite", suite, "axioms | additivity | efin | vnm | rankdep")
      ->required()
      ->check(CLI::IsMember({"axioms", "additivity", "efin", "vnm", "rankdep"}));
  check->add_option("--seed", ensemble.seed, "Ensemble seed")->capture_default_str();
  check->add_option("--count", ensemble.count, "Ensemble size")->capture_default_str();
  check->callback([&] {
    action = [&] {
      try {
        ensemble.validate();
      } catch (const InvalidInput& e) {
        throw detail::UsageError(e.what());
      }
      const auto cases = detail::run_suite(suite, ensemble);
      bool all_met = true;
      for (const auto& c : cases) {
        for (const auto& r : c.reports) out << detail::dump(detail::report_json(r)) << "\n";
        err << (c.met() ? "ok   " : "FAIL ") << suite << " " << c.label << ": " << c.reports.size()
            << " report(s), expected " << (c.expect_empty ? "none" : "some") << "\n";
        all_met = all_met && c.met();
      }
      return all_met ? int(kOk) : int(kFailed);
    };
  });

  std::string example;
  auto* golden = app.add_subcommand("golden", "Reproduce a worked example");
  golden->add_option("example", example, "fig1 | fig4 | allais")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig4", "allais"}));
  golden->callback([&] {
    action = [&] {
      GoldenReport r;
      std::string confirmation;
      if (example == "fig1") {
        r = golden_fig1();
        confirmation = "REVERSAL CONFIRMED";
      } else if (example == "fig4") {
        r = golden_fig4();
        confirmation = "ORDER FLIP CONFIRMED";
      } else {
        r = golden_allais();
        confirmation = "EXPECTED-VALUE ORDER PRESERVED";
      }
      detail::print_golden(r, confirmation, out);
      return r.passed() ? int(kOk) : int(kFailed);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "riskroute: " << e.what() << "\n";
    return kUsage;
  }

  try {
    return action();
  } catch (const detail::UsageError& e) {
    err << "riskroute: " << e.what() << "\n";
    return kUsage;
  } catch (const detail::InputFileError& e) {
    err << "riskroute: " << e.what() << "\n";
    return kInputFile;
  } catch (const std::exception& e) {
    err << "riskroute: " << e.what() << "\n";
    return kFailed;
  }
}

}  // namespace riskroute::cli
