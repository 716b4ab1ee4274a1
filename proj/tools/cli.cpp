#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rdc/error.hpp"
#include "rdc/io.hpp"
#include "rdc/solver.hpp"
#include "rdc/validation.hpp"

namespace rdc::cli {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw InputError("not a number: '" + text + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text[0] == '-')
    throw InputError(std::string(what) + " must be a non-negative integer, got '" +
                     text + "'");
  return v;
}

/// Options shared by solve and sweep that adjust a SolveConfig.
struct SolverFlags {
  std::string mode;
  bool greedy = false;
  std::optional<std::size_t> u_card;
  std::optional<std::size_t> restarts;
  std::optional<double> grid_step;
  std::optional<std::string> seed;
  std::optional<std::size_t> jobs;

  void add(CLI::App& app, bool mode_is_list) {
    app.add_option("--mode", mode,
                   mode_is_list ? "noncausal, causal, or a comma list"
                                : "noncausal or causal");
    app.add_flag("--greedy", greedy, "actions independent of the source");
    app.add_option("--u-card", u_card, "auxiliary alphabet size");
    app.add_option("--restarts", restarts, "random restarts per point");
    app.add_option("--grid-step", grid_step, "brute-force grid resolution");
    app.add_option("--seed", seed, "seed (fallback: RDC_SEED)");
    app.add_option("--jobs", jobs, "worker threads");
  }

  SolveConfig apply(SolveConfig cfg) const {
    if (!mode.empty() && mode.find(',') == std::string::npos)
      cfg.mode = parse_rate_mode(mode);
    if (greedy) cfg.greedy = true;
    if (u_card) cfg.u_card = *u_card;
    if (restarts) cfg.restarts = *restarts;
    if (grid_step) {
      if (!(*grid_step > 0.0 && *grid_step <= 1.0))
        throw InputError("--grid-step must lie in (0, 1]");
      cfg.grid_step = *grid_step;
    }
    if (seed) {
      cfg.seed = parse_seed(*seed, "--seed");
    } else if (const char* env = std::getenv("RDC_SEED"); env && *env) {
      cfg.seed = parse_seed(env, "RDC_SEED");
    }
    if (jobs) {
      if (*jobs == 0) throw InputError("--jobs must be positive");
      cfg.jobs = *jobs;
    } else {
      cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    return cfg;
  }
};

SolveConfig base_config(const LoadedScenario& loaded) {
  return loaded.solver ? *loaded.solver : SolveConfig{};
}

void print_result(std::ostream& out, const SolveResult& r, RateMode mode) {
  const auto& e = r.evaluation;
  out << "mode " << to_string(mode) << "\n"
      << "rate " << fixed6(r.rate) << "\n"
      << "cost " << fixed6(e.cost) << "\n"
      << "dist1 " << fixed6(e.dist1) << "\n"
      << "dist2 " << fixed6(e.dist2) << "\n"
      << "rate_noncausal " << fixed6(e.rate_noncausal) << "\n"
      << "rate_causal " << fixed6(e.rate_causal) << "\n"
      << "feasible " << (r.feasible ? "yes" : "no") << "\n"
      << "u_card " << r.strategy.u_card << "\n"
      << "restarts " << r.diagnostics.restarts << "\n"
      << "restart_spread " << fixed6(r.diagnostics.restart_spread) << "\n"
      << "zero_rate_shortcut " << (r.diagnostics.zero_rate_shortcut ? "yes" : "no")
      << "\n";
}

std::string one_line(std::string msg) {
  for (auto& ch : msg)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return msg;
}

std::vector<RateMode> parse_modes(const std::string& text) {
  std::vector<RateMode> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rate_mode(item));
  if (out.empty()) throw InputError("--mode needs at least one mode");
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw InputError("empty grid");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
      throw InputError("range grid must be start:stop:step, got '" + text + "'");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start)
      throw InputError("range grid needs step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e6) throw InputError("range grid has too many points");
    for (std::size_t i = 0; i <= static_cast<std::size_t>(count); ++i)
      out.push_back(start + double(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"rate-distortion-cost solver for lossy computing with "
               "observation costs",
               "rdc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // solve ------------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand("solve", "minimize the rate at one budget");
  std::string solve_scenario;
  std::optional<double> solve_d1;
  double solve_d2 = 0.0, solve_gamma = 0.0;
  std::string emit_strategy;
  bool brute = false;
  SolverFlags solve_flags;
  solve_cmd->add_option("scenario", solve_scenario,
                        "scenario file or dsbs:p=, wz:p=, hb:p=,e=, vm:q=")
      ->required();
  solve_cmd->add_option("--d1", solve_d1, "decoder 1 budget (default d1_max)");
  solve_cmd->add_option("--d2", solve_d2, "decoder 2 budget")->required();
  solve_cmd->add_option("--gamma", solve_gamma, "action cost budget")->required();
  solve_cmd->add_option("--emit-strategy", emit_strategy,
                        "write the strategy JSON here");
  solve_cmd->add_flag("--brute-force", brute,
                      "exhaustive grid search with --grid-step");
  solve_flags.add(*solve_cmd, false);

  // sweep ------------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "solve over a budget grid, emit CSV");
  std::string sweep_scenario;
  std::string sweep_d1, sweep_d2, sweep_gamma, out_path;
  bool fig4 = false, greedy_both = false;
  SolverFlags sweep_flags;
  sweep_cmd->add_option("scenario", sweep_scenario,
                        "scenario file or builtin (default with --fig4: dsbs:p=0.2)");
  sweep_cmd->add_option("--d1", sweep_d1, "list or start:stop:step (default d1_max)");
  sweep_cmd->add_option("--d2", sweep_d2, "list or start:stop:step");
  sweep_cmd->add_option("--gamma", sweep_gamma, "list or start:stop:step");
  sweep_cmd->add_option("--out", out_path, "CSV path (default stdout)");
  sweep_cmd->add_flag("--fig4", fig4,
                      "p=0.2, D2 in {0.05,0.15}, gamma 0:1:0.05, both modes, "
                      "greedy off and on");
  sweep_cmd->add_flag("--greedy-both", greedy_both, "rows with greedy off and on");
  sweep_flags.add(*sweep_cmd, true);

  // threshold --------------------------------------------------------------
  auto* thr_cmd = app.add_subcommand(
      "threshold", "smallest cost budget at which rate zero is achievable");
  std::string thr_scenario;
  std::optional<double> thr_d1;
  double thr_d2 = 0.0;
  thr_cmd->add_option("scenario", thr_scenario, "scenario file or builtin")
      ->required();
  thr_cmd->add_option("--d1", thr_d1, "decoder 1 budget (default d1_max)");
  thr_cmd->add_option("--d2", thr_d2, "decoder 2 budget")->required();

  // validate ---------------------------------------------------------------
  auto* val_cmd = app.add_subcommand("validate", "reduction pairs and property suite");
  std::string val_seed;
  std::size_t trials = 200;
  std::optional<std::size_t> val_restarts, val_jobs;
  std::string json_path;
  bool properties_only = false;
  val_cmd->add_option("--seed", val_seed, "seed (fallback: RDC_SEED)");
  val_cmd->add_option("--trials", trials, "property-suite trials");
  val_cmd->add_option("--restarts", val_restarts, "random restarts per solve");
  val_cmd->add_option("--jobs", val_jobs, "worker threads");
  val_cmd->add_option("--json", json_path, "also write a JSON summary here");
  val_cmd->add_flag("--properties-only", properties_only,
                    "skip the reduction pairs");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kInputError;
  }

  try {
    if (*solve_cmd) {
      const LoadedScenario loaded = load_scenario(solve_scenario);
      const Scenario& s = loaded.scenario;
      SolveConfig cfg = solve_flags.apply(base_config(loaded));
      const Constraints c{solve_d1.value_or(d1_max(s)), solve_d2, solve_gamma};
      const SolveResult r = brute ? brute_force_solve(s, c, cfg.grid_step, cfg)
                                  : solve(s, c, cfg);
      print_result(out, r, cfg.mode);
      if (!emit_strategy.empty())
        write_file(emit_strategy, strategy_to_json(r.strategy, s.sizes));
      return r.feasible ? kOk : kInfeasible;
    }

    if (*sweep_cmd) {
      std::string spec = sweep_scenario;
      if (spec.empty()) {
        if (!fig4) throw InputError("sweep needs a scenario (or --fig4)");
        spec = "dsbs:p=0.2";
      }
      const LoadedScenario loaded = load_scenario(spec);
      const Scenario& s = loaded.scenario;
      SolveConfig cfg = sweep_flags.apply(base_config(loaded));
      SweepGrid grid;
      if (fig4) {
        grid.d2 = {0.05, 0.15};
        grid.gamma = parse_grid("0:1:0.05");
        grid.modes = {RateMode::noncausal, RateMode::causal};
        grid.greedy = {false, true};
      } else {
        grid.modes = {cfg.mode};
        grid.greedy = {cfg.greedy};
      }
      if (!sweep_d2.empty()) grid.d2 = parse_grid(sweep_d2);
      if (!sweep_gamma.empty()) grid.gamma = parse_grid(sweep_gamma);
      if (!sweep_flags.mode.empty()) grid.modes = parse_modes(sweep_flags.mode);
      if (greedy_both) grid.greedy = {false, true};
      grid.d1 = sweep_d1.empty() ? std::vector<double>{d1_max(s)}
                                 : parse_grid(sweep_d1);
      if (grid.d2.empty()) throw InputError("sweep needs --d2 (or --fig4)");
      if (grid.gamma.empty()) throw InputError("sweep needs --gamma (or --fig4)");
      // Fail on an unwritable path before spending time on the solves.
      if (!out_path.empty()) write_file(out_path, "");
      const std::string csv = sweep_csv(sweep(s, grid, cfg));
      if (out_path.empty()) {
        out << csv;
      } else {
        write_file(out_path, csv);
      }
      return kOk;
    }

    if (*thr_cmd) {
      const LoadedScenario loaded = load_scenario(thr_scenario);
      const Scenario& s = loaded.scenario;
      const auto t = zero_rate_threshold(s, thr_d1.value_or(d1_max(s)), thr_d2);
      if (!t.feasible) {
        out << "infeasible\n";
        return kInfeasible;
      }
      out << fixed6(t.gamma) << "\n";
      return kOk;
    }

    if (*val_cmd) {
      SolveConfig cfg;
      if (!val_seed.empty()) {
        cfg.seed = parse_seed(val_seed, "--seed");
      } else if (const char* env = std::getenv("RDC_SEED"); env && *env) {
        cfg.seed = parse_seed(env, "RDC_SEED");
      }
      if (val_restarts) cfg.restarts = *val_restarts;
      const std::size_t jobs =
          val_jobs ? *val_jobs : std::max(1u, std::thread::hardware_concurrency());
      if (jobs == 0) throw InputError("--jobs must be positive");
      ValidationReport report;
      if (!properties_only) {
        for (const auto& c : builtin_reductions(cfg))
          report.reductions.push_back(check_reduction(
              c.name, c.general, c.reduced, c.points, kReductionTolerance, jobs));
      }
      report.properties = run_property_suite(cfg.seed, trials);
      out << report.to_text();
      if (!json_path.empty()) write_file(json_path, report.to_json());
      return report.passed() ? kOk : kInfeasible;
    }
  } catch (const InputError& e) {
    err << "error: input: " << one_line(e.what()) << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: invalid: " << one_line(e.what()) << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace rdc::cli
