#pragma once

// JSON scenario / strategy files and the built-in scenario shorthands.
//
// Scenario file:
//   {
//     "name": "...",                       optional
//     "sizes": {"x": 2, "y": 2, "z": 2, "a": 2},
//     "source":  [x][y],
//     "channel": [x][y][a][z],
//     "cost":    [a],
//     "f2": [x][y][z],  "d2": [t2][t2hat],
//     "f1": [x][y][z],  "d1": [t1][t1hat],  optional pair (trivial decoder 1)
//     "solver": {...}                       optional SolveConfig fields
//   }
// T alphabet sizes come from the shapes of d1 and d2. Probability rows that
// miss unit mass by at most 1e-9 are renormalized; larger gaps are errors.

#include <optional>
#include <string>
#include <string_view>

#include "rdc/evaluator.hpp"
#include "rdc/scenario.hpp"
#include "rdc/solver.hpp"

namespace rdc {

inline constexpr double kLoadRenormTolerance = 1e-9;

struct LoadedScenario {
  Scenario scenario;
  /// Present when the file carries a "solver" object.
  std::optional<SolveConfig> solver;
};

/// Parses scenario JSON. `origin` prefixes diagnostics, which name the line
/// and column for syntax errors and the field path for content errors.
/// Throws InputError.
LoadedScenario parse_scenario(std::string_view text,
                              const std::string& origin = "<input>");

/// `dsbs:p=0.2`, `wz:p=0.2`, `hb:p=0.2,e=0.3`, `vm:q=0.1[,diagonal=0]`, or a
/// path to a scenario file.
LoadedScenario load_scenario(const std::string& spec);

/// Returns the built-in scenario for a shorthand, or nullopt when `spec` is
/// not of the form `<name>:<k>=<v>,...`. Throws InputError on bad values.
std::optional<Scenario> builtin_scenario(const std::string& spec);

std::string scenario_to_json(const Scenario& s,
                             const SolveConfig* solver = nullptr);

/// {"u_card": N, "kernel": [x][a][u][t1hat], "decoder2": [u][z]}
std::string strategy_to_json(const Strategy& sigma, const Alphabets& n);
Strategy parse_strategy(std::string_view text, const Alphabets& n,
                        const std::string& origin = "<strategy>");

/// Throws InputError when the file cannot be read / written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace rdc
