#include <cstdio>
#include <sstream>

#include "candidate.hpp"
#include "rdc/error.hpp"
#include "rdc/parallel.hpp"
#include "rdc/solver.hpp"

namespace rdc {
namespace {

struct GridIndex {
  std::size_t d1, d2, mode, greedy, gamma;
};

detail::Candidate as_candidate(const SolveResult& r, const Constraints& c,
                               RateMode mode, double slack) {
  detail::Candidate cand;
  cand.strategy = r.strategy;
  cand.evaluation = r.evaluation;
  cand.rate = rate_of(r.evaluation, mode);
  cand.violation = max_violation(r.evaluation, c);
  cand.feasible = cand.violation <= slack;
  return cand;
}

}  // namespace

std::vector<SweepRow> sweep(const Scenario& s, const SweepGrid& grid,
                            const SolveConfig& cfg) {
  if (grid.d1.empty() || grid.d2.empty() || grid.gamma.empty() ||
      grid.modes.empty() || grid.greedy.empty())
    throw InputError("sweep grid axes must be non-empty");

  std::vector<SweepRow> rows;
  std::vector<GridIndex> where;
  for (std::size_t i1 = 0; i1 < grid.d1.size(); ++i1)
    for (std::size_t i2 = 0; i2 < grid.d2.size(); ++i2)
      for (std::size_t im = 0; im < grid.modes.size(); ++im)
        for (std::size_t ig = 0; ig < grid.greedy.size(); ++ig)
          for (std::size_t iy = 0; iy < grid.gamma.size(); ++iy) {
            SweepRow row;
            row.constraints = {grid.d1[i1], grid.d2[i2], grid.gamma[iy]};
            row.mode = grid.modes[im];
            row.greedy = grid.greedy[ig];
            rows.push_back(std::move(row));
            where.push_back({i1, i2, im, ig, iy});
          }
  const std::size_t n = rows.size();

  auto point_config = [&](std::size_t i) {
    SolveConfig pc = cfg;
    pc.mode = rows[i].mode;
    pc.greedy = rows[i].greedy;
    pc.seed = detail::mix_seed(cfg.seed, i);
    pc.jobs = 1;
    return pc;
  };

  // Fresh restarts at every grid point.
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    rows[i].result = solve(s, rows[i].constraints, point_config(i));
  });

  // Re-solve from the strategies found at adjacent grid points.
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const GridIndex g = where[i];
    for (std::size_t j = 0; j < n; ++j) {
      const GridIndex h = where[j];
      if (h.mode != g.mode || h.greedy != g.greedy) continue;
      const std::size_t dist =
          (h.d1 > g.d1 ? h.d1 - g.d1 : g.d1 - h.d1) +
          (h.d2 > g.d2 ? h.d2 - g.d2 : g.d2 - h.d2) +
          (h.gamma > g.gamma ? h.gamma - g.gamma : g.gamma - h.gamma);
      if (dist == 1) out.push_back(j);
    }
    return out;
  };
  std::vector<SolveResult> polished(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const SolveResult& first = rows[i].result;
    if (first.diagnostics.zero_rate_shortcut) {
      polished[i] = first;
      return;
    }
    SolveConfig pc = point_config(i);
    pc.restarts = 0;
    pc.warm_starts.clear();
    for (std::size_t j : neighbours(i))
      pc.warm_starts.push_back(rows[j].result.strategy);
    polished[i] = first;
    if (pc.warm_starts.empty()) return;
    SolveResult again = solve(s, rows[i].constraints, pc);
    const auto a = as_candidate(again, rows[i].constraints, rows[i].mode,
                                cfg.constraint_slack);
    const auto b = as_candidate(first, rows[i].constraints, rows[i].mode,
                                cfg.constraint_slack);
    if (detail::better(a, b)) {
      SolveDiagnostics diag = first.diagnostics;
      diag.restarts += again.diagnostics.restarts;
      diag.evaluations += again.diagnostics.evaluations;
      diag.wall_seconds += again.diagnostics.wall_seconds;
      polished[i] = std::move(again);
      polished[i].diagnostics = std::move(diag);
    }
  });

  // Every row adopts the best strategy in the sweep that lies in its search
  // space and meets its budgets. Greedy strategies are valid adaptive ones,
  // and a strategy's rate in either mode is read off its evaluation.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = rows[i].constraints;
    auto best = as_candidate(polished[i], c, rows[i].mode,
                             cfg.constraint_slack);
    std::size_t from = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (rows[i].greedy && !rows[j].greedy) continue;
      auto cand = as_candidate(polished[j], c, rows[i].mode,
                               cfg.constraint_slack);
      if (detail::better(cand, best)) {
        best = std::move(cand);
        from = j;
      }
    }
    SolveResult& out = rows[i].result;
    out = polished[i];
    if (from != i) {
      out.strategy = best.strategy;
      out.evaluation = best.evaluation;
    }
    out.rate = best.rate;
    out.feasible = best.feasible;
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "gamma,d1,d2,mode,greedy,rate,cost,dist1,dist2,feasible,"
      "restart_spread\n";
  char line[512];
  for (const auto& r : rows) {
    const auto& e = r.result.evaluation;
    std::snprintf(line, sizeof line,
                  "%.6f,%.6f,%.6f,%s,%d,%.6f,%.6f,%.6f,%.6f,%d,%.6f\n",
                  r.constraints.gamma, r.constraints.d1, r.constraints.d2,
                  to_string(r.mode), r.greedy ? 1 : 0, r.result.rate, e.cost,
                  e.dist1, e.dist2, r.result.feasible ? 1 : 0,
                  r.result.diagnostics.restart_spread);
    out += line;
  }
  return out;
}

}  // namespace rdc
