#include <chrono>
#include <cmath>
#include <sstream>

#include "candidate.hpp"
#include "layout.hpp"
#include "rdc/error.hpp"
#include "rdc/solver.hpp"

namespace rdc {
namespace {

constexpr double kMaxGridPoints = 1e8;

std::size_t grid_divisions(double step) {
  if (!(step > 0.0 && step <= 1.0))
    throw InputError("grid step must lie in (0, 1]");
  const double m = std::round(1.0 / step);
  if (std::abs(m * step - 1.0) > 1e-9)
    throw InputError("grid step must divide 1 evenly");
  return static_cast<std::size_t>(m);
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

// All ways to write `total` as an ordered sum of `parts` non-negative ints.
void compositions(std::size_t total, std::size_t parts,
                  std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> cur(parts, 0);
  auto rec = [&](auto& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == parts) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (parts > 0) rec(rec, 0, total);
}

double grid_size(const detail::Layout& layout, std::size_t m) {
  double total = 1.0;
  for (const auto& block : layout.blocks())
    total *= binomial(m + block.size() - 1, block.size() - 1);
  return total;
}

}  // namespace

double brute_force_grid_size(const Scenario& s, double step,
                             const SolveConfig& cfg) {
  const std::size_t m = grid_divisions(step);
  const CompiledScenario cs(s, cfg.resolved_u_card(s));
  const detail::Layout layout(cs, cfg.greedy, cfg.deterministic_action);
  return grid_size(layout, m);
}

SolveResult brute_force_solve(const Scenario& s, const Constraints& c,
                              double step, const SolveConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  detail::check_solve_inputs(s, c, cfg);
  const std::size_t m = grid_divisions(step);
  const CompiledScenario cs(s, cfg.resolved_u_card(s));
  const detail::Layout layout(cs, cfg.greedy, cfg.deterministic_action);
  const double points = grid_size(layout, m);
  if (points > kMaxGridPoints) {
    std::ostringstream os;
    os << "brute force grid has " << points << " points (limit "
       << kMaxGridPoints << "); use a coarser step or a smaller instance";
    throw InputError(os.str());
  }

  const auto& blocks = layout.blocks();
  std::vector<std::vector<std::vector<std::size_t>>> options(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    compositions(m, blocks[b].size(), options[b]);

  std::vector<std::size_t> odo(blocks.size(), 0);
  std::vector<double> params(layout.param_count(), 0.0);
  auto load_block = [&](std::size_t b) {
    const auto& comp = options[b][odo[b]];
    for (std::size_t k = 0; k < blocks[b].size(); ++k)
      params[blocks[b][k]] = double(comp[k]) / double(m);
  };
  for (std::size_t b = 0; b < blocks.size(); ++b) load_block(b);

  // Odometer over blocks, last block fastest.
  auto advance = [&] {
    for (std::size_t b = blocks.size(); b-- > 0;) {
      if (++odo[b] < options[b].size()) {
        load_block(b);
        return true;
      }
      odo[b] = 0;
      load_block(b);
    }
    return false;
  };

  std::vector<double> kernel;
  std::vector<double> best_params;
  double best_rate = std::numeric_limits<double>::infinity();
  double best_violation = std::numeric_limits<double>::infinity();
  double best_cost = 0.0, best_dist2 = 0.0;
  std::size_t visited = 0;
  const std::span<const std::size_t> fixed = cfg.fixed_decoder2;
  while (true) {
    layout.to_kernel(params, kernel);
    const Evaluation e = cs.evaluate(kernel, fixed);
    ++visited;
    const double v = max_violation(e, c);
    const double r = rate_of(e, cfg.mode);
    const bool feas = v <= cfg.constraint_slack;
    const bool best_feas = best_violation <= cfg.constraint_slack;
    bool take;
    if (feas != best_feas) {
      take = feas;
    } else if (!feas) {
      take = v < best_violation;
    } else if (std::abs(r - best_rate) > 1e-12) {
      take = r < best_rate;
    } else if (std::abs(e.cost - best_cost) > 1e-12) {
      take = e.cost < best_cost;
    } else {
      take = e.dist2 < best_dist2 - 1e-12;
    }
    if (take) {
      best_params = params;
      best_rate = r;
      best_violation = v;
      best_cost = e.cost;
      best_dist2 = e.dist2;
    }
    if (!advance()) break;
  }

  layout.to_kernel(best_params, kernel);
  SolveResult r =
      detail::to_result(detail::make_candidate(s, cs, kernel, cfg, c));
  r.diagnostics.restarts = 1;
  r.diagnostics.evaluations = visited;
  r.diagnostics.restart_rates = {r.feasible
                                     ? r.rate
                                     : std::numeric_limits<double>::infinity()};
  r.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return r;
}

}  // namespace rdc
