#pragma once

// Parameterizations of the kernel p(a,u,t1hat|x) as a product of simplices.
// Internal to the solver and the brute-force oracle.

#include <cstddef>
#include <span>
#include <vector>

#include "rdc/evaluator.hpp"

namespace rdc::detail {

class Layout {
 public:
  /// adaptive: one simplex per x over (a,u,t1hat).
  /// greedy:   one simplex over a, then one per (x,a) over (u,t1hat).
  /// deterministic_action masks every entry with a != u mod |A|.
  Layout(const CompiledScenario& cs, bool greedy, bool deterministic_action);

  bool greedy() const { return greedy_; }
  std::size_t param_count() const { return param_count_; }
  /// Parameter indices of each simplex block.
  const std::vector<std::vector<std::size_t>>& blocks() const {
    return blocks_;
  }

  void to_kernel(std::span<const double> params,
                 std::vector<double>& kernel) const;
  /// Chain rule from d/d kernel to d/d params.
  void param_gradient(std::span<const double> params,
                      std::span<const double> kernel_grad,
                      std::vector<double>& out) const;
  /// Closest parameters for an arbitrary kernel (exact when the kernel lies
  /// in this layout's family).
  std::vector<double> from_kernel(std::span<const double> kernel) const;

  /// Greedy only: actions with zero probability get the sub-kernel of the
  /// most likely action. The kernel is unchanged, but a later move onto such
  /// an action starts from a useful encoder instead of a stale one.
  void revive_unused_actions(std::vector<double>& params) const;

 private:
  const CompiledScenario* cs_;
  bool greedy_;
  bool deterministic_;
  std::size_t param_count_ = 0;
  std::size_t inner_ = 0;  // |U| * |T1hat|
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<bool> allowed_;  // adaptive: kernel-sized mask
};

}  // namespace rdc::detail
