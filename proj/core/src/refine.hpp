#pragma once

// Penalized coordinate refinement over the simplex blocks of a Layout.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "layout.hpp"
#include "rdc/solver.hpp"

namespace rdc::detail {

struct RefineOptions {
  RateMode mode = RateMode::noncausal;
  Constraints budget;
  double slack = 1e-9;
  std::size_t local_iters = 200;
  std::span<const std::size_t> fixed_decoder;
};

/// Augmented-Lagrangian stages (penalty weight escalated x10 up to 1e6) with
/// an exact-penalty restoration pass at the end. Each stage cycles over the
/// blocks, moving mass between the pair of entries with the largest gradient
/// gap and line-searching the step on the true objective. When a cycle
/// stalls, whole-mass transfers are tried before giving up.
class Refiner {
 public:
  Refiner(const CompiledScenario& cs, const Layout& layout,
          RefineOptions options);

  void run(std::vector<double>& params);

  std::size_t evaluations() const { return evaluations_; }

 private:
  struct Penalty {
    bool exact = false;
    double rho = 10.0;
    double mu = 0.0;
    std::array<double, 3> lambda{};
  };

  std::array<double, 3> violations(const Evaluation& e) const;
  double penalty_value(const Evaluation& e) const;
  std::array<double, 3> penalty_weights(const Evaluation& e) const;
  double objective(std::span<const double> params);
  void inner(std::vector<double>& params);
  bool escape(std::vector<double>& params, double& value);
  bool improve_block(std::vector<double>& params, std::size_t block,
                     double& value);
  bool line_search(std::vector<double>& params, std::size_t block,
                   std::size_t donor, std::size_t receiver, double& value);

  const CompiledScenario& cs_;
  const Layout& layout_;
  RefineOptions opt_;
  Penalty pen_;
  std::size_t evaluations_ = 0;

  std::vector<double> kernel_;
  std::vector<std::size_t> decoder_;
  Evaluation last_;
  std::vector<double> step_hint_;
  std::vector<double> trial_;
  CompiledScenario::Gradient grad_;
  std::vector<double> kernel_grad_;
  std::vector<double> param_grad_;
};

}  // namespace rdc::detail
