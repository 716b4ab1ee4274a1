#pragma once

// Strategies p(a,u,t1hat|x) + t2hat(u,z), the seven-variable joint they
// induce, and the rate / cost / distortion functionals evaluated on it.

#include <cstddef>
#include <span>
#include <vector>

#include "rdc/prob.hpp"
#include "rdc/scenario.hpp"

namespace rdc {

/// Axis names of the joint built by build_joint, in tensor order.
namespace axis {
inline constexpr const char* X = "X";
inline constexpr const char* Y = "Y";
inline constexpr const char* Z = "Z";
inline constexpr const char* U = "U";
inline constexpr const char* A = "A";
inline constexpr const char* T1hat = "T1hat";
inline constexpr const char* T2hat = "T2hat";
}  // namespace axis

/// |X|*|A| + 3: auxiliary alphabet size that loses no optimality.
std::size_t cardinality_bound(const Scenario& s);

struct Strategy {
  std::size_t u_card = 1;
  std::vector<double> kernel;          // [x][a][u][t1hat], slices over (a,u,t1hat)
  std::vector<std::size_t> decoder2;   // [u][z] -> t2hat

  double k(const Alphabets& n, std::size_t x, std::size_t a, std::size_t u,
           std::size_t t) const {
    return kernel[((x * n.a + a) * u_card + u) * n.t1hat + t];
  }
};

/// Throws InputError when the strategy does not fit the scenario, a kernel
/// slice is not a pmf, or u_card exceeds the cardinality bound (unless
/// `allow_large_u`).
void require_compatible(const Scenario& s, const Strategy& sigma,
                        bool allow_large_u = false);

struct Evaluation {
  double rate_noncausal = 0.0;
  double rate_causal = 0.0;
  double cost = 0.0;
  double dist1 = 0.0;
  double dist2 = 0.0;
};

/// p(x,y) p(z|x,y,a) p(a,u,t1hat|x) [t2hat = decoder2(u,z)] over axes
/// X, Y, Z, U, A, T1hat, T2hat. Serves both the non-causal and the causal
/// rate functionals.
JointDistribution build_joint(const Scenario& s, const Strategy& sigma);

/// I(X;A) + I(X;T1hat|A) + I(X;U|Z,A,T1hat).
double rate_noncausal(const JointDistribution& j);
/// I(X;A) + I(X;T1hat|A) + I(X;U|A,T1hat).
double rate_causal(const JointDistribution& j);

/// E[cost(A)].
double expected_cost(const JointDistribution& j, const Scenario& s);
/// E[d_k(f_k(X,Y,Z), T_k hat)] for decoder_index k in {1, 2}.
double expected_distortion(const JointDistribution& j, const Scenario& s,
                           int decoder_index);

/// Full evaluation through the joint tensor.
Evaluation evaluate(const Scenario& s, const Strategy& sigma);

/// Posterior-Bayes decoder: for every (u,z) the t2hat minimizing
/// E[d2(T2, t2hat) | U=u, Z=z]. Ties go to the smallest symbol; (u,z) pairs
/// of zero probability decode to 0. `kernel` is laid out as in Strategy.
std::vector<std::size_t> optimal_decoder2(const Scenario& s,
                                          std::span<const double> kernel,
                                          std::size_t u_card);

/// Scenario tables folded into the per-(x,a) quantities the functionals need.
/// Evaluates a kernel without building the seven-axis joint; this is the path
/// the solver runs in its inner loop.
class CompiledScenario {
 public:
  CompiledScenario(const Scenario& s, std::size_t u_card);

  const Alphabets& sizes() const { return n_; }
  std::size_t u_card() const { return u_; }
  std::size_t kernel_size() const { return n_.x * slice_size(); }
  std::size_t slice_size() const { return n_.a * u_ * n_.t1hat; }
  std::span<const double> p_x() const { return px_; }
  std::span<const double> cost() const { return cost_; }

  /// Kernel index of (x, a, u, t1hat).
  std::size_t index(std::size_t x, std::size_t a, std::size_t u,
                    std::size_t t) const {
    return ((x * n_.a + a) * u_ + u) * n_.t1hat + t;
  }

  std::vector<std::size_t> bayes_decoder(std::span<const double> kernel) const;

  /// Evaluates the kernel with the given decoder; when `decoder` is empty
  /// the Bayes decoder is used and written to `decoder_out` (if non-null).
  Evaluation evaluate(std::span<const double> kernel,
                      std::span<const std::size_t> decoder,
                      std::vector<std::size_t>* decoder_out = nullptr) const;

  struct Gradient {
    std::vector<double> rate;   // d rate / d kernel entry (mode-specific)
    std::vector<double> cost;
    std::vector<double> dist1;
    std::vector<double> dist2;  // at the supplied decoder
  };
  /// Partial derivatives with respect to each kernel entry. Entries whose
  /// derivative is unbounded are clamped to a large finite value.
  void gradient(std::span<const double> kernel,
                std::span<const std::size_t> decoder, bool causal,
                Gradient& out) const;

  /// E[d2 | A=a] under the best per-action decoder z -> t2hat, and the
  /// decoder itself ([z]).
  double best_action_dist2(std::size_t a,
                           std::vector<std::size_t>* decoder = nullptr) const;
  /// E[d1 | A=a] under the best constant t1hat, and that symbol.
  double best_action_dist1(std::size_t a, std::size_t* symbol = nullptr) const;

 private:
  Alphabets n_;
  std::size_t u_;
  std::vector<double> px_;     // [x]
  std::vector<double> q_;      // [x][a][z]   sum_y p(x,y) p(z|x,y,a)
  std::vector<double> c1_;     // [x][a][t1hat]
  std::vector<double> c2_;     // [x][a][z][t2hat]
  std::vector<double> cost_;   // [a]
};

}  // namespace rdc
