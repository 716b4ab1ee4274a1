#pragma once

// Finite-alphabet probability arithmetic and information measures (bits).

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdc/error.hpp"

namespace rdc {

/// Tolerance on total probability mass.
inline constexpr double kMassTolerance = 1e-12;
/// Information quantities in [-kInfoClampTolerance, 0) are reported as 0.
inline constexpr double kInfoClampTolerance = 1e-10;

/// Probability vector over a finite alphabet.
class Pmf {
 public:
  /// Throws InvalidDistribution on negative entries or mass off by more than
  /// kMassTolerance.
  explicit Pmf(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Shannon entropy in bits, 0 log 0 = 0.
double entropy(const Pmf& p);

/// Unchecked entropy of a non-negative vector; zero entries are skipped.
double entropy_bits(std::span<const double> probs);

struct Axis {
  std::string name;
  std::size_t size = 0;

  friend bool operator==(const Axis&, const Axis&) = default;
};

using AxisSet = std::vector<std::string>;

/// Joint pmf over named finite axes, stored row-major.
///
/// Every marginal keeps a handle to the tensor it was first built from and is
/// always summed from that tensor in its row-major order, so marginalizing in
/// several steps gives bit-identical results to a single step.
class JointDistribution {
 public:
  JointDistribution(std::vector<Axis> axes, std::vector<double> probs);

  const std::vector<Axis>& axes() const { return axes_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t rank() const { return axes_.size(); }

  bool has_axis(std::string_view name) const;
  /// Position of `name` in axes(); throws UnknownAxis.
  std::size_t axis_index(std::string_view name) const;
  double at(std::span<const std::size_t> index) const;

  friend JointDistribution marginalize(const JointDistribution& j,
                                       const AxisSet& keep_axes);

 private:
  struct Root {
    std::vector<Axis> axes;
    std::vector<double> probs;
  };

  JointDistribution(std::shared_ptr<const Root> root,
                    std::vector<std::size_t> root_axes);

  std::shared_ptr<const Root> root_;
  std::vector<std::size_t> root_axes_;  // positions of axes_ within root_->axes
  std::vector<Axis> axes_;
  std::vector<double> probs_;
};

/// Sums out every axis not in `keep_axes`. Axis order follows `j`.
JointDistribution marginalize(const JointDistribution& j,
                              const AxisSet& keep_axes);

double entropy(const JointDistribution& j);
/// Entropy of the marginal on `axes` (empty set gives 0).
double entropy(const JointDistribution& j, const AxisSet& axes);

/// I(A;B) = H(A) + H(B) - H(A,B), clamped at 0.
double mutual_information(const JointDistribution& j, const AxisSet& group_a,
                          const AxisSet& group_b);

/// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), clamped at 0.
double conditional_mutual_information(const JointDistribution& j,
                                      const AxisSet& group_a,
                                      const AxisSet& group_b,
                                      const AxisSet& group_c);

/// Same as conditional_mutual_information without the clamp; used by the
/// property suite to check that round-off never drives values below -1e-9.
double raw_conditional_mutual_information(const JointDistribution& j,
                                          const AxisSet& group_a,
                                          const AxisSet& group_b,
                                          const AxisSet& group_c);

/// Clamp rule shared by every information measure.
double clamp_information(double raw);

/// Stochastic tensor p(out | in) with row-major input and output indices.
class ConditionalKernel {
 public:
  ConditionalKernel(std::vector<Axis> input_axes, std::vector<Axis> output_axes,
                    std::vector<double> probs);

  const std::vector<Axis>& input_axes() const { return input_axes_; }
  const std::vector<Axis>& output_axes() const { return output_axes_; }
  std::size_t input_count() const { return input_count_; }
  std::size_t output_count() const { return output_count_; }
  std::span<const double> probs() const { return probs_; }
  /// Conditional pmf for the flat input index.
  std::span<const double> slice(std::size_t input) const;

 private:
  std::vector<Axis> input_axes_;
  std::vector<Axis> output_axes_;
  std::size_t input_count_ = 1;
  std::size_t output_count_ = 1;
  std::vector<double> probs_;
};

/// Index of the first slice of `probs` (length count*width) whose entries are
/// negative or do not sum to 1 within `tolerance`; npos when all are valid.
std::size_t first_invalid_slice(std::span<const double> probs,
                                std::size_t width, double tolerance);

}  // namespace rdc
