#include "rdc/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace rdc {
namespace {

void check_pmf_entries(std::span<const double> probs, const char* what) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      std::ostringstream os;
      os << what << ": entry " << i << " is " << probs[i];
      throw InvalidDistribution(os.str());
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": total mass " << total << " differs from 1";
    throw InvalidDistribution(os.str());
  }
}

std::size_t volume(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size;
  return n;
}

void check_axes(const std::vector<Axis>& axes) {
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (a.size == 0) throw InputError("axis '" + a.name + "' has size 0");
    if (!seen.insert(a.name).second)
      throw InputError("duplicate axis name '" + a.name + "'");
  }
}

void check_disjoint(std::initializer_list<const AxisSet*> groups) {
  std::set<std::string> seen;
  for (const AxisSet* g : groups) {
    for (const auto& name : *g) {
      if (!seen.insert(name).second)
        throw InputError("axis groups overlap on '" + name + "'");
    }
  }
}

AxisSet join(std::initializer_list<const AxisSet*> groups) {
  AxisSet out;
  for (const AxisSet* g : groups) out.insert(out.end(), g->begin(), g->end());
  return out;
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidDistribution("pmf: empty support");
  check_pmf_entries(probs_, "pmf");
}

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy(const Pmf& p) { return entropy_bits(p.probs()); }

JointDistribution::JointDistribution(std::vector<Axis> axes,
                                     std::vector<double> probs) {
  check_axes(axes);
  if (probs.size() != volume(axes)) {
    std::ostringstream os;
    os << "joint distribution: " << probs.size() << " entries for axes of volume "
       << volume(axes);
    throw InputError(os.str());
  }
  check_pmf_entries(probs, "joint distribution");
  axes_ = axes;
  probs_ = probs;
  root_axes_.resize(axes_.size());
  std::iota(root_axes_.begin(), root_axes_.end(), std::size_t{0});
  root_ = std::make_shared<const Root>(Root{std::move(axes), std::move(probs)});
}

JointDistribution::JointDistribution(std::shared_ptr<const Root> root,
                                     std::vector<std::size_t> root_axes)
    : root_(std::move(root)), root_axes_(std::move(root_axes)) {
  const auto& raxes = root_->axes;
  for (std::size_t r : root_axes_) axes_.push_back(raxes[r]);

  // Stride of each root axis inside the output tensor (0 when summed out).
  std::vector<std::size_t> out_stride(raxes.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = root_axes_.size(); k-- > 0;) {
    out_stride[root_axes_[k]] = stride;
    stride *= raxes[root_axes_[k]].size;
  }
  probs_.assign(stride, 0.0);

  std::vector<std::size_t> idx(raxes.size(), 0);
  std::size_t out = 0;
  const auto& p = root_->probs;
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    probs_[out] += p[flat];
    // Odometer increment over the root index, tracking the output offset.
    for (std::size_t d = raxes.size(); d-- > 0;) {
      ++idx[d];
      out += out_stride[d];
      if (idx[d] < raxes[d].size) break;
      out -= out_stride[d] * idx[d];
      idx[d] = 0;
    }
  }
}

bool JointDistribution::has_axis(std::string_view name) const {
  return std::any_of(axes_.begin(), axes_.end(),
                     [&](const Axis& a) { return a.name == name; });
}

std::size_t JointDistribution::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  throw UnknownAxis("unknown axis '" + std::string(name) + "'");
}

double JointDistribution::at(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size())
    throw InputError("joint index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (index[k] >= axes_[k].size) throw InputError("joint index out of range");
    flat = flat * axes_[k].size + index[k];
  }
  return probs_[flat];
}

JointDistribution marginalize(const JointDistribution& j,
                              const AxisSet& keep_axes) {
  std::vector<bool> keep(j.axes_.size(), false);
  for (const auto& name : keep_axes) keep[j.axis_index(name)] = true;
  std::vector<std::size_t> root_axes;
  for (std::size_t k = 0; k < j.axes_.size(); ++k)
    if (keep[k]) root_axes.push_back(j.root_axes_[k]);
  return JointDistribution(j.root_, std::move(root_axes));
}

double entropy(const JointDistribution& j) { return entropy_bits(j.probs()); }

double entropy(const JointDistribution& j, const AxisSet& axes) {
  if (axes.empty()) return 0.0;
  return entropy(marginalize(j, axes));
}

double clamp_information(double raw) {
  // Values below -kInfoClampTolerance are also clamped; the property suite
  // checks separately that they never occur.
  return raw < 0.0 ? 0.0 : raw;
}

double mutual_information(const JointDistribution& j, const AxisSet& group_a,
                          const AxisSet& group_b) {
  return conditional_mutual_information(j, group_a, group_b, {});
}

double raw_conditional_mutual_information(const JointDistribution& j,
                                          const AxisSet& group_a,
                                          const AxisSet& group_b,
                                          const AxisSet& group_c) {
  check_disjoint({&group_a, &group_b, &group_c});
  return entropy(j, join({&group_a, &group_c})) +
         entropy(j, join({&group_b, &group_c})) -
         entropy(j, join({&group_a, &group_b, &group_c})) -
         entropy(j, group_c);
}

double conditional_mutual_information(const JointDistribution& j,
                                      const AxisSet& group_a,
                                      const AxisSet& group_b,
                                      const AxisSet& group_c) {
  return clamp_information(
      raw_conditional_mutual_information(j, group_a, group_b, group_c));
}

std::size_t first_invalid_slice(std::span<const double> probs,
                                std::size_t width, double tolerance) {
  if (width == 0) return probs.empty() ? std::size_t(-1) : 0;
  for (std::size_t s = 0; s * width < probs.size(); ++s) {
    double total = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      double p = probs[s * width + i];
      if (!(p >= 0.0) || !std::isfinite(p)) return s;
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance) return s;
  }
  return std::size_t(-1);
}

ConditionalKernel::ConditionalKernel(std::vector<Axis> input_axes,
                                     std::vector<Axis> output_axes,
                                     std::vector<double> probs)
    : input_axes_(std::move(input_axes)),
      output_axes_(std::move(output_axes)),
      probs_(std::move(probs)) {
  check_axes(input_axes_);
  check_axes(output_axes_);
  input_count_ = volume(input_axes_);
  output_count_ = volume(output_axes_);
  if (probs_.size() != input_count_ * output_count_)
    throw InputError("conditional kernel: size does not match its axes");
  std::size_t bad = first_invalid_slice(probs_, output_count_, kMassTolerance);
  if (bad != std::size_t(-1)) {
    throw InvalidDistribution("conditional kernel: slice " +
                              std::to_string(bad) + " is not a pmf");
  }
}

std::span<const double> ConditionalKernel::slice(std::size_t input) const {
  if (input >= input_count_) throw InputError("kernel slice out of range");
  return std::span<const double>(probs_).subspan(input * output_count_,
                                                 output_count_);
}

}  // namespace rdc
