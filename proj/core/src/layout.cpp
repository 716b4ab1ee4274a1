#include "layout.hpp"

namespace rdc::detail {

Layout::Layout(const CompiledScenario& cs, bool greedy,
               bool deterministic_action)
    : cs_(&cs), greedy_(greedy), deterministic_(deterministic_action) {
  const auto& n = cs.sizes();
  const std::size_t U = cs.u_card();
  inner_ = U * n.t1hat;
  auto action_allowed = [&](std::size_t a, std::size_t u) {
    return !deterministic_ || a == u % n.a;
  };
  if (!greedy_) {
    param_count_ = cs.kernel_size();
    allowed_.assign(param_count_, false);
    for (std::size_t x = 0; x < n.x; ++x) {
      std::vector<std::size_t> block;
      for (std::size_t a = 0; a < n.a; ++a)
        for (std::size_t u = 0; u < U; ++u)
          for (std::size_t t = 0; t < n.t1hat; ++t) {
            if (!action_allowed(a, u)) continue;
            const std::size_t i = cs.index(x, a, u, t);
            allowed_[i] = true;
            block.push_back(i);
          }
      blocks_.push_back(std::move(block));
    }
    return;
  }
  // Greedy: [p(a)] followed by p(u,t1hat | x, a) for each (x, a).
  param_count_ = n.a + n.x * n.a * inner_;
  std::vector<std::size_t> pi(n.a);
  for (std::size_t a = 0; a < n.a; ++a) pi[a] = a;
  blocks_.push_back(std::move(pi));
  for (std::size_t x = 0; x < n.x; ++x)
    for (std::size_t a = 0; a < n.a; ++a) {
      std::vector<std::size_t> block;
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t t = 0; t < n.t1hat; ++t) {
          if (!action_allowed(a, u)) continue;
          block.push_back(n.a + (x * n.a + a) * inner_ + u * n.t1hat + t);
        }
      blocks_.push_back(std::move(block));
    }
}

void Layout::to_kernel(std::span<const double> params,
                       std::vector<double>& kernel) const {
  if (!greedy_) {
    kernel.assign(params.begin(), params.end());
    return;
  }
  const auto& n = cs_->sizes();
  kernel.resize(cs_->kernel_size());
  for (std::size_t x = 0; x < n.x; ++x)
    for (std::size_t a = 0; a < n.a; ++a) {
      const double pa = params[a];
      const double* w = &params[n.a + (x * n.a + a) * inner_];
      double* k = &kernel[(x * n.a + a) * inner_];
      for (std::size_t i = 0; i < inner_; ++i) k[i] = pa * w[i];
    }
}

void Layout::param_gradient(std::span<const double> params,
                            std::span<const double> kernel_grad,
                            std::vector<double>& out) const {
  if (!greedy_) {
    out.assign(kernel_grad.begin(), kernel_grad.end());
    return;
  }
  const auto& n = cs_->sizes();
  out.assign(param_count_, 0.0);
  for (std::size_t x = 0; x < n.x; ++x)
    for (std::size_t a = 0; a < n.a; ++a) {
      const double pa = params[a];
      const std::size_t off = n.a + (x * n.a + a) * inner_;
      const double* g = &kernel_grad[(x * n.a + a) * inner_];
      for (std::size_t i = 0; i < inner_; ++i) {
        out[a] += g[i] * params[off + i];
        out[off + i] = pa * g[i];
      }
    }
}

std::vector<double> Layout::from_kernel(std::span<const double> kernel) const {
  std::vector<double> params(param_count_, 0.0);
  auto normalize_block = [&](const std::vector<std::size_t>& block) {
    double total = 0.0;
    for (std::size_t i : block) total += params[i];
    if (total > 0.0) {
      for (std::size_t i : block) params[i] /= total;
    } else {
      for (std::size_t i : block) params[i] = 1.0 / double(block.size());
    }
  };
  if (!greedy_) {
    for (std::size_t i = 0; i < param_count_; ++i)
      params[i] = allowed_[i] ? kernel[i] : 0.0;
    for (const auto& block : blocks_) normalize_block(block);
    return params;
  }
  const auto& n = cs_->sizes();
  auto px = cs_->p_x();
  for (std::size_t x = 0; x < n.x; ++x)
    for (std::size_t a = 0; a < n.a; ++a) {
      const double* k = &kernel[(x * n.a + a) * inner_];
      for (std::size_t i = 0; i < inner_; ++i) {
        params[a] += px[x] * k[i];
        params[n.a + (x * n.a + a) * inner_ + i] = k[i];
      }
    }
  if (deterministic_) {
    // Masked entries are dropped before normalizing.
    std::vector<bool> in_block(param_count_, false);
    for (const auto& block : blocks_)
      for (std::size_t i : block) in_block[i] = true;
    for (std::size_t i = 0; i < param_count_; ++i)
      if (!in_block[i]) params[i] = 0.0;
  }
  for (const auto& block : blocks_) normalize_block(block);
  return params;
}

void Layout::revive_unused_actions(std::vector<double>& params) const {
  if (!greedy_) return;
  const auto& n = cs_->sizes();
  std::size_t top = 0;
  for (std::size_t a = 1; a < n.a; ++a)
    if (params[a] > params[top]) top = a;
  for (std::size_t a = 0; a < n.a; ++a) {
    if (params[a] > 0.0) continue;
    for (std::size_t x = 0; x < n.x; ++x) {
      const auto& dst = blocks_[1 + x * n.a + a];
      const auto& src = blocks_[1 + x * n.a + top];
      // Under the deterministic-action mask the supports differ; fall back
      // to uniform there.
      if (dst.size() != src.size() || deterministic_) {
        for (std::size_t i : dst) params[i] = 1.0 / double(dst.size());
        continue;
      }
      for (std::size_t k = 0; k < dst.size(); ++k) params[dst[k]] = params[src[k]];
    }
  }
}

}  // namespace rdc::detail
