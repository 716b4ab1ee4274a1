#include "rdc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdc/error.hpp"

namespace rdc {
namespace {

// Relative margin under which two posterior expected distortions are a tie.
constexpr double kTieMargin = 1e-14;

// log2 of ratios that may be 0 (one-sided derivatives of -p log p blow up).
constexpr double kRatioFloor = 1e-30;

bool strictly_better(double candidate, double incumbent) {
  return candidate < incumbent - kTieMargin * (1.0 + std::abs(incumbent));
}

double safe_log2_ratio(double num, double den) {
  if (den <= 0.0) return 0.0;  // limit of a fresh cell: ratio 1
  return std::log2(std::max(num / den, kRatioFloor));
}

}  // namespace

std::size_t cardinality_bound(const Scenario& s) {
  return s.sizes.x * s.sizes.a + 3;
}

void require_compatible(const Scenario& s, const Strategy& sigma,
                        bool allow_large_u) {
  const auto& n = s.sizes;
  if (sigma.u_card == 0) throw InputError("strategy: u_card must be positive");
  if (!allow_large_u && sigma.u_card > cardinality_bound(s)) {
    std::ostringstream os;
    os << "strategy: u_card " << sigma.u_card << " exceeds the bound |X||A|+3 = "
       << cardinality_bound(s);
    throw InputError(os.str());
  }
  const std::size_t width = n.a * sigma.u_card * n.t1hat;
  if (sigma.kernel.size() != n.x * width) {
    std::ostringstream os;
    os << "strategy: kernel has " << sigma.kernel.size()
       << " entries, scenario needs " << n.x * width;
    throw InputError(os.str());
  }
  if (sigma.decoder2.size() != sigma.u_card * n.z) {
    std::ostringstream os;
    os << "strategy: decoder2 has " << sigma.decoder2.size()
       << " entries, scenario needs " << sigma.u_card * n.z;
    throw InputError(os.str());
  }
  for (std::size_t i = 0; i < sigma.decoder2.size(); ++i) {
    if (sigma.decoder2[i] >= n.t2hat)
      throw InputError("strategy: decoder2 entry " + std::to_string(i) +
                       " outside the T2hat alphabet");
  }
  std::size_t bad = first_invalid_slice(sigma.kernel, width, kMassTolerance);
  if (bad != std::size_t(-1))
    throw InvalidDistribution("strategy: kernel slice for x=" +
                              std::to_string(bad) + " is not a pmf");
}

JointDistribution build_joint(const Scenario& s, const Strategy& sigma) {
  require_compatible(s, sigma, /*allow_large_u=*/true);
  const auto& n = s.sizes;
  const std::size_t U = sigma.u_card;
  std::vector<Axis> axes = {{axis::X, n.x},         {axis::Y, n.y},
                            {axis::Z, n.z},         {axis::U, U},
                            {axis::A, n.a},         {axis::T1hat, n.t1hat},
                            {axis::T2hat, n.t2hat}};
  std::vector<double> p(n.x * n.y * n.z * U * n.a * n.t1hat * n.t2hat, 0.0);
  for (std::size_t x = 0; x < n.x; ++x) {
    for (std::size_t y = 0; y < n.y; ++y) {
      const double pxy = s.p_xy(x, y);
      for (std::size_t z = 0; z < n.z; ++z) {
        for (std::size_t u = 0; u < U; ++u) {
          const std::size_t h2 = sigma.decoder2[u * n.z + z];
          for (std::size_t a = 0; a < n.a; ++a) {
            const double pz = s.p_z(x, y, a, z);
            for (std::size_t t = 0; t < n.t1hat; ++t) {
              std::size_t flat =
                  (((((x * n.y + y) * n.z + z) * U + u) * n.a + a) * n.t1hat +
                   t) *
                      n.t2hat +
                  h2;
              p[flat] = pxy * pz * sigma.k(n, x, a, u, t);
            }
          }
        }
      }
    }
  }
  return JointDistribution(std::move(axes), std::move(p));
}

double rate_noncausal(const JointDistribution& j) {
  using namespace axis;
  return mutual_information(j, {X}, {A}) +
         conditional_mutual_information(j, {X}, {T1hat}, {A}) +
         conditional_mutual_information(j, {X}, {U}, {Z, A, T1hat});
}

double rate_causal(const JointDistribution& j) {
  using namespace axis;
  return mutual_information(j, {X}, {A}) +
         conditional_mutual_information(j, {X}, {T1hat}, {A}) +
         conditional_mutual_information(j, {X}, {U}, {A, T1hat});
}

double expected_cost(const JointDistribution& j, const Scenario& s) {
  JointDistribution pa = marginalize(j, {axis::A});
  if (pa.axes()[0].size != s.cost.size())
    throw InputError("expected_cost: action alphabet mismatch");
  double c = 0.0;
  for (std::size_t a = 0; a < s.cost.size(); ++a) c += pa.probs()[a] * s.cost[a];
  return c;
}

double expected_distortion(const JointDistribution& j, const Scenario& s,
                           int decoder_index) {
  if (decoder_index != 1 && decoder_index != 2)
    throw InputError("expected_distortion: decoder index must be 1 or 2");
  const bool first = decoder_index == 1;
  const char* hat = first ? axis::T1hat : axis::T2hat;
  JointDistribution m = marginalize(j, {axis::X, axis::Y, axis::Z, hat});
  const auto& n = s.sizes;
  const std::size_t nh = m.axes()[3].size;
  if (m.axes()[0].size != n.x || m.axes()[1].size != n.y ||
      m.axes()[2].size != n.z || nh != (first ? n.t1hat : n.t2hat))
    throw InputError("expected_distortion: alphabet mismatch");
  double d = 0.0;
  auto probs = m.probs();
  for (std::size_t x = 0; x < n.x; ++x) {
    for (std::size_t y = 0; y < n.y; ++y) {
      for (std::size_t z = 0; z < n.z; ++z) {
        for (std::size_t h = 0; h < nh; ++h) {
          double p = probs[((x * n.y + y) * n.z + z) * nh + h];
          if (p == 0.0) continue;
          d += p * (first ? s.dist1(s.target1(x, y, z), h)
                          : s.dist2(s.target2(x, y, z), h));
        }
      }
    }
  }
  return d;
}

Evaluation evaluate(const Scenario& s, const Strategy& sigma) {
  JointDistribution j = build_joint(s, sigma);
  Evaluation e;
  e.rate_noncausal = rate_noncausal(j);
  e.rate_causal = rate_causal(j);
  e.cost = expected_cost(j, s);
  e.dist1 = expected_distortion(j, s, 1);
  e.dist2 = expected_distortion(j, s, 2);
  return e;
}

std::vector<std::size_t> optimal_decoder2(const Scenario& s,
                                          std::span<const double> kernel,
                                          std::size_t u_card) {
  const auto& n = s.sizes;
  if (kernel.size() != n.x * n.a * u_card * n.t1hat)
    throw InputError("optimal_decoder2: kernel size mismatch");
  std::vector<std::size_t> decoder(u_card * n.z, 0);
  std::vector<double> risk(n.t2hat);
  for (std::size_t u = 0; u < u_card; ++u) {
    for (std::size_t z = 0; z < n.z; ++z) {
      std::fill(risk.begin(), risk.end(), 0.0);
      double mass = 0.0;
      for (std::size_t x = 0; x < n.x; ++x) {
        for (std::size_t y = 0; y < n.y; ++y) {
          for (std::size_t a = 0; a < n.a; ++a) {
            double ku = 0.0;
            for (std::size_t t = 0; t < n.t1hat; ++t)
              ku += kernel[((x * n.a + a) * u_card + u) * n.t1hat + t];
            const double w = s.p_xy(x, y) * s.p_z(x, y, a, z) * ku;
            if (w == 0.0) continue;
            mass += w;
            const std::size_t t2 = s.target2(x, y, z);
            for (std::size_t h = 0; h < n.t2hat; ++h)
              risk[h] += w * s.dist2(t2, h);
          }
        }
      }
      if (mass == 0.0) continue;
      std::size_t best = 0;
      for (std::size_t h = 1; h < n.t2hat; ++h)
        if (strictly_better(risk[h], risk[best])) best = h;
      decoder[u * n.z + z] = best;
    }
  }
  return decoder;
}

// ---------------------------------------------------------------------------

CompiledScenario::CompiledScenario(const Scenario& s, std::size_t u_card)
    : n_(s.sizes), u_(u_card) {
  require_valid(s);
  if (u_ == 0) throw InputError("u_card must be positive");
  px_ = s.p_x();
  q_.assign(n_.x * n_.a * n_.z, 0.0);
  c1_.assign(n_.x * n_.a * n_.t1hat, 0.0);
  c2_.assign(n_.x * n_.a * n_.z * n_.t2hat, 0.0);
  cost_ = s.cost;
  for (std::size_t x = 0; x < n_.x; ++x) {
    for (std::size_t a = 0; a < n_.a; ++a) {
      for (std::size_t y = 0; y < n_.y; ++y) {
        for (std::size_t z = 0; z < n_.z; ++z) {
          const double w = s.p_xy(x, y) * s.p_z(x, y, a, z);
          if (w == 0.0) continue;
          q_[(x * n_.a + a) * n_.z + z] += w;
          const std::size_t t1 = s.target1(x, y, z);
          for (std::size_t h = 0; h < n_.t1hat; ++h)
            c1_[(x * n_.a + a) * n_.t1hat + h] += w * s.dist1(t1, h);
          const std::size_t t2 = s.target2(x, y, z);
          for (std::size_t h = 0; h < n_.t2hat; ++h)
            c2_[((x * n_.a + a) * n_.z + z) * n_.t2hat + h] +=
                w * s.dist2(t2, h);
        }
      }
    }
  }
}

std::vector<std::size_t> CompiledScenario::bayes_decoder(
    std::span<const double> kernel) const {
  std::vector<std::size_t> dec;
  evaluate(kernel, {}, &dec);
  return dec;
}

Evaluation CompiledScenario::evaluate(
    std::span<const double> kernel, std::span<const std::size_t> decoder,
    std::vector<std::size_t>* decoder_out) const {
  const std::size_t X = n_.x, A = n_.a, Z = n_.z, T = n_.t1hat, H = n_.t2hat;
  const std::size_t U = u_;
  Evaluation e;

  // Small fixed-size scratch; thread_local keeps evaluate() re-entrant.
  thread_local std::vector<double> kbar, ku, p_xa, p_a, p_xat, p_at, p_zat,
      p_xzat, p_uzat, p_xuzat, p_uat, p_xuat, risk;
  kbar.assign(X * A * T, 0.0);
  ku.assign(X * A * U, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t t = 0; t < T; ++t) {
          const double k = kernel[index(x, a, u, t)];
          kbar[(x * A + a) * T + t] += k;
          ku[(x * A + a) * U + u] += k;
        }

  p_xa.assign(X * A, 0.0);
  p_a.assign(A, 0.0);
  p_xat.assign(X * A * T, 0.0);
  p_at.assign(A * T, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t t = 0; t < T; ++t) {
        const double p = px_[x] * kbar[(x * A + a) * T + t];
        p_xat[(x * A + a) * T + t] = p;
        p_xa[x * A + a] += p;
        p_at[a * T + t] += p;
        p_a[a] += p;
      }
  const double h_x = entropy_bits(px_);
  const double h_a = entropy_bits(p_a);
  const double h_xa = entropy_bits(p_xa);
  const double h_at = entropy_bits(p_at);
  const double h_xat = entropy_bits(p_xat);
  const double i_xa = clamp_information(h_x + h_a - h_xa);
  const double i_xt_a = clamp_information(h_xa + h_at - h_xat - h_a);

  // Non-causal third term: I(X;U|Z,A,T1hat).
  p_xzat.assign(X * Z * A * T, 0.0);
  p_zat.assign(Z * A * T, 0.0);
  p_uzat.assign(U * Z * A * T, 0.0);
  p_xuzat.assign(X * U * Z * A * T, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t z = 0; z < Z; ++z) {
        const double q = q_[(x * A + a) * Z + z];
        if (q == 0.0) continue;
        for (std::size_t t = 0; t < T; ++t) {
          const double p = q * kbar[(x * A + a) * T + t];
          p_xzat[((x * Z + z) * A + a) * T + t] = p;
          p_zat[(z * A + a) * T + t] += p;
          for (std::size_t u = 0; u < U; ++u) {
            const double pu = q * kernel[index(x, a, u, t)];
            p_xuzat[(((x * U + u) * Z + z) * A + a) * T + t] = pu;
            p_uzat[((u * Z + z) * A + a) * T + t] += pu;
          }
        }
      }
  e.rate_noncausal =
      i_xa + i_xt_a +
      clamp_information(entropy_bits(p_xzat) + entropy_bits(p_uzat) -
                        entropy_bits(p_xuzat) - entropy_bits(p_zat));

  // Causal third term: I(X;U|A,T1hat).
  p_uat.assign(U * A * T, 0.0);
  p_xuat.assign(X * U * A * T, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t t = 0; t < T; ++t) {
          const double p = px_[x] * kernel[index(x, a, u, t)];
          p_xuat[((x * U + u) * A + a) * T + t] = p;
          p_uat[(u * A + a) * T + t] += p;
        }
  e.rate_causal = i_xa + i_xt_a +
                  clamp_information(h_xat + entropy_bits(p_uat) -
                                    entropy_bits(p_xuat) - h_at);

  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a) {
      double m = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        m += kbar[(x * A + a) * T + t];
        e.dist1 += kbar[(x * A + a) * T + t] * c1_[(x * A + a) * T + t];
      }
      e.cost += px_[x] * m * cost_[a];
    }

  // Decoder 2: supplied table or posterior-Bayes choice per (u,z).
  if (decoder_out) decoder_out->assign(U * Z, 0);
  risk.assign(H, 0.0);
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t z = 0; z < Z; ++z) {
      std::fill(risk.begin(), risk.end(), 0.0);
      double mass = 0.0;
      for (std::size_t x = 0; x < X; ++x)
        for (std::size_t a = 0; a < A; ++a) {
          const double w = ku[(x * A + a) * U + u];
          if (w == 0.0) continue;
          mass += w * q_[(x * A + a) * Z + z];
          const double* c = &c2_[((x * A + a) * Z + z) * H];
          for (std::size_t h = 0; h < H; ++h) risk[h] += w * c[h];
        }
      std::size_t choice = 0;
      if (!decoder.empty()) {
        choice = decoder[u * Z + z];
      } else if (mass > 0.0) {
        for (std::size_t h = 1; h < H; ++h)
          if (strictly_better(risk[h], risk[choice])) choice = h;
      }
      if (decoder_out) (*decoder_out)[u * Z + z] = choice;
      e.dist2 += risk[choice];
    }
  }
  return e;
}

void CompiledScenario::gradient(std::span<const double> kernel,
                                std::span<const std::size_t> decoder,
                                bool causal, Gradient& out) const {
  const std::size_t X = n_.x, A = n_.a, Z = n_.z, T = n_.t1hat, H = n_.t2hat;
  const std::size_t U = u_;
  const std::size_t N = kernel_size();
  out.rate.assign(N, 0.0);
  out.cost.assign(N, 0.0);
  out.dist1.assign(N, 0.0);
  out.dist2.assign(N, 0.0);

  thread_local std::vector<double> kbar, p_at, p_zat, p_uzat, p_uat;
  kbar.assign(X * A * T, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t t = 0; t < T; ++t)
          kbar[(x * A + a) * T + t] += kernel[index(x, a, u, t)];
  p_at.assign(A * T, 0.0);
  for (std::size_t x = 0; x < X; ++x)
    for (std::size_t i = 0; i < A * T; ++i)
      p_at[i] += px_[x] * kbar[x * A * T + i];

  if (causal) {
    p_uat.assign(U * A * T, 0.0);
    for (std::size_t x = 0; x < X; ++x)
      for (std::size_t a = 0; a < A; ++a)
        for (std::size_t u = 0; u < U; ++u)
          for (std::size_t t = 0; t < T; ++t)
            p_uat[(u * A + a) * T + t] += px_[x] * kernel[index(x, a, u, t)];
  } else {
    p_zat.assign(Z * A * T, 0.0);
    p_uzat.assign(U * Z * A * T, 0.0);
    for (std::size_t x = 0; x < X; ++x)
      for (std::size_t a = 0; a < A; ++a)
        for (std::size_t z = 0; z < Z; ++z) {
          const double q = q_[(x * A + a) * Z + z];
          if (q == 0.0) continue;
          for (std::size_t t = 0; t < T; ++t) {
            p_zat[(z * A + a) * T + t] += q * kbar[(x * A + a) * T + t];
            for (std::size_t u = 0; u < U; ++u)
              p_uzat[((u * Z + z) * A + a) * T + t] +=
                  q * kernel[index(x, a, u, t)];
          }
        }
  }

  for (std::size_t x = 0; x < X; ++x) {
    const double px = px_[x];
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < T; ++t) {
        const double kb = kbar[(x * A + a) * T + t];
        const double pat = p_at[a * T + t];
        // d I(X; A,T1hat) = px log(kbar / P(a,t)) = px log(P(x|a,t) / px).
        const double g_at =
            px > 0.0 ? px * (safe_log2_ratio(px * kb, pat) - std::log2(px))
                     : 0.0;
        for (std::size_t u = 0; u < U; ++u) {
          const std::size_t i = index(x, a, u, t);
          const double k = kernel[i];
          double g = g_at;
          if (causal) {
            if (px > 0.0) {
              // log P(x|u,a,t) - log P(x|a,t)
              g += px * (safe_log2_ratio(px * k, p_uat[(u * A + a) * T + t]) -
                         safe_log2_ratio(px * kb, pat));
            }
          } else {
            for (std::size_t z = 0; z < Z; ++z) {
              const double q = q_[(x * A + a) * Z + z];
              if (q == 0.0) continue;
              g += q * (safe_log2_ratio(q * k, p_uzat[((u * Z + z) * A + a) * T + t]) -
                        safe_log2_ratio(q * kb, p_zat[(z * A + a) * T + t]));
            }
          }
          out.rate[i] = g;
          out.cost[i] = px * cost_[a];
          out.dist1[i] = c1_[(x * A + a) * T + t];
          double d2 = 0.0;
          if (!decoder.empty()) {
            for (std::size_t z = 0; z < Z; ++z)
              d2 += c2_[((x * A + a) * Z + z) * H + decoder[u * Z + z]];
          }
          out.dist2[i] = d2;
        }
      }
    }
  }
}

double CompiledScenario::best_action_dist2(
    std::size_t a, std::vector<std::size_t>* decoder) const {
  const std::size_t X = n_.x, A = n_.a, Z = n_.z, H = n_.t2hat;
  if (decoder) decoder->assign(Z, 0);
  double total = 0.0;
  std::vector<double> risk(H);
  for (std::size_t z = 0; z < Z; ++z) {
    std::fill(risk.begin(), risk.end(), 0.0);
    for (std::size_t x = 0; x < X; ++x)
      for (std::size_t h = 0; h < H; ++h)
        risk[h] += c2_[((x * A + a) * Z + z) * H + h];
    std::size_t best = 0;
    for (std::size_t h = 1; h < H; ++h)
      if (strictly_better(risk[h], risk[best])) best = h;
    if (decoder) (*decoder)[z] = best;
    total += risk[best];
  }
  return total;
}

double CompiledScenario::best_action_dist1(std::size_t a,
                                           std::size_t* symbol) const {
  const std::size_t X = n_.x, A = n_.a, T = n_.t1hat;
  auto risk = [&](std::size_t h) {
    double e = 0.0;
    for (std::size_t x = 0; x < X; ++x) e += c1_[(x * A + a) * T + h];
    return e;
  };
  double best = risk(0);
  std::size_t arg = 0;
  for (std::size_t h = 1; h < T; ++h) {
    const double e = risk(h);
    if (strictly_better(e, best)) {
      best = e;
      arg = h;
    }
  }
  if (symbol) *symbol = arg;
  return best;
}

}  // namespace rdc
