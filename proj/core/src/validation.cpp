#include "rdc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "candidate.hpp"
#include "rdc/error.hpp"
#include "rdc/evaluator.hpp"
#include "rdc/parallel.hpp"

namespace rdc {
namespace {

constexpr double kInfoTol = 1e-10;
constexpr double kRawFloor = -1e-9;
constexpr double kMassTol = 1e-12;
constexpr double kFastPathTol = 1e-10;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---- random instances -----------------------------------------------------

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t n,
                               double zero_prob) {
  std::gamma_distribution<double> gamma(0.7, 1.0);
  std::bernoulli_distribution zero(zero_prob);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = zero(rng) ? 0.0 : gamma(rng);
    total += v;
  }
  if (!(total > 0.0)) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    p.assign(n, 0.0);
    p[pick(rng)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// ---- individual invariants -----------------------------------------------

struct Checker {
  const PropertyHooks& hooks;
  std::size_t trial;
  std::uint64_t trial_seed;
  PropertyReport& report;

  void expect(bool ok, const char* name, const std::string& detail) {
    ++report.checks;
    if (!ok) report.failures.push_back({name, trial, trial_seed, detail});
  }
};

void check_trial(const PropertyTrial& t, Checker& ck) {
  const Scenario& s = t.scenario;
  const Strategy& sigma = t.strategy;
  const auto& n = s.sizes;
  const JointDistribution j = build_joint(s, sigma);
  const auto& cmi = ck.hooks.cmi;
  using namespace axis;
  const AxisSet none;

  // I(X;A) + I(X;T1hat|A) = I(X;A,T1hat).
  {
    const double lhs = cmi(j, {X}, {A}, none) + cmi(j, {X}, {T1hat}, {A});
    const double rhs = cmi(j, {X}, {A, T1hat}, none);
    ck.expect(std::abs(lhs - rhs) <= kInfoTol, "chain_rule",
              "I(X;A)+I(X;T1hat|A)=" + fmt_e(lhs) + " vs I(X;A,T1hat)=" +
                  fmt_e(rhs));
  }

  // Every entropy and raw information term stays above the float floor.
  {
    const double terms[] = {
        entropy(j),
        entropy(j, {X, Y}),
        cmi(j, {X}, {A}, none),
        cmi(j, {X}, {T1hat}, {A}),
        cmi(j, {X}, {U}, {Z, A, T1hat}),
        cmi(j, {X}, {U}, {A, T1hat}),
        cmi(j, {U}, {Z}, {A, T1hat}),
    };
    double worst = 0.0;
    for (double v : terms) worst = std::min(worst, v);
    ck.expect(worst >= kRawFloor, "non_negativity",
              "smallest raw term " + fmt_e(worst));
  }

  {
    const double v = cmi(j, {U}, {Y}, {X});
    ck.expect(std::abs(v) <= kInfoTol, "markov_u_y_given_x",
              "I(U;Y|X)=" + fmt_e(v));
  }
  {
    const double v = cmi(j, {Z}, {U}, {X, A, T1hat});
    ck.expect(std::abs(v) <= kInfoTol, "markov_z_u_given_x_a_t1hat",
              "I(Z;U|X,A,T1hat)=" + fmt_e(v));
  }

  // rate_causal - rate_noncausal = I(U;Z|A,T1hat), both non-negative.
  {
    const double rn = rate_noncausal(j);
    const double rc = rate_causal(j);
    const double gap = cmi(j, {U}, {Z}, {A, T1hat});
    const bool ok =
        std::abs((rc - rn) - gap) <= kInfoTol && rn >= 0.0 && rc >= 0.0;
    ck.expect(ok, "causal_gap",
              "causal-noncausal=" + fmt_e(rc - rn) + " I(U;Z|A,T1hat)=" +
                  fmt_e(gap));
  }

  // (X,Y) marginal is the source; p(z|x,y,a) is the channel where defined.
  {
    const auto xy = marginalize(j, {X, Y});
    double worst = 0.0;
    for (std::size_t i = 0; i < s.source.size(); ++i)
      worst = std::max(worst, std::abs(xy.probs()[i] - s.source[i]));
    const auto xyaz = marginalize(j, {X, Y, Z, A});
    // Axis order follows the joint: X, Y, Z, A.
    for (std::size_t x = 0; x < n.x; ++x)
      for (std::size_t y = 0; y < n.y; ++y)
        for (std::size_t a = 0; a < n.a; ++a) {
          double slice = 0.0;
          for (std::size_t z = 0; z < n.z; ++z)
            slice += xyaz.probs()[((x * n.y + y) * n.z + z) * n.a + a];
          for (std::size_t z = 0; z < n.z; ++z) {
            const double joint =
                xyaz.probs()[((x * n.y + y) * n.z + z) * n.a + a];
            worst = std::max(worst, std::abs(joint - slice * s.p_z(x, y, a, z)));
          }
        }
    ck.expect(worst <= kMassTol, "marginal_consistency",
              "max deviation " + fmt_e(worst));
  }

  // Bayes decoder is at least as good as the strategy's own decoder.
  {
    Strategy bayes = sigma;
    bayes.decoder2 = optimal_decoder2(s, sigma.kernel, sigma.u_card);
    const double d_opt = expected_distortion(build_joint(s, bayes), s, 2);
    const double d_any = expected_distortion(j, s, 2);
    ck.expect(d_opt <= d_any + 1e-12, "bayes_decoder_optimal",
              "optimal " + fmt_e(d_opt) + " vs given " + fmt_e(d_any));
  }

  // Compiled fast path agrees with the joint tensor.
  {
    const Evaluation slow = evaluate(s, sigma);
    const CompiledScenario cs(s, sigma.u_card);
    const Evaluation fast = cs.evaluate(sigma.kernel, sigma.decoder2);
    const double worst = std::max(
        {std::abs(slow.rate_noncausal - fast.rate_noncausal),
         std::abs(slow.rate_causal - fast.rate_causal),
         std::abs(slow.cost - fast.cost), std::abs(slow.dist1 - fast.dist1),
         std::abs(slow.dist2 - fast.dist2)});
    ck.expect(worst <= kFastPathTol, "fast_path_agreement",
              "max deviation " + fmt_e(worst));
  }

  // Two-step marginalization equals one step exactly.
  {
    const auto one = marginalize(j, {X, A});
    const auto two = marginalize(marginalize(j, {X, U, A, T1hat}), {X, A});
    const auto a = one.probs();
    const auto b = two.probs();
    ck.expect(std::equal(a.begin(), a.end(), b.begin(), b.end()),
              "marginalization_commutes",
              "two-step marginal differs from one-step");
  }
}

}  // namespace

// ---- reductions -----------------------------------------------------------

bool ReductionReport::passed() const {
  for (const auto& p : points)
    if (!p.pass) return false;
  return true;
}

ReductionReport check_reduction(const std::string& name,
                                const ReductionSide& general,
                                const ReductionSide& reduced,
                                const std::vector<Constraints>& points,
                                double tolerance, std::size_t jobs) {
  const auto& g = general.scenario.sizes;
  const auto& r = reduced.scenario.sizes;
  if (g.x != r.x || g.t1hat != r.t1hat || g.t2hat != r.t2hat)
    throw InputError("reduction '" + name +
                     "': scenarios differ in |X|, |T1hat| or |T2hat|");
  ReductionReport report;
  report.name = name;
  report.tolerance = tolerance;
  report.points.resize(points.size());
  // Both sides of every point, in a fixed slot each.
  std::vector<SolveResult> results(2 * points.size());
  parallel_for(results.size(), jobs, [&](std::size_t i) {
    const ReductionSide& side = (i % 2 == 0) ? general : reduced;
    SolveConfig cfg = side.config;
    cfg.jobs = 1;
    results[i] = solve(side.scenario, points[i / 2], cfg);
  });
  for (std::size_t k = 0; k < points.size(); ++k) {
    ReductionPoint& p = report.points[k];
    const SolveResult& a = results[2 * k];
    const SolveResult& b = results[2 * k + 1];
    p.budget = points[k];
    p.rate_general = a.rate;
    p.rate_reduced = b.rate;
    p.feasible_general = a.feasible;
    p.feasible_reduced = b.feasible;
    if (a.feasible && b.feasible) {
      p.delta = std::abs(a.rate - b.rate);
    } else if (a.feasible != b.feasible) {
      p.delta = std::numeric_limits<double>::infinity();
    } else {
      p.delta = 0.0;
    }
    p.pass = p.delta <= tolerance;
  }
  return report;
}

std::vector<ReductionCase> builtin_reductions(const SolveConfig& base) {
  std::vector<ReductionCase> out;
  SolveConfig plain = base;
  plain.fixed_decoder2.clear();
  plain.warm_starts.clear();
  plain.u_card = 0;
  plain.greedy = false;
  plain.deterministic_action = false;
  plain.mode = RateMode::noncausal;

  {
    const Scenario s = reduction_wyner_ziv(0.2);
    out.push_back({"wyner-ziv",
                   {s, plain},
                   {drop_actions(s), plain},
                   {{0.0, 0.05, 1.0}, {0.0, 0.1, 0.5}, {0.0, 0.15, 0.0}}});
  }
  {
    // At full observation cost the binary auxiliary with t2hat = u * z is
    // compared against the unrestricted solver.
    const Scenario s = dsbs_binary_product(0.2);
    out.push_back({"yamamoto",
                   {s, plain},
                   {keep_action(s, 1), product_decoder_preset(plain)},
                   {{0.0, 0.02, 1.0}, {0.0, 0.05, 1.0}, {0.0, 0.08, 1.0}}});
  }
  {
    const Scenario s = reduction_heegard_berger(0.1, 0.3);
    out.push_back({"heegard-berger",
                   {s, plain},
                   {drop_actions(s), plain},
                   {{0.2, 0.1, 1.0}, {0.3, 0.05, 0.0}, {0.1, 0.15, 0.5}}});
  }
  {
    SolveConfig causal = plain;
    causal.mode = RateMode::causal;
    out.push_back({"vending-machine",
                   {reduction_vending_machine(0.1, true), causal},
                   {reduction_vending_machine(0.1, false), causal},
                   {{0.0, 0.1, 0.5}, {0.0, 0.2, 0.25}, {0.0, 0.05, 1.0}}});
  }
  return out;
}

// ---- property suite -------------------------------------------------------

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = {
      "chain_rule",
      "non_negativity",
      "markov_u_y_given_x",
      "markov_z_u_given_x_a_t1hat",
      "causal_gap",
      "marginal_consistency",
      "bayes_decoder_optimal",
      "fast_path_agreement",
      "marginalization_commutes",
  };
  return names;
}

PropertyTrial make_property_trial(std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  PropertyTrial t;
  Scenario& s = t.scenario;
  Alphabets& n = s.sizes;
  n.x = draw(rng, 1, 3);
  n.y = draw(rng, 1, 3);
  n.z = draw(rng, 1, 3);
  n.a = draw(rng, 1, 3);
  n.t1 = draw(rng, 1, 2);
  n.t1hat = draw(rng, 1, 3);
  n.t2 = draw(rng, 1, 3);
  n.t2hat = draw(rng, 1, 3);
  s.name = "random";
  s.source = random_pmf(rng, n.x * n.y, 0.15);
  for (std::size_t i = 0; i < n.x * n.y * n.a; ++i) {
    auto row = random_pmf(rng, n.z, 0.25);
    s.channel.insert(s.channel.end(), row.begin(), row.end());
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t a = 0; a < n.a; ++a) s.cost.push_back(unit(rng));
  for (std::size_t i = 0; i < n.x * n.y * n.z; ++i) {
    s.f1.push_back(draw(rng, 0, n.t1 - 1));
    s.f2.push_back(draw(rng, 0, n.t2 - 1));
  }
  for (std::size_t i = 0; i < n.t1 * n.t1hat; ++i) s.d1.push_back(unit(rng));
  for (std::size_t i = 0; i < n.t2 * n.t2hat; ++i) s.d2.push_back(unit(rng));

  Strategy& sigma = t.strategy;
  sigma.u_card = draw(rng, 1, 4);
  for (std::size_t x = 0; x < n.x; ++x) {
    auto row = random_pmf(rng, n.a * sigma.u_card * n.t1hat, 0.3);
    sigma.kernel.insert(sigma.kernel.end(), row.begin(), row.end());
  }
  for (std::size_t i = 0; i < sigma.u_card * n.z; ++i)
    sigma.decoder2.push_back(draw(rng, 0, n.t2hat - 1));
  return t;
}

PropertyReport run_property_suite(std::uint64_t seed, std::size_t trials,
                                  const PropertyHooks& hooks) {
  PropertyHooks h = hooks;
  if (!h.cmi) h.cmi = raw_conditional_mutual_information;
  PropertyReport report;
  report.seed = seed;
  report.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t ts = detail::mix_seed(seed, i);
    Checker ck{h, i, ts, report};
    try {
      check_trial(make_property_trial(ts), ck);
    } catch (const std::exception& e) {
      ck.expect(false, "exception", e.what());
    }
  }
  return report;
}

// ---- reports --------------------------------------------------------------

bool ValidationReport::passed() const {
  for (const auto& r : reductions)
    if (!r.passed()) return false;
  return properties.passed();
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : reductions) {
    os << "reduction " << r.name << ": " << (r.passed() ? "PASS" : "FAIL")
       << " (tolerance " << fmt_e(r.tolerance) << ")\n";
    for (const auto& p : r.points) {
      os << "  d1=" << fmt(p.budget.d1) << " d2=" << fmt(p.budget.d2)
         << " gamma=" << fmt(p.budget.gamma) << "  general=" << fmt(p.rate_general)
         << (p.feasible_general ? "" : "(infeasible)")
         << " reduced=" << fmt(p.rate_reduced)
         << (p.feasible_reduced ? "" : "(infeasible)")
         << " delta=" << fmt_e(p.delta) << (p.pass ? "" : "  <-- FAIL") << "\n";
    }
  }
  os << "properties: " << (properties.passed() ? "PASS" : "FAIL") << " ("
     << properties.trials << " trials, " << properties.checks << " checks, "
     << properties.failures.size() << " failures, seed " << properties.seed
     << ")\n";
  for (const auto& f : properties.failures)
    os << "  " << f.invariant << " trial=" << f.trial
       << " trial_seed=" << f.trial_seed << ": " << f.detail << "\n";
  return os.str();
}

std::string ValidationReport::to_json() const {
  using nlohmann::json;
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  json root;
  root["passed"] = passed();
  root["reductions"] = json::array();
  for (const auto& r : reductions) {
    json jr;
    jr["name"] = r.name;
    jr["passed"] = r.passed();
    jr["tolerance"] = r.tolerance;
    jr["points"] = json::array();
    for (const auto& p : r.points)
      jr["points"].push_back({{"d1", p.budget.d1},
                              {"d2", p.budget.d2},
                              {"gamma", p.budget.gamma},
                              {"rate_general", num(p.rate_general)},
                              {"rate_reduced", num(p.rate_reduced)},
                              {"feasible_general", p.feasible_general},
                              {"feasible_reduced", p.feasible_reduced},
                              {"delta", num(p.delta)},
                              {"pass", p.pass}});
    root["reductions"].push_back(std::move(jr));
  }
  json jp;
  jp["passed"] = properties.passed();
  jp["seed"] = properties.seed;
  jp["trials"] = properties.trials;
  jp["checks"] = properties.checks;
  jp["failures"] = json::array();
  for (const auto& f : properties.failures)
    jp["failures"].push_back({{"invariant", f.invariant},
                              {"trial", f.trial},
                              {"trial_seed", f.trial_seed},
                              {"detail", f.detail}});
  root["properties"] = std::move(jp);
  return root.dump(2) + "\n";
}

}  // namespace rdc
