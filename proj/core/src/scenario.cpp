#include "rdc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdc/error.hpp"
#include "rdc/prob.hpp"

namespace rdc {
namespace {

// Channel slices only need to be pmfs up to this tolerance.
constexpr double kSliceTolerance = 1e-12;

void check_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw InputError(os.str());
  }
}

std::vector<double> hamming(std::size_t n) {
  std::vector<double> d(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  return d;
}

// Decoder 1 that has nothing to compute: constant target, zero distortion.
void make_decoder1_trivial(Scenario& s) {
  s.sizes.t1 = 1;
  s.sizes.t1hat = 1;
  s.f1.assign(s.sizes.x * s.sizes.y * s.sizes.z, 0);
  s.d1 = {0.0};
}

std::vector<double> linear_costs(std::size_t actions) {
  std::vector<double> c(actions);
  for (std::size_t a = 0; a < actions; ++a) c[a] = static_cast<double>(a);
  return c;
}

}  // namespace

std::vector<double> Scenario::p_x() const {
  std::vector<double> px(sizes.x, 0.0);
  for (std::size_t x = 0; x < sizes.x; ++x)
    for (std::size_t y = 0; y < sizes.y; ++y) px[x] += p_xy(x, y);
  return px;
}

std::string Violation::to_string() const {
  std::ostringstream os;
  os << what;
  if (!index.empty()) {
    os << " at (";
    for (std::size_t i = 0; i < index.size(); ++i)
      os << (i ? "," : "") << index[i];
    os << ")";
  }
  return os.str();
}

std::vector<Violation> validate(const Scenario& s) {
  std::vector<Violation> out;
  const auto& n = s.sizes;
  for (auto [size, name] : {std::pair{n.x, "X"}, {n.y, "Y"}, {n.z, "Z"},
                            {n.a, "A"}, {n.t1, "T1"}, {n.t1hat, "T1hat"},
                            {n.t2, "T2"}, {n.t2hat, "T2hat"}}) {
    if (size == 0)
      out.push_back({std::string("alphabet ") + name + " is empty", {}});
  }
  if (!out.empty()) return out;

  auto check_size = [&](std::size_t got, std::size_t want, const char* what) {
    if (got == want) return true;
    std::ostringstream os;
    os << what << " has " << got << " entries, expected " << want;
    out.push_back({os.str(), {}});
    return false;
  };
  const std::size_t xyz = n.x * n.y * n.z;
  bool ok = check_size(s.source.size(), n.x * n.y, "source");
  ok &= check_size(s.channel.size(), n.x * n.y * n.a * n.z, "channel");
  ok &= check_size(s.cost.size(), n.a, "cost");
  ok &= check_size(s.f1.size(), xyz, "f1");
  ok &= check_size(s.f2.size(), xyz, "f2");
  ok &= check_size(s.d1.size(), n.t1 * n.t1hat, "d1");
  ok &= check_size(s.d2.size(), n.t2 * n.t2hat, "d2");
  if (!ok) return out;

  double total = 0.0;
  for (std::size_t x = 0; x < n.x; ++x) {
    for (std::size_t y = 0; y < n.y; ++y) {
      double p = s.p_xy(x, y);
      if (!(p >= 0.0) || !std::isfinite(p))
        out.push_back({"source entry negative or non-finite", {x, y}});
      total += p;
    }
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "source mass " << total << " differs from 1";
    out.push_back({os.str(), {}});
  }

  for (std::size_t x = 0; x < n.x; ++x) {
    for (std::size_t y = 0; y < n.y; ++y) {
      for (std::size_t a = 0; a < n.a; ++a) {
        double sum = 0.0;
        bool negative = false;
        for (std::size_t z = 0; z < n.z; ++z) {
          double p = s.p_z(x, y, a, z);
          if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
          sum += p;
        }
        if (negative) {
          out.push_back({"channel slice p(z|x,y,a) has a negative or "
                         "non-finite entry",
                         {x, y, a}});
        } else if (std::abs(sum - 1.0) > kSliceTolerance) {
          std::ostringstream os;
          os.precision(17);
          os << "channel slice p(z|x,y,a) sums to " << sum;
          out.push_back({os.str(), {x, y, a}});
        }
      }
    }
  }

  for (std::size_t a = 0; a < n.a; ++a) {
    if (!(s.cost[a] >= 0.0) || !std::isfinite(s.cost[a]))
      out.push_back({"cost entry negative or non-finite", {a}});
  }
  for (std::size_t x = 0; x < n.x; ++x) {
    for (std::size_t y = 0; y < n.y; ++y) {
      for (std::size_t z = 0; z < n.z; ++z) {
        if (s.target1(x, y, z) >= n.t1)
          out.push_back({"f1 value outside the T1 alphabet", {x, y, z}});
        if (s.target2(x, y, z) >= n.t2)
          out.push_back({"f2 value outside the T2 alphabet", {x, y, z}});
      }
    }
  }
  for (std::size_t t = 0; t < n.t1; ++t) {
    for (std::size_t h = 0; h < n.t1hat; ++h) {
      double d = s.dist1(t, h);
      if (!(d >= 0.0) || !std::isfinite(d))
        out.push_back({"d1 entry negative or non-finite", {t, h}});
    }
  }
  for (std::size_t t = 0; t < n.t2; ++t) {
    for (std::size_t h = 0; h < n.t2hat; ++h) {
      double d = s.dist2(t, h);
      if (!(d >= 0.0) || !std::isfinite(d))
        out.push_back({"d2 entry negative or non-finite", {t, h}});
    }
  }
  return out;
}

void require_valid(const Scenario& s) {
  auto violations = validate(s);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid scenario";
  if (!s.name.empty()) os << " '" << s.name << "'";
  os << ": " << violations.front().to_string();
  if (violations.size() > 1)
    os << " (and " << violations.size() - 1 << " more)";
  throw InputError(os.str());
}

double d1_max(const Scenario& s) {
  const auto& n = s.sizes;
  double worst = 0.0;
  for (std::size_t a = 0; a < n.a; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < n.t1hat; ++h) {
      double e = 0.0;
      for (std::size_t x = 0; x < n.x; ++x)
        for (std::size_t y = 0; y < n.y; ++y)
          for (std::size_t z = 0; z < n.z; ++z)
            e += s.p_xy(x, y) * s.p_z(x, y, a, z) *
                 s.dist1(s.target1(x, y, z), h);
      best = std::min(best, e);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double d2_table_max(const Scenario& s) {
  return s.d2.empty() ? 0.0 : *std::max_element(s.d2.begin(), s.d2.end());
}

Scenario dsbs_binary_product(double p) {
  check_range(p, 0.0, 0.5, "dsbs crossover p");
  Scenario s;
  std::ostringstream name;
  name << "dsbs:p=" << p;
  s.name = name.str();
  s.sizes = {.x = 2, .y = 2, .z = 2, .a = 2, .t1 = 1, .t1hat = 1, .t2 = 2,
             .t2hat = 2};
  s.source = {(1 - p) / 2, p / 2, p / 2, (1 - p) / 2};
  s.channel.assign(2 * 2 * 2 * 2, 0.0);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      // a = 0: nothing measured, Z = 1.  a = 1: Z = Y.
      s.channel[((x * 2 + y) * 2 + 0) * 2 + 1] = 1.0;
      s.channel[((x * 2 + y) * 2 + 1) * 2 + y] = 1.0;
    }
  }
  s.cost = {0.0, 1.0};
  s.f2.resize(8);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t z = 0; z < 2; ++z) s.f2[(x * 2 + y) * 2 + z] = x * y;
  s.d2 = hamming(2);
  make_decoder1_trivial(s);
  return s;
}

Scenario reduction_wyner_ziv(double p, std::size_t actions) {
  check_range(p, 0.0, 0.5, "Wyner-Ziv crossover p");
  if (actions == 0) throw InputError("Wyner-Ziv scenario needs an action");
  Scenario s;
  std::ostringstream name;
  name << "wz:p=" << p;
  s.name = name.str();
  s.sizes = {.x = 2, .y = 1, .z = 2, .a = actions, .t1 = 1, .t1hat = 1,
             .t2 = 2, .t2hat = 2};
  s.source = {0.5, 0.5};
  s.channel.assign(2 * actions * 2, 0.0);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t a = 0; a < actions; ++a)
      for (std::size_t z = 0; z < 2; ++z)
        s.channel[(x * actions + a) * 2 + z] = (x == z) ? 1 - p : p;
  s.cost = linear_costs(actions);
  s.f2.resize(4);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t z = 0; z < 2; ++z) s.f2[x * 2 + z] = x;
  s.d2 = hamming(2);
  make_decoder1_trivial(s);
  return s;
}

Scenario reduction_vending_machine(double q, bool diagonal_source) {
  check_range(q, 0.0, 0.5, "vending machine crossover q");
  Scenario s;
  std::ostringstream name;
  name << "vm:q=" << q << (diagonal_source ? "" : ",reduced");
  s.name = name.str();
  const std::size_t ny = diagonal_source ? 2 : 1;
  s.sizes = {.x = 2, .y = ny, .z = 3, .a = 2, .t1 = 1, .t1hat = 1, .t2 = 2,
             .t2hat = 2};
  s.source.assign(2 * ny, 0.0);
  for (std::size_t x = 0; x < 2; ++x)
    s.source[x * ny + (diagonal_source ? x : 0)] = 0.5;
  s.channel.assign(2 * ny * 2 * 3, 0.0);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t observed = diagonal_source ? y : x;
      const std::size_t base = (x * ny + y) * 2;
      s.channel[(base + 0) * 3 + 2] = 1.0;
      for (std::size_t z = 0; z < 2; ++z)
        s.channel[(base + 1) * 3 + z] = (z == observed) ? 1 - q : q;
    }
  }
  s.cost = {0.0, 1.0};
  s.f2.resize(2 * ny * 3);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t z = 0; z < 3; ++z) s.f2[(x * ny + y) * 3 + z] = x;
  s.d2 = hamming(2);
  make_decoder1_trivial(s);
  return s;
}

Scenario reduction_heegard_berger(double p, double erasure,
                                  std::size_t actions) {
  check_range(p, 0.0, 0.5, "Heegard-Berger crossover p");
  check_range(erasure, 0.0, 1.0, "Heegard-Berger erasure probability");
  if (actions == 0) throw InputError("Heegard-Berger scenario needs an action");
  Scenario s;
  std::ostringstream name;
  name << "hb:p=" << p << ",e=" << erasure;
  s.name = name.str();
  s.sizes = {.x = 2, .y = 1, .z = 3, .a = actions, .t1 = 2, .t1hat = 2,
             .t2 = 2, .t2hat = 2};
  s.source = {0.5, 0.5};
  s.channel.assign(2 * actions * 3, 0.0);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < actions; ++a) {
      double* row = &s.channel[(x * actions + a) * 3];
      row[x] = (1 - erasure) * (1 - p);
      row[1 - x] = (1 - erasure) * p;
      row[2] = erasure;
    }
  }
  s.cost = linear_costs(actions);
  s.f1.resize(6);
  s.f2.resize(6);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t z = 0; z < 3; ++z) {
      s.f1[x * 3 + z] = x;
      s.f2[x * 3 + z] = x;
    }
  }
  s.d1 = hamming(2);
  s.d2 = hamming(2);
  return s;
}

Scenario keep_action(const Scenario& s, std::size_t keep) {
  require_valid(s);
  const auto& n = s.sizes;
  if (keep >= n.a) throw InputError("keep_action: action out of range");
  Scenario r = s;
  r.name = s.name + ",a=" + std::to_string(keep);
  r.sizes.a = 1;
  r.cost = {s.cost[keep]};
  r.channel.assign(n.x * n.y * n.z, 0.0);
  for (std::size_t x = 0; x < n.x; ++x)
    for (std::size_t y = 0; y < n.y; ++y)
      for (std::size_t z = 0; z < n.z; ++z)
        r.channel[(x * n.y + y) * n.z + z] = s.p_z(x, y, keep, z);
  return r;
}

Scenario drop_actions(const Scenario& s) {
  const auto keep = static_cast<std::size_t>(
      std::min_element(s.cost.begin(), s.cost.end()) - s.cost.begin());
  Scenario r = keep_action(s, keep);
  r.name = s.name + ",no-actions";
  return r;
}

}  // namespace rdc
