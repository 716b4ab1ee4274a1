#pragma once

// Problem instances: a source p(x,y), an action-controlled measurement
// channel p(z|x,y,a), action costs, and two decoders each computing a target
// function of (x,y,z) under its own distortion measure.

#include <cstddef>
#include <string>
#include <vector>

namespace rdc {

struct Alphabets {
  std::size_t x = 1;
  std::size_t y = 1;
  std::size_t z = 1;
  std::size_t a = 1;
  std::size_t t1 = 1;      // range of f1
  std::size_t t1hat = 1;   // decoder 1 reconstruction
  std::size_t t2 = 1;      // range of f2
  std::size_t t2hat = 1;   // decoder 2 reconstruction

  friend bool operator==(const Alphabets&, const Alphabets&) = default;
};

/// Plain tables; may be malformed until validate() says otherwise. Builders
/// below always return valid scenarios.
struct Scenario {
  std::string name;
  Alphabets sizes;
  std::vector<double> source;       // [x][y]
  std::vector<double> channel;      // [x][y][a][z]
  std::vector<double> cost;         // [a]
  std::vector<std::size_t> f1;      // [x][y][z] -> t1
  std::vector<std::size_t> f2;      // [x][y][z] -> t2
  std::vector<double> d1;           // [t1][t1hat]
  std::vector<double> d2;           // [t2][t2hat]

  double p_xy(std::size_t x, std::size_t y) const {
    return source[x * sizes.y + y];
  }
  double p_z(std::size_t x, std::size_t y, std::size_t a,
             std::size_t z) const {
    return channel[((x * sizes.y + y) * sizes.a + a) * sizes.z + z];
  }
  std::size_t target1(std::size_t x, std::size_t y, std::size_t z) const {
    return f1[(x * sizes.y + y) * sizes.z + z];
  }
  std::size_t target2(std::size_t x, std::size_t y, std::size_t z) const {
    return f2[(x * sizes.y + y) * sizes.z + z];
  }
  double dist1(std::size_t t, std::size_t that) const {
    return d1[t * sizes.t1hat + that];
  }
  double dist2(std::size_t t, std::size_t that) const {
    return d2[t * sizes.t2hat + that];
  }
  /// Marginal p(x).
  std::vector<double> p_x() const;
};

struct Violation {
  std::string what;
  std::vector<std::size_t> index;

  std::string to_string() const;
};

/// Every broken invariant, with the offending indices; empty when valid.
std::vector<Violation> validate(const Scenario& s);
/// Throws InputError listing the first violations.
void require_valid(const Scenario& s);

/// Threshold on D1 above which decoder 1 is unconstrained: the distortion of
/// the best constant reconstruction, taken under the least favourable action
/// when f1 depends on the measurement.
double d1_max(const Scenario& s);

/// Largest value in the d2 table.
double d2_table_max(const Scenario& s);

// Built-in scenarios -------------------------------------------------------

/// Doubly symmetric binary source with crossover p, target X*Y at decoder 2,
/// action 1 reveals Y (cost 1), action 0 returns the constant 1 (cost 0).
/// Decoder 1 is trivial.
Scenario dsbs_binary_product(double p);

/// Wyner-Ziv instance: uniform binary X, Z = X through BSC(p) regardless of
/// the action, decoder 2 reconstructs X (Hamming). `actions` actions with
/// costs 0, 1, 2, ...; decoder 1 trivial.
Scenario reduction_wyner_ziv(double p, std::size_t actions = 2);

/// Vending machine instance: uniform binary X; action 1 (cost 1) measures
/// through BSC(q), action 0 (cost 0) returns an erasure symbol. Decoder 2
/// reconstructs X. With `diagonal_source` Y is a copy of X and the channel
/// reads Y; otherwise Y is trivial and the channel reads X directly.
Scenario reduction_vending_machine(double q, bool diagonal_source = true);

/// Heegard-Berger-Kaspi instance: uniform binary X, Z = X through a binary
/// symmetric erasure channel (crossover p, erasure e), both decoders
/// reconstruct X under Hamming distortion. Channel ignores the action.
Scenario reduction_heegard_berger(double p, double erasure,
                                  std::size_t actions = 2);

/// Same scenario restricted to the single action `keep`.
Scenario keep_action(const Scenario& s, std::size_t keep);

/// Same scenario with the action alphabet collapsed to its cheapest action.
/// Only meaningful when the channel ignores the action.
Scenario drop_actions(const Scenario& s);

}  // namespace rdc
