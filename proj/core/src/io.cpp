#include "rdc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rdc/error.hpp"

namespace rdc {
namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw InputError(origin_ + ": field '" + field + "': " + msg);
  }

  const json& member(const json& obj, const std::string& key,
                     const std::string& where) const {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(join(where, key), "missing");
    return *it;
  }

  std::size_t size_value(const json& v, const std::string& field) const {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      fail(field, "expected a positive integer");
    return v.get<std::size_t>();
  }

  /// Reads a nested array of the given shape in row-major order.
  template <class T>
  void tensor(const json& v, const std::string& field,
              const std::vector<std::size_t>& shape, std::vector<T>& out) const {
    out.clear();
    walk(v, field, shape, 0, out);
  }

  static std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }

 private:
  template <class T>
  void walk(const json& v, const std::string& field,
            const std::vector<std::size_t>& shape, std::size_t depth,
            std::vector<T>& out) const {
    if (depth == shape.size()) {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(field, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(field, "not finite");
        out.push_back(d);
      } else {
        if (!v.is_number_integer() || v.get<long long>() < 0)
          fail(field, "expected a non-negative integer");
        out.push_back(v.get<T>());
      }
      return;
    }
    if (!v.is_array()) fail(field, "expected an array");
    if (v.size() != shape[depth]) {
      std::ostringstream os;
      os << "expected " << shape[depth] << " entries, found " << v.size();
      fail(field, os.str());
    }
    for (std::size_t i = 0; i < v.size(); ++i)
      walk(v[i], field + "[" + std::to_string(i) + "]", shape, depth + 1, out);
  }

  std::string origin_;
};

std::string row_path(const std::string& field,
                     const std::vector<std::size_t>& row_shape, std::size_t r) {
  std::vector<std::size_t> idx(row_shape.size());
  for (std::size_t d = row_shape.size(); d-- > 0;) {
    idx[d] = r % row_shape[d];
    r /= row_shape[d];
  }
  std::string out = field;
  for (std::size_t i : idx) out += "[" + std::to_string(i) + "]";
  return out;
}

[[noreturn]] void fail_row(const Reader& rd, const std::string& field,
              const std::vector<std::size_t>& row_shape, std::size_t r,
              const std::string& msg) {
  rd.fail(row_path(field, row_shape, r), msg);
}

// Renormalizes each row of `width` entries in place when it misses unit mass
// by at most the load tolerance.
void renormalize_rows(std::vector<double>& probs, std::size_t width,
                      const Reader& rd, const std::string& field,
                      const std::vector<std::size_t>& row_shape) {
  const std::size_t rows = probs.size() / width;
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const double p = probs[r * width + k];
      if (p < 0.0) fail_row(rd, field, row_shape, r, "negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kLoadRenormTolerance) {
      std::ostringstream os;
      os.precision(12);
      os << "probabilities sum to " << total;
      fail_row(rd, field, row_shape, r, os.str());
    }
    for (std::size_t k = 0; k < width; ++k) probs[r * width + k] /= total;
  }
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                             std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos)
      what = what.substr(pos);
    throw InputError(origin + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": " + what);
  }
}

SolveConfig parse_solver(const json& v, const Reader& rd) {
  const std::string where = "solver";
  if (!v.is_object()) rd.fail(where, "expected an object");
  SolveConfig cfg;
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string field = where + "." + it.key();
    const json& x = it.value();
    auto count = [&]() -> std::size_t {
      if (!x.is_number_integer() || x.get<long long>() < 0)
        rd.fail(field, "expected a non-negative integer");
      return x.get<std::size_t>();
    };
    auto real = [&]() -> double {
      if (!x.is_number()) rd.fail(field, "expected a number");
      return x.get<double>();
    };
    auto flag = [&]() -> bool {
      if (!x.is_boolean()) rd.fail(field, "expected true or false");
      return x.get<bool>();
    };
    if (it.key() == "mode") {
      if (!x.is_string()) rd.fail(field, "expected \"noncausal\" or \"causal\"");
      try {
        cfg.mode = parse_rate_mode(x.get<std::string>());
      } catch (const InputError& e) {
        rd.fail(field, e.what());
      }
    } else if (it.key() == "greedy") {
      cfg.greedy = flag();
    } else if (it.key() == "u_card") {
      cfg.u_card = count();
    } else if (it.key() == "allow_large_u") {
      cfg.allow_large_u = flag();
    } else if (it.key() == "restarts") {
      cfg.restarts = count();
    } else if (it.key() == "grid_step") {
      cfg.grid_step = real();
      if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 1.0))
        rd.fail(field, "must lie in (0, 1]");
    } else if (it.key() == "local_iters") {
      cfg.local_iters = count();
      if (cfg.local_iters == 0) rd.fail(field, "must be positive");
    } else if (it.key() == "constraint_slack") {
      cfg.constraint_slack = real();
      if (cfg.constraint_slack < 0.0) rd.fail(field, "must be non-negative");
    } else if (it.key() == "seed") {
      cfg.seed = count();
    } else if (it.key() == "jobs") {
      cfg.jobs = count();
    } else if (it.key() == "deterministic_action") {
      cfg.deterministic_action = flag();
    } else {
      rd.fail(field, "unknown solver option");
    }
  }
  return cfg;
}

std::map<std::string, double> parse_params(const std::string& body,
                                           const std::string& spec) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputError("builtin '" + spec + "': expected key=value, got '" +
                       item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size() || !std::isfinite(d))
      throw InputError("builtin '" + spec + "': bad number for '" + key + "'");
    out[key] = d;
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key,
            const std::string& spec, std::optional<double> fallback = {}) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw InputError("builtin '" + spec + "': missing parameter '" + key + "'");
  }
  const double v = it->second;
  params.erase(it);
  return v;
}

template <class T>
json nest(const std::vector<T>& flat, const std::vector<std::size_t>& shape,
          std::size_t depth = 0, std::size_t offset = 0) {
  if (depth == shape.size()) return json(flat[offset]);
  std::size_t stride = 1;
  for (std::size_t d = depth + 1; d < shape.size(); ++d) stride *= shape[d];
  json arr = json::array();
  for (std::size_t i = 0; i < shape[depth]; ++i)
    arr.push_back(nest(flat, shape, depth + 1, offset + i * stride));
  return arr;
}

}  // namespace

LoadedScenario parse_scenario(std::string_view text, const std::string& origin) {
  const json root = parse_json(text, origin);
  const Reader rd(origin);
  if (!root.is_object()) rd.fail("<root>", "expected an object");

  LoadedScenario out;
  Scenario& s = out.scenario;
  s.name = "file";
  if (auto it = root.find("name"); it != root.end()) {
    if (!it->is_string()) rd.fail("name", "expected a string");
    s.name = it->get<std::string>();
  }

  const json& sizes = rd.member(root, "sizes", "");
  Alphabets& n = s.sizes;
  n.x = rd.size_value(rd.member(sizes, "x", "sizes"), "sizes.x");
  n.y = rd.size_value(rd.member(sizes, "y", "sizes"), "sizes.y");
  n.z = rd.size_value(rd.member(sizes, "z", "sizes"), "sizes.z");
  n.a = rd.size_value(rd.member(sizes, "a", "sizes"), "sizes.a");

  auto matrix_shape = [&](const std::string& key) {
    const json& m = rd.member(root, key, "");
    if (!m.is_array() || m.empty()) rd.fail(key, "expected a non-empty matrix");
    if (!m[0].is_array() || m[0].empty())
      rd.fail(key + "[0]", "expected a non-empty row");
    return std::pair<std::size_t, std::size_t>{m.size(), m[0].size()};
  };
  std::tie(n.t2, n.t2hat) = matrix_shape("d2");
  const bool has_d1 = root.contains("d1");
  if (has_d1 != root.contains("f1"))
    rd.fail(has_d1 ? "f1" : "d1", "f1 and d1 must be given together");
  if (has_d1) {
    std::tie(n.t1, n.t1hat) = matrix_shape("d1");
  } else {
    n.t1 = n.t1hat = 1;
  }

  rd.tensor(rd.member(root, "source", ""), "source", {n.x, n.y}, s.source);
  renormalize_rows(s.source, n.x * n.y, rd, "source", {});
  rd.tensor(rd.member(root, "channel", ""), "channel", {n.x, n.y, n.a, n.z},
            s.channel);
  renormalize_rows(s.channel, n.z, rd, "channel", {n.x, n.y, n.a});
  rd.tensor(rd.member(root, "cost", ""), "cost", {n.a}, s.cost);
  rd.tensor(rd.member(root, "f2", ""), "f2", {n.x, n.y, n.z}, s.f2);
  rd.tensor(rd.member(root, "d2", ""), "d2", {n.t2, n.t2hat}, s.d2);
  if (has_d1) {
    rd.tensor(root["f1"], "f1", {n.x, n.y, n.z}, s.f1);
    rd.tensor(root["d1"], "d1", {n.t1, n.t1hat}, s.d1);
  } else {
    s.f1.assign(n.x * n.y * n.z, 0);
    s.d1 = {0.0};
  }

  auto check_range = [&](const std::vector<std::size_t>& f, std::size_t limit,
                         const std::string& key) {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] >= limit)
        rd.fail(row_path(key, {n.x, n.y, n.z}, i),
                "value " + std::to_string(f[i]) + " has no row in d" +
                    key.substr(1));
  };
  check_range(s.f2, n.t2, "f2");
  check_range(s.f1, n.t1, "f1");
  for (std::size_t a = 0; a < n.a; ++a)
    if (s.cost[a] < 0.0) rd.fail("cost[" + std::to_string(a) + "]", "negative");
  auto check_nonneg = [&](const std::vector<double>& d, std::size_t cols,
                          const std::string& key) {
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] < 0.0)
        rd.fail(key + "[" + std::to_string(i / cols) + "][" +
                    std::to_string(i % cols) + "]",
                "negative distortion");
  };
  check_nonneg(s.d2, n.t2hat, "d2");
  check_nonneg(s.d1, n.t1hat, "d1");

  if (auto it = root.find("solver"); it != root.end())
    out.solver = parse_solver(*it, rd);

  for (auto it = root.begin(); it != root.end(); ++it) {
    static const char* known[] = {"name", "sizes", "source", "channel", "cost",
                                  "f1",   "f2",    "d1",     "d2",      "solver"};
    if (std::find(std::begin(known), std::end(known), it.key()) ==
        std::end(known))
      rd.fail(it.key(), "unknown field");
  }
  require_valid(s);
  return out;
}

std::optional<Scenario> builtin_scenario(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return std::nullopt;
  const std::string kind = spec.substr(0, colon);
  if (kind != "dsbs" && kind != "wz" && kind != "hb" && kind != "vm")
    return std::nullopt;
  auto params = parse_params(spec.substr(colon + 1), spec);
  Scenario s;
  if (kind == "dsbs") {
    s = dsbs_binary_product(take(params, "p", spec));
  } else if (kind == "wz") {
    s = reduction_wyner_ziv(take(params, "p", spec));
  } else if (kind == "hb") {
    const double p = take(params, "p", spec);
    s = reduction_heegard_berger(p, take(params, "e", spec));
  } else {
    const double q = take(params, "q", spec);
    s = reduction_vending_machine(q, take(params, "diagonal", spec, 1.0) != 0.0);
  }
  if (!params.empty())
    throw InputError("builtin '" + spec + "': unknown parameter '" +
                     params.begin()->first + "'");
  return s;
}

LoadedScenario load_scenario(const std::string& spec) {
  if (auto s = builtin_scenario(spec)) return {std::move(*s), std::nullopt};
  return parse_scenario(read_file(spec), spec);
}

std::string scenario_to_json(const Scenario& s, const SolveConfig* solver) {
  const auto& n = s.sizes;
  json root;
  root["name"] = s.name;
  root["sizes"] = {{"x", n.x}, {"y", n.y}, {"z", n.z}, {"a", n.a}};
  root["source"] = nest(s.source, {n.x, n.y});
  root["channel"] = nest(s.channel, {n.x, n.y, n.a, n.z});
  root["cost"] = s.cost;
  root["f1"] = nest(s.f1, {n.x, n.y, n.z});
  root["d1"] = nest(s.d1, {n.t1, n.t1hat});
  root["f2"] = nest(s.f2, {n.x, n.y, n.z});
  root["d2"] = nest(s.d2, {n.t2, n.t2hat});
  if (solver) {
    root["solver"] = {{"mode", to_string(solver->mode)},
                      {"greedy", solver->greedy},
                      {"u_card", solver->u_card},
                      {"allow_large_u", solver->allow_large_u},
                      {"restarts", solver->restarts},
                      {"grid_step", solver->grid_step},
                      {"local_iters", solver->local_iters},
                      {"constraint_slack", solver->constraint_slack},
                      {"seed", solver->seed},
                      {"jobs", solver->jobs},
                      {"deterministic_action", solver->deterministic_action}};
  }
  return root.dump(2) + "\n";
}

std::string strategy_to_json(const Strategy& sigma, const Alphabets& n) {
  json root;
  root["u_card"] = sigma.u_card;
  root["kernel"] = nest(sigma.kernel, {n.x, n.a, sigma.u_card, n.t1hat});
  root["decoder2"] = nest(sigma.decoder2, {sigma.u_card, n.z});
  return root.dump(2) + "\n";
}

Strategy parse_strategy(std::string_view text, const Alphabets& n,
                        const std::string& origin) {
  const json root = parse_json(text, origin);
  const Reader rd(origin);
  Strategy sigma;
  sigma.u_card = rd.size_value(rd.member(root, "u_card", ""), "u_card");
  rd.tensor(rd.member(root, "kernel", ""), "kernel",
            {n.x, n.a, sigma.u_card, n.t1hat}, sigma.kernel);
  renormalize_rows(sigma.kernel, n.a * sigma.u_card * n.t1hat, rd, "kernel",
                   {n.x});
  rd.tensor(rd.member(root, "decoder2", ""), "decoder2", {sigma.u_card, n.z},
            sigma.decoder2);
  for (std::size_t i = 0; i < sigma.decoder2.size(); ++i)
    if (sigma.decoder2[i] >= n.t2hat)
      rd.fail("decoder2[" + std::to_string(i / n.z) + "][" +
                  std::to_string(i % n.z) + "]",
              "symbol out of range");
  return sigma;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError(path + ": write failed");
}

}  // namespace rdc
