#pragma once

// Network data model and DC shift factors.
//
// Bus numbers are 0-based in memory and 1-based in case files.

#include "sprlab/error.hpp"
#include "sprlab/linalg.hpp"

#include "json.hpp"

#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

namespace sprlab {

struct Line {
  int from = 0;
  int to = 0;
  double susceptance = 1.0;  // per unit
  double rating = 0.0;       // MW
};

struct Generator {
  int bus = 0;
  double cost = 0.0;       // $/MWh
  double pmin = 0.0;       // MW
  double pmax = 0.0;       // MW
  double ramp_up = 0.0;    // MW/min
  double ramp_down = 0.0;  // MW/min
};

struct NetworkCase {
  std::string name;
  int buses = 0;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  int slack = 0;
  // Buses whose demand is a parameter of the dispatch. Loads elsewhere are
  // fixed at zero.
  std::vector<int> load_buses;

  Index n_bus() const { return buses; }
  Index n_line() const { return static_cast<Index>(lines.size()); }
  Index n_gen() const { return static_cast<Index>(generators.size()); }
  Index n_load() const { return static_cast<Index>(load_buses.size()); }

  Vec costs() const {
    Vec c(n_gen());
    for (Index g = 0; g < n_gen(); ++g) c(g) = generators[static_cast<std::size_t>(g)].cost;
    return c;
  }
  Vec ratings() const {
    Vec f(n_line());
    for (Index l = 0; l < n_line(); ++l) f(l) = lines[static_cast<std::size_t>(l)].rating;
    return f;
  }
  Vec pmin() const {
    Vec v(n_gen());
    for (Index g = 0; g < n_gen(); ++g) v(g) = generators[static_cast<std::size_t>(g)].pmin;
    return v;
  }
  Vec pmax() const {
    Vec v(n_gen());
    for (Index g = 0; g < n_gen(); ++g) v(g) = generators[static_cast<std::size_t>(g)].pmax;
    return v;
  }

  // Bus-by-generator incidence: column g has a 1 at the generator's bus.
  Mat gen_incidence() const {
    Mat m = Mat::Zero(n_bus(), n_gen());
    for (Index g = 0; g < n_gen(); ++g) m(generators[static_cast<std::size_t>(g)].bus, g) = 1.0;
    return m;
  }
  // Bus-by-load incidence.
  Mat load_incidence() const {
    Mat m = Mat::Zero(n_bus(), n_load());
    for (Index k = 0; k < n_load(); ++k) m(load_buses[static_cast<std::size_t>(k)], k) = 1.0;
    return m;
  }
};

struct ShiftFactorMatrix {
  Mat H;  // n_l x n_b, MW of line flow per MW injected (withdrawn at the slack)
};

inline bool is_connected(const NetworkCase& nc) {
  if (nc.buses <= 0) return false;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nc.buses));
  for (const Line& l : nc.lines) {
    adj[static_cast<std::size_t>(l.from)].push_back(l.to);
    adj[static_cast<std::size_t>(l.to)].push_back(l.from);
  }
  std::vector<bool> seen(static_cast<std::size_t>(nc.buses), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == nc.buses;
}

// Throws ValidationError naming the first violated invariant.
inline void validate(const NetworkCase& nc) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("case '" + nc.name + "': " + what);
  };
  if (nc.buses <= 0) fail("buses must be positive");
  auto bus_ok = [&](int b) { return b >= 0 && b < nc.buses; };
  if (!bus_ok(nc.slack)) fail("slack bus " + std::to_string(nc.slack + 1) + " out of range");
  for (std::size_t i = 0; i < nc.lines.size(); ++i) {
    const Line& l = nc.lines[i];
    std::string tag = "line " + std::to_string(i + 1);
    if (!bus_ok(l.from) || !bus_ok(l.to)) fail(tag + ": endpoint out of range");
    if (l.from == l.to) fail(tag + ": self loop");
    if (!(l.susceptance > 0.0)) fail(tag + ": susceptance must be > 0");
    if (!(l.rating > 0.0)) fail(tag + ": rating must be > 0");
  }
  if (nc.generators.empty()) fail("no generators");
  for (std::size_t g = 0; g < nc.generators.size(); ++g) {
    const Generator& gen = nc.generators[g];
    std::string tag = "generator " + std::to_string(g + 1);
    if (!bus_ok(gen.bus)) fail(tag + ": bus out of range");
    if (!(gen.pmin <= gen.pmax)) fail(tag + ": pmin > pmax");
    if (gen.ramp_up < 0.0 || gen.ramp_down < 0.0) fail(tag + ": negative ramp rate");
  }
  if (nc.load_buses.empty()) fail("no load buses");
  std::vector<bool> seen(static_cast<std::size_t>(nc.buses), false);
  for (int b : nc.load_buses) {
    if (!bus_ok(b)) fail("load bus out of range");
    if (seen[static_cast<std::size_t>(b)]) fail("duplicate load bus " + std::to_string(b + 1));
    seen[static_cast<std::size_t>(b)] = true;
  }
  if (!is_connected(nc)) fail("network is not connected");
}

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline NetworkCase parse_case(const nlohmann::json& j, const std::string& fallback_name = "case") {
  using detail::require;
  NetworkCase nc;
  nc.name = j.value("name", fallback_name);
  nc.buses = require<int>(j, "buses", "case");
  nc.slack = require<int>(j, "slack", "case") - 1;
  if (!j.contains("lines") || !j["lines"].is_array()) throw ValidationError("case: missing array 'lines'");
  if (!j.contains("generators") || !j["generators"].is_array())
    throw ValidationError("case: missing array 'generators'");
  for (std::size_t i = 0; i < j["lines"].size(); ++i) {
    const auto& jl = j["lines"][i];
    std::string where = "lines[" + std::to_string(i) + "]";
    Line l;
    l.from = require<int>(jl, "from", where) - 1;
    l.to = require<int>(jl, "to", where) - 1;
    l.susceptance = require<double>(jl, "susceptance", where);
    l.rating = require<double>(jl, "rating", where);
    nc.lines.push_back(l);
  }
  for (std::size_t i = 0; i < j["generators"].size(); ++i) {
    const auto& jg = j["generators"][i];
    std::string where = "generators[" + std::to_string(i) + "]";
    Generator g;
    g.bus = require<int>(jg, "bus", where) - 1;
    g.cost = require<double>(jg, "cost", where);
    g.pmin = require<double>(jg, "pmin", where);
    g.pmax = require<double>(jg, "pmax", where);
    // Default ramp: full range in 15 minutes.
    double r0 = (g.pmax - g.pmin) / 15.0;
    g.ramp_up = jg.value("ramp_up", r0);
    g.ramp_down = jg.value("ramp_down", r0);
    nc.generators.push_back(g);
  }
  if (j.contains("load_buses")) {
    for (int b : j["load_buses"].get<std::vector<int>>()) nc.load_buses.push_back(b - 1);
  } else {
    nc.load_buses.resize(static_cast<std::size_t>(std::max(nc.buses, 0)));
    std::iota(nc.load_buses.begin(), nc.load_buses.end(), 0);
  }
  validate(nc);
  return nc;
}

inline nlohmann::json case_to_json(const NetworkCase& nc) {
  nlohmann::json j;
  j["name"] = nc.name;
  j["buses"] = nc.buses;
  j["slack"] = nc.slack + 1;
  j["lines"] = nlohmann::json::array();
  for (const Line& l : nc.lines)
    j["lines"].push_back({{"from", l.from + 1}, {"to", l.to + 1}, {"susceptance", l.susceptance},
                          {"rating", l.rating}});
  j["generators"] = nlohmann::json::array();
  for (const Generator& g : nc.generators)
    j["generators"].push_back({{"bus", g.bus + 1}, {"cost", g.cost}, {"pmin", g.pmin},
                               {"pmax", g.pmax}, {"ramp_up", g.ramp_up},
                               {"ramp_down", g.ramp_down}});
  std::vector<int> lb;
  for (int b : nc.load_buses) lb.push_back(b + 1);
  j["load_buses"] = lb;
  return j;
}

inline NetworkCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open case file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  std::string stem = path.substr(path.find_last_of("/\\") + 1);
  stem = stem.substr(0, stem.find('.'));
  return parse_case(j, stem);
}

// Nodal susceptance matrix (weighted Laplacian).
inline Mat susceptance_matrix(const NetworkCase& nc) {
  Mat B = Mat::Zero(nc.n_bus(), nc.n_bus());
  for (const Line& l : nc.lines) {
    B(l.from, l.from) += l.susceptance;
    B(l.to, l.to) += l.susceptance;
    B(l.from, l.to) -= l.susceptance;
    B(l.to, l.from) -= l.susceptance;
  }
  return B;
}

// PTDF referenced to the slack bus: invert the reduced susceptance matrix,
// then map bus angles to line flows. The slack column is zero.
inline ShiftFactorMatrix compute_shift_factors(const NetworkCase& nc) {
  const Index nb = nc.n_bus();
  const Index s = nc.slack;
  Mat B = susceptance_matrix(nc);
  std::vector<Index> keep;
  for (Index i = 0; i < nb; ++i)
    if (i != s) keep.push_back(i);
  const Index nr = static_cast<Index>(keep.size());
  Mat Br(nr, nr);
  for (Index a = 0; a < nr; ++a)
    for (Index b = 0; b < nr; ++b) Br(a, b) = B(keep[a], keep[b]);

  Mat X = Mat::Zero(nb, nb);  // angle per unit injection, slack row/col zero
  if (nr > 0) {
    Eigen::FullPivLU<Mat> lu(Br);
    if (!lu.isInvertible())
      throw SingularError("case '" + nc.name + "': reduced susceptance matrix is singular");
    Mat Xr = lu.inverse();
    for (Index a = 0; a < nr; ++a)
      for (Index b = 0; b < nr; ++b) X(keep[a], keep[b]) = Xr(a, b);
  }
  ShiftFactorMatrix sf;
  sf.H = Mat::Zero(nc.n_line(), nb);
  for (Index l = 0; l < nc.n_line(); ++l) {
    const Line& ln = nc.lines[static_cast<std::size_t>(l)];
    sf.H.row(l) = ln.susceptance * (X.row(ln.from) - X.row(ln.to));
  }
  return sf;
}

}  // namespace sprlab
