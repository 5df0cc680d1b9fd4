#pragma once

#include "sprlab/sprlab.hpp"

#include <string>

#ifndef SPRLAB_DATA_DIR
#define SPRLAB_DATA_DIR "data"
#endif

namespace testing_util {

inline std::string data(const std::string& name) { return std::string(SPRLAB_DATA_DIR) + "/" + name; }

inline sprlab::NetworkCase fig1() { return sprlab::load_case(data("fig1.json")); }
inline sprlab::NetworkCase fig13() { return sprlab::load_case(data("fig13.json")); }
inline sprlab::NetworkCase fig11() { return sprlab::load_case(data("fig11.json")); }

inline sprlab::Vec v2(double a, double b) {
  sprlab::Vec v(2);
  v << a, b;
  return v;
}

inline sprlab::Vec v3(double a, double b, double c) {
  sprlab::Vec v(3);
  v << a, b, c;
  return v;
}

// Random connected network: a spanning path plus extra chords.
inline sprlab::NetworkCase random_case(sprlab::CounterRng& rng, int nb, int ng) {
  using namespace sprlab;
  NetworkCase nc;
  nc.name = "random";
  nc.buses = nb;
  nc.slack = 0;
  for (int i = 1; i < nb; ++i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    nc.lines.push_back({j, i, rng.uniform(0.5, 3.0), rng.uniform(30.0, 120.0)});
  }
  const int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(nb));
  for (int e = 0; e < extra; ++e) {
    int a = static_cast<int>(rng() % static_cast<std::uint64_t>(nb));
    int b = static_cast<int>(rng() % static_cast<std::uint64_t>(nb));
    if (a == b) continue;
    nc.lines.push_back({a, b, rng.uniform(0.5, 3.0), rng.uniform(30.0, 120.0)});
  }
  for (int g = 0; g < ng; ++g) {
    Generator gen;
    gen.bus = static_cast<int>(rng() % static_cast<std::uint64_t>(nb));
    gen.cost = 10.0 + 10.0 * g + rng.uniform(0.0, 5.0);
    gen.pmin = 0.0;
    gen.pmax = rng.uniform(80.0, 200.0);
    gen.ramp_up = gen.ramp_down = gen.pmax / 15.0;
    nc.generators.push_back(gen);
  }
  for (int b = 0; b < nb; ++b) nc.load_buses.push_back(b);
  validate(nc);
  return nc;
}

}  // namespace testing_util
