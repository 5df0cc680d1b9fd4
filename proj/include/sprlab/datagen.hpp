#pragma once

// Monte-Carlo market data: static ratings, dynamic ratings and ramp-coupled
// sequential dispatch.

#include "sprlab/error.hpp"
#include "sprlab/grid.hpp"
#include "sprlab/learn.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/polytope.hpp"
#include "sprlab/random.hpp"
#include "sprlab/sced.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace sprlab {

enum class Mode { SLR, DLR, RAMP };
enum class Sampling { UniformBox, NormalProfile };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::SLR: return "slr";
    case Mode::DLR: return "dlr";
    case Mode::RAMP: return "ramp";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "slr") return Mode::SLR;
  if (s == "dlr") return Mode::DLR;
  if (s == "ramp") return Mode::RAMP;
  throw ValidationError("unknown mode '" + s + "' (expected slr, dlr or ramp)");
}

struct ScenarioConfig {
  Mode mode = Mode::SLR;
  Index n_samples = 1440;
  std::uint64_t seed = 1;
  double sigma_frac = 0.10;  // load std as a fraction of the profile mean
  double xi_sigma = 0.10;    // DLR rating noise
  double ramp_scale = 1.0;   // R / R0
  double dt = 5.0;           // minutes between RAMP intervals
  Sampling sampling = Sampling::UniformBox;
  std::optional<LoadBox> box;  // UniformBox; defaults to default_box-like bounds
  Mat profile;                 // NormalProfile: T x n_load means, cycled
  int max_redraws = 1000;      // per sample
  double min_feasible_rate = 0.01;

  void validate() const {
    if (!(sigma_frac >= 0.0)) throw ValidationError("scenario: sigma_frac must be >= 0");
    if (!(xi_sigma >= 0.0)) throw ValidationError("scenario: xi_sigma must be >= 0");
    if (n_samples <= 0) throw ValidationError("scenario: n_samples must be > 0");
    if (!(ramp_scale > 0.0)) throw ValidationError("scenario: ramp_scale must be > 0");
    if (!(dt > 0.0)) throw ValidationError("scenario: dt must be > 0");
  }
};

// Smooth daily shape at 5-minute resolution: each load bus sits at `base` MW
// scaled by 1 + amp * sin(2 pi t / 288 - pi/2), with a small per-bus phase
// shift so the buses are not collinear.
inline Mat synthetic_profile(Index n_load, Index steps, double base, double amp = 0.4,
                             Index steps_per_day = 288) {
  Mat P(steps, n_load);
  for (Index t = 0; t < steps; ++t)
    for (Index k = 0; k < n_load; ++k) {
      const double ph = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(steps_per_day) -
                        std::numbers::pi / 2 + 0.6 * static_cast<double>(k);
      P(t, k) = base * (1.0 + amp * std::sin(ph));
    }
  return P;
}

struct GenerationLog {
  long redraws = 0;
  long degenerate = 0;
  bool truncated = false;
  std::string warning;
};

namespace detail {

inline LoadBox box_for(const NetworkCase& nc, const ScenarioConfig& cfg) {
  if (cfg.box) {
    if (cfg.box->dim() != nc.n_load()) throw ValidationError("scenario: box dimension mismatch");
    return *cfg.box;
  }
  const double cap = std::max(1.0, nc.pmax().sum());
  return make_box(Vec::Constant(nc.n_load(), -0.5 * cap), Vec::Constant(nc.n_load(), cap));
}

struct Draw {
  Vec pd;
  double xi = 0.0;
};

// One draw for sample/step t. Streams: 11 loads, 12 ratings.
struct Sampler {
  const NetworkCase& nc;
  const ScenarioConfig& cfg;
  LoadBox box;
  CounterRng load_rng, xi_rng;

  Sampler(const NetworkCase& n, const ScenarioConfig& c)
      : nc(n), cfg(c), box(box_for(n, c)), load_rng(c.seed, 11), xi_rng(c.seed, 12) {
    if (cfg.sampling == Sampling::NormalProfile &&
        (cfg.profile.rows() == 0 || cfg.profile.cols() != nc.n_load()))
      throw ValidationError("scenario: profile must have one column per load bus");
  }

  Draw draw(Index t) {
    Draw d;
    d.pd.resize(nc.n_load());
    if (cfg.sampling == Sampling::UniformBox) {
      for (Index k = 0; k < nc.n_load(); ++k) d.pd(k) = load_rng.uniform(box.lower(k), box.upper(k));
    } else {
      const Index row = t % cfg.profile.rows();
      for (Index k = 0; k < nc.n_load(); ++k) {
        const double mu = cfg.profile(row, k);
        d.pd(k) = cfg.sigma_frac > 0 ? load_rng.normal(mu, cfg.sigma_frac * std::abs(mu)) : mu;
      }
    }
    if (cfg.mode == Mode::DLR) {
      do d.xi = xi_rng.normal(0.0, cfg.xi_sigma);
      while (d.xi <= -1.0);
    }
    return d;
  }
};

}  // namespace detail

struct GeneratedData {
  Mat loads;   // n x n_load
  Mat lmps;    // n x n_b
  std::vector<RowMeta> meta;
  GenerationLog log;
};

inline GeneratedData simulate(const NetworkCase& nc, const ScenarioConfig& cfg) {
  cfg.validate();
  const ShiftFactorMatrix sf = compute_shift_factors(nc);
  const ParametricLP base = build_sced(nc, sf);
  detail::Sampler sampler(nc, cfg);
  GeneratedData out;
  out.loads.resize(cfg.n_samples, nc.n_load());
  out.lmps.resize(cfg.n_samples, nc.n_bus());
  long attempts = 0, accepted = 0;
  std::optional<Vec> pg_prev;
  Index t = 0;
  for (; t < cfg.n_samples; ++t) {
    std::optional<DispatchSolution> sol;
    detail::Draw d;
    ParametricLP lp;
    for (int k = 0; k <= cfg.max_redraws && !sol; ++k) {
      d = sampler.draw(t);
      ++attempts;
      if (cfg.mode == Mode::DLR) {
        SCEDOverrides ov;
        ov.ratings = nc.ratings() * (1.0 + d.xi);
        lp = build_sced(nc, sf, ov);
      } else if (cfg.mode == Mode::RAMP && pg_prev) {
        NetworkCase r = nc;
        for (Generator& g : r.generators) {
          g.ramp_up *= cfg.ramp_scale;
          g.ramp_down *= cfg.ramp_scale;
        }
        lp = build_sced(apply_ramp(r, *pg_prev, cfg.dt), sf);
      } else {
        lp = base;
      }
      sol = try_solve_lp(lp, d.pd);
      if (!sol) ++out.log.redraws;
      if (attempts >= 1000 && static_cast<double>(accepted) / static_cast<double>(attempts) < cfg.min_feasible_rate)
        throw InfeasibleError("datagen: fewer than " + std::to_string(cfg.min_feasible_rate * 100) +
                              "% of draws are feasible");
    }
    if (!sol) {
      if (cfg.mode == Mode::RAMP) {
        out.log.truncated = true;
        out.log.warning = "ramp chain infeasible at step " + std::to_string(t) + "; truncated";
        break;
      }
      throw InfeasibleError("datagen: no feasible draw for sample " + std::to_string(t));
    }
    ++accepted;
    out.loads.row(t) = d.pd.transpose();
    out.lmps.row(t) = compute_lmp(*sol, sf).lambda.transpose();
    RowMeta m;
    m.scenario = to_string(cfg.mode);
    m.xi = d.xi;
    m.step = static_cast<long>(t);
    m.degenerate = sol->degenerate;
    if (sol->degenerate) ++out.log.degenerate;
    out.meta.push_back(m);
    if (cfg.mode == Mode::RAMP) pg_prev = sol->pg;
  }
  if (t < cfg.n_samples) {
    out.loads.conservativeResize(t, Eigen::NoChange);
    out.lmps.conservativeResize(t, Eigen::NoChange);
  }
  return out;
}

inline Mat sample_loads(const NetworkCase& nc, const ScenarioConfig& cfg) { return simulate(nc, cfg).loads; }

// Features are the full nodal load vector (zeros at buses without load).
inline LabeledDataset generate_dataset(const NetworkCase& nc, const ScenarioConfig& cfg,
                                       GenerationLog* log = nullptr, double group_tol = 1e-6) {
  GeneratedData g = simulate(nc, cfg);
  const Mat full = g.loads * nc.load_incidence().transpose();
  LabeledDataset ds = group_labels(full, g.lmps, group_tol);
  ds.meta = std::move(g.meta);
  if (log) *log = g.log;
  return ds;
}

}  // namespace sprlab
