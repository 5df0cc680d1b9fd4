#pragma once

// k-fold cross validation with classification and price-forecast accuracy.

#include "sprlab/error.hpp"
#include "sprlab/learn.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace sprlab {

// Shuffle 0..n-1 and cut into k contiguous folds whose sizes differ by at
// most one.
inline std::vector<std::vector<Index>> kfold_split(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold_split: k must be >= 2");
  if (k > n) throw ValidationError("kfold_split: k exceeds the number of rows");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed, 2);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
  Index pos = 0;
  for (int f = 0; f < k; ++f) {
    const Index size = n / k + (f < n % k ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  return folds;
}

inline double classification_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw ValidationError("classification_accuracy: length mismatch");
  if (pred.empty()) return 1.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

struct ForecastAccuracy {
  Vec beta_bus;
  double beta = 1.0;
  long skipped = 0;  // terms with a (near) zero true price
};

// Per point and bus: 1 - |pred - true| / |true|, clipped to [0, 1].
inline ForecastAccuracy lmp_forecast_accuracy(const Mat& pred, const Mat& truth, double zero_tol = 1e-9) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw ValidationError("lmp_forecast_accuracy: shape mismatch");
  ForecastAccuracy out;
  out.beta_bus = Vec::Ones(truth.cols());
  for (Index j = 0; j < truth.cols(); ++j) {
    double s = 0.0;
    long used = 0;
    for (Index i = 0; i < truth.rows(); ++i) {
      const double t = truth(i, j);
      if (std::abs(t) < zero_tol) {
        ++out.skipped;
        continue;
      }
      s += std::clamp(1.0 - std::abs(pred(i, j) - t) / std::abs(t), 0.0, 1.0);
      ++used;
    }
    if (used > 0) out.beta_bus(j) = s / static_cast<double>(used);
  }
  out.beta = truth.cols() > 0 ? out.beta_bus.mean() : 1.0;
  return out;
}

struct FoldResult {
  int fold = 0;
  Index n_train = 0, n_valid = 0;
  double alpha = 0.0;
  Vec beta_bus;
  double beta = 0.0;
  long skipped = 0;
  double t_train = 0.0, t_predict = 0.0, t_post = 0.0;  // seconds
};

struct FoldReport {
  std::vector<FoldResult> folds;
  double alpha_mean = 0.0, beta_mean = 0.0;
  Vec beta_bus_mean;
};

// `fit(train)` must return an OvOModel (or anything `predict` accepts).
template <class Fit>
FoldReport cross_validate(const LabeledDataset& ds, int k, std::uint64_t seed, Fit&& fit) {
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  const auto folds = kfold_split(ds.size(), k, seed);
  FoldReport rep;
  rep.beta_bus_mean = Vec::Zero(ds.lmps.cols());
  for (int f = 0; f < k; ++f) {
    std::vector<Index> train;
    for (int g = 0; g < k; ++g)
      if (g != f) train.insert(train.end(), folds[static_cast<std::size_t>(g)].begin(), folds[static_cast<std::size_t>(g)].end());
    const auto& valid = folds[static_cast<std::size_t>(f)];
    const LabeledDataset tr = ds.subset(train);
    const LabeledDataset va = ds.subset(valid);

    FoldResult fr;
    fr.fold = f + 1;
    fr.n_train = tr.size();
    fr.n_valid = va.size();
    auto t0 = clock::now();
    const auto model = fit(tr);
    auto t1 = clock::now();
    std::vector<int> pred(static_cast<std::size_t>(va.size()));
    Mat pl(va.size(), va.lmps.cols());
    for (Index i = 0; i < va.size(); ++i) {
      const Prediction p = predict(model, va.X.row(i).transpose());
      pred[static_cast<std::size_t>(i)] = p.label;
      pl.row(i) = p.lmp.transpose();
    }
    auto t2 = clock::now();
    fr.alpha = classification_accuracy(pred, va.labels);
    const ForecastAccuracy fa = lmp_forecast_accuracy(pl, va.lmps);
    fr.beta_bus = fa.beta_bus;
    fr.beta = fa.beta;
    fr.skipped = fa.skipped;
    auto t3 = clock::now();
    fr.t_train = secs(t0, t1);
    fr.t_predict = secs(t1, t2);
    fr.t_post = secs(t2, t3);
    rep.alpha_mean += fr.alpha / k;
    rep.beta_mean += fr.beta / k;
    rep.beta_bus_mean += fr.beta_bus / k;
    rep.folds.push_back(std::move(fr));
  }
  return rep;
}

}  // namespace sprlab
