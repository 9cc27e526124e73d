#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rcurv/tensor.hpp"

namespace rcurv::test {

inline constexpr double kPi = std::numbers::pi;

inline Tensor random_tensor(int dim, std::vector<Variance> var, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Tensor t(dim, std::move(var));
  for (auto& v : t.data()) v = nd(rng);
  return t;
}

/// A + A^T + dim * I for a Gaussian A.
inline Tensor random_spd(int dim, std::mt19937_64& rng) {
  Tensor a = random_tensor(dim, {Variance::Lower, Variance::Lower}, rng);
  Tensor s(dim, {Variance::Lower, Variance::Lower});
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s({i, j}) = a({i, j}) + a({j, i}) + (i == j ? 2.0 * dim : 0.0);
  return s;
}

inline Tensor identity_metric(int dim, Variance v = Variance::Lower) {
  Tensor g(dim, {v, v});
  for (int i = 0; i < dim; ++i) g({i, i}) = 1.0;
  return g;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace rcurv::test
