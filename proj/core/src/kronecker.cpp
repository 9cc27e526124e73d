#include "rcurv/kronecker.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rcurv {

namespace {

double inverse_factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return 1.0 / f;
}

}  // namespace

bool kronecker_materializable(int k, int dim) {
  if (k < 0 || dim < 1) return false;
  double n = 1.0;
  for (int i = 0; i < 2 * k; ++i) n *= dim;
  return n <= static_cast<double>(kKroneckerMaxEntries);
}

double kronecker_entry(std::span<const int> upper, std::span<const int> lower) {
  const std::size_t k = upper.size();
  if (lower.size() != k) throw std::invalid_argument("kronecker_entry: index lists differ in length");
  std::vector<int> perm(k, -1);
  std::vector<bool> used(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (upper[i] == upper[j]) return 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (!used[j] && lower[j] == upper[i]) {
        perm[i] = static_cast<int>(j);
        used[j] = true;
        break;
      }
    if (perm[i] < 0) return 0.0;
  }
  return detail::permutation_sign(perm) * inverse_factorial(static_cast<int>(k));
}

Tensor generalized_kronecker(int k, int dim) {
  if (k < 1) throw std::invalid_argument("generalized_kronecker: k must be positive");
  if (!kronecker_materializable(k, dim))
    throw std::length_error("generalized_kronecker: dense delta too large, use kronecker_entry");
  std::vector<Variance> var(static_cast<std::size_t>(k), Variance::Upper);
  var.resize(2 * static_cast<std::size_t>(k), Variance::Lower);
  Tensor out(dim, std::move(var));
  if (kronecker_vanishes(k, dim)) return out;
  const double w = inverse_factorial(k);
  const auto kk = static_cast<std::size_t>(k);
  // walk all increasing k-subsets, then all orderings of upper and lower
  std::vector<int> subset(kk);
  std::iota(subset.begin(), subset.end(), 0);
  std::vector<int> idx(2 * kk), up(kk), pu(kk), pl(kk);
  while (true) {
    std::iota(pu.begin(), pu.end(), 0);
    do {
      const int su = detail::permutation_sign(pu);
      std::iota(pl.begin(), pl.end(), 0);
      do {
        const int sl = detail::permutation_sign(pl);
        for (std::size_t i = 0; i < kk; ++i) {
          idx[i] = subset[static_cast<std::size_t>(pu[i])];
          idx[kk + i] = subset[static_cast<std::size_t>(pl[i])];
        }
        out.at(idx) = su * sl * w;
      } while (std::next_permutation(pl.begin(), pl.end()));
    } while (std::next_permutation(pu.begin(), pu.end()));
    int pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == dim - k + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (auto p = static_cast<std::size_t>(pos) + 1; p < kk; ++p) subset[p] = subset[p - 1] + 1;
  }
  return out;
}

namespace {

double trace_residual_at(int k, int n, std::span<const int> a, std::span<const int> b, std::vector<int>& ua,
                         std::vector<int>& ub) {
  const auto m = static_cast<std::size_t>(k - 1);
  std::copy(a.begin(), a.end(), ua.begin());
  std::copy(b.begin(), b.end(), ub.begin());
  double lhs = 0.0;
  for (int c = 0; c < n; ++c) {
    ua[m] = c;
    ub[m] = c;
    lhs += kronecker_entry(ua, ub);
  }
  const double rhs = (static_cast<double>(n - k + 1) / k) * kronecker_entry(a, b);
  return std::abs(lhs - rhs);
}

}  // namespace

KroneckerTraceCheck kronecker_trace_recursion(int k, int n, std::uint64_t exhaustive_limit, std::uint64_t samples,
                                              std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("kronecker_trace_recursion: need 2 <= k <= n");
  KroneckerTraceCheck res;
  const auto m = static_cast<std::size_t>(k - 1);
  std::vector<int> a(m), b(m), ua(m + 1), ub(m + 1);
  double total = 1.0;
  for (std::size_t i = 0; i < 2 * m; ++i) total *= n;
  auto visit = [&] {
    res.max_abs_residual = std::max(res.max_abs_residual, trace_residual_at(k, n, a, b, ua, ub));
    ++res.checked;
  };
  if (total <= static_cast<double>(exhaustive_limit)) {
    res.exhaustive = true;
    const auto count = static_cast<std::uint64_t>(total);
    for (std::uint64_t code = 0; code < count; ++code) {
      std::uint64_t rem = code;
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = static_cast<int>(rem % static_cast<std::uint64_t>(n));
        rem /= static_cast<std::uint64_t>(n);
      }
      for (std::size_t i = 0; i < m; ++i) {
        b[i] = static_cast<int>(rem % static_cast<std::uint64_t>(n));
        rem /= static_cast<std::uint64_t>(n);
      }
      visit();
    }
    return res;
  }
  // support up to relabeling: increasing upper indices, lower a permutation of them
  std::vector<int> subset(m), perm(m);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    std::copy(subset.begin(), subset.end(), a.begin());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (std::size_t i = 0; i < m; ++i) b[i] = subset[static_cast<std::size_t>(perm[i])];
      visit();
    } while (std::next_permutation(perm.begin(), perm.end()));
    int pos = static_cast<int>(m) - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - static_cast<int>(m) + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (auto p = static_cast<std::size_t>(pos) + 1; p < m; ++p) subset[p] = subset[p - 1] + 1;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::bernoulli_distribution structured(0.5);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& v : a) v = pick(rng);
    if (structured(rng)) {
      // a random reordering of a, so the sample lands on the support when a has no repeats
      b = a;
      std::shuffle(b.begin(), b.end(), rng);
    } else {
      for (auto& v : b) v = pick(rng);
    }
    visit();
  }
  return res;
}

}  // namespace rcurv
