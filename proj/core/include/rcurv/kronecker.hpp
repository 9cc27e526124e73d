#pragma once

#include <cstdint>
#include <span>

#include "rcurv/tensor.hpp"

namespace rcurv {

/// Largest dense delta we agree to build (components).
inline constexpr std::size_t kKroneckerMaxEntries = std::size_t{1} << 22;

/// True when the delta of order k in dimension dim vanishes identically.
constexpr bool kronecker_vanishes(int k, int dim) { return k > dim; }

/// True when generalized_kronecker(k, dim) fits under kKroneckerMaxEntries.
bool kronecker_materializable(int k, int dim);

/// Single component delta^{a1..ak}_{b1..bk}: sgn(sigma)/k! when b is the
/// permutation sigma of a with a free of repeats, zero otherwise.
double kronecker_entry(std::span<const int> upper, std::span<const int> lower);

/// The rank-2k tensor delta^{a1..ak}_{b1..bk} (k upper slots then k lower).
/// Returns the zero tensor when k > dim. Throws std::length_error when the
/// dense array would exceed kKroneckerMaxEntries; use kronecker_entry then.
Tensor generalized_kronecker(int k, int dim);

struct KroneckerTraceCheck {
  double max_abs_residual = 0.0;
  std::uint64_t checked = 0;
  bool exhaustive = false;
};

/// Residual of delta_k traced on its last pair against ((n-k+1)/k) delta_{k-1}.
///
/// Every index configuration is visited when n^(2(k-1)) <= exhaustive_limit.
/// Otherwise all configurations whose upper indices are increasing and whose
/// lower indices permute them are visited (the support up to relabeling), plus
/// `samples` uniformly random configurations drawn from `seed`.
KroneckerTraceCheck kronecker_trace_recursion(int k, int n, std::uint64_t exhaustive_limit = 2'000'000,
                                              std::uint64_t samples = 20'000, std::uint64_t seed = 1);

}  // namespace rcurv
