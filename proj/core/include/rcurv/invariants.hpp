#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcurv/catalog.hpp"
#include "rcurv/contraction.hpp"
#include "rcurv/report.hpp"
#include "rcurv/tensor.hpp"

namespace rcurv {

/// (2k-1)!! style double factorial; odd(-1) = 1, odd(m) for m < -1 is invalid.
double double_factorial(int m);
double factorial(int m);

/// T_ab^cd from a lower rank-4 tensor.
template <typename T>
DenseTensor<T> mixed_curvature(const DenseTensor<T>& rm, const DenseTensor<T>& ginv) {
  auto t = apply_on_slot(rm, 2, ginv, Variance::Upper);
  return apply_on_slot(t, 3, ginv, Variance::Upper);
}

namespace detail {

/// Signed sum over orderings of index sets A (lower) and B (upper) taken in
/// pairs against u; memoized on the pair of bit masks.
template <typename T>
class PfaffianExpansion {
 public:
  PfaffianExpansion(const DenseTensor<T>& u) : u_(u), n_(u.dim()) {}

  T operator()(std::uint32_t a, std::uint32_t b) {
    if (a == 0) return T(1.0);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int ai[32], bi[32];
    int na = 0, nb = 0;
    for (int i = 0; i < n_; ++i) {
      if (a >> i & 1u) ai[na++] = i;
      if (b >> i & 1u) bi[nb++] = i;
    }
    const double k = na / 2;
    T acc(0.0);
    const int a0 = ai[0];
    for (int p = 1; p < na; ++p) {
      const int ap = ai[p];
      const std::uint32_t a_rest = a & ~(1u << a0) & ~(1u << ap);
      for (int q1 = 0; q1 < nb; ++q1)
        for (int q2 = q1 + 1; q2 < nb; ++q2) {
          const T& coef = u_({a0, ap, bi[q1], bi[q2]});
          if (skip_zero(coef)) continue;
          const std::uint32_t b_rest = b & ~(1u << bi[q1]) & ~(1u << bi[q2]);
          T sub = (*this)(a_rest, b_rest);
          if (skip_zero(sub)) continue;
          const double sign = ((p - 1 + q1 + q2 - 1) % 2 == 0) ? 1.0 : -1.0;
          acc += coef * sub * (sign * k);
        }
    }
    memo_.emplace(key, acc);
    return acc;
  }

 private:
  const DenseTensor<T>& u_;
  int n_;
  std::unordered_map<std::uint64_t, T> memo_;
};

}  // namespace detail

/// Pf_ell of a mixed tensor T_ab^cd, evaluated by a Laplace-style expansion
/// of the generalized delta over index subsets with memoized partial sums.
template <typename T>
T pf_ell_mixed(const DenseTensor<T>& mixed, int ell) {
  const int n = mixed.dim();
  if (mixed.rank() != 4) throw std::invalid_argument("pf_ell: tensor must have rank 4");
  if (ell < 0 || 2 * ell > n) throw std::invalid_argument("pf_ell: need 0 <= 2 ell <= dim");
  if (n > 31) throw std::invalid_argument("pf_ell: dimension too large");
  if (ell == 0) return T(1.0);
  // antisymmetrize both pairs without normalization
  DenseTensor<T> u(n, mixed.variance());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          T v = mixed({a, b, c, d});
          v -= mixed({b, a, c, d});
          v -= mixed({a, b, d, c});
          v += mixed({b, a, d, c});
          u({a, b, c, d}) = std::move(v);
        }
  detail::PfaffianExpansion<T> g(u);
  T total(0.0);
  const int m = 2 * ell;
  std::vector<int> subset(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (int s : subset) mask |= 1u << s;
    total += g(mask, mask);
    int pos = m - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (int p = pos + 1; p < m; ++p) subset[static_cast<std::size_t>(p)] = subset[static_cast<std::size_t>(p - 1)] + 1;
  }
  return total * (std::pow(2.0, -ell) * double_factorial(2 * ell - 1) / factorial(2 * ell));
}

/// Pf_ell(T) for a lower rank-4 tensor and the inverse metric.
template <typename T>
T pf_ell(const DenseTensor<T>& rm, int ell, const DenseTensor<T>& ginv) {
  return pf_ell_mixed(mixed_curvature(rm, ginv), ell);
}

/// Independent oracle: every injective index tuple times every permutation,
/// weighted by kronecker_entry. Exponential cost; intended for dim <= 6.
double pf_ell_brute_force(const Tensor& mixed, int ell);

/// Pf_{n/2}(Rm); throws for odd dimension.
double pfaffian(const Tensor& rm, const Tensor& ginv);

/// Index patterns of the complete contractions W^{k} used by weyl_basis.
const std::vector<std::string>& weyl_basis_patterns(int k);

/// {W21}, {W31, W32} or {W41..W47} for a Weyl-type tensor.
template <typename T>
std::vector<T> weyl_basis(const DenseTensor<T>& w, const DenseTensor<T>& g, const DenseTensor<T>& ginv, int k) {
  const auto& patterns = weyl_basis_patterns(k);
  std::vector<const DenseTensor<T>*> f(static_cast<std::size_t>(k), &w);
  std::vector<T> out;
  for (const auto& p : patterns) out.push_back(contract_scalar<T>(p, f, g, ginv));
  return out;
}

/// Coefficients of the Weyl basis in Pf_ell(W), ell = 2, 3, 4.
const std::vector<double>& pfaffian_weyl_coefficients(int ell);

CheckReport low_order_pfaffian_identity(const Tensor& w, const Tensor& g, const Tensor& ginv, int ell,
                                        double tol = 1e-10);

/// Pf(Rm) against sum_l (n-2l-1)!! (2J/n)^{n/2-l} Pf_l(W) at one point.
CheckReport einstein_pfaffian_expansion(const ManifoldModel& model, std::span<const double> point,
                                        double tol = 1e-9);

/// 4(k+j)(n-2k-2j-1)/n.
double i_ell_shift(int n, int k, int j);
/// (-4J/n)^l (k+l-1)! (n-2k-1)!! / ((k-1)! (n-2k-2l-1)!!).
double i_ell_closed_form_coefficient(int n, int k, int ell, double j);

/// prod_{j<l} (Delta - i_ell_shift(n,k,j) J) applied to the scalar jet I.
/// Throws std::domain_error when J is not constant to 1e-8.
Jet i_ell_operator(const Jet& scalar, int k, int ell, const Curvature& geo);

/// U = nabla^b T_{..b} + ((k-1)/(w-2k+2)) nabla_(a1 T_..)b^b for symmetric lower T.
JetTensor divergence_construction(const JetTensor& t, double weight, const Curvature& geo);

/// The rank-2 case applied twice: nabla^a nabla^b T_ab + (1/(w-2)) Delta T_b^b.
Jet double_divergence(const JetTensor& t, double weight, const Curvature& geo);

/// W_acde W_b^cde, symmetric of weight -2.
JetTensor weyl_square_tensor(const Curvature& geo);
/// W_acbd W^cefg W^d_efg and W_acde W_b^c_fg W^defg, symmetric of weight -4.
std::vector<JetTensor> weyl_cubic_tensors(const Curvature& geo);
/// (n-4) nabla^a (W_abcd C^cdb).
Jet weyl_cotton_divergence(const Curvature& geo);
/// double_divergence of the two weyl_cubic_tensors at weight -4.
std::vector<Jet> weight_eight_divergences(const Curvature& geo);

/// Projection of a lower rank-4 tensor onto algebraic Weyl tensors for the metric g:
/// pair antisymmetry, pair exchange, removal of the totally antisymmetric part, and
/// removal of the Kulkarni-Nomizu trace part, in that order.
Tensor project_weyl(const Tensor& t, const Tensor& g, const Tensor& ginv);

/// project_weyl of a Gaussian tensor for the identity metric.
Tensor random_weyl(int dim, std::uint64_t seed);

struct SymmetryResiduals {
  double antisym_first = 0.0;
  double antisym_second = 0.0;
  double pair_exchange = 0.0;
  double bianchi = 0.0;
  double trace = 0.0;
  double max() const;
};

SymmetryResiduals curvature_symmetry_residuals(const Tensor& t, const Tensor& ginv);

}  // namespace rcurv
