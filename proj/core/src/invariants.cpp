#include "rcurv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rcurv/kronecker.hpp"

namespace rcurv {

double double_factorial(int m) {
  if (m < -1) throw std::invalid_argument("double_factorial: argument below -1");
  double r = 1.0;
  for (int i = m; i > 1; i -= 2) r *= i;
  return r;
}

double factorial(int m) {
  if (m < 0) throw std::invalid_argument("factorial: negative argument");
  double r = 1.0;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

double pf_ell_brute_force(const Tensor& mixed, int ell) {
  const int n = mixed.dim();
  if (ell < 0 || 2 * ell > n) throw std::invalid_argument("pf_ell_brute_force: need 0 <= 2 ell <= dim");
  if (ell == 0) return 1.0;
  const auto m = static_cast<std::size_t>(2 * ell);
  std::vector<int> a(m, 0), b(m), perm(m);
  double total = 0.0;
  // all tuples in [0,n)^m; repeated entries contribute zero through kronecker_entry
  std::size_t count = 1;
  for (std::size_t i = 0; i < m; ++i) count *= static_cast<std::size_t>(n);
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t rem = code;
    bool distinct = true;
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = static_cast<int>(rem % static_cast<std::size_t>(n));
      rem /= static_cast<std::size_t>(n);
      for (std::size_t j = 0; j < i && distinct; ++j) distinct = a[j] != a[i];
    }
    if (!distinct) continue;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (std::size_t i = 0; i < m; ++i) b[i] = a[static_cast<std::size_t>(perm[i])];
      const double delta = kronecker_entry(a, b);
      double prod = delta;
      for (std::size_t p = 0; p < m && prod != 0.0; p += 2) prod *= mixed({a[p], a[p + 1], b[p], b[p + 1]});
      total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return std::pow(2.0, -ell) * double_factorial(2 * ell - 1) * total;
}

double pfaffian(const Tensor& rm, const Tensor& ginv) {
  if (rm.dim() % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  return pf_ell(rm, rm.dim() / 2, ginv);
}

const std::vector<std::string>& weyl_basis_patterns(int k) {
  static const std::vector<std::string> two{"abcd,abcd"};
  static const std::vector<std::string> three{"abcd,cdef,efab", "acbd,cedf,eafb"};
  static const std::vector<std::string> four{
      "abcd,abcd,efgh,efgh", "abcd,cdef,efgh,ghab", "acde,bcde,afgh,bfgh", "abcd,cdef,ageh,bgfh",
      "abcd,cdef,aegh,bfgh", "acbd,cedf,egfh,gahb", "acbd,ecfd,ageh,bgfh"};
  switch (k) {
    case 2: return two;
    case 3: return three;
    case 4: return four;
    default: throw std::invalid_argument("weyl_basis: k must be 2, 3 or 4");
  }
}

const std::vector<double>& pfaffian_weyl_coefficients(int ell) {
  static const std::vector<double> two{1.0 / 8.0};
  static const std::vector<double> three{1.0 / 12.0, -1.0 / 6.0};
  static const std::vector<double> four{1.0 / 128.0, 1.0 / 64.0, -1.0 / 8.0, -1.0 / 4.0, 1.0 / 8.0, 1.0 / 8.0, -1.0 / 4.0};
  switch (ell) {
    case 2: return two;
    case 3: return three;
    case 4: return four;
    default: throw std::invalid_argument("pfaffian_weyl_coefficients: ell must be 2, 3 or 4");
  }
}

CheckReport low_order_pfaffian_identity(const Tensor& w, const Tensor& g, const Tensor& ginv, int ell, double tol) {
  Stopwatch sw;
  const double lhs = pf_ell(w, ell, ginv);
  const auto basis = weyl_basis(w, g, ginv, ell);
  const auto& coef = pfaffian_weyl_coefficients(ell);
  double rhs = 0.0;
  for (std::size_t i = 0; i < coef.size(); ++i) rhs += coef[i] * basis[i];
  auto r = make_check("pf" + std::to_string(ell) + "-weyl-basis", lhs, rhs, tol);
  r.wall_seconds = sw.seconds();
  return r;
}

CheckReport einstein_pfaffian_expansion(const ManifoldModel& model, std::span<const double> point, double tol) {
  Stopwatch sw;
  if (!model.einstein_lambda) throw std::invalid_argument("einstein_pfaffian_expansion: model is not Einstein");
  const int n = model.dim;
  if (n % 2 != 0 || n < 4) throw std::invalid_argument("einstein_pfaffian_expansion: dimension must be even and >= 4");
  const Curvature geo = model.curvature(point, 2);
  const Tensor rm = values(geo.riemann()), w = values(geo.weyl()), ginv = values(geo.inverse_metric());
  const double j = geo.schouten_trace().value();
  const double lhs = pfaffian(rm, ginv);
  double rhs = 0.0;
  for (int l = 0; l <= n / 2; ++l)
    rhs += double_factorial(n - 2 * l - 1) * std::pow(2.0 * j / n, n / 2 - l) * pf_ell(w, l, ginv);
  auto r = make_check("einstein-pfaffian-expansion:" + model.name, lhs, rhs, tol);
  r.wall_seconds = sw.seconds();
  return r;
}

double i_ell_shift(int n, int k, int j) {
  return 4.0 * (k + j) * (n - 2 * k - 2 * j - 1) / static_cast<double>(n);
}

double i_ell_closed_form_coefficient(int n, int k, int ell, double j) {
  if (k < 1 || ell < 0) throw std::invalid_argument("i_ell_closed_form_coefficient: need k >= 1, ell >= 0");
  if (n - 2 * k - 2 * ell - 1 < -1) throw std::invalid_argument("i_ell_closed_form_coefficient: need k + ell <= n/2");
  return std::pow(-4.0 * j / n, ell) * factorial(k + ell - 1) * double_factorial(n - 2 * k - 1) /
         (factorial(k - 1) * double_factorial(n - 2 * k - 2 * ell - 1));
}

Jet i_ell_operator(const Jet& scalar, int k, int ell, const Curvature& geo) {
  if (ell < 0) throw std::invalid_argument("i_ell_operator: negative ell");
  const int n = geo.dim();
  const Jet& jj = geo.schouten_trace();
  double drift = 0.0;
  for (std::size_t i = 1; i < jj.coeffs().size(); ++i) drift = std::max(drift, std::abs(jj.coeffs()[i]));
  if (drift > 1e-8 * (1.0 + std::abs(jj.value())))
    throw std::domain_error("i_ell_operator: J is not constant (model is not Einstein)");
  const double j = jj.value();
  Jet cur = scalar;
  for (int step = 0; step < ell; ++step) cur = geo.laplacian(cur) - cur * (i_ell_shift(n, k, step) * j);
  return cur;
}

JetTensor divergence_construction(const JetTensor& t, double weight, const Curvature& geo) {
  const std::size_t k = t.rank();
  if (k == 0) throw std::invalid_argument("divergence_construction: tensor must have rank >= 1");
  for (auto v : t.variance())
    if (v != Variance::Lower) throw std::invalid_argument("divergence_construction: tensor must be covariant");
  const double denom = weight - 2.0 * static_cast<double>(k) + 2.0;
  if (std::abs(denom) < 1e-12) throw std::invalid_argument("divergence_construction: weight equals 2k-2");
  const JetTensor dt = geo.covariant_derivative(t);
  JetTensor u = geo.trace(dt, 0, k);
  if (k >= 2) {
    const JetTensor tr = geo.trace(t, k - 2, k - 1);
    JetTensor grad = geo.covariant_derivative(tr);
    if (grad.rank() >= 2) {
      std::vector<int> all(grad.rank());
      std::iota(all.begin(), all.end(), 0);
      grad = symmetrize(grad, all);
    }
    grad *= static_cast<double>(k - 1) / denom;
    u += grad;
  }
  return u;
}

Jet double_divergence(const JetTensor& t, double weight, const Curvature& geo) {
  if (t.rank() != 2) throw std::invalid_argument("double_divergence: tensor must have rank 2");
  const JetTensor u = divergence_construction(t, weight, geo);
  return divergence_construction(u, weight - 2.0, geo)[0];
}

JetTensor weyl_square_tensor(const Curvature& geo) {
  const JetTensor& w = geo.weyl();
  return contract("acde,bcde->ab", std::vector<const JetTensor*>{&w, &w}, geo.metric(), geo.inverse_metric());
}

std::vector<JetTensor> weyl_cubic_tensors(const Curvature& geo) {
  const JetTensor& w = geo.weyl();
  const std::vector<const JetTensor*> f{&w, &w, &w};
  return {contract("acbd,cefg,defg->ab", f, geo.metric(), geo.inverse_metric()),
          contract("acde,bcfg,defg->ab", f, geo.metric(), geo.inverse_metric())};
}

Jet weyl_cotton_divergence(const Curvature& geo) {
  const JetTensor& w = geo.weyl();
  const JetTensor c = geo.cotton();
  const JetTensor v = contract("abcd,cdb->a", std::vector<const JetTensor*>{&w, &c}, geo.metric(), geo.inverse_metric());
  return geo.trace(geo.covariant_derivative(v), 0, 1)[0] * static_cast<double>(geo.dim() - 4);
}

std::vector<Jet> weight_eight_divergences(const Curvature& geo) {
  std::vector<Jet> out;
  for (const auto& t : weyl_cubic_tensors(geo)) out.push_back(double_divergence(t, -4.0, geo));
  return out;
}

Tensor project_weyl(const Tensor& t, const Tensor& g, const Tensor& ginv) {
  if (t.rank() != 4) throw std::invalid_argument("project_weyl: tensor must have rank 4");
  const int n = t.dim();
  if (n < 4) throw std::invalid_argument("project_weyl: dimension must be at least 4");
  const int s01[] = {0, 1}, s23[] = {2, 3}, all[] = {0, 1, 2, 3}, swap_pairs[] = {2, 3, 0, 1};
  Tensor a = antisymmetrize(antisymmetrize(t, s01), s23);
  Tensor s = a + permute_slots(a, swap_pairs);
  s *= 0.5;
  Tensor b = s - antisymmetrize(s, all);
  Tensor ric = Tensor::lower(n, 2);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      double acc = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) acc += ginv({p, q}) * b({p, x, q, y});
      ric({x, y}) = acc;
    }
  double sc = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) sc += ginv({x, y}) * ric({x, y});
  const double j = sc / (2.0 * (n - 1));
  Tensor p = Tensor::lower(n, 2);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) p({x, y}) = (ric({x, y}) - j * g({x, y})) / (n - 2);
  return weyl_from(b, p, g);
}

Tensor random_weyl(int dim, std::uint64_t seed) {
  if (dim < 4) throw std::invalid_argument("random_weyl: dimension must be at least 4");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t = Tensor::lower(dim, 4);
  for (auto& v : t.data()) v = normal(rng);
  Tensor g = Tensor::lower(dim, 2);
  for (int a = 0; a < dim; ++a) g({a, a}) = 1.0;
  Tensor ginv = Tensor::upper(dim, 2);
  for (int a = 0; a < dim; ++a) ginv({a, a}) = 1.0;
  return project_weyl(t, g, ginv);
}

double SymmetryResiduals::max() const {
  return std::max({antisym_first, antisym_second, pair_exchange, bianchi, trace});
}

SymmetryResiduals curvature_symmetry_residuals(const Tensor& t, const Tensor& ginv) {
  const int n = t.dim();
  SymmetryResiduals r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double v = t({a, b, c, d});
          r.antisym_first = std::max(r.antisym_first, std::abs(v + t({b, a, c, d})));
          r.antisym_second = std::max(r.antisym_second, std::abs(v + t({a, b, d, c})));
          r.pair_exchange = std::max(r.pair_exchange, std::abs(v - t({c, d, a, b})));
          r.bianchi = std::max(r.bianchi, std::abs(v + t({b, c, a, d}) + t({c, a, b, d})));
        }
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) acc += ginv({a, c}) * t({a, b, c, d});
      r.trace = std::max(r.trace, std::abs(acc));
    }
  return r;
}

}  // namespace rcurv
