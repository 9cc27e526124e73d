#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace rcurv {

/// Index bookkeeping for truncated multivariate Taylor series in `nvars`
/// variables up to total degree `max_order`.
///
/// Multi-indices are stored in graded lexicographic order, so the
/// coefficients of total degree <= K always form a prefix of length
/// size(K). Truncation is therefore a resize, and every product table for a
/// lower order is a prefix of the table for a higher one.
class JetSpace {
 public:
  struct Product {
    std::uint32_t j;  // index into the right operand
    std::uint32_t k;  // index of the product monomial
  };

  JetSpace(int nvars, int max_order);

  /// Shared, cached instance. Spaces are immutable once built.
  static std::shared_ptr<const JetSpace> get(int nvars, int max_order);

  int nvars() const { return nvars_; }
  int max_order() const { return max_order_; }

  std::size_t size(int order) const { return prefix_[static_cast<std::size_t>(order)]; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exponents_.data() + idx * static_cast<std::size_t>(nvars_),
            static_cast<std::size_t>(nvars_)};
  }
  /// Index of alpha + e_var, or -1 when it exceeds max_order.
  std::int64_t raise(std::size_t idx, int var) const {
    return raise_[idx * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)];
  }
  std::size_t index_of(std::span<const std::uint8_t> alpha) const;
  /// alpha! for the multi-index at idx; converts Taylor coefficients to partials.
  double factorial(std::size_t idx) const { return factorial_[idx]; }

  /// Products of monomial i with monomials j of degree <= budget, ordered by j.
  std::span<const Product> products(std::size_t i, int budget) const;

 private:
  int nvars_;
  int max_order_;
  std::vector<std::size_t> prefix_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<std::int64_t> raise_;
  std::vector<double> factorial_;
  std::vector<Product> products_;
  // products_ offsets: for monomial i, entries [start_[i], start_[i] + count_[i][b])
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> count_;  // (max_order+1) counts per monomial
};

/// A truncated Taylor expansion f(x0 + h) = sum_alpha c_alpha h^alpha.
///
/// A Jet without a space is an exact constant of unbounded order; arithmetic
/// with it never truncates. A Jet with a space and no stored coefficients is
/// an exact zero of the recorded order.
class Jet {
 public:
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  Jet() = default;
  Jet(double constant);  // NOLINT(google-explicit-constructor): scalar promotion

  /// The coordinate function x_var expanded about `at`.
  static Jet variable(const JetSpace& space, int var, double at, int order);
  static Jet constant(const JetSpace& space, double value, int order);
  static Jet zero(const JetSpace& space, int order);

  const JetSpace* space() const { return space_; }
  int order() const { return space_ ? order_ : kUnbounded; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return space_ == nullptr; }

  double value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }
  double coeff(std::size_t idx) const { return idx < coeffs_.size() ? coeffs_[idx] : 0.0; }
  std::span<const double> coeffs() const { return coeffs_; }
  /// Partial derivative d^alpha f at the base point.
  double derivative(std::span<const std::uint8_t> alpha) const;

  Jet partial(int var) const;
  Jet truncated(int order) const;
  /// The same function viewed in a larger space: variable v becomes var_map[v].
  Jet embedded(const JetSpace& target, std::span<const int> var_map) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator*=(double s);
  Jet& operator/=(const Jet& other);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

  /// sum_k taylor[k] (f - f(x0))^k, the composition g(f) given g's Taylor
  /// coefficients at f(x0).
  Jet compose(std::span<const double> taylor) const;

  /// Largest coefficient magnitude; used in tolerance checks on jets.
  double max_abs() const;

 private:
  Jet(const JetSpace* space, int order, std::vector<double> coeffs)
      : space_(space), order_(order), coeffs_(std::move(coeffs)) {}
  void normalize();

  const JetSpace* space_ = nullptr;
  int order_ = kUnbounded;
  std::vector<double> coeffs_;
};

Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double p);
Jet inverse(const Jet& x);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace rcurv
