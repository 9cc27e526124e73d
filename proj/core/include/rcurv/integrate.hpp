#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rcurv/catalog.hpp"
#include "rcurv/report.hpp"

namespace rcurv {

/// Tensor-product rule over a model's chart box, or over its quadrature
/// chart when it has one. Interval axes use Gauss-Legendre, periodic axes
/// the trapezoid rule, real axes Gauss-Legendre after x = tan(u).
struct QuadratureRule {
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;  // include the axis map Jacobian
  /// Polynomial degree integrated exactly on interval axes.
  int exactness_degree = 0;
  /// Box to chart map; empty for the identity.
  std::function<std::vector<Jet>(std::span<const Jet>)> map;

  std::size_t size() const;
  /// Calls f(chart point, weight) for every node in a fixed order; the
  /// weight includes |det d map|.
  void for_each(const std::function<void(std::span<const double>, double)>& f) const;
};

QuadratureRule make_quadrature(const ManifoldModel& model, int nodes_per_axis);

/// Pairwise sum; the same inputs always give the same rounding.
double pairwise_sum(std::span<const double> v);

/// f evaluated at a chart point.
using PointFunction = std::function<double(std::span<const double>)>;

struct IntegrateOptions {
  int nodes_per_axis = 16;
  /// Use value-at-base-point times volume on homogeneous models.
  bool use_homogeneity = true;
};

/// Several integrands sharing one pass over the nodes.
using MultiPointFunction = std::function<std::vector<double>(std::span<const double>)>;
std::vector<double> integrate_scalars(const MultiPointFunction& f, std::size_t count, const ManifoldModel& model,
                                      const IntegrateOptions& opts = {});

/// sum_i w_i f(x_i) sqrt|det g(x_i)| over a compact model.
/// Throws std::invalid_argument for noncompact models.
double integrate_scalar(const PointFunction& f, const ManifoldModel& model, const IntegrateOptions& opts = {});

/// Riemannian volume by quadrature; products factor over their factors.
double quadrature_volume(const ManifoldModel& model, int nodes_per_axis);

/// Finite Laurent series in epsilon, plus a log(1/epsilon) coefficient.
class LaurentSeries {
 public:
  LaurentSeries() = default;
  /// Terms with exponent above `truncation` are dropped.
  explicit LaurentSeries(int truncation) : truncation_(truncation) {}

  void add(int exponent, double coefficient);
  void add_log(double coefficient) { log_ += coefficient; }
  double coefficient(int exponent) const;
  double log_coefficient() const { return log_; }
  int truncation() const { return truncation_; }
  const std::map<int, double>& terms() const { return terms_; }
  /// The epsilon^0 coefficient.
  double fp() const { return coefficient(0); }

  LaurentSeries& operator+=(const LaurentSeries& o);
  LaurentSeries& operator*=(double s);
  friend LaurentSeries operator+(LaurentSeries a, const LaurentSeries& b) { return a += b; }
  friend LaurentSeries operator*(LaurentSeries a, double s) { return a *= s; }

 private:
  std::map<int, double> terms_;
  double log_ = 0.0;
  int truncation_ = 64;
};

/// r^-2 (dr^2 + g_r) on (0, r_max) x N with sqrt(det g_r / det h) = sum_j density[j] r^j.
struct WarpedNormalForm {
  std::string name;
  int n = 0;
  std::vector<double> density;
  double r_max = 0.0;
  double cross_section_volume = 0.0;
};

/// The hyperbolic entry: g_r = (1 - r^2/4)^2 h on the unit S^{n-1}, r_max = 2.
WarpedNormalForm hyperbolic_warp(int n);

struct RenormalizedVolume {
  LaurentSeries expansion;  // Vol({r > epsilon})
  double value = 0.0;       // fp of the expansion
};

/// Exact term-by-term integration. Throws std::domain_error if a log term appears.
RenormalizedVolume renormalized_volume(const WarpedNormalForm& warp);
RenormalizedVolume renormalized_volume(int n);

/// The renormalized volume predicted by the Gauss-Bonnet formula with W = 0 and chi = 1:
/// (2 pi)^{n/2} / ((-1)^{n/2} (n-1)!!).
double conformally_flat_renormalized_volume(int n);

/// int Pf(Rm) dvol against (2 pi)^{n/2} chi.
CheckReport verify_cgb(const ManifoldModel& model, double tol = 1e-6, const IntegrateOptions& opts = {});

/// Both sides of the Einstein Gauss-Bonnet formula, with the P_{l,n} integrals taken from
/// the ambient route and from the base route. Returns {ambient, einstein}.
std::vector<CheckReport> verify_gbc(const ManifoldModel& model, double tol = 1e-6, const IntegrateOptions& opts = {});

/// Straightenable scalars usable with verify_main_theorem_coefficient.
struct StraightenableScalar {
  std::string name;
  int k = 0;  // weight -2k
};
const std::vector<StraightenableScalar>& straightenable_catalog();

/// 2^{k-n/2}(k-1)!/((n/2-1)!(n-2k-1)!!).
double main_theorem_coefficient(int n, int k);

/// c * int i*(Delta~^{n/2-k} I~) dvol against (-2 lambda)^{n/2-k} int I dvol on a compact
/// Einstein model. At lambda = -1/2 this is the theorem's identity.
CheckReport verify_main_theorem_coefficient(const ManifoldModel& model, const std::string& invariant,
                                            double tol = 1e-7, const IntegrateOptions& opts = {});

/// Integration by parts identities and, on Einstein models, the Laplacian of W:
///   int |nabla W|^2 = -int <W, Delta W>,
///   int |nabla u|^2 = -int u Delta u for u = |W|^2,
///   Delta W = 4 lambda (n-1) W - W_ab^ef W_efcd - 2 W_aecf W_b^e_d^f + 2 W_aedf W_b^e_c^f.
std::vector<CheckReport> verify_worked_examples(const ManifoldModel& model, double tol = 1e-8,
                                                const IntegrateOptions& opts = {});

/// int |nabla W|^2 against -int <W, Delta W>.
CheckReport ibp_weyl_gradient(const ManifoldModel& model, double tol = 1e-8, const IntegrateOptions& opts = {});
/// int |nabla u|^2 against -int u Delta u for u = |W|^2.
CheckReport ibp_weyl_norm_gradient(const ManifoldModel& model, double tol = 1e-8, const IntegrateOptions& opts = {});
/// int Delta |W|^2 against 0, measured relative to int |Delta |W|^2|.
CheckReport divergence_integral(const ManifoldModel& model, double tol = 1e-6, const IntegrateOptions& opts = {});

/// Pointwise residual of the Delta W formula at x.
CheckReport delta_weyl_identity(const ManifoldModel& model, std::span<const double> x, double tol = 1e-8);

}  // namespace rcurv
