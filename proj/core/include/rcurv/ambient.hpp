#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcurv/catalog.hpp"
#include "rcurv/geometry.hpp"
#include "rcurv/report.hpp"

namespace rcurv {

/// The straight and normal ambient space of an Einstein model,
///   g~ = 2 rho dt^2 + 2 t dt drho + tau^2 g,   tau = t (1 + lambda rho),
/// in coordinates (t, x^1..x^n, rho). Ambient points are flat vectors in that order.
class AmbientChart {
 public:
  explicit AmbientChart(ManifoldModel base);

  const ManifoldModel& base() const { return base_; }
  double lambda() const { return lambda_; }
  int base_dim() const { return base_.dim; }
  int dim() const { return base_.dim + 2; }
  static constexpr int t_index() { return 0; }
  int rho_index() const { return base_.dim + 1; }

  /// Metric components as functions of ambient coordinate jets.
  JetTensor metric(std::span<const Jet> coords) const;
  MetricFunction metric_function() const;

  std::vector<double> point(double t, std::span<const double> x, double rho) const;
  /// Throws std::domain_error unless t > 0 and |lambda rho| <= 1/4.
  void validate(std::span<const double> p) const;
  double tau(std::span<const double> p) const;
  std::vector<double> base_point(std::span<const double> p) const;

  MetricJet metric_jet(std::span<const double> p, int order) const;
  Curvature curvature(std::span<const double> p, int order) const;

  /// t in [1/2, 2], |rho| <= 1/(4|lambda| + 1), x from the base model.
  std::vector<double> random_point(std::mt19937_64& rng) const;

 private:
  ManifoldModel base_;
  double lambda_;
};

/// Throws std::invalid_argument when the model carries no Einstein constant.
AmbientChart build_ambient(const ManifoldModel& model);

/// A scalar built from ambient (or base) curvature jets, with its dilation weight.
struct AmbientScalarField {
  std::string name;
  double weight = 0.0;
  /// Covariant derivatives of curvature used by `evaluate`.
  int derivative_order = 0;
  std::function<Jet(const Curvature&)> evaluate;
};

/// Pf_ell of the curvature of whichever metric it is evaluated on; weight -2 ell.
AmbientScalarField pfaffian_field(int ell);
/// |Rm|^2; weight -4.
AmbientScalarField riemann_norm_field();

/// Value of the field at an ambient point.
double evaluate_ambient(const AmbientChart& chart, const AmbientScalarField& field, std::span<const double> p);

/// Laplacian iterates of a scalar jet; each application drops two jet orders.
Jet iterate_laplacian(const Curvature& geo, Jet f, int times);

/// Delta~^times of the field at an ambient point, from ambient jets.
double ambient_laplacian_power(const AmbientChart& chart, const AmbientScalarField& field, int times,
                               std::span<const double> p);

/// Riemann tensor R~_IJKL at an ambient point.
Tensor ambient_curvature(const AmbientChart& chart, std::span<const double> p);
/// Ricci tensor and scalar of the ambient metric at a point.
struct AmbientRicci {
  Tensor ricci;
  double scalar = 0.0;
};
AmbientRicci ambient_ricci(const AmbientChart& chart, std::span<const double> p);

/// Christoffel symbols (slot order c, a, b) from the closed-form block formulas.
Tensor ambient_christoffels(const AmbientChart& chart, std::span<const double> p);
/// The same symbols computed from metric jets.
Tensor ambient_christoffels_from_jets(const AmbientChart& chart, std::span<const double> p);

/// Delta~(tau^w pi*u) against tau^(w-2) pi*((Delta + 2 lambda w (n+w-1)) u) at p.
/// u is a scalar of base geometry whose jets reach order 2 when the base
/// metric has order 2 + u_derivative_order.
CheckReport ambient_laplacian_homogeneous(const AmbientChart& chart, const std::function<Jet(const Curvature&)>& u,
                                          int u_derivative_order, double w, std::span<const double> p,
                                          double tol = 1e-8);

/// i*(Delta~^(n/2-ell) Pf_ell(R~m)) at the base point x, computed on the ambient space.
double p_ell_n_ambient(const AmbientChart& chart, int ell, std::span<const double> x);
/// I_{n/2-ell} applied to Pf_ell(W) on the base metric at x.
double p_ell_n_einstein(const ManifoldModel& model, int ell, std::span<const double> x);

/// Compare a natural tensor evaluated on the ambient metric with tau^w pi*T, where T is
/// the same tensor on the base. Components with a t or rho slot must vanish.
/// The residual is measured against max|tau^w T|.
CheckReport check_straightenable(const AmbientChart& chart, const TensorField& field, int derivative_order,
                                 double w, std::span<const double> p, double tol = 1e-9,
                                 const std::string& id = "straightenable");

}  // namespace rcurv
