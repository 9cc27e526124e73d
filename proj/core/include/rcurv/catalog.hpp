#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcurv/geometry.hpp"

namespace rcurv {

/// One coordinate of a chart box used for quadrature and point sampling.
struct Axis {
  enum class Kind { Interval, Periodic, Real };
  Kind kind = Kind::Interval;
  double lo = 0.0;
  double hi = 1.0;
};

/// A box parametrizing the chart for quadrature: chart point = map(u), u in box.
struct QuadratureChart {
  std::vector<Axis> box;
  std::function<std::vector<Jet>(std::span<const Jet>)> map;
};

/// A named coordinate chart with its closed-form metric and known global data.
struct ManifoldModel {
  std::string name;
  int dim = 0;
  int negative_directions = 0;
  MetricFunction metric;
  std::optional<double> einstein_lambda;  // Ric = 2 lambda (n-1) g
  std::optional<int> euler_characteristic;
  std::optional<double> exact_volume;
  bool compact = true;
  bool homogeneous = false;
  std::vector<Axis> chart;
  std::vector<double> base_point;
  /// Used by quadrature instead of `chart` when set.
  std::optional<QuadratureChart> quadrature_chart;
  /// Riemannian factors when the model is a product; quadrature factorizes over them.
  std::vector<ManifoldModel> factors;

  MetricJet metric_jet(std::span<const double> x, int order) const;
  Curvature curvature(std::span<const double> x, int order) const;
  /// Uniform point in the middle 80% of each interval axis.
  std::vector<double> random_point(std::mt19937_64& rng) const;
};

/// Polar chart (theta_1..theta_{n-1}, phi) on the round sphere of given radius.
ManifoldModel sphere(int n, double radius = 1.0);
/// Riemannian product; Einstein when all factors share Ric / g.
ManifoldModel product(const std::vector<ManifoldModel>& factors);
/// Product of round two-spheres with the given radii.
ManifoldModel product_of_spheres(const std::vector<double>& radii);
/// Fubini-Study on CP^2 in the affine chart z = (x1 + i y1, x2 + i y2), Ric = 6g.
ManifoldModel cp2_fubini_study();
/// Hyperbolic space r^-2 (dr^2 + (1 - r^2/4)^2 h), h the round metric on S^{n-1}.
ManifoldModel hyperbolic_normal_form(int n);
/// Round S^n plus amplitude * sum_i c_i dX_i^2 for embedding coordinates X_i;
/// not Einstein, not conformally flat.
ManifoldModel perturbed_sphere(int n, double amplitude);
ManifoldModel flat(int n);
/// The same chart with metric c^2 g.
ManifoldModel scaled(const ManifoldModel& m, double c);

/// Names accepted by model_by_name: s<n>, s2xs2, s2^<k>, cp2, h<n>, perturbed-s<n>, flat<n>.
ManifoldModel model_by_name(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace rcurv
