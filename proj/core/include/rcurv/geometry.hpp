#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rcurv/jet.hpp"
#include "rcurv/tensor.hpp"

namespace rcurv {

/// Metric components g_ab of a chart as jets about a base point, one jet
/// variable per coordinate.
struct MetricJet {
  std::shared_ptr<const JetSpace> space;
  std::vector<double> point;
  JetTensor g;
  int order = 0;

  int dim() const { return g.dim(); }
  Tensor value() const { return values(g); }
  /// d^alpha g_ab at the base point.
  Tensor derivative(std::span<const std::uint8_t> alpha) const;
};

/// Metric components as functions of coordinate jets. Any jet space works, so
/// the same closed form serves base charts and embedded (ambient) charts.
using MetricFunction = std::function<JetTensor(std::span<const Jet> coords)>;

std::vector<Jet> coordinate_jets(const JetSpace& space, std::span<const double> point, int order);

MetricJet evaluate_metric(const MetricFunction& metric, int dim, std::span<const double> point, int order);

/// Gamma^c_ab with slot order (c, a, b).
JetTensor christoffel(const JetTensor& g, const JetTensor& ginv);

/// R_abcd, positive on round spheres: R_abcd = g_ac g_bd - g_ad g_bc there.
JetTensor riemann(const JetTensor& g, const JetTensor& gamma);

/// W_abcd = R_abcd - P_ac g_bd + P_ad g_bc + P_bc g_ad - P_bd g_ac.
template <typename T>
DenseTensor<T> weyl_from(const DenseTensor<T>& rm, const DenseTensor<T>& p, const DenseTensor<T>& g) {
  const int n = g.dim();
  DenseTensor<T> w = rm;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          T& x = w({a, b, c, d});
          x -= p({a, c}) * g({b, d});
          x += p({a, d}) * g({b, c});
          x += p({b, c}) * g({a, d});
          x -= p({b, d}) * g({a, c});
        }
  return w;
}

/// Jet-exact local Riemannian geometry at a point: inverse metric,
/// Christoffel symbols and the curvature family, plus covariant calculus on
/// jet-valued tensor fields.
///
/// Orders: with metric jets of order K, Gamma has order K-1, curvature K-2,
/// and each covariant derivative drops one more order.
class Curvature {
 public:
  explicit Curvature(MetricJet jet);

  int dim() const { return jet_.dim(); }
  int order() const { return jet_.order; }
  const MetricJet& jet() const { return jet_; }
  const JetSpace& space() const { return *jet_.space; }
  const std::vector<Jet>& coordinates() const { return coords_; }

  const JetTensor& metric() const { return jet_.g; }
  const JetTensor& inverse_metric() const { return ginv_; }
  const JetTensor& christoffel() const { return gamma_; }
  const JetTensor& riemann() const { return rm_; }
  const JetTensor& ricci() const { return ric_; }
  const Jet& scalar_curvature() const { return scal_; }
  /// Requires dim >= 3.
  const JetTensor& schouten() const;
  const Jet& schouten_trace() const;
  /// Requires dim >= 4.
  const JetTensor& weyl() const;
  /// C_abc = nabla_a P_bc - nabla_b P_ac; needs metric jets of order >= 3.
  JetTensor cotton() const;

  /// nabla T with the derivative slot first.
  JetTensor covariant_derivative(const JetTensor& t) const;
  /// g^ab nabla_a nabla_b T, slotwise with full connection terms.
  JetTensor laplacian(const JetTensor& t) const;
  Jet laplacian(const Jet& f) const;
  /// Contraction of slots s1, s2 (any variance; the metric pair is inserted as needed).
  JetTensor trace(const JetTensor& t, std::size_t s1, std::size_t s2) const;
  JetTensor raise_all(const JetTensor& t) const;

 private:
  MetricJet jet_;
  std::vector<Jet> coords_;
  JetTensor ginv_, gamma_, rm_, ric_, p_, w_;
  Jet scal_, j_;
};

/// A natural or coordinate tensor field evaluated from local geometry.
using TensorField = std::function<JetTensor(const Curvature&)>;

struct RicciData {
  JetTensor ricci;
  Jet scalar;
  JetTensor schouten;
  Jet j;
};

JetTensor christoffel(const MetricJet& jet);
JetTensor riemann(const MetricJet& jet);
RicciData ricci_scalar_schouten(const MetricJet& jet);
JetTensor weyl(const MetricJet& jet);
JetTensor cotton(const MetricJet& jet);

JetTensor covariant_derivative(const TensorField& field, const Curvature& geo);
JetTensor laplacian_field(const TensorField& field, const Curvature& geo);

/// |T|^2 with every slot contracted by the inverse metric, for lower tensors.
Jet squared_norm(const JetTensor& t, const JetTensor& ginv);
double squared_norm(const Tensor& t, const Tensor& ginv);

}  // namespace rcurv
