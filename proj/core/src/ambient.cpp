#include "rcurv/ambient.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rcurv/invariants.hpp"

namespace rcurv {

namespace {

int curvature_order(const Curvature& geo) {
  int order = Jet::kUnbounded;
  for (const auto& v : geo.riemann().data())
    if (!v.is_constant()) order = std::min(order, v.order());
  return order == Jet::kUnbounded ? geo.order() - 2 : order;
}

}  // namespace

AmbientChart::AmbientChart(ManifoldModel base) : base_(std::move(base)), lambda_(0.0) {
  if (!base_.einstein_lambda) throw std::invalid_argument("build_ambient: model " + base_.name + " is not Einstein");
  if (base_.negative_directions != 0) throw std::invalid_argument("build_ambient: base metric must be Riemannian");
  lambda_ = *base_.einstein_lambda;
}

JetTensor AmbientChart::metric(std::span<const Jet> coords) const {
  const int n = base_dim();
  if (static_cast<int>(coords.size()) != n + 2) throw std::invalid_argument("AmbientChart::metric: wrong coordinate count");
  const Jet& t = coords[0];
  const Jet& rho = coords[static_cast<std::size_t>(n + 1)];
  const JetTensor g = base_.metric(coords.subspan(1, static_cast<std::size_t>(n)));
  const Jet tau = t * (Jet(1.0) + rho * lambda_);
  const Jet tau2 = tau * tau;
  JetTensor out = JetTensor::lower(n + 2, 2);
  out({0, 0}) = rho * 2.0;
  out({0, n + 1}) = t;
  out({n + 1, 0}) = t;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& v = g({a, b});
      if (v.is_zero()) continue;
      out({a + 1, b + 1}) = tau2 * v;
    }
  return out;
}

MetricFunction AmbientChart::metric_function() const {
  return [self = *this](std::span<const Jet> c) { return self.metric(c); };
}

std::vector<double> AmbientChart::point(double t, std::span<const double> x, double rho) const {
  if (static_cast<int>(x.size()) != base_dim()) throw std::invalid_argument("AmbientChart::point: wrong base dimension");
  std::vector<double> p;
  p.reserve(x.size() + 2);
  p.push_back(t);
  p.insert(p.end(), x.begin(), x.end());
  p.push_back(rho);
  return p;
}

void AmbientChart::validate(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim()) throw std::invalid_argument("ambient point has wrong dimension");
  if (!(p[0] > 0.0)) throw std::domain_error("ambient point needs t > 0");
  if (std::abs(lambda_ * p.back()) > 0.25) throw std::domain_error("ambient point outside |lambda rho| <= 1/4");
}

double AmbientChart::tau(std::span<const double> p) const { return p[0] * (1.0 + lambda_ * p.back()); }

std::vector<double> AmbientChart::base_point(std::span<const double> p) const {
  return {p.begin() + 1, p.begin() + 1 + base_dim()};
}

MetricJet AmbientChart::metric_jet(std::span<const double> p, int order) const {
  validate(p);
  return evaluate_metric(metric_function(), dim(), p, order);
}

Curvature AmbientChart::curvature(std::span<const double> p, int order) const { return Curvature(metric_jet(p, order)); }

std::vector<double> AmbientChart::random_point(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> ut(0.5, 2.0);
  const double r = 1.0 / (4.0 * std::abs(lambda_) + 1.0);
  std::uniform_real_distribution<double> ur(-r, r);
  const double t = ut(rng);
  const auto x = base_.random_point(rng);
  return point(t, x, ur(rng));
}

AmbientChart build_ambient(const ManifoldModel& model) { return AmbientChart(model); }

AmbientScalarField pfaffian_field(int ell) {
  if (ell < 0) throw std::invalid_argument("pfaffian_field: negative ell");
  AmbientScalarField f;
  f.name = "Pf" + std::to_string(ell);
  f.weight = -2.0 * ell;
  f.evaluate = [ell](const Curvature& geo) -> Jet {
    if (curvature_order(geo) == 0) return Jet(pf_ell(values(geo.riemann()), ell, values(geo.inverse_metric())));
    return pf_ell(geo.riemann(), ell, geo.inverse_metric());
  };
  return f;
}

AmbientScalarField riemann_norm_field() {
  AmbientScalarField f;
  f.name = "|Rm|^2";
  f.weight = -4.0;
  f.evaluate = [](const Curvature& geo) { return squared_norm(geo.riemann(), geo.inverse_metric()); };
  return f;
}

double evaluate_ambient(const AmbientChart& chart, const AmbientScalarField& field, std::span<const double> p) {
  return ambient_laplacian_power(chart, field, 0, p);
}

Jet iterate_laplacian(const Curvature& geo, Jet f, int times) {
  for (int i = 0; i < times; ++i) f = geo.laplacian(f);
  return f;
}

double ambient_laplacian_power(const AmbientChart& chart, const AmbientScalarField& field, int times,
                               std::span<const double> p) {
  if (times < 0) throw std::invalid_argument("ambient_laplacian_power: negative power");
  const Curvature geo = chart.curvature(p, 2 * times + 2 + field.derivative_order);
  return iterate_laplacian(geo, field.evaluate(geo), times).value();
}

Tensor ambient_curvature(const AmbientChart& chart, std::span<const double> p) {
  return values(chart.curvature(p, 2).riemann());
}

AmbientRicci ambient_ricci(const AmbientChart& chart, std::span<const double> p) {
  const Curvature geo = chart.curvature(p, 2);
  return {values(geo.ricci()), geo.scalar_curvature().value()};
}

Tensor ambient_christoffels(const AmbientChart& chart, std::span<const double> p) {
  chart.validate(p);
  const int n = chart.base_dim();
  const int r = chart.rho_index();
  const double t = p[0], rho = p.back(), lam = chart.lambda();
  const double sigma = 1.0 + lam * rho;
  const double tau = t * sigma;
  const auto x = chart.base_point(p);
  const MetricJet bj = chart.base().metric_jet(x, 1);
  const Tensor g = bj.value();
  const Tensor gamma = values(christoffel(bj));
  Tensor out(n + 2, {Variance::Upper, Variance::Lower, Variance::Lower});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      out({0, a + 1, b + 1}) = -lam * tau * g({a, b});
      out({r, a + 1, b + 1}) = sigma * (lam * rho - 1.0) * g({a, b});
      for (int c = 0; c < n; ++c) out({c + 1, a + 1, b + 1}) = gamma({c, a, b});
    }
  for (int c = 0; c < n; ++c) {
    out({c + 1, 0, c + 1}) = out({c + 1, c + 1, 0}) = 1.0 / t;
    out({c + 1, r, c + 1}) = out({c + 1, c + 1, r}) = lam / sigma;
  }
  out({r, 0, r}) = out({r, r, 0}) = 1.0 / t;
  return out;
}

Tensor ambient_christoffels_from_jets(const AmbientChart& chart, std::span<const double> p) {
  return values(christoffel(chart.metric_jet(p, 1)));
}

CheckReport ambient_laplacian_homogeneous(const AmbientChart& chart, const std::function<Jet(const Curvature&)>& u,
                                          int u_derivative_order, double w, std::span<const double> p, double tol) {
  Stopwatch sw;
  const int n = chart.base_dim();
  const auto x = chart.base_point(p);
  const Curvature base = chart.base().curvature(x, 4 + u_derivative_order);
  const Jet ub = u(base).truncated(2);
  if (ub.order() < 2) throw std::invalid_argument("ambient_laplacian_homogeneous: insufficient jets of u");
  const double tau = chart.tau(p);
  const double rhs =
      std::pow(tau, w - 2.0) * (base.laplacian(ub).value() + 2.0 * chart.lambda() * w * (n + w - 1.0) * ub.value());

  const Curvature amb = chart.curvature(p, 2);
  std::vector<int> var_map(static_cast<std::size_t>(n));
  std::iota(var_map.begin(), var_map.end(), 1);
  const Jet ua = ub.is_constant() ? ub : ub.embedded(amb.space(), var_map);
  const auto& c = amb.coordinates();
  const Jet tau_jet = c[0] * (Jet(1.0) + c.back() * chart.lambda());
  const double lhs = amb.laplacian(pow(tau_jet, w) * ua).value();
  auto r = make_check("ambient-laplacian", lhs, rhs, tol);
  r.wall_seconds = sw.seconds();
  return r;
}

double p_ell_n_ambient(const AmbientChart& chart, int ell, std::span<const double> x) {
  const int n = chart.base_dim();
  if (n % 2 != 0) throw std::invalid_argument("p_ell_n_ambient: base dimension must be even");
  if (ell < 2 || 2 * ell > n) throw std::invalid_argument("p_ell_n_ambient: need 2 <= ell <= n/2");
  const int m = n / 2 - ell;
  if (m >= 3) throw std::invalid_argument("p_ell_n_ambient: more than two ambient Laplacians are not supported");
  return ambient_laplacian_power(chart, pfaffian_field(ell), m, chart.point(1.0, x, 0.0));
}

double p_ell_n_einstein(const ManifoldModel& model, int ell, std::span<const double> x) {
  if (!model.einstein_lambda) throw std::invalid_argument("p_ell_n_einstein: model " + model.name + " is not Einstein");
  const int n = model.dim;
  if (n % 2 != 0) throw std::invalid_argument("p_ell_n_einstein: dimension must be even");
  if (ell < 2 || 2 * ell > n) throw std::invalid_argument("p_ell_n_einstein: need 2 <= ell <= n/2");
  const int m = n / 2 - ell;
  const Curvature geo = model.curvature(x, 2 * m + 2);
  if (m == 0) return pf_ell(values(geo.weyl()), ell, values(geo.inverse_metric()));
  const Jet pf = pf_ell(geo.weyl(), ell, geo.inverse_metric());
  return i_ell_operator(pf, ell, m, geo).value();
}

CheckReport check_straightenable(const AmbientChart& chart, const TensorField& field, int derivative_order, double w,
                                 std::span<const double> p, double tol, const std::string& id) {
  Stopwatch sw;
  const int n = chart.base_dim();
  const auto x = chart.base_point(p);
  const Tensor base = values(field(chart.base().curvature(x, 2 + derivative_order)));
  const Tensor amb = values(field(chart.curvature(p, 2 + derivative_order)));
  if (amb.rank() != base.rank()) throw std::logic_error("check_straightenable: field rank depends on dimension");
  const double scale = std::pow(chart.tau(p), w);
  const std::size_t rank = base.rank();
  std::vector<int> idx(rank), bidx(rank);
  double residual = 0.0, size = 0.0;
  for (std::size_t off = 0; off < amb.size(); ++off) {
    amb.unravel(off, idx);
    bool base_slots = true;
    for (std::size_t s = 0; s < rank; ++s) {
      if (idx[s] == 0 || idx[s] == n + 1) base_slots = false;
      bidx[s] = idx[s] - 1;
    }
    const double expected = base_slots ? scale * base.at(bidx) : 0.0;
    residual = std::max(residual, std::abs(amb[off] - expected));
    size = std::max(size, std::abs(expected));
  }
  auto r = make_residual_check(id, residual, size, tol);
  r.wall_seconds = sw.seconds();
  return r;
}

}  // namespace rcurv
