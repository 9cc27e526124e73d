#include "rcurv/integrate.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rcurv/ambient.hpp"
#include "rcurv/contraction.hpp"
#include "rcurv/invariants.hpp"
#include "rcurv/linalg.hpp"

namespace rcurv {

namespace {

constexpr double kPi = std::numbers::pi;

struct GlTable {
  explicit GlTable(int n) : t(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n))) {
    if (!t) throw std::runtime_error("make_quadrature: Gauss-Legendre table allocation failed");
  }
  ~GlTable() { gsl_integration_glfixed_table_free(t); }
  GlTable(const GlTable&) = delete;
  GlTable& operator=(const GlTable&) = delete;
  gsl_integration_glfixed_table* t;
};

void gauss_legendre(int n, double lo, double hi, std::vector<double>& x, std::vector<double>& w) {
  GlTable table(n);
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(lo, hi, static_cast<std::size_t>(i), &x[static_cast<std::size_t>(i)],
                                  &w[static_cast<std::size_t>(i)], table.t);
}

double volume_density(const ManifoldModel& model, std::span<const double> x) {
  return std::sqrt(std::abs(determinant(model.metric_jet(x, 0).value())));
}

void require_compact(const ManifoldModel& model, const char* who) {
  if (!model.compact) throw std::invalid_argument(std::string(who) + ": model " + model.name + " is not compact");
}

double model_volume(const ManifoldModel& model, const IntegrateOptions& opts) {
  if (model.exact_volume) return *model.exact_volume;
  return quadrature_volume(model, opts.nodes_per_axis);
}

void require_einstein_even(const ManifoldModel& model, const char* who) {
  require_compact(model, who);
  if (!model.einstein_lambda) throw std::invalid_argument(std::string(who) + ": model " + model.name + " is not Einstein");
  if (model.dim % 2 != 0 || model.dim < 4 || model.dim > 8)
    throw std::invalid_argument(std::string(who) + ": need even dimension 4 <= n <= 8");
}

std::function<Jet(const Curvature&)> natural_scalar(const std::string& name) {
  if (name == "|W|^2") return [](const Curvature& g) { return squared_norm(g.weyl(), g.inverse_metric()); };
  if (name == "Pf2(W)") return [](const Curvature& g) { return pf_ell(g.weyl(), 2, g.inverse_metric()); };
  if (name == "Pf3(W)") return [](const Curvature& g) { return pf_ell(g.weyl(), 3, g.inverse_metric()); };
  if (name == "W31" || name == "W32") {
    const std::size_t i = name == "W31" ? 0 : 1;
    return [i](const Curvature& g) { return weyl_basis(g.weyl(), g.metric(), g.inverse_metric(), 3)[i]; };
  }
  throw std::invalid_argument("unknown straightenable scalar: " + name);
}

}  // namespace

std::size_t QuadratureRule::size() const {
  std::size_t n = 1;
  for (const auto& ax : nodes) n *= ax.size();
  return n;
}

void QuadratureRule::for_each(const std::function<void(std::span<const double>, double)>& f) const {
  const std::size_t d = nodes.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> u(d);
  std::shared_ptr<const JetSpace> space;
  if (map) space = JetSpace::get(static_cast<int>(d), 1);
  Tensor jac = Tensor::lower(static_cast<int>(d), 2);
  std::vector<double> x(d);
  const std::size_t total = size();
  for (std::size_t count = 0; count < total; ++count) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      u[a] = nodes[a][idx[a]];
      w *= weights[a][idx[a]];
    }
    if (map) {
      const auto xj = map(coordinate_jets(*space, u, 1));
      if (xj.size() != d) throw std::logic_error("quadrature map changes dimension");
      for (std::size_t a = 0; a < d; ++a) {
        x[a] = xj[a].value();
        for (std::size_t b = 0; b < d; ++b) {
          std::vector<std::uint8_t> alpha(d, 0);
          alpha[b] = 1;
          jac({static_cast<int>(a), static_cast<int>(b)}) = xj[a].derivative(alpha);
        }
      }
      w *= std::abs(determinant(jac));
      f(x, w);
    } else {
      f(u, w);
    }
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < nodes[a].size()) break;
      idx[a] = 0;
    }
  }
}

QuadratureRule make_quadrature(const ManifoldModel& model, int nodes_per_axis) {
  if (nodes_per_axis < 1) throw std::invalid_argument("make_quadrature: need at least one node per axis");
  const auto& box = model.quadrature_chart ? model.quadrature_chart->box : model.chart;
  if (static_cast<int>(box.size()) != model.dim) throw std::invalid_argument("make_quadrature: model has no chart box");
  QuadratureRule rule;
  rule.exactness_degree = 2 * nodes_per_axis - 1;
  if (model.quadrature_chart) rule.map = model.quadrature_chart->map;
  for (const auto& ax : box) {
    std::vector<double> x, w;
    switch (ax.kind) {
      case Axis::Kind::Interval: gauss_legendre(nodes_per_axis, ax.lo, ax.hi, x, w); break;
      case Axis::Kind::Periodic: {
        const double h = (ax.hi - ax.lo) / nodes_per_axis;
        for (int i = 0; i < nodes_per_axis; ++i) {
          x.push_back(ax.lo + (i + 0.5) * h);
          w.push_back(h);
        }
        break;
      }
      case Axis::Kind::Real: {
        gauss_legendre(nodes_per_axis, -kPi / 2.0, kPi / 2.0, x, w);
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double c = std::cos(x[i]);
          w[i] /= c * c;
          x[i] = std::tan(x[i]);
        }
        break;
      }
    }
    rule.nodes.push_back(std::move(x));
    rule.weights.push_back(std::move(w));
  }
  return rule;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

std::vector<double> integrate_scalars(const MultiPointFunction& f, std::size_t count, const ManifoldModel& model,
                                      const IntegrateOptions& opts) {
  require_compact(model, "integrate_scalars");
  auto check = [count](std::vector<double> v) {
    if (v.size() != count) throw std::logic_error("integrate_scalars: integrand returned the wrong number of values");
    return v;
  };
  if (model.homogeneous && opts.use_homogeneity) {
    auto v = check(f(model.base_point));
    const double vol = model_volume(model, opts);
    for (auto& x : v) x *= vol;
    return v;
  }
  const QuadratureRule rule = make_quadrature(model, opts.nodes_per_axis);
  std::vector<std::vector<double>> terms(count);
  for (auto& t : terms) t.reserve(rule.size());
  rule.for_each([&](std::span<const double> x, double w) {
    const auto v = check(f(x));
    const double dv = w * volume_density(model, x);
    for (std::size_t i = 0; i < count; ++i) terms[i].push_back(dv * v[i]);
  });
  std::vector<double> out;
  for (const auto& t : terms) out.push_back(pairwise_sum(t));
  return out;
}

double integrate_scalar(const PointFunction& f, const ManifoldModel& model, const IntegrateOptions& opts) {
  return integrate_scalars([&f](std::span<const double> x) { return std::vector<double>{f(x)}; }, 1, model, opts)[0];
}

double quadrature_volume(const ManifoldModel& model, int nodes_per_axis) {
  require_compact(model, "quadrature_volume");
  if (!model.factors.empty()) {
    double v = 1.0;
    for (const auto& f : model.factors) v *= quadrature_volume(f, nodes_per_axis);
    return v;
  }
  const QuadratureRule rule = make_quadrature(model, nodes_per_axis);
  std::vector<double> terms;
  terms.reserve(rule.size());
  rule.for_each([&](std::span<const double> x, double w) { terms.push_back(w * volume_density(model, x)); });
  return pairwise_sum(terms);
}

void LaurentSeries::add(int exponent, double coefficient) {
  if (exponent > truncation_ || coefficient == 0.0) return;
  terms_[exponent] += coefficient;
}

double LaurentSeries::coefficient(int exponent) const {
  const auto it = terms_.find(exponent);
  return it == terms_.end() ? 0.0 : it->second;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& o) {
  truncation_ = std::min(truncation_, o.truncation_);
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->first > truncation_ ? terms_.erase(it) : std::next(it);
  for (const auto& [e, c] : o.terms_) add(e, c);
  log_ += o.log_;
  return *this;
}

LaurentSeries& LaurentSeries::operator*=(double s) {
  for (auto& [e, c] : terms_) c *= s;
  log_ *= s;
  return *this;
}

WarpedNormalForm hyperbolic_warp(int n) {
  if (n < 2) throw std::invalid_argument("hyperbolic_warp: need n >= 2");
  WarpedNormalForm w;
  w.name = "H^" + std::to_string(n);
  w.n = n;
  w.r_max = 2.0;
  w.cross_section_volume = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  // (1 - r^2/4)^{n-1}
  const int m = n - 1;
  w.density.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    w.density[static_cast<std::size_t>(2 * j)] = binom * std::pow(-0.25, j);
    binom = binom * (m - j) / (j + 1);
  }
  return w;
}

RenormalizedVolume renormalized_volume(const WarpedNormalForm& warp) {
  if (warp.n < 2 || warp.r_max <= 0.0) throw std::invalid_argument("renormalized_volume: not a normal form");
  RenormalizedVolume out;
  double scale = 0.0;
  for (double c : warp.density) scale = std::max(scale, std::abs(c));
  double at_max = 0.0;
  for (std::size_t j = 0; j < warp.density.size(); ++j) {
    const double c = warp.density[j];
    if (c == 0.0) continue;
    const int p = static_cast<int>(j) - warp.n + 1;  // exponent after integrating r^{j-n}
    if (p == 0) {
      if (std::abs(c) > 1e-14 * scale)
        throw std::domain_error("renormalized_volume: nonzero log coefficient in " + warp.name);
      continue;
    }
    at_max += c * std::pow(warp.r_max, p) / p;
    out.expansion.add(p, -warp.cross_section_volume * c / p);
  }
  out.expansion.add(0, warp.cross_section_volume * at_max);
  out.value = out.expansion.fp();
  return out;
}

RenormalizedVolume renormalized_volume(int n) { return renormalized_volume(hyperbolic_warp(n)); }

double conformally_flat_renormalized_volume(int n) {
  if (n % 2 != 0) throw std::invalid_argument("conformally_flat_renormalized_volume: n must be even");
  const double sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
  return std::pow(2.0 * kPi, n / 2) / (sign * double_factorial(n - 1));
}

CheckReport verify_cgb(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  Stopwatch sw;
  require_compact(model, "verify_cgb");
  if (model.dim % 2 != 0) throw std::invalid_argument("verify_cgb: odd dimension");
  if (!model.euler_characteristic) throw std::invalid_argument("verify_cgb: Euler characteristic of " + model.name + " unknown");
  const double lhs = integrate_scalar(
      [&](std::span<const double> x) {
        const Curvature geo = model.curvature(x, 2);
        return pfaffian(values(geo.riemann()), values(geo.inverse_metric()));
      },
      model, opts);
  const double rhs = std::pow(2.0 * kPi, model.dim / 2) * *model.euler_characteristic;
  auto r = make_check("cgb:" + model.name, lhs, rhs, tol);
  r.wall_seconds = sw.seconds();
  return r;
}

std::vector<CheckReport> verify_gbc(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  Stopwatch sw;
  require_einstein_even(model, "verify_gbc");
  if (!model.euler_characteristic) throw std::invalid_argument("verify_gbc: Euler characteristic of " + model.name + " unknown");
  const int n = model.dim, h = n / 2;
  const double lam = *model.einstein_lambda;
  const double vol = integrate_scalar([](std::span<const double>) { return 1.0; }, model, opts);
  const double vol_term = std::pow(2.0 * lam, h) * double_factorial(n - 1) * vol;
  const double lhs = std::pow(2.0 * kPi, h) * *model.euler_characteristic;
  const AmbientChart chart = build_ambient(model);
  double amb = vol_term, ein = vol_term;
  std::ostringstream na, ne;
  na.precision(12);
  ne.precision(12);
  na << "volume_term=" << vol_term;
  ne << "volume_term=" << vol_term;
  for (int l = 2; l <= h; ++l) {
    const double c = std::pow(-2.0, l - h) * factorial(l - 1) / factorial(h - 1);
    const double ia = integrate_scalar([&](std::span<const double> x) { return p_ell_n_ambient(chart, l, x); }, model, opts);
    const double ie = integrate_scalar([&](std::span<const double> x) { return p_ell_n_einstein(model, l, x); }, model, opts);
    amb += c * ia;
    ein += c * ie;
    na << " int_P" << l << "=" << ia;
    ne << " int_P" << l << "=" << ie;
  }
  auto ra = make_check("gbc-ambient:" + model.name, lhs, amb, tol, na.str());
  auto re = make_check("gbc-einstein:" + model.name, lhs, ein, tol, ne.str());
  ra.wall_seconds = re.wall_seconds = sw.seconds();
  return {ra, re};
}

const std::vector<StraightenableScalar>& straightenable_catalog() {
  static const std::vector<StraightenableScalar> cat{{"|W|^2", 2}, {"Pf2(W)", 2}, {"Pf3(W)", 3}, {"W31", 3}, {"W32", 3}};
  return cat;
}

double main_theorem_coefficient(int n, int k) {
  if (n % 2 != 0 || k < 1 || 2 * k > n) throw std::invalid_argument("main_theorem_coefficient: need n even and 1 <= k <= n/2");
  return std::pow(2.0, k - n / 2) * factorial(k - 1) / (factorial(n / 2 - 1) * double_factorial(n - 2 * k - 1));
}

CheckReport verify_main_theorem_coefficient(const ManifoldModel& model, const std::string& invariant, double tol,
                                            const IntegrateOptions& opts) {
  Stopwatch sw;
  require_einstein_even(model, "verify_main_theorem_coefficient");
  int k = 0;
  for (const auto& s : straightenable_catalog())
    if (s.name == invariant) k = s.k;
  if (k == 0) throw std::invalid_argument("verify_main_theorem_coefficient: " + invariant + " is not in the straightenable catalog");
  const int n = model.dim, m = n / 2 - k;
  if (m < 0) throw std::invalid_argument("verify_main_theorem_coefficient: weight too negative for dimension");
  const auto scalar = natural_scalar(invariant);
  const AmbientChart chart = build_ambient(model);
  const AmbientScalarField field{invariant, -2.0 * k, 0, scalar};
  const double amb = integrate_scalar(
      [&](std::span<const double> x) { return ambient_laplacian_power(chart, field, m, chart.point(1.0, x, 0.0)); },
      model, opts);
  const double base = integrate_scalar(
      [&](std::span<const double> x) { return scalar(model.curvature(x, 2)).value(); }, model, opts);
  const double c = main_theorem_coefficient(n, k);
  std::ostringstream note;
  note.precision(12);
  note << "k=" << k << " coefficient=" << c << " int_ambient=" << amb << " int_I=" << base;
  auto r = make_check("main-theorem:" + invariant + ":" + model.name, c * amb,
                      std::pow(-2.0 * *model.einstein_lambda, m) * base, tol, note.str());
  r.wall_seconds = sw.seconds();
  return r;
}

CheckReport delta_weyl_identity(const ManifoldModel& model, std::span<const double> x, double tol) {
  Stopwatch sw;
  if (!model.einstein_lambda) throw std::invalid_argument("delta_weyl_identity: model " + model.name + " is not Einstein");
  const int n = model.dim;
  const Curvature geo = model.curvature(x, 4);
  const Tensor lap = values(geo.laplacian(geo.weyl()));
  const Tensor w = values(geo.weyl()), g = values(geo.metric()), gi = values(geo.inverse_metric());
  const std::vector<const Tensor*> ww{&w, &w};
  Tensor rhs = w * (4.0 * *model.einstein_lambda * (n - 1));
  rhs -= contract("abef,efcd->abcd", ww, g, gi);
  rhs -= contract("aecf,bedf->abcd", ww, g, gi) * 2.0;
  rhs += contract("aedf,becf->abcd", ww, g, gi) * 2.0;
  auto r = make_residual_check("delta-weyl:" + model.name, max_abs_diff(lap, rhs), std::max(max_abs(lap), max_abs(rhs)), tol);
  r.wall_seconds = sw.seconds();
  return r;
}

CheckReport ibp_weyl_gradient(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  Stopwatch sw;
  const auto v = integrate_scalars(
      [&](std::span<const double> x) {
        const Curvature geo = model.curvature(x, 4);
        const JetTensor& w = geo.weyl();
        const Tensor gi = values(geo.inverse_metric());
        const Tensor wv = values(w);
        const Tensor lap = values(geo.laplacian(w));
        const double grad = squared_norm(values(geo.covariant_derivative(w)), gi);
        const double pair = contract_scalar<double>("abcd,abcd", {&wv, &lap}, values(geo.metric()), gi);
        return std::vector<double>{grad, pair};
      },
      2, model, opts);
  auto r = make_check("ibp-nabla-weyl:" + model.name, v[0], -v[1], tol);
  r.wall_seconds = sw.seconds();
  return r;
}

CheckReport ibp_weyl_norm_gradient(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  Stopwatch sw;
  const int n = model.dim;
  const auto v = integrate_scalars(
      [&](std::span<const double> x) {
        const Curvature geo = model.curvature(x, 4);
        const Jet u = squared_norm(geo.weyl(), geo.inverse_metric());
        double grad = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            grad += geo.inverse_metric()({a, b}).value() * u.partial(a).value() * u.partial(b).value();
        return std::vector<double>{grad, u.value() * geo.laplacian(u).value()};
      },
      2, model, opts);
  auto r = make_check("ibp-gradient-norm:" + model.name, v[0], -v[1], tol);
  r.wall_seconds = sw.seconds();
  return r;
}

CheckReport divergence_integral(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  Stopwatch sw;
  const auto v = integrate_scalars(
      [&](std::span<const double> x) {
        const Curvature geo = model.curvature(x, 4);
        const double lap = geo.laplacian(squared_norm(geo.weyl(), geo.inverse_metric())).value();
        return std::vector<double>{lap, std::abs(lap)};
      },
      2, model, opts);
  auto r = make_residual_check("divergence-integral:" + model.name, v[0], v[1], tol);
  r.wall_seconds = sw.seconds();
  return r;
}

std::vector<CheckReport> verify_worked_examples(const ManifoldModel& model, double tol, const IntegrateOptions& opts) {
  require_compact(model, "verify_worked_examples");
  std::vector<CheckReport> out{ibp_weyl_gradient(model, tol, opts), ibp_weyl_norm_gradient(model, tol, opts)};
  if (model.einstein_lambda) out.push_back(delta_weyl_identity(model, model.base_point, tol));
  return out;
}

}  // namespace rcurv
