#include "rcurv/catalog.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <stdexcept>

namespace rcurv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPole = 1e-6;

std::vector<Axis> sphere_axes(int n) {
  std::vector<Axis> axes(static_cast<std::size_t>(n - 1), Axis{Axis::Kind::Interval, kPole, kPi - kPole});
  axes.push_back({Axis::Kind::Periodic, 0.0, 2.0 * kPi});
  return axes;
}

std::vector<double> sphere_point(int n) {
  std::vector<double> p;
  for (int i = 0; i < n - 1; ++i) p.push_back(0.9 + 0.13 * i);
  p.push_back(0.7);
  return p;
}

double sphere_volume(int n, double r) {
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) * std::pow(r, n);
}

/// Round metric of radius r in polar coordinates on the first n entries of x.
void round_block(JetTensor& g, std::span<const Jet> x, int n, int offset, const Jet& scale) {
  Jet warp = scale;
  for (int k = 0; k < n; ++k) {
    g({offset + k, offset + k}) = warp;
    if (k + 1 < n) {
      const Jet s = sin(x[static_cast<std::size_t>(k)]);
      warp = warp * s * s;
    }
  }
}

int sphere_chi(int n) { return n % 2 == 0 ? 2 : 0; }

}  // namespace

MetricJet ManifoldModel::metric_jet(std::span<const double> x, int order) const {
  return evaluate_metric(metric, dim, x, order);
}

Curvature ManifoldModel::curvature(std::span<const double> x, int order) const {
  return Curvature(metric_jet(x, order));
}

std::vector<double> ManifoldModel::random_point(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p;
  p.reserve(chart.size());
  for (const auto& ax : chart) {
    switch (ax.kind) {
      case Axis::Kind::Interval: p.push_back(ax.lo + (0.1 + 0.8 * u(rng)) * (ax.hi - ax.lo)); break;
      case Axis::Kind::Periodic: p.push_back(ax.lo + u(rng) * (ax.hi - ax.lo)); break;
      case Axis::Kind::Real: p.push_back(-1.0 + 2.0 * u(rng)); break;
    }
  }
  return p;
}

ManifoldModel sphere(int n, double radius) {
  if (n < 2) throw std::invalid_argument("sphere: dimension must be at least 2");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  ManifoldModel m;
  m.name = "S^" + std::to_string(n);
  if (radius != 1.0) m.name += "(r=" + std::to_string(radius) + ")";
  m.dim = n;
  m.metric = [n, radius](std::span<const Jet> x) {
    JetTensor g = JetTensor::lower(n, 2);
    round_block(g, x, n, 0, Jet(radius * radius));
    return g;
  };
  m.einstein_lambda = 1.0 / (2.0 * radius * radius);
  m.euler_characteristic = sphere_chi(n);
  m.exact_volume = sphere_volume(n, radius);
  m.homogeneous = true;
  m.chart = sphere_axes(n);
  m.base_point = sphere_point(n);
  return m;
}

ManifoldModel product(const std::vector<ManifoldModel>& factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  ManifoldModel m;
  std::vector<int> offsets;
  std::vector<MetricFunction> metrics;
  std::vector<int> dims;
  int n = 0;
  bool einstein = true;
  double ric = 0.0;
  int chi = 1;
  bool chi_known = true;
  double vol = 1.0;
  bool vol_known = true;
  m.compact = true;
  m.homogeneous = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.negative_directions != 0) throw std::invalid_argument("product: factors must be Riemannian");
    m.name += (i ? "x" : "") + f.name;
    offsets.push_back(n);
    dims.push_back(f.dim);
    metrics.push_back(f.metric);
    n += f.dim;
    if (f.einstein_lambda && f.dim >= 2) {
      const double r = 2.0 * *f.einstein_lambda * (f.dim - 1);
      if (i == 0) ric = r;
      else if (std::abs(r - ric) > 1e-14 * (1.0 + std::abs(ric))) einstein = false;
    } else {
      einstein = false;
    }
    if (f.euler_characteristic) chi *= *f.euler_characteristic;
    else chi_known = false;
    if (f.exact_volume) vol *= *f.exact_volume;
    else vol_known = false;
    m.compact = m.compact && f.compact;
    m.homogeneous = m.homogeneous && f.homogeneous;
    m.chart.insert(m.chart.end(), f.chart.begin(), f.chart.end());
    m.base_point.insert(m.base_point.end(), f.base_point.begin(), f.base_point.end());
  }
  m.dim = n;
  m.metric = [n, offsets, dims, metrics](std::span<const Jet> x) {
    JetTensor g = JetTensor::lower(n, 2);
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      const JetTensor gi = metrics[i](x.subspan(static_cast<std::size_t>(offsets[i]), static_cast<std::size_t>(dims[i])));
      for (int a = 0; a < dims[i]; ++a)
        for (int b = 0; b < dims[i]; ++b) g({offsets[i] + a, offsets[i] + b}) = gi({a, b});
    }
    return g;
  };
  bool reparam = false;
  for (const auto& f : factors) reparam = reparam || f.quadrature_chart.has_value();
  if (reparam) {
    QuadratureChart q;
    std::vector<std::function<std::vector<Jet>(std::span<const Jet>)>> maps;
    for (const auto& f : factors) {
      const auto& box = f.quadrature_chart ? f.quadrature_chart->box : f.chart;
      q.box.insert(q.box.end(), box.begin(), box.end());
      if (f.quadrature_chart) maps.push_back(f.quadrature_chart->map);
      else maps.push_back([](std::span<const Jet> u) { return std::vector<Jet>(u.begin(), u.end()); });
    }
    q.map = [offsets, dims, maps](std::span<const Jet> u) {
      std::vector<Jet> x;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const auto xi = maps[i](u.subspan(static_cast<std::size_t>(offsets[i]), static_cast<std::size_t>(dims[i])));
        x.insert(x.end(), xi.begin(), xi.end());
      }
      return x;
    };
    m.quadrature_chart = std::move(q);
  }
  if (einstein) m.einstein_lambda = ric / (2.0 * (n - 1));
  if (chi_known) m.euler_characteristic = chi;
  if (vol_known) m.exact_volume = vol;
  m.factors = factors;
  return m;
}

ManifoldModel product_of_spheres(const std::vector<double>& radii) {
  std::vector<ManifoldModel> f;
  for (double r : radii) f.push_back(sphere(2, r));
  ManifoldModel m = product(f);
  bool unit = true;
  for (double r : radii) unit = unit && r == 1.0;
  if (unit) m.name = radii.size() == 2 ? "S^2xS^2" : "(S^2)^" + std::to_string(radii.size());
  return m;
}

ManifoldModel cp2_fubini_study() {
  ManifoldModel m;
  m.name = "CP^2";
  m.dim = 4;
  m.metric = [](std::span<const Jet> x) {
    // x = (x1, y1, x2, y2)
    Jet s(0.0);
    for (const auto& v : x) s += v * v;
    const Jet q = Jet(1.0) + s;
    const Jet inv_q2 = inverse(q * q);
    JetTensor g = JetTensor::lower(4, 2);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const Jet& xj = x[static_cast<std::size_t>(2 * j)];
        const Jet& yj = x[static_cast<std::size_t>(2 * j + 1)];
        const Jet& xk = x[static_cast<std::size_t>(2 * k)];
        const Jet& yk = x[static_cast<std::size_t>(2 * k + 1)];
        Jet re = -(xj * xk + yj * yk);
        if (j == k) re += q;
        re = re * inv_q2;
        const Jet im = -(xj * yk - yj * xk) * inv_q2;
        g({2 * j, 2 * k}) = re;
        g({2 * j + 1, 2 * k + 1}) = re;
        g({2 * j, 2 * k + 1}) = im;
        g({2 * k + 1, 2 * j}) = im;
      }
    return g;
  };
  m.einstein_lambda = 1.0;
  m.euler_characteristic = 3;
  m.exact_volume = kPi * kPi / 2.0;
  m.homogeneous = true;
  m.chart.assign(4, Axis{Axis::Kind::Real, -1.0, 1.0});
  m.base_point = {0.3, -0.2, 0.5, 0.1};
  // |z| = tan(psi), (|z1|, |z2|) = |z| (cos chi, sin chi); the volume density is analytic on the box
  QuadratureChart q;
  q.box = {{Axis::Kind::Interval, 0.0, kPi / 2.0},
           {Axis::Kind::Interval, 0.0, kPi / 2.0},
           {Axis::Kind::Periodic, 0.0, 2.0 * kPi},
           {Axis::Kind::Periodic, 0.0, 2.0 * kPi}};
  q.map = [](std::span<const Jet> u) {
    const Jet r = sin(u[0]) / cos(u[0]);
    const Jet r1 = r * cos(u[1]), r2 = r * sin(u[1]);
    return std::vector<Jet>{r1 * cos(u[2]), r1 * sin(u[2]), r2 * cos(u[3]), r2 * sin(u[3])};
  };
  m.quadrature_chart = std::move(q);
  return m;
}

ManifoldModel hyperbolic_normal_form(int n) {
  if (n < 2) throw std::invalid_argument("hyperbolic_normal_form: dimension must be at least 2");
  ManifoldModel m;
  m.name = "H^" + std::to_string(n);
  m.dim = n;
  m.metric = [n](std::span<const Jet> x) {
    JetTensor g = JetTensor::lower(n, 2);
    const Jet& r = x[0];
    const Jet inv_r2 = inverse(r * r);
    const Jet w = Jet(1.0) - r * r * 0.25;
    g({0, 0}) = inv_r2;
    JetTensor h = JetTensor::lower(n - 1, 2);
    round_block(h, x.subspan(1), n - 1, 0, inv_r2 * w * w);
    for (int a = 0; a < n - 1; ++a) g({a + 1, a + 1}) = h({a, a});
    return g;
  };
  m.einstein_lambda = -0.5;
  m.compact = false;
  m.homogeneous = true;
  m.chart.push_back({Axis::Kind::Interval, 0.0, 2.0});
  if (n >= 2) {
    auto ang = n - 1 >= 2 ? sphere_axes(n - 1) : std::vector<Axis>{{Axis::Kind::Periodic, 0.0, 2.0 * kPi}};
    m.chart.insert(m.chart.end(), ang.begin(), ang.end());
  }
  m.base_point = {0.8};
  for (int i = 0; i < n - 2; ++i) m.base_point.push_back(1.1 + 0.1 * i);
  m.base_point.push_back(0.4);
  return m;
}

ManifoldModel perturbed_sphere(int n, double amplitude) {
  if (n < 3) throw std::invalid_argument("perturbed_sphere: dimension must be at least 3");
  ManifoldModel m;
  m.name = "perturbed-S^" + std::to_string(n);
  m.dim = n;
  // factor codes per coordinate: 0 -> 1, 1 -> sin, 2 -> cos
  auto codes = [n](int k) {
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    if (k < n) {
      for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(j)] = 1;
      c[static_cast<std::size_t>(k)] = 2;
    } else {
      for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(j)] = 1;
    }
    return c;
  };
  const std::vector<std::pair<int, double>> terms{{0, 1.0}, {1, 0.5}, {2, -0.3}, {n, 0.2}};
  std::vector<std::vector<int>> term_codes;
  std::vector<double> weights;
  for (auto [k, c] : terms) {
    term_codes.push_back(codes(k));
    weights.push_back(c);
  }
  m.metric = [n, amplitude, term_codes, weights](std::span<const Jet> x) {
    JetTensor g = JetTensor::lower(n, 2);
    round_block(g, x, n, 0, Jet(1.0));
    std::vector<Jet> s(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      s[static_cast<std::size_t>(j)] = sin(x[static_cast<std::size_t>(j)]);
      c[static_cast<std::size_t>(j)] = cos(x[static_cast<std::size_t>(j)]);
    }
    auto factor = [&](int code, int j, bool diff) -> Jet {
      const auto u = static_cast<std::size_t>(j);
      if (!diff) return code == 0 ? Jet(1.0) : code == 1 ? s[u] : c[u];
      return code == 0 ? Jet(0.0) : code == 1 ? c[u] : -s[u];
    };
    for (std::size_t t = 0; t < term_codes.size(); ++t) {
      std::vector<Jet> dx(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) {
        Jet prod(1.0);
        for (int j = 0; j < n && !prod.is_zero(); ++j) prod = prod * factor(term_codes[t][static_cast<std::size_t>(j)], j, j == a);
        dx[static_cast<std::size_t>(a)] = prod;
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const Jet& p = dx[static_cast<std::size_t>(a)];
          const Jet& q = dx[static_cast<std::size_t>(b)];
          if (p.is_zero() || q.is_zero()) continue;
          g({a, b}) += p * q * (amplitude * weights[t]);
        }
    }
    return g;
  };
  m.euler_characteristic = sphere_chi(n);
  m.chart = sphere_axes(n);
  m.base_point = sphere_point(n);
  return m;
}

ManifoldModel flat(int n) {
  ManifoldModel m;
  m.name = "R^" + std::to_string(n);
  m.dim = n;
  m.metric = [n](std::span<const Jet>) {
    JetTensor g = JetTensor::lower(n, 2);
    for (int a = 0; a < n; ++a) g({a, a}) = Jet(1.0);
    return g;
  };
  m.einstein_lambda = 0.0;
  m.compact = false;
  m.homogeneous = true;
  m.chart.assign(static_cast<std::size_t>(n), Axis{Axis::Kind::Real, -1.0, 1.0});
  m.base_point.assign(static_cast<std::size_t>(n), 0.25);
  return m;
}

ManifoldModel scaled(const ManifoldModel& src, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  ManifoldModel m = src;
  m.name = src.name + "*" + std::to_string(c);
  const double c2 = c * c;
  m.metric = [inner = src.metric, c2](std::span<const Jet> x) {
    JetTensor g = inner(x);
    g *= c2;
    return g;
  };
  if (src.einstein_lambda) m.einstein_lambda = *src.einstein_lambda / c2;
  if (src.exact_volume) m.exact_volume = *src.exact_volume * std::pow(c, src.dim);
  m.factors.clear();
  for (const auto& f : src.factors) m.factors.push_back(scaled(f, c));
  return m;
}

ManifoldModel model_by_name(const std::string& name) {
  std::smatch mt;
  if (name == "s2xs2") return product_of_spheres({1.0, 1.0});
  if (name == "cp2") return cp2_fubini_study();
  if (std::regex_match(name, mt, std::regex(R"(s(\d+))"))) return sphere(std::stoi(mt[1]));
  if (std::regex_match(name, mt, std::regex(R"(\(?s2\)?\^(\d+))"))) {
    const int k = std::stoi(mt[1]);
    if (k < 1 || k > 6) throw std::invalid_argument("model_by_name: unsupported power " + name);
    return product_of_spheres(std::vector<double>(static_cast<std::size_t>(k), 1.0));
  }
  if (std::regex_match(name, mt, std::regex(R"(h(\d+))"))) return hyperbolic_normal_form(std::stoi(mt[1]));
  if (std::regex_match(name, mt, std::regex(R"(perturbed-s(\d+))"))) return perturbed_sphere(std::stoi(mt[1]), 0.2);
  if (std::regex_match(name, mt, std::regex(R"(flat(\d+))"))) return flat(std::stoi(mt[1]));
  throw std::invalid_argument("unknown manifold: " + name);
}

std::vector<std::string> catalog_names() {
  return {"s4", "s6", "s8", "s2xs2", "s2^3", "s2^4", "cp2", "h4", "h6", "perturbed-s4", "perturbed-s5",
          "perturbed-s6", "flat4"};
}

}  // namespace rcurv
