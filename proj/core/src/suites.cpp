#include "rcurv/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rcurv/ambient.hpp"
#include "rcurv/integrate.hpp"
#include "rcurv/invariants.hpp"
#include "rcurv/kronecker.hpp"

namespace rcurv {

namespace {

constexpr double kPi = std::numbers::pi;

enum class Need { None, Any, Compact, Einstein, CompactEinsteinEven };

struct SuiteDef {
  SuiteInfo info;
  Need need = Need::None;
  std::vector<std::string> default_manifolds;
  std::function<std::vector<CheckReport>(const SuiteOptions&, double tol, const std::vector<ManifoldModel>&)> run;
};

Jet weyl_norm(const Curvature& geo) { return squared_norm(geo.weyl(), geo.inverse_metric()); }

std::string dim_tag(int n) { return "n" + std::to_string(n); }

Tensor identity_metric(int n, Variance v) {
  Tensor g(n, {v, v});
  for (int i = 0; i < n; ++i) g({i, i}) = 1.0;
  return g;
}

int samples_or(const SuiteOptions& o, int d) { return o.samples.value_or(d); }

CheckReport timed(CheckReport r, const Stopwatch& sw) {
  r.wall_seconds = sw.seconds();
  return r;
}

std::vector<CheckReport> run_kronecker(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>&) {
  std::vector<CheckReport> out;
  for (int n = 2; n <= 8; ++n) {
    if (o.dim && *o.dim != n) continue;
    for (int k = 2; k <= n; ++k) {
      Stopwatch sw;
      const auto c = kronecker_trace_recursion(k, n, 2'000'000, 20'000, o.seed);
      auto r = make_residual_check("kronecker:k" + std::to_string(k) + ":" + dim_tag(n), c.max_abs_residual, 0.0, tol,
                                   "configurations=" + std::to_string(c.checked) +
                                       (c.exhaustive ? " exhaustive" : " support+sampled"));
      out.push_back(timed(std::move(r), sw));
    }
  }
  return out;
}

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

std::vector<CheckReport> run_pfaffian(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>&) {
  std::vector<int> dims{4, 5, 6, 8};
  if (o.dim) dims = {*o.dim};
  const int samples = samples_or(o, 100);
  std::vector<CheckReport> out;
  for (int n : dims) {
    const Tensor g = identity_metric(n, Variance::Lower), gi = identity_metric(n, Variance::Upper);
    for (int i = 0; i < samples; ++i) {
      Stopwatch sw;
      const std::uint64_t seed = o.seed * 1'000'003ULL + static_cast<std::uint64_t>(n) * 10'007ULL + i;
      const Tensor w = random_weyl(n, seed);
      double worst = -1.0, lhs = 0.0, rhs = 0.0;
      std::string which;
      const Tensor mixed = n <= 6 ? mixed_curvature(w, gi) : Tensor{};
      for (int l = 2; l <= 4 && 2 * l <= n; ++l) {
        const auto basis = low_order_pfaffian_identity(w, g, gi, l, tol);
        if (rel_gap(basis.lhs, basis.rhs) > worst) {
          worst = rel_gap(basis.lhs, basis.rhs);
          lhs = basis.lhs, rhs = basis.rhs, which = "pf" + std::to_string(l) + "-basis";
        }
        if (n <= 6) {
          const double brute = pf_ell_brute_force(mixed, l);
          if (rel_gap(basis.lhs, brute) > worst) {
            worst = rel_gap(basis.lhs, brute);
            lhs = basis.lhs, rhs = brute, which = "pf" + std::to_string(l) + "-brute-force";
          }
        }
      }
      auto r = make_check("pfaffian-identities:" + dim_tag(n) + ":sample" + std::to_string(i), lhs, rhs, tol,
                          "seed=" + std::to_string(seed) + " worst=" + which);
      // relative residual is the criterion here, whatever the magnitude
      r.pass = r.rel_err <= tol;
      r.criterion = r.pass ? "rel" : "none";
      out.push_back(timed(std::move(r), sw));
    }
  }
  return out;
}

std::vector<CheckReport> run_cgb(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  IntegrateOptions io;
  if (o.nodes_per_axis) io.nodes_per_axis = *o.nodes_per_axis;
  for (const auto& m : models) out.push_back(verify_cgb(m, tol, io));
  return out;
}

std::vector<CheckReport> run_gbc(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  IntegrateOptions io;
  if (o.nodes_per_axis) io.nodes_per_axis = *o.nodes_per_axis;
  for (const auto& m : models) {
    for (auto& r : verify_gbc(m, tol, io)) out.push_back(std::move(r));
    std::optional<double> exact;
    if (m.name == product_of_spheres({1.0, 1.0}).name) exact = 256.0 * kPi * kPi / 3.0;
    if (m.name == cp2_fubini_study().name) exact = 48.0 * kPi * kPi;
    if (exact) {
      Stopwatch sw;
      const double v = integrate_scalar(
          [&](std::span<const double> x) { return weyl_norm(m.curvature(x, 2)).value(); }, m, io);
      out.push_back(timed(make_check("gbc:weyl-integral:" + m.name, v, *exact, tol), sw));
    }
  }
  return out;
}

std::vector<CheckReport> run_ambient_ricci(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    std::mt19937_64 rng(o.seed);
    double ric = 0.0, scal = 0.0;
    Stopwatch sw;
    const int samples = samples_or(o, 20);
    for (int i = 0; i < samples; ++i) {
      const auto r = ambient_ricci(chart, chart.random_point(rng));
      ric = std::max(ric, max_abs(r.ricci));
      scal = std::max(scal, std::abs(r.scalar));
    }
    const std::string pts = "points=" + std::to_string(samples);
    out.push_back(timed(make_residual_check("ambient-ricci:ricci:" + m.name, ric, 0.0, tol, pts), sw));
    out.push_back(timed(make_residual_check("ambient-ricci:scalar:" + m.name, scal, 0.0, tol, pts), sw));
  }
  return out;
}

std::vector<CheckReport> run_ambient_curvature(const SuiteOptions& o, double tol,
                                               const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    const int n = m.dim;
    std::mt19937_64 rng(o.seed);
    double res = 0.0, scale = 0.0;
    Stopwatch sw;
    const int samples = samples_or(o, 20);
    std::vector<int> idx(4), bidx(4);
    for (int i = 0; i < samples; ++i) {
      const auto p = chart.random_point(rng);
      const Tensor rm = ambient_curvature(chart, p);
      const Tensor w = values(m.curvature(chart.base_point(p), 2).weyl());
      const double tau2 = std::pow(chart.tau(p), 2);
      for (std::size_t off = 0; off < rm.size(); ++off) {
        rm.unravel(off, idx);
        bool base = true;
        for (std::size_t s = 0; s < 4; ++s) {
          base = base && idx[s] >= 1 && idx[s] <= n;
          bidx[s] = idx[s] - 1;
        }
        const double expect = base ? tau2 * w.at(bidx) : 0.0;
        res = std::max(res, std::abs(rm[off] - expect));
        scale = std::max(scale, std::abs(expect));
      }
    }
    out.push_back(timed(make_residual_check("ambient-curvature:tau2-weyl:" + m.name, res, scale, tol,
                                            "points=" + std::to_string(samples)),
                        sw));
  }
  return out;
}

std::vector<CheckReport> run_ambient_christoffel(const SuiteOptions& o, double tol,
                                                 const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    std::mt19937_64 rng(o.seed);
    double res = 0.0, scale = 0.0;
    Stopwatch sw;
    const int samples = samples_or(o, 20);
    for (int i = 0; i < samples; ++i) {
      const auto p = chart.random_point(rng);
      const Tensor a = ambient_christoffels(chart, p);
      res = std::max(res, max_abs_diff(a, ambient_christoffels_from_jets(chart, p)));
      scale = std::max(scale, max_abs(a));
    }
    out.push_back(timed(make_residual_check("ambient-christoffel:blocks-vs-jets:" + m.name, res, scale, tol,
                                            "points=" + std::to_string(samples)),
                        sw));
  }
  return out;
}

std::vector<CheckReport> run_ambient_laplacian(const SuiteOptions& o, double tol,
                                               const std::vector<ManifoldModel>& models) {
  const auto u = [](const Curvature& geo) {
    const auto& c = geo.coordinates();
    return cos(c[0]) * sin(c[1]) + c[2] * c[2];
  };
  constexpr double weights[] = {-4.0, -1.5, 0.0, 2.0};
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    std::mt19937_64 rng(o.seed);
    Stopwatch sw;
    CheckReport worst;
    const int samples = samples_or(o, 20);
    for (int i = 0; i < samples; ++i) {
      auto r = ambient_laplacian_homogeneous(chart, u, 0, weights[i % 4], chart.random_point(rng), tol);
      if (i == 0 || (worst.pass && (!r.pass || r.abs_err > worst.abs_err))) worst = std::move(r);
    }
    worst.id = "ambient-laplacian:homogeneous:" + m.name;
    worst.note = "points=" + std::to_string(samples) + " worst shown";
    out.push_back(timed(std::move(worst), sw));
  }
  return out;
}

std::vector<CheckReport> run_routes(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    const int n = m.dim;
    std::mt19937_64 rng(o.seed);
    std::vector<std::vector<double>> points{m.base_point};
    for (int i = 0; i < samples_or(o, 1); ++i) points.push_back(m.random_point(rng));
    for (int l = 2; 2 * l <= n; ++l) {
      Stopwatch sw;
      CheckReport worst;
      for (std::size_t i = 0; i < points.size(); ++i) {
        auto r = make_check("", p_ell_n_ambient(chart, l, points[i]), p_ell_n_einstein(m, l, points[i]), tol);
        if (i == 0 || r.abs_err > worst.abs_err) worst = std::move(r);
      }
      worst.id = "p-routes:P" + std::to_string(l) + "," + std::to_string(n) + ":" + m.name;
      worst.note = "points=" + std::to_string(points.size()) + " worst shown";
      out.push_back(timed(std::move(worst), sw));
    }
    if (n == 4) {
      Stopwatch sw;
      const double w2 = weyl_norm(m.curvature(m.base_point, 2)).value();
      out.push_back(timed(make_check("p-routes:P2,4=|W|^2/8:" + m.name, p_ell_n_ambient(chart, 2, m.base_point),
                                     w2 / 8.0, tol),
                          sw));
    }
  }
  return out;
}

std::vector<CheckReport> run_divergence(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  const int samples = samples_or(o, 5);
  if (o.manifolds.empty()) {
    IntegrateOptions io;
    io.nodes_per_axis = o.nodes_per_axis.value_or(14);
    out.push_back(divergence_integral(perturbed_sphere(4, 0.2), tol, io));
    const auto m = model_by_name("s2^4");
    std::mt19937_64 rng(o.seed);
    Stopwatch sw;
    double res[2] = {0.0, 0.0};
    for (int i = 0; i < samples; ++i) {
      const auto v = weight_eight_divergences(m.curvature(m.random_point(rng), 4));
      for (int j = 0; j < 2; ++j) res[j] = std::max(res[j], std::abs(v[j].value()));
    }
    for (int j = 0; j < 2; ++j)
      out.push_back(timed(make_residual_check("divergence:weight-8-scalar" + std::to_string(j + 1) + ":" + m.name,
                                              res[j], 0.0, std::min(tol, 1e-8)),
                          sw));
  }
  for (const auto& m : models) {
    std::mt19937_64 rng(o.seed);
    Stopwatch sw;
    if (m.einstein_lambda) {
      double res = 0.0;
      for (int i = 0; i < samples; ++i)
        res = std::max(res, std::abs(weyl_cotton_divergence(m.curvature(m.random_point(rng), 4)).value()));
      out.push_back(timed(make_residual_check("divergence:weyl-cotton:" + m.name, res, 0.0, std::min(tol, 1e-8),
                                              "points=" + std::to_string(samples)),
                          sw));
    } else {
      const Curvature geo = m.curvature(m.random_point(rng), 4);
      out.push_back(timed(make_check("divergence:cotton-vs-double-divergence:" + m.name,
                                     weyl_cotton_divergence(geo).value(),
                                     double_divergence(weyl_square_tensor(geo), -2.0, geo).value(), tol),
                          sw));
    }
  }
  return out;
}

double hyperbolic_closed_form(int n) {
  switch (n) {
    case 4: return 4.0 * kPi * kPi / 3.0;
    case 6: return -8.0 * std::pow(kPi, 3) / 15.0;
    case 8: return 16.0 * std::pow(kPi, 4) / 105.0;
    default: return std::nan("");
  }
}

std::vector<CheckReport> run_rvol(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>&) {
  std::vector<int> dims{4, 6, 8};
  if (o.dim) dims = {*o.dim};
  std::vector<CheckReport> out;
  for (int n : dims) {
    Stopwatch sw;
    const auto v = renormalized_volume(n);
    const std::string tag = "H" + std::to_string(n);
    if (!std::isnan(hyperbolic_closed_form(n)))
      out.push_back(timed(make_check("rvol:series-vs-closed-form:" + tag, v.value, hyperbolic_closed_form(n), tol), sw));
    out.push_back(timed(make_check("rvol:series-vs-gauss-bonnet:" + tag, v.value,
                                   conformally_flat_renormalized_volume(n), tol),
                        sw));
  }
  return out;
}

std::vector<CheckReport> run_main_theorem(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  IntegrateOptions io;
  if (o.nodes_per_axis) io.nodes_per_axis = *o.nodes_per_axis;
  if (o.manifolds.empty()) {
    const auto s6 = model_by_name("s2^3"), s8 = model_by_name("s2^4");
    out.push_back(verify_main_theorem_coefficient(s6, "|W|^2", tol, io));
    out.push_back(verify_main_theorem_coefficient(s8, "|W|^2", tol, io));
    out.push_back(verify_main_theorem_coefficient(s8, "Pf3(W)", tol, io));
    return out;
  }
  for (const auto& m : models)
    for (const auto& s : straightenable_catalog())
      if (2 * s.k <= m.dim) out.push_back(verify_main_theorem_coefficient(m, s.name, tol, io));
  return out;
}

std::vector<CheckReport> run_worked(const SuiteOptions& o, double tol, const std::vector<ManifoldModel>& models) {
  std::vector<CheckReport> out;
  IntegrateOptions io;
  if (o.nodes_per_axis) io.nodes_per_axis = *o.nodes_per_axis;
  for (const auto& m : models) {
    for (auto& r : verify_worked_examples(m, tol, io)) out.push_back(std::move(r));
    std::mt19937_64 rng(o.seed);
    for (int i = 0; i < samples_or(o, 3); ++i) {
      auto r = delta_weyl_identity(m, m.random_point(rng), tol);
      r.id += ":point" + std::to_string(i);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CheckReport> run_straightenable(const SuiteOptions& o, double tol,
                                            const std::vector<ManifoldModel>& models) {
  const TensorField weyl = [](const Curvature& g) { return g.weyl(); };
  const TensorField lap_w2 = [](const Curvature& g) {
    const int n = g.dim();
    const Jet u = weyl_norm(g);
    return JetTensor::scalar(g.laplacian(u) - g.schouten_trace() * u * (8.0 * (n - 5) / n));
  };
  const TensorField div_w2 = [](const Curvature& g) {
    return divergence_construction(weyl_square_tensor(g), -2.0, g);
  };
  struct Field {
    const char* name;
    const TensorField* f;
    int order;
    double w;
  };
  const Field fields[] = {{"W", &weyl, 0, 2.0}, {"Delta|W|^2-8(n-5)/n*J|W|^2", &lap_w2, 2, -6.0},
                          {"div(W.W)", &div_w2, 1, -4.0}};
  std::vector<CheckReport> out;
  for (const auto& m : models) {
    const auto chart = build_ambient(m);
    for (const auto& f : fields) {
      std::mt19937_64 rng(o.seed);
      CheckReport worst;
      Stopwatch sw;
      const int samples = samples_or(o, 3);
      for (int i = 0; i < samples; ++i) {
        auto r = check_straightenable(chart, *f.f, f.order, f.w, chart.random_point(rng), tol);
        if (i == 0 || r.abs_err > worst.abs_err) worst = std::move(r);
      }
      worst.id = std::string("straightenable:") + f.name + ":" + m.name;
      worst.note = "points=" + std::to_string(samples) + " worst shown";
      out.push_back(timed(std::move(worst), sw));
    }
  }
  return out;
}

const std::vector<SuiteDef>& definitions() {
  static const std::vector<SuiteDef> defs{
      {{"kronecker", "generalized Kronecker trace recursion, 2 <= k <= n <= 8", 1e-12, 0}, Need::None, {},
       run_kronecker},
      {{"pfaffian-identities", "Pf_2..Pf_4 of random Weyl tensors against Weyl-basis expansions", 1e-10, 0},
       Need::None, {}, run_pfaffian},
      {{"cgb", "integral of Pf(Rm) against (2 pi)^{n/2} chi", 1e-6, 2}, Need::Compact,
       {"s4", "s2xs2", "cp2", "s2^3"}, run_cgb},
      {{"gbc", "Gauss-Bonnet closure with Weyl Pfaffians on compact Einstein models", 1e-6, 8},
       Need::CompactEinsteinEven, {"s4", "s2xs2", "cp2", "s2^3", "s2^4"}, run_gbc},
      {{"ambient-ricci", "Ricci flatness of the explicit Einstein ambient metric", 1e-8, 2}, Need::Einstein,
       {"s4", "s2xs2", "cp2", "s2^3", "h4"}, run_ambient_ricci},
      {{"ambient-curvature", "ambient curvature equals tau^2 W", 1e-9, 2}, Need::Einstein,
       {"s4", "s2xs2", "cp2", "s2^3", "h4"}, run_ambient_curvature},
      {{"ambient-christoffel", "ambient Christoffel blocks against metric jets", 1e-10, 1}, Need::Einstein,
       {"s4", "s2xs2", "cp2", "s2^3", "h4"}, run_ambient_christoffel},
      {{"ambient-laplacian", "ambient Laplacian of tau^w u", 1e-8, 2}, Need::Einstein,
       {"s4", "s2xs2", "cp2", "s2^3", "h4"}, run_ambient_laplacian},
      {{"p-routes", "P_{l,n} from ambient Laplacians against the Einstein operator", 1e-7, 8},
       Need::CompactEinsteinEven, {"s4", "s2xs2", "cp2", "s6", "s2^3", "s2^4"}, run_routes},
      {{"divergence", "integrated divergences and divergence-form scalars", 1e-6, 4}, Need::Any,
       {"s4", "s2xs2", "cp2", "s2^3", "perturbed-s5"}, run_divergence},
      {{"rvol", "renormalized volume of hyperbolic space", 1e-12, 0}, Need::None, {}, run_rvol},
      {{"main-theorem", "coefficient algebra of iterated ambient Laplacians", 1e-7, 6}, Need::CompactEinsteinEven, {},
       run_main_theorem},
      {{"worked-examples", "integration by parts and the Laplacian of W", 1e-8, 4}, Need::Compact, {"s2xs2"},
       run_worked},
      {{"straightenable", "ambient evaluation equals tau^w times base evaluation", 1e-9, 4}, Need::Einstein,
       {"s2xs2", "cp2", "s2^3"}, run_straightenable},
  };
  return defs;
}

const SuiteDef& definition(const std::string& name) {
  for (const auto& d : definitions())
    if (d.info.name == name) return d;
  throw std::invalid_argument("unknown suite: " + name);
}

void check_need(const SuiteDef& d, const ManifoldModel& m, const std::string& name) {
  const auto fail = [&](const char* what) {
    throw std::invalid_argument("suite " + d.info.name + " needs " + what + " manifold; " + name + " is not");
  };
  switch (d.need) {
    case Need::None: throw std::invalid_argument("suite " + d.info.name + " takes no manifold");
    case Need::Any: break;
    case Need::Compact:
      if (!m.compact) fail("a compact");
      if (d.info.name == "worked-examples" && !m.einstein_lambda) fail("a compact Einstein");
      if (d.info.name == "cgb" && (m.dim % 2 != 0 || !m.euler_characteristic)) fail("an even-dimensional closed");
      break;
    case Need::Einstein:
      if (!m.einstein_lambda) fail("an Einstein");
      if (m.dim < 4) fail("a four or more dimensional");
      break;
    case Need::CompactEinsteinEven:
      if (!m.einstein_lambda || !m.compact || m.dim % 2 != 0 || m.dim < 4) fail("a compact even-dimensional Einstein");
      break;
  }
}

std::vector<ManifoldModel> resolve_models(const SuiteDef& d, const SuiteOptions& o) {
  std::vector<ManifoldModel> out;
  for (const auto& name : o.manifolds.empty() ? d.default_manifolds : o.manifolds) {
    auto m = model_by_name(name);
    if (!o.manifolds.empty()) check_need(d, m, name);
    if (o.dim && m.dim != *o.dim) continue;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

const std::vector<SuiteInfo>& suite_catalog() {
  static const std::vector<SuiteInfo> infos = [] {
    std::vector<SuiteInfo> v;
    for (const auto& d : definitions()) v.push_back(d.info);
    return v;
  }();
  return infos;
}

const SuiteInfo& suite_info(const std::string& name) { return definition(name).info; }

void validate_suite(const std::string& name, const SuiteOptions& opts) {
  const auto& d = definition(name);
  if (opts.tol && !(*opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (opts.samples && *opts.samples < 1) throw std::invalid_argument("samples must be positive");
  if (opts.nodes_per_axis && *opts.nodes_per_axis < 1) throw std::invalid_argument("nodes per axis must be positive");
  if (opts.jet_order && *opts.jet_order < d.info.jet_order)
    throw std::invalid_argument("suite " + name + " needs metric jets of order " + std::to_string(d.info.jet_order));
  if (opts.dim) {
    const int n = *opts.dim;
    if (name == "kronecker" && (n < 2 || n > 8)) throw std::invalid_argument("kronecker: n must lie in [2, 8]");
    if (name == "pfaffian-identities" && (n < 4 || n > 8))
      throw std::invalid_argument("pfaffian-identities: dim must lie in [4, 8]");
    if (name == "rvol" && (n < 2 || n % 2 != 0 || n > 16))
      throw std::invalid_argument("rvol: n must be even and at most 16");
  }
  resolve_models(d, opts);
}

std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts) {
  validate_suite(name, opts);
  const auto& d = definition(name);
  return d.run(opts, opts.tol.value_or(d.info.default_tol), resolve_models(d, opts));
}

}  // namespace rcurv
