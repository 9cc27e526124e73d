#include "rcurv/geometry.hpp"

#include <stdexcept>

#include "rcurv/linalg.hpp"

namespace rcurv {

namespace {

bool zero(const Jet& j) { return j.is_zero(); }

}  // namespace

Tensor MetricJet::derivative(std::span<const std::uint8_t> alpha) const {
  Tensor out(g.dim(), g.variance());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].derivative(alpha);
  return out;
}

std::vector<Jet> coordinate_jets(const JetSpace& space, std::span<const double> point, int order) {
  std::vector<Jet> x;
  x.reserve(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) x.push_back(Jet::variable(space, static_cast<int>(i), point[i], order));
  return x;
}

MetricJet evaluate_metric(const MetricFunction& metric, int dim, std::span<const double> point, int order) {
  if (static_cast<int>(point.size()) != dim) throw std::invalid_argument("evaluate_metric: point has wrong dimension");
  MetricJet mj;
  mj.space = JetSpace::get(dim, order);
  mj.point.assign(point.begin(), point.end());
  mj.order = order;
  const auto x = coordinate_jets(*mj.space, point, order);
  mj.g = metric(x);
  if (mj.g.rank() != 2 || mj.g.dim() != dim) throw std::invalid_argument("evaluate_metric: evaluator returned wrong shape");
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < a; ++b)
      if (std::abs(mj.g({a, b}).value() - mj.g({b, a}).value()) > 1e-12 * (1.0 + std::abs(mj.g({a, b}).value())))
        throw std::invalid_argument("evaluate_metric: metric is not symmetric");
  return mj;
}

JetTensor christoffel(const JetTensor& g, const JetTensor& ginv) {
  const int n = g.dim();
  JetTensor dg = JetTensor::lower(n, 3);  // dg(e, a, b) = d_e g_ab
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) {
        Jet v = g({a, b}).partial(e);
        dg({e, b, a}) = v;
        dg({e, a, b}) = std::move(v);
      }
  JetTensor low = JetTensor::lower(n, 3);  // Gamma_dab
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) {
        Jet v = dg({a, d, b}) + dg({b, d, a}) - dg({d, a, b});
        v *= 0.5;
        low({d, b, a}) = v;
        low({d, a, b}) = std::move(v);
      }
  JetTensor gamma(n, {Variance::Upper, Variance::Lower, Variance::Lower});
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) {
        Jet acc(0.0);
        for (int d = 0; d < n; ++d) {
          const Jet& x = ginv({c, d});
          const Jet& y = low({d, a, b});
          if (zero(x) || zero(y)) continue;
          acc += x * y;
        }
        gamma({c, b, a}) = acc;
        gamma({c, a, b}) = std::move(acc);
      }
  return gamma;
}

JetTensor riemann(const JetTensor& g, const JetTensor& gamma) {
  const int n = g.dim();
  // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  int order = Jet::kUnbounded;
  for (const auto& v : gamma.data()) order = std::min(order, v.order());
  const bool bounded = order != Jet::kUnbounded;
  const JetTensor gt = bounded ? truncated(gamma, std::max(order - 1, 0)) : gamma;
  JetTensor dgam(n, {Variance::Lower, Variance::Upper, Variance::Lower, Variance::Lower});  // (c, a, d, b)
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d)
        for (int b = 0; b <= d; ++b) {
          Jet v = gamma({a, d, b}).partial(c);
          dgam({c, a, b, d}) = v;
          dgam({c, a, d, b}) = std::move(v);
        }
  // gg(a, c, d, b) = G^a_ce G^e_db
  JetTensor gg(n, {Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower});
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e) {
        const Jet& x = gt({a, c, e});
        if (zero(x)) continue;
        for (int d = 0; d < n; ++d)
          for (int b = 0; b < n; ++b) {
            const Jet& y = gt({e, d, b});
            if (zero(y)) continue;
            gg({a, c, d, b}) += x * y;
          }
      }
  JetTensor up(n, {Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < c; ++d) {
          Jet v = dgam({c, a, d, b}) - dgam({d, a, c, b}) + gg({a, c, d, b}) - gg({a, d, c, b});
          up({a, b, d, c}) = -v;
          up({a, b, c, d}) = std::move(v);
        }
  JetTensor rm = JetTensor::lower(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < c; ++d) {
          Jet acc(0.0);
          for (int e = 0; e < n; ++e) {
            const Jet& x = g({a, e});
            const Jet& y = up({e, b, c, d});
            if (zero(x) || zero(y)) continue;
            acc += x * y;
          }
          rm({a, b, d, c}) = -acc;
          rm({a, b, c, d}) = std::move(acc);
        }
  return rm;
}

Jet squared_norm(const JetTensor& t, const JetTensor& ginv) {
  JetTensor up = t;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (up.variance(s) == Variance::Lower) up = apply_on_slot(up, s, ginv, Variance::Upper);
  Jet acc(0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (zero(t[i]) || zero(up[i])) continue;
    acc += t[i] * up[i];
  }
  return acc;
}

double squared_norm(const Tensor& t, const Tensor& ginv) {
  Tensor up = t;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (up.variance(s) == Variance::Lower) up = apply_on_slot(up, s, ginv, Variance::Upper);
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * up[i];
  return acc;
}

Curvature::Curvature(MetricJet jet) : jet_(std::move(jet)) {
  const int n = dim();
  if (jet_.order < 2) throw std::invalid_argument("Curvature: metric jets of order >= 2 required");
  coords_ = coordinate_jets(*jet_.space, jet_.point, jet_.order);
  ginv_ = matrix_inverse(jet_.g);
  gamma_ = rcurv::christoffel(jet_.g, ginv_);
  rm_ = rcurv::riemann(jet_.g, gamma_);
  ric_ = JetTensor::lower(n, 2);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d <= b; ++d) {
      Jet acc(0.0);
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          const Jet& x = ginv_({a, c});
          const Jet& y = rm_({a, b, c, d});
          if (zero(x) || zero(y)) continue;
          acc += x * y;
        }
      ric_({d, b}) = acc;
      ric_({b, d}) = std::move(acc);
    }
  scal_ = Jet(0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (zero(ginv_({a, b})) || zero(ric_({a, b}))) continue;
      scal_ += ginv_({a, b}) * ric_({a, b});
    }
  if (n >= 3) {
    j_ = scal_ * (1.0 / (2.0 * (n - 1)));
    p_ = JetTensor::lower(n, 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) p_({a, b}) = (ric_({a, b}) - j_ * jet_.g({a, b})) * (1.0 / (n - 2));
  }
  if (n >= 4) w_ = weyl_from(rm_, p_, jet_.g);
}

const JetTensor& Curvature::schouten() const {
  if (dim() < 3) throw std::domain_error("schouten: dimension must be at least 3");
  return p_;
}

const Jet& Curvature::schouten_trace() const {
  if (dim() < 3) throw std::domain_error("schouten: dimension must be at least 3");
  return j_;
}

const JetTensor& Curvature::weyl() const {
  if (dim() < 4) throw std::domain_error("weyl: dimension must be at least 4");
  return w_;
}

JetTensor Curvature::cotton() const {
  if (order() < 3) throw std::domain_error("cotton: metric jets of order >= 3 required");
  const JetTensor dp = covariant_derivative(schouten());
  const int n = dim();
  JetTensor c = JetTensor::lower(n, 3);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e) c({a, b, e}) = dp({a, b, e}) - dp({b, a, e});
  return c;
}

JetTensor Curvature::covariant_derivative(const JetTensor& t) const {
  const int n = dim();
  const std::size_t r = t.rank();
  std::vector<Variance> var{Variance::Lower};
  var.insert(var.end(), t.variance().begin(), t.variance().end());
  JetTensor out(n, std::move(var));
  std::vector<int> idx(r + 1), src(r);
  const std::size_t block = t.size();
  for (int a = 0; a < n; ++a)
    for (std::size_t off = 0; off < block; ++off) {
      if (t[off].is_zero()) continue;
      if (t[off].is_constant()) continue;
      out[static_cast<std::size_t>(a) * block + off] = t[off].partial(a);
    }
  for (std::size_t s = 0; s < r; ++s) {
    const bool lower = t.variance(s) == Variance::Lower;
    for (std::size_t off = 0; off < out.size(); ++off) {
      out.unravel(off, idx);
      const int a = idx[0];
      for (std::size_t q = 0; q < r; ++q) src[q] = idx[q + 1];
      const int i = idx[s + 1];
      Jet acc(0.0);
      for (int e = 0; e < n; ++e) {
        src[s] = e;
        const Jet& tv = t.at(src);
        if (zero(tv)) continue;
        const Jet& gm = lower ? gamma_({e, a, i}) : gamma_({i, a, e});
        if (zero(gm)) continue;
        acc += gm * tv;
      }
      if (acc.is_zero()) continue;
      if (lower) out[off] -= acc;
      else out[off] += acc;
    }
  }
  return out;
}

JetTensor Curvature::trace(const JetTensor& t, std::size_t s1, std::size_t s2) const {
  if (s1 >= t.rank() || s2 >= t.rank() || s1 == s2) throw std::out_of_range("trace: bad slots");
  const int n = dim();
  const Variance v1 = t.variance(s1), v2 = t.variance(s2);
  const JetTensor* m = nullptr;
  if (v1 == v2) m = v1 == Variance::Lower ? &ginv_ : &jet_.g;
  std::vector<Variance> var;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (s != s1 && s != s2) var.push_back(t.variance(s));
  JetTensor out(n, var);
  std::vector<int> idx(var.size()), src(t.rank());
  for (std::size_t off = 0; off < out.size(); ++off) {
    out.unravel(off, idx);
    for (std::size_t s = 0, q = 0; s < t.rank(); ++s)
      if (s != s1 && s != s2) src[s] = idx[q++];
    Jet acc(0.0);
    for (int i = 0; i < n; ++i) {
      src[s1] = i;
      if (m) {
        for (int j = 0; j < n; ++j) {
          const Jet& mv = (*m)({i, j});
          if (zero(mv)) continue;
          src[s2] = j;
          const Jet& tv = t.at(src);
          if (zero(tv)) continue;
          acc += mv * tv;
        }
      } else {
        src[s2] = i;
        acc += t.at(src);
      }
    }
    out[off] = std::move(acc);
  }
  return out;
}

JetTensor Curvature::raise_all(const JetTensor& t) const {
  JetTensor up = t;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (up.variance(s) == Variance::Lower) up = apply_on_slot(up, s, ginv_, Variance::Upper);
  return up;
}

JetTensor Curvature::laplacian(const JetTensor& t) const {
  if (t.rank() == 0) return JetTensor::scalar(laplacian(t[0]));
  return trace(covariant_derivative(covariant_derivative(t)), 0, 1);
}

Jet Curvature::laplacian(const Jet& f) const {
  if (f.is_constant() || f.is_zero()) return Jet(0.0);
  const int n = dim();
  std::vector<Jet> df(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) df[static_cast<std::size_t>(a)] = f.partial(a);
  Jet acc(0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& h = ginv_({a, b});
      if (zero(h)) continue;
      Jet hess = df[static_cast<std::size_t>(a)].is_zero() ? Jet(0.0) : df[static_cast<std::size_t>(a)].partial(b);
      for (int c = 0; c < n; ++c) {
        const Jet& gm = gamma_({c, a, b});
        const Jet& dc = df[static_cast<std::size_t>(c)];
        if (zero(gm) || zero(dc)) continue;
        hess -= gm * dc;
      }
      if (hess.is_zero()) continue;
      acc += h * hess;
    }
  return acc;
}

JetTensor christoffel(const MetricJet& jet) {
  if (jet.order < 1) throw std::invalid_argument("christoffel: metric jets of order >= 1 required");
  return christoffel(jet.g, matrix_inverse(jet.g));
}

JetTensor riemann(const MetricJet& jet) { return Curvature(jet).riemann(); }

RicciData ricci_scalar_schouten(const MetricJet& jet) {
  if (jet.dim() < 3) throw std::domain_error("ricci_scalar_schouten: dimension must be at least 3");
  Curvature c(jet);
  return {c.ricci(), c.scalar_curvature(), c.schouten(), c.schouten_trace()};
}

JetTensor weyl(const MetricJet& jet) { return Curvature(jet).weyl(); }

JetTensor cotton(const MetricJet& jet) { return Curvature(jet).cotton(); }

JetTensor covariant_derivative(const TensorField& field, const Curvature& geo) {
  return geo.covariant_derivative(field(geo));
}

JetTensor laplacian_field(const TensorField& field, const Curvature& geo) { return geo.laplacian(field(geo)); }

}  // namespace rcurv
