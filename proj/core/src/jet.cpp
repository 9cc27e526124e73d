#include "rcurv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace rcurv {

namespace {

std::uint64_t encode(std::span<const std::uint8_t> alpha, int base) {
  std::uint64_t key = 0;
  for (auto a : alpha) key = key * static_cast<std::uint64_t>(base) + a;
  return key;
}

void enumerate_degree(int nvars, int remaining, int var, std::vector<std::uint8_t>& cur,
                      std::vector<std::uint8_t>& out) {
  if (var == nvars - 1) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(nvars, remaining - e, var + 1, cur, out);
  }
}

}  // namespace

JetSpace::JetSpace(int nvars, int max_order) : nvars_(nvars), max_order_(max_order) {
  if (nvars < 1 || nvars > 16) throw std::invalid_argument("JetSpace: nvars must be in [1, 16]");
  if (max_order < 0 || max_order > 12) throw std::invalid_argument("JetSpace: order must be in [0, 12]");

  const auto nv = static_cast<std::size_t>(nvars);
  std::vector<std::uint8_t> cur(nv, 0);
  prefix_.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int d = 0; d <= max_order; ++d) {
    enumerate_degree(nvars, d, 0, cur, exponents_);
    prefix_.push_back(exponents_.size() / nv);
  }
  const std::size_t n = prefix_.back();

  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  lookup.reserve(n * 2);
  degree_.resize(n);
  factorial_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto alpha = exponents(i);
    int deg = 0;
    double fact = 1.0;
    for (auto a : alpha) {
      deg += a;
      for (int m = 2; m <= a; ++m) fact *= m;
    }
    degree_[i] = deg;
    factorial_[i] = fact;
    lookup.emplace(encode(alpha, max_order + 1), static_cast<std::uint32_t>(i));
  }

  raise_.assign(n * nv, -1);
  std::vector<std::uint8_t> tmp(nv);
  for (std::size_t i = 0; i < n; ++i) {
    if (degree_[i] == max_order) continue;
    auto alpha = exponents(i);
    for (std::size_t v = 0; v < nv; ++v) {
      std::copy(alpha.begin(), alpha.end(), tmp.begin());
      tmp[v] += 1;
      raise_[i * nv + v] = lookup.at(encode(tmp, max_order + 1));
    }
  }

  start_.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    start_[i] = products_.size();
    auto ai = exponents(i);
    const std::size_t jmax = size(max_order - degree_[i]);
    for (std::size_t j = 0; j < jmax; ++j) {
      auto aj = exponents(j);
      for (std::size_t v = 0; v < nv; ++v) tmp[v] = static_cast<std::uint8_t>(ai[v] + aj[v]);
      products_.push_back({static_cast<std::uint32_t>(j), lookup.at(encode(tmp, max_order + 1))});
    }
  }
  start_[n] = products_.size();
}

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int max_order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, max_order}];
  if (!slot) slot = std::make_shared<const JetSpace>(nvars, max_order);
  return slot;
}

std::size_t JetSpace::index_of(std::span<const std::uint8_t> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(nvars_)) throw std::invalid_argument("index_of: wrong arity");
  std::size_t idx = 0;
  for (std::size_t v = 0; v < alpha.size(); ++v) {
    for (int r = 0; r < alpha[v]; ++r) {
      auto next = raise(idx, static_cast<int>(v));
      if (next < 0) throw std::out_of_range("index_of: multi-index exceeds jet order");
      idx = static_cast<std::size_t>(next);
    }
  }
  return idx;
}

std::span<const JetSpace::Product> JetSpace::products(std::size_t i, int budget) const {
  const int cap = std::min(budget, max_order_ - degree_[i]);
  if (cap < 0) return {};
  return {products_.data() + start_[i], size(cap)};
}

// ---------------------------------------------------------------------------

Jet::Jet(double constant) {
  if (constant != 0.0) coeffs_.assign(1, constant);
}

Jet Jet::variable(const JetSpace& space, int var, double at, int order) {
  if (order > space.max_order()) throw std::invalid_argument("Jet::variable: order exceeds space");
  std::vector<double> c(space.size(order), 0.0);
  c[0] = at;
  if (order >= 1) c[static_cast<std::size_t>(space.raise(0, var))] = 1.0;
  Jet j(&space, order, std::move(c));
  j.normalize();
  return j;
}

Jet Jet::constant(const JetSpace& space, double value, int order) {
  if (value == 0.0) return zero(space, order);
  std::vector<double> c(space.size(order), 0.0);
  c[0] = value;
  return Jet(&space, order, std::move(c));
}

Jet Jet::zero(const JetSpace& space, int order) { return Jet(&space, order, {}); }

void Jet::normalize() {
  if (std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return v == 0.0; })) coeffs_.clear();
}

double Jet::derivative(std::span<const std::uint8_t> alpha) const {
  if (!space_) {
    for (auto a : alpha)
      if (a) return 0.0;
    return value();
  }
  auto idx = space_->index_of(alpha);
  if (space_->degree(idx) > order_) throw std::out_of_range("Jet::derivative: beyond jet order");
  return coeff(idx) * space_->factorial(idx);
}

Jet Jet::partial(int var) const {
  if (!space_) return Jet();
  if (order_ == 0) throw std::domain_error("Jet::partial: order-0 jet has no derivatives");
  const int out_order = order_ - 1;
  if (coeffs_.empty()) return zero(*space_, out_order);
  const std::size_t n = space_->size(out_order);
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto up = space_->raise(i, var);
    const double mult = space_->exponents(static_cast<std::size_t>(up))[static_cast<std::size_t>(var)];
    c[i] = mult * coeffs_[static_cast<std::size_t>(up)];
  }
  Jet out(space_, out_order, std::move(c));
  out.normalize();
  return out;
}

Jet Jet::truncated(int order) const {
  if (!space_ || order >= order_) return *this;
  if (order < 0) throw std::invalid_argument("Jet::truncated: negative order");
  Jet out(space_, order, coeffs_);
  if (!out.coeffs_.empty()) out.coeffs_.resize(space_->size(order));
  out.normalize();
  return out;
}

Jet Jet::embedded(const JetSpace& target, std::span<const int> var_map) const {
  if (!space_) return *this;
  if (var_map.size() != static_cast<std::size_t>(space_->nvars()))
    throw std::invalid_argument("Jet::embedded: variable map has wrong length");
  const int ord = std::min(order_, target.max_order());
  if (coeffs_.empty()) return zero(target, ord);
  std::vector<double> c(target.size(ord), 0.0);
  std::vector<std::uint8_t> beta(static_cast<std::size_t>(target.nvars()));
  for (std::size_t i = 0; i < space_->size(ord) && i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    std::fill(beta.begin(), beta.end(), 0);
    auto alpha = space_->exponents(i);
    for (std::size_t v = 0; v < alpha.size(); ++v) beta[static_cast<std::size_t>(var_map[v])] += alpha[v];
    c[target.index_of(beta)] = coeffs_[i];
  }
  Jet out(&target, ord, std::move(c));
  out.normalize();
  return out;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (auto& v : out.coeffs_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& other) {
  if (!space_ && other.space_) {
    Jet tmp = other;
    tmp += *this;
    *this = std::move(tmp);
    return *this;
  }
  if (space_ && other.space_ && space_ != other.space_)
    throw std::invalid_argument("Jet: operands live in different jet spaces");
  const int ord = std::min(order(), other.order());
  if (space_ && ord < order_) *this = truncated(ord);
  if (other.coeffs_.empty()) return *this;
  if (!space_) {
    const double v = value() + other.value();
    *this = Jet(v);
    return *this;
  }
  const std::size_t n = space_->size(order_);
  if (coeffs_.empty()) coeffs_.assign(n, 0.0);
  const std::size_t m = std::min(n, other.coeffs_.size());
  for (std::size_t i = 0; i < m; ++i) coeffs_[i] += other.coeffs_[i];
  normalize();
  return *this;
}

Jet& Jet::operator-=(const Jet& other) { return *this += -other; }

Jet& Jet::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& v : coeffs_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.space_) return b * a.value();
  if (!b.space_) return a * b.value();
  if (a.space_ != b.space_) throw std::invalid_argument("Jet: operands live in different jet spaces");
  const int ord = std::min(a.order_, b.order_);
  if (a.coeffs_.empty() || b.coeffs_.empty()) return Jet::zero(*a.space_, ord);
  const JetSpace& sp = *a.space_;
  const std::size_t n = sp.size(ord);
  std::vector<double> c(n, 0.0);
  const double* bc = b.coeffs_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a.coeffs_[i];
    if (ai == 0.0) continue;
    for (const auto& p : sp.products(i, ord - sp.degree(i))) c[p.k] += ai * bc[p.j];
  }
  Jet out(a.space_, ord, std::move(c));
  out.normalize();
  return out;
}

Jet& Jet::operator*=(const Jet& other) {
  *this = *this * other;
  return *this;
}

Jet& Jet::operator/=(const Jet& other) {
  *this = *this * inverse(other);
  return *this;
}

Jet Jet::compose(std::span<const double> taylor) const {
  if (taylor.empty()) return Jet();
  if (!space_) {
    // constant argument: only the zeroth coefficient survives
    return Jet(taylor[0]);
  }
  Jet delta = *this;
  if (!delta.coeffs_.empty()) delta.coeffs_[0] = 0.0;
  delta.normalize();
  Jet result = Jet::constant(*space_, taylor[0], order_);
  Jet power = Jet::constant(*space_, 1.0, order_);
  const std::size_t kmax = std::min<std::size_t>(taylor.size() - 1, static_cast<std::size_t>(order_));
  for (std::size_t k = 1; k <= kmax; ++k) {
    power = power * delta;
    if (power.is_zero()) break;
    result += power * taylor[k];
  }
  return result;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (double v : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

int series_length(const Jet& x) { return x.is_constant() ? 1 : x.order() + 1; }

}  // namespace

Jet sin(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  double fact = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const double d[4] = {s, c, -s, -c};
    t[k] = d[k % 4] / fact;
  }
  return x.compose(t);
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  double fact = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const double d[4] = {c, -s, -c, s};
    t[k] = d[k % 4] / fact;
  }
  return x.compose(t);
}

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  double fact = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    t[k] = e / fact;
  }
  return x.compose(t);
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw std::domain_error("log: non-positive argument");
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  t[0] = std::log(x0);
  for (std::size_t k = 1; k < t.size(); ++k)
    t[k] = ((k % 2) ? 1.0 : -1.0) / (static_cast<double>(k) * std::pow(x0, static_cast<double>(k)));
  return x.compose(t);
}

Jet pow(const Jet& x, double p) {
  const double x0 = x.value();
  if (!(x0 > 0.0) && p != std::floor(p)) throw std::domain_error("pow: non-positive base");
  if (x0 == 0.0) throw std::domain_error("pow: zero base");
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  double binom = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) binom *= (p - static_cast<double>(k - 1)) / static_cast<double>(k);
    t[k] = binom * std::pow(x0, p - static_cast<double>(k));
  }
  return x.compose(t);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet inverse(const Jet& x) {
  const double x0 = x.value();
  if (x0 == 0.0) throw std::domain_error("inverse: zero value");
  std::vector<double> t(static_cast<std::size_t>(series_length(x)));
  double p = 1.0 / x0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = (k % 2) ? -p : p;
    p /= x0;
  }
  return x.compose(t);
}

}  // namespace rcurv
