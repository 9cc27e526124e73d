#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "rcurv/jet.hpp"

namespace rcurv {

enum class Variance : unsigned char { Lower, Upper };

inline Variance flip(Variance v) { return v == Variance::Lower ? Variance::Upper : Variance::Lower; }

/// Rank-r tensor in dimension d with row-major components and a variance per slot.
///
/// T is double for pointwise algebra and Jet for jet-valued fields; every
/// algorithm in this header is written once for both.
template <typename T>
class DenseTensor {
 public:
  using value_type = T;

  DenseTensor() : dim_(1), data_(1, T(0.0)) {}
  DenseTensor(int dim, std::vector<Variance> variance)
      : dim_(dim), variance_(std::move(variance)), data_(count(dim, variance_.size()), T(0.0)) {
    if (dim < 1) throw std::invalid_argument("DenseTensor: dimension must be positive");
  }
  DenseTensor(int dim, std::vector<Variance> variance, std::vector<T> data)
      : dim_(dim), variance_(std::move(variance)), data_(std::move(data)) {
    if (dim < 1) throw std::invalid_argument("DenseTensor: dimension must be positive");
    if (data_.size() != count(dim, variance_.size()))
      throw std::invalid_argument("DenseTensor: component count must equal dim^rank");
  }

  static DenseTensor scalar(T v) {
    DenseTensor t;
    t.data_[0] = std::move(v);
    return t;
  }
  static DenseTensor lower(int dim, std::size_t rank) {
    return DenseTensor(dim, std::vector<Variance>(rank, Variance::Lower));
  }
  static DenseTensor upper(int dim, std::size_t rank) {
    return DenseTensor(dim, std::vector<Variance>(rank, Variance::Upper));
  }

  int dim() const { return dim_; }
  std::size_t rank() const { return variance_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<Variance>& variance() const { return variance_; }
  Variance variance(std::size_t slot) const { return variance_.at(slot); }
  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  std::size_t offset(std::span<const int> idx) const {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return off;
  }
  T& operator()(std::initializer_list<int> idx) { return data_[offset({idx.begin(), idx.size()})]; }
  const T& operator()(std::initializer_list<int> idx) const { return data_[offset({idx.begin(), idx.size()})]; }
  T& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset(idx)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  /// Decode a flat offset into a multi-index.
  void unravel(std::size_t off, std::span<int> idx) const {
    for (std::size_t s = idx.size(); s-- > 0;) {
      idx[s] = static_cast<int>(off % static_cast<std::size_t>(dim_));
      off /= static_cast<std::size_t>(dim_);
    }
  }

  DenseTensor& operator+=(const DenseTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  DenseTensor& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
  friend DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

  void check_same_shape(const DenseTensor& o) const {
    if (o.dim_ != dim_ || o.variance_ != variance_)
      throw std::invalid_argument("DenseTensor: shape or variance mismatch");
  }

  static std::size_t count(int dim, std::size_t rank) {
    std::size_t n = 1;
    for (std::size_t r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
    return n;
  }

 private:
  int dim_;
  std::vector<Variance> variance_;
  std::vector<T> data_;
};

using Tensor = DenseTensor<double>;
using JetTensor = DenseTensor<Jet>;

/// Component values at the base point of a jet-valued tensor.
inline Tensor values(const JetTensor& t) {
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = t[i].value();
  return Tensor(t.dim(), t.variance(), std::move(v));
}

template <typename T>
DenseTensor<Jet> lift(const DenseTensor<T>& t) {
  std::vector<Jet> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = Jet(value_of(t[i]));
  return DenseTensor<Jet>(t.dim(), t.variance(), std::move(v));
}

inline JetTensor truncated(const JetTensor& t, int order) {
  std::vector<Jet> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = t[i].truncated(order);
  return DenseTensor<Jet>(t.dim(), t.variance(), std::move(v));
}

/// Max-norm of a tensor (base-point values for jets).
template <typename T>
double max_abs(const DenseTensor<T>& t) {
  double m = 0.0;
  for (const auto& v : t.data()) m = std::max(m, std::abs(value_of(v)));
  return m;
}

template <typename T>
double max_abs_diff(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(value_of(a[i]) - value_of(b[i])));
  return m;
}

template <typename T>
bool all_finite(const DenseTensor<T>& t) {
  for (const auto& v : t.data())
    if (!std::isfinite(value_of(v))) return false;
  return true;
}

/// (a ⊗ b) with variance concatenated.
template <typename T>
DenseTensor<T> tensor_product(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  if (a.rank() > 0 && b.rank() > 0 && a.dim() != b.dim())
    throw std::invalid_argument("tensor_product: dimension mismatch");
  const int dim = a.rank() > 0 ? a.dim() : b.dim();
  std::vector<Variance> var = a.variance();
  var.insert(var.end(), b.variance().begin(), b.variance().end());
  std::vector<T> data;
  data.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) data.push_back(a[i] * b[j]);
  return DenseTensor<T>(dim, std::move(var), std::move(data));
}

/// Reorder slots: result slot s is source slot perm[s].
template <typename T>
DenseTensor<T> permute_slots(const DenseTensor<T>& t, std::span<const int> perm) {
  const std::size_t r = t.rank();
  if (perm.size() != r) throw std::invalid_argument("permute_slots: wrong permutation length");
  std::vector<Variance> var(r);
  for (std::size_t s = 0; s < r; ++s) var[s] = t.variance(static_cast<std::size_t>(perm[s]));
  DenseTensor<T> out(t.dim(), std::move(var));
  std::vector<int> dst(r), src(r);
  for (std::size_t off = 0; off < out.size(); ++off) {
    out.unravel(off, dst);
    for (std::size_t s = 0; s < r; ++s) src[static_cast<std::size_t>(perm[s])] = dst[s];
    out[off] = t.at(src);
  }
  return out;
}

/// Contract `slot` of t with a rank-2 tensor m (m's first slot is summed).
/// The new index takes the position of the old one.
template <typename T>
DenseTensor<T> apply_on_slot(const DenseTensor<T>& t, std::size_t slot, const DenseTensor<T>& m,
                             Variance new_variance) {
  if (slot >= t.rank()) throw std::out_of_range("slot out of range");
  if (m.rank() != 2 || m.dim() != t.dim()) throw std::invalid_argument("apply_on_slot: bad matrix");
  std::vector<Variance> var = t.variance();
  var[slot] = new_variance;
  DenseTensor<T> out(t.dim(), std::move(var));
  const std::size_t d = static_cast<std::size_t>(t.dim());
  std::size_t stride = 1;
  for (std::size_t s = slot + 1; s < t.rank(); ++s) stride *= d;
  const std::size_t outer = t.size() / (stride * d);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = o * stride * d + inner;
      for (std::size_t b = 0; b < d; ++b) {
        T acc(0.0);
        for (std::size_t a = 0; a < d; ++a) {
          const auto& x = t[base + a * stride];
          const auto& y = m[a * d + b];
          if constexpr (std::is_same_v<T, Jet>) {
            if (x.is_zero() || y.is_zero()) continue;
          }
          acc += x * y;
        }
        out[base + b * stride] = std::move(acc);
      }
    }
  return out;
}

/// Raise (lower slot) or lower (upper slot) one index with the metric pair.
template <typename T>
DenseTensor<T> raise_lower(const DenseTensor<T>& t, std::size_t slot, const DenseTensor<T>& metric,
                           const DenseTensor<T>& inverse_metric) {
  if (slot >= t.rank()) throw std::out_of_range("raise_lower: slot out of range");
  if (t.variance(slot) == Variance::Lower) return apply_on_slot(t, slot, inverse_metric, Variance::Upper);
  return apply_on_slot(t, slot, metric, Variance::Lower);
}

namespace detail {

inline void check_slots(std::size_t rank, std::span<const int> slots) {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] < 0 || static_cast<std::size_t>(slots[i]) >= rank) throw std::out_of_range("slot out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (slots[i] == slots[j]) throw std::invalid_argument("repeated slot");
  }
}

inline int permutation_sign(std::span<const int> p) {
  int sign = 1;
  std::vector<bool> seen(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

template <typename T>
DenseTensor<T> average_over_permutations(const DenseTensor<T>& t, std::span<const int> slots, bool signed_sum) {
  detail::check_slots(t.rank(), slots);
  for (int s : slots)
    if (t.variance(static_cast<std::size_t>(s)) != t.variance(static_cast<std::size_t>(slots[0])))
      throw std::invalid_argument("(anti)symmetrize: slots must share variance");
  const std::size_t k = slots.size();
  DenseTensor<T> out(t.dim(), t.variance());
  if (k <= 1) return t;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double nperm = 0;
  std::vector<int> idx(t.rank()), src(t.rank());
  do {
    nperm += 1;
    const double sign = signed_sum ? permutation_sign(perm) : 1.0;
    for (std::size_t off = 0; off < out.size(); ++off) {
      out.unravel(off, idx);
      src = idx;
      for (std::size_t i = 0; i < k; ++i)
        src[static_cast<std::size_t>(slots[i])] = idx[static_cast<std::size_t>(slots[static_cast<std::size_t>(perm[i])])];
      out[off] += t.at(src) * sign;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= 1.0 / nperm;
  return out;
}

}  // namespace detail

/// T_(a1...ak) over the given slots, normalized by 1/k!.
template <typename T>
DenseTensor<T> symmetrize(const DenseTensor<T>& t, std::span<const int> slots) {
  return detail::average_over_permutations(t, slots, false);
}

/// T_[a1...ak] over the given slots, normalized by 1/k!.
template <typename T>
DenseTensor<T> antisymmetrize(const DenseTensor<T>& t, std::span<const int> slots) {
  return detail::average_over_permutations(t, slots, true);
}

}  // namespace rcurv
