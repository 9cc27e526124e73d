#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcurv/tensor.hpp"

namespace rcurv {

struct SlotRef {
  int factor;
  int slot;
  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

/// A product of tensor factors with a set of slot pairings to be summed.
///
/// Pairing two lower slots inserts an inverse metric, two upper slots a
/// metric; an upper/lower pair is the canonical trace.
template <typename T>
struct ContractionSpec {
  std::vector<const DenseTensor<T>*> factors;
  std::vector<std::pair<SlotRef, SlotRef>> pairings;
  std::vector<SlotRef> free_order;

  /// Build from index notation, e.g. "abcd,cdef->ef". Every label must occur
  /// once (free) or twice (summed). Without "->" free labels keep their order
  /// of first appearance.
  static ContractionSpec from_indices(std::string_view expr, std::vector<const DenseTensor<T>*> factors);
};

enum class Schedule { Greedy, Random, Naive };

struct ContractOptions {
  Schedule schedule = Schedule::Greedy;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename T>
struct Operand {
  DenseTensor<T> tensor;
  std::vector<int> labels;
};

template <typename T>
inline bool skip_zero(const T& v) {
  if constexpr (std::is_same_v<T, Jet>) return v.is_zero();
  else return v == 0.0;
}

inline std::size_t ipow(std::size_t d, std::size_t k) {
  std::size_t r = 1;
  while (k--) r *= d;
  return r;
}

/// Sum repeated labels inside a single operand.
template <typename T>
Operand<T> self_trace(const Operand<T>& op) {
  std::vector<int> keep;
  std::map<int, std::vector<std::size_t>> where;
  for (std::size_t s = 0; s < op.labels.size(); ++s) where[op.labels[s]].push_back(s);
  bool any = false;
  for (auto& [l, pos] : where) {
    if (pos.size() > 2) throw std::invalid_argument("contract: label used more than twice");
    if (pos.size() == 2) any = true;
  }
  if (!any) return op;
  std::vector<std::size_t> kept_slots;
  std::vector<Variance> var;
  for (std::size_t s = 0; s < op.labels.size(); ++s)
    if (where[op.labels[s]].size() == 1) {
      kept_slots.push_back(s);
      keep.push_back(op.labels[s]);
      var.push_back(op.tensor.variance(s));
    }
  const int d = op.tensor.dim();
  DenseTensor<T> out(d, var);
  std::vector<int> src(op.labels.size()), dst(kept_slots.size());
  for (std::size_t off = 0; off < op.tensor.size(); ++off) {
    op.tensor.unravel(off, src);
    bool diag = true;
    for (auto& [l, pos] : where)
      if (pos.size() == 2 && src[pos[0]] != src[pos[1]]) {
        diag = false;
        break;
      }
    if (!diag) continue;
    for (std::size_t i = 0; i < kept_slots.size(); ++i) dst[i] = src[kept_slots[i]];
    out.at(dst) += op.tensor[off];
  }
  return {std::move(out), std::move(keep)};
}

template <typename T>
Operand<T> contract_pair(const Operand<T>& a, const Operand<T>& b) {
  const std::size_t d = static_cast<std::size_t>(a.tensor.dim());
  std::vector<std::size_t> shared_a, shared_b, free_a, free_b;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < b.labels.size(); ++j)
      if (a.labels[i] == b.labels[j]) {
        shared_a.push_back(i);
        shared_b.push_back(j);
        found = true;
      }
    if (!found) free_a.push_back(i);
  }
  for (std::size_t j = 0; j < b.labels.size(); ++j)
    if (std::find(shared_b.begin(), shared_b.end(), j) == shared_b.end()) free_b.push_back(j);

  auto strides = [d](std::size_t rank) {
    std::vector<std::size_t> st(rank);
    std::size_t s = 1;
    for (std::size_t r = rank; r-- > 0;) {
      st[r] = s;
      s *= d;
    }
    return st;
  };
  const auto sa = strides(a.labels.size());
  const auto sb = strides(b.labels.size());
  auto offsets = [d](const std::vector<std::size_t>& slots, const std::vector<std::size_t>& st) {
    std::vector<std::size_t> offs(ipow(d, slots.size()), 0);
    for (std::size_t m = 0; m < offs.size(); ++m) {
      std::size_t rem = m, off = 0;
      for (std::size_t k = slots.size(); k-- > 0;) {
        off += (rem % d) * st[slots[k]];
        rem /= d;
      }
      offs[m] = off;
    }
    return offs;
  };
  const auto sh_a = offsets(shared_a, sa), sh_b = offsets(shared_b, sb);
  const auto fr_a = offsets(free_a, sa), fr_b = offsets(free_b, sb);

  std::vector<Variance> var;
  std::vector<int> labels;
  for (auto s : free_a) {
    var.push_back(a.tensor.variance(s));
    labels.push_back(a.labels[s]);
  }
  for (auto s : free_b) {
    var.push_back(b.tensor.variance(s));
    labels.push_back(b.labels[s]);
  }
  DenseTensor<T> out(a.tensor.dim(), var);
  const auto& ta = a.tensor;
  const auto& tb = b.tensor;
  for (std::size_t ia = 0; ia < fr_a.size(); ++ia)
    for (std::size_t ib = 0; ib < fr_b.size(); ++ib) {
      T acc(0.0);
      for (std::size_t m = 0; m < sh_a.size(); ++m) {
        const auto& x = ta[fr_a[ia] + sh_a[m]];
        if (skip_zero(x)) continue;
        const auto& y = tb[fr_b[ib] + sh_b[m]];
        if (skip_zero(y)) continue;
        acc += x * y;
      }
      out[ia * fr_b.size() + ib] = std::move(acc);
    }
  return {std::move(out), std::move(labels)};
}

/// Full-loop evaluation over every label; the oracle for schedule checks.
template <typename T>
Operand<T> naive_contract(const std::vector<Operand<T>>& ops, const std::vector<int>& out_labels) {
  std::vector<int> all;
  for (const auto& op : ops)
    for (int l : op.labels)
      if (std::find(all.begin(), all.end(), l) == all.end()) all.push_back(l);
  const int d = ops.front().tensor.dim();
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < all.size(); ++i) pos[all[i]] = i;
  std::vector<Variance> var(out_labels.size(), Variance::Lower);
  for (std::size_t i = 0; i < out_labels.size(); ++i)
    for (const auto& op : ops)
      for (std::size_t s = 0; s < op.labels.size(); ++s)
        if (op.labels[s] == out_labels[i]) var[i] = op.tensor.variance(s);
  DenseTensor<T> out(d, var);
  std::vector<int> assign(all.size(), 0), idx, oidx(out_labels.size());
  const std::size_t total = ipow(static_cast<std::size_t>(d), all.size());
  for (std::size_t m = 0; m < total; ++m) {
    std::size_t rem = m;
    for (std::size_t k = all.size(); k-- > 0;) {
      assign[k] = static_cast<int>(rem % static_cast<std::size_t>(d));
      rem /= static_cast<std::size_t>(d);
    }
    T prod(1.0);
    bool zero = false;
    for (const auto& op : ops) {
      idx.resize(op.labels.size());
      for (std::size_t s = 0; s < idx.size(); ++s) idx[s] = assign[pos[op.labels[s]]];
      const auto& v = op.tensor.at(idx);
      if (skip_zero(v)) {
        zero = true;
        break;
      }
      prod = prod * v;
    }
    if (zero) continue;
    for (std::size_t i = 0; i < out_labels.size(); ++i) oidx[i] = assign[pos[out_labels[i]]];
    out.at(oidx) += prod;
  }
  return {std::move(out), out_labels};
}

}  // namespace detail

template <typename T>
ContractionSpec<T> ContractionSpec<T>::from_indices(std::string_view expr, std::vector<const DenseTensor<T>*> fs) {
  ContractionSpec<T> spec;
  spec.factors = std::move(fs);
  std::string_view lhs = expr, rhs;
  bool explicit_out = false;
  if (auto arrow = expr.find("->"); arrow != std::string_view::npos) {
    lhs = expr.substr(0, arrow);
    rhs = expr.substr(arrow + 2);
    explicit_out = true;
  }
  std::map<char, std::vector<SlotRef>> occ;
  std::vector<char> order;
  int f = 0, s = 0;
  for (char c : lhs) {
    if (c == ',') {
      ++f;
      s = 0;
      continue;
    }
    if (c == ' ') continue;
    if (occ.find(c) == occ.end()) order.push_back(c);
    occ[c].push_back({f, s++});
  }
  if (static_cast<std::size_t>(f + 1) != spec.factors.size())
    throw std::invalid_argument("contract: factor count does not match index expression");
  for (char c : order) {
    const auto& v = occ[c];
    if (v.size() == 2) spec.pairings.push_back({v[0], v[1]});
    else if (v.size() == 1) {
      if (!explicit_out) spec.free_order.push_back(v[0]);
    } else {
      throw std::invalid_argument(std::string("contract: label used more than twice: ") + c);
    }
  }
  if (explicit_out)
    for (char c : rhs) {
      auto it = occ.find(c);
      if (it == occ.end() || it->second.size() != 1)
        throw std::invalid_argument(std::string("contract: bad output label: ") + c);
      spec.free_order.push_back(it->second[0]);
    }
  return spec;
}

/// Evaluate a contraction. The pairwise order is chosen by the schedule; the
/// result does not depend on it beyond rounding.
template <typename T>
DenseTensor<T> contract(const ContractionSpec<T>& spec, const DenseTensor<T>& metric,
                        const DenseTensor<T>& inverse_metric, ContractOptions opts = {}) {
  using detail::Operand;
  if (spec.factors.empty()) return DenseTensor<T>::scalar(T(1.0));
  int dim = -1;
  std::vector<Operand<T>> ops;
  for (auto* f : spec.factors) {
    if (f->rank() > 0) {
      if (dim < 0) dim = f->dim();
      else if (dim != f->dim()) throw std::invalid_argument("contract: factors have different dimensions");
    }
    ops.push_back({*f, std::vector<int>(f->rank(), -1)});
  }
  if (dim < 0) dim = spec.factors.front()->dim();
  int next = 0;
  auto claim = [&](SlotRef r) -> int& {
    if (r.factor < 0 || static_cast<std::size_t>(r.factor) >= ops.size() || r.slot < 0 ||
        static_cast<std::size_t>(r.slot) >= ops[static_cast<std::size_t>(r.factor)].labels.size())
      throw std::out_of_range("contract: slot reference out of range");
    int& l = ops[static_cast<std::size_t>(r.factor)].labels[static_cast<std::size_t>(r.slot)];
    if (l != -1) throw std::invalid_argument("contract: slot used in more than one pairing");
    return l;
  };
  std::vector<Operand<T>> metrics;
  for (const auto& [x, y] : spec.pairings) {
    const Variance vx = spec.factors[static_cast<std::size_t>(x.factor)]->variance(static_cast<std::size_t>(x.slot));
    const Variance vy = spec.factors[static_cast<std::size_t>(y.factor)]->variance(static_cast<std::size_t>(y.slot));
    if (vx != vy) {
      const int l = next++;
      claim(x) = l;
      claim(y) = l;
    } else {
      const int lx = next++, ly = next++;
      claim(x) = lx;
      claim(y) = ly;
      const auto& m = vx == Variance::Lower ? inverse_metric : metric;
      if (m.dim() != dim || m.rank() != 2) throw std::invalid_argument("contract: metric has wrong shape");
      metrics.push_back({m, {lx, ly}});
    }
  }
  std::vector<int> out_labels;
  for (const auto& r : spec.free_order) {
    const int l = next++;
    claim(r) = l;
    out_labels.push_back(l);
  }
  for (const auto& op : ops)
    for (int l : op.labels)
      if (l == -1) throw std::invalid_argument("contract: slot neither paired nor listed as free");
  for (auto& m : metrics) ops.push_back(std::move(m));

  Operand<T> result;
  if (opts.schedule == Schedule::Naive) {
    result = detail::naive_contract(ops, out_labels);
  } else {
    for (auto& op : ops) op = detail::self_trace(op);
    std::mt19937_64 rng(opts.seed);
    while (ops.size() > 1) {
      std::size_t bi = 0, bj = 1;
      auto shares = [&](std::size_t i, std::size_t j) {
        for (int l : ops[i].labels)
          if (std::find(ops[j].labels.begin(), ops[j].labels.end(), l) != ops[j].labels.end()) return true;
        return false;
      };
      if (opts.schedule == Schedule::Greedy) {
        double best = -1, best_flops = -1;
        for (std::size_t i = 0; i < ops.size(); ++i)
          for (std::size_t j = i + 1; j < ops.size(); ++j) {
            std::size_t nshared = 0;
            for (int l : ops[i].labels)
              nshared += std::count(ops[j].labels.begin(), ops[j].labels.end(), l);
            const std::size_t nout = ops[i].labels.size() + ops[j].labels.size() - 2 * nshared;
            const double size = std::pow(static_cast<double>(dim), static_cast<double>(nout));
            const double flops = size * std::pow(static_cast<double>(dim), static_cast<double>(nshared));
            const double penalty = nshared == 0 ? 1e30 : 0.0;
            if (best < 0 || size + penalty < best || (size + penalty == best && flops < best_flops)) {
              best = size + penalty;
              best_flops = flops;
              bi = i;
              bj = j;
            }
          }
      } else {
        std::vector<std::pair<std::size_t, std::size_t>> cands;
        for (std::size_t i = 0; i < ops.size(); ++i)
          for (std::size_t j = i + 1; j < ops.size(); ++j)
            if (shares(i, j)) cands.push_back({i, j});
        if (cands.empty()) cands.push_back({0, 1});
        std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
        std::tie(bi, bj) = cands[pick(rng)];
      }
      auto merged = detail::contract_pair(ops[bi], ops[bj]);
      ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(bj));
      ops[bi] = std::move(merged);
    }
    result = std::move(ops.front());
  }
  if (out_labels.empty()) return result.tensor.rank() == 0 ? result.tensor : DenseTensor<T>::scalar(result.tensor[0]);
  std::vector<int> perm(out_labels.size());
  for (std::size_t i = 0; i < out_labels.size(); ++i) {
    auto it = std::find(result.labels.begin(), result.labels.end(), out_labels[i]);
    perm[i] = static_cast<int>(it - result.labels.begin());
  }
  return permute_slots(result.tensor, perm);
}

/// Index-notation convenience: contract("abcd,abcd", {&w, &w}, g, ginv).
template <typename T>
DenseTensor<T> contract(std::string_view expr, std::vector<const DenseTensor<T>*> factors,
                        const DenseTensor<T>& metric, const DenseTensor<T>& inverse_metric,
                        ContractOptions opts = {}) {
  return contract(ContractionSpec<T>::from_indices(expr, std::move(factors)), metric, inverse_metric, opts);
}

/// Scalar result of a complete contraction.
template <typename T>
T contract_scalar(std::string_view expr, std::vector<const DenseTensor<T>*> factors, const DenseTensor<T>& metric,
                  const DenseTensor<T>& inverse_metric, ContractOptions opts = {}) {
  auto r = contract(expr, std::move(factors), metric, inverse_metric, opts);
  if (r.rank() != 0) throw std::invalid_argument("contract_scalar: expression leaves free indices");
  return r[0];
}

}  // namespace rcurv
