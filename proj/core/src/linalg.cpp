#include "rcurv/linalg.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace rcurv {

namespace {

Eigen::MatrixXd to_eigen(const Tensor& m) {
  if (m.rank() != 2) throw std::invalid_argument("matrix operation on a tensor of rank != 2");
  const int d = m.dim();
  Eigen::MatrixXd out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = m({i, j});
  return out;
}

std::vector<Variance> flipped(const std::vector<Variance>& v) { return {flip(v[0]), flip(v[1])}; }

}  // namespace

Tensor matrix_inverse(const Tensor& m) {
  const auto a = to_eigen(m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw std::domain_error("matrix_inverse: singular metric");
  const Eigen::MatrixXd inv = lu.inverse();
  Tensor out(m.dim(), flipped(m.variance()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out({i, j}) = inv(i, j);
  if (!all_finite(out)) throw std::domain_error("matrix_inverse: non-finite inverse");
  return out;
}

JetTensor matrix_inverse(const JetTensor& m) {
  const int d = m.dim();
  const Tensor inv0 = matrix_inverse(values(m));
  int order = 0;
  for (const auto& v : m.data())
    if (!v.is_constant()) order = std::max(order, v.order());

  // x = -inv0 * (m - m0), with vanishing base value
  JetTensor x(d, {flip(m.variance(0)), m.variance(1)});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Jet acc(0.0);
      for (int k = 0; k < d; ++k) {
        Jet n = m({k, j});
        n -= Jet(n.value());
        if (n.is_zero()) continue;
        acc -= n * inv0({i, k});
      }
      x({i, j}) = std::move(acc);
    }
  JetTensor term = lift(inv0);
  JetTensor sum = term;
  for (int p = 1; p <= order; ++p) {
    JetTensor next(d, term.variance());
    bool any = false;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Jet acc(0.0);
        for (int k = 0; k < d; ++k) {
          const Jet& a = x({i, k});
          const Jet& b = term({k, j});
          if (a.is_zero() || b.is_zero()) continue;
          acc += a * b;
        }
        if (!acc.is_zero()) any = true;
        next({i, j}) = std::move(acc);
      }
    if (!any) break;
    term = std::move(next);
    sum += term;
  }
  return sum;
}

double determinant(const Tensor& m) { return to_eigen(m).determinant(); }

int numerical_rank(const std::vector<std::vector<double>>& rows, double rel_tol) {
  if (rows.empty()) return 0;
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

}  // namespace rcurv
