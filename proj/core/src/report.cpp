#include "rcurv/report.hpp"

#include <algorithm>
#include <cmath>

namespace rcurv {

namespace {

void classify(CheckReport& r) {
  if (!std::isfinite(r.abs_err)) {
    r.pass = false;
    r.criterion = "none";
  } else if (r.abs_err <= r.tol) {
    r.pass = true;
    r.criterion = "abs";
  } else if (r.rel_err <= r.tol) {
    r.pass = true;
    r.criterion = "rel";
  } else {
    r.pass = false;
    r.criterion = "none";
  }
}

}  // namespace

CheckReport make_check(std::string id, double lhs, double rhs, double tol, std::string note) {
  CheckReport r;
  r.id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  r.note = std::move(note);
  r.abs_err = std::abs(lhs - rhs);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
  classify(r);
  return r;
}

CheckReport make_residual_check(std::string id, double residual, double scale, double tol, std::string note) {
  CheckReport r;
  r.id = std::move(id);
  r.lhs = residual;
  r.rhs = 0.0;
  r.tol = tol;
  r.note = std::move(note);
  r.abs_err = std::abs(residual);
  r.rel_err = scale > 0.0 ? r.abs_err / scale : r.abs_err;
  classify(r);
  return r;
}

}  // namespace rcurv
