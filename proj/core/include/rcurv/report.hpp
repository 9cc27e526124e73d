#pragma once

#include <chrono>
#include <string>

namespace rcurv {

/// One verification record. `anchor` is filled in by the caller that knows
/// which statement the check certifies.
struct CheckReport {
  std::string id;
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string criterion;  // "abs", "rel" or "none"
  double wall_seconds = 0.0;
  std::string note;
};

/// Fill errors and the pass flag: pass iff abs_err <= tol or rel_err <= tol.
CheckReport make_check(std::string id, double lhs, double rhs, double tol, std::string note = {});

/// Same, but a residual that must vanish is compared against an explicit scale.
CheckReport make_residual_check(std::string id, double residual, double scale, double tol, std::string note = {});

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rcurv
