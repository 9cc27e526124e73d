#include <array>
#include <cmath>

#include "doctest.h"
#include "rcurv/jet.hpp"

using namespace rcurv;

TEST_CASE("jet arithmetic reproduces Taylor coefficients") {
  const auto space = JetSpace::get(2, 6);
  const Jet x = Jet::variable(*space, 0, 0.3, 6);
  const Jet y = Jet::variable(*space, 1, -0.7, 6);

  SUBCASE("product and derivative") {
    const Jet f = x * x * y;
    const std::array<std::uint8_t, 2> dxdy{1, 1}, dxx{2, 0};
    CHECK(f.value() == doctest::Approx(0.09 * -0.7));
    CHECK(f.derivative(dxdy) == doctest::Approx(0.6));
    CHECK(f.derivative(dxx) == doctest::Approx(-1.4));
  }
  SUBCASE("elementary functions") {
    const std::array<std::uint8_t, 2> d5{5, 0};
    CHECK(sin(x).derivative(d5) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
    CHECK(exp(x).derivative(d5) == doctest::Approx(std::exp(0.3)).epsilon(1e-14));
    CHECK(log(x + 1.0).derivative(d5) == doctest::Approx(24.0 / std::pow(1.3, 5)).epsilon(1e-13));
    const Jet r = sqrt(x + 1.0);
    CHECK((r * r - x - 1.0).max_abs() <= 1e-15);
    CHECK((inverse(x + 2.0) * (x + 2.0) - 1.0).max_abs() <= 1e-15);
    CHECK((pow(x + 2.0, -1.5) * pow(x + 2.0, 1.5) - 1.0).max_abs() <= 1e-14);
  }
  SUBCASE("partial lowers the order") {
    const Jet f = sin(x) * cos(y);
    const Jet fx = f.partial(0);
    CHECK(fx.order() == 5);
    CHECK(fx.value() == doctest::Approx(std::cos(0.3) * std::cos(-0.7)));
  }
  SUBCASE("truncation is a prefix") {
    const Jet f = exp(x * y);
    const Jet low = Jet::variable(*space, 0, 0.3, 3) * Jet::variable(*space, 1, -0.7, 3);
    const Jet g = exp(low);
    const Jet ft = f.truncated(3);
    REQUIRE(ft.coeffs().size() == g.coeffs().size());
    for (std::size_t i = 0; i < g.coeffs().size(); ++i) CHECK(ft.coeffs()[i] == g.coeffs()[i]);
  }
  SUBCASE("constants never truncate") {
    const Jet c(2.5);
    CHECK(c.is_constant());
    CHECK(c.order() == Jet::kUnbounded);
    const Jet s = c * x;
    CHECK(s.order() == 6);
    CHECK(Jet::zero(*space, 4).is_zero());
  }
}

TEST_CASE("embedding into a larger space") {
  const auto small = JetSpace::get(1, 3);
  const auto big = JetSpace::get(3, 3);
  const Jet x = Jet::variable(*small, 0, 0.5, 3);
  const Jet f = x * x * x;
  const std::array<int, 1> map{2};
  const Jet e = f.embedded(*big, map);
  const std::array<std::uint8_t, 3> d3{0, 0, 3}, d1{1, 0, 0};
  CHECK(e.derivative(d3) == doctest::Approx(6.0));
  CHECK(e.derivative(d1) == 0.0);
}
