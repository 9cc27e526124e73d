#include <cmath>
#include <random>

#include "doctest.h"
#include "rcurv/ambient.hpp"
#include "rcurv/integrate.hpp"
#include "rcurv/invariants.hpp"
#include "support.hpp"

using namespace rcurv;
using rcurv::test::kPi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double weyl_norm_at(const ManifoldModel& m, std::span<const double> x) {
  const Curvature geo = m.curvature(x, 2);
  return squared_norm(values(geo.weyl()), values(geo.inverse_metric()));
}

}  // namespace

TEST_CASE("quadrature volumes") {
  SUBCASE("against exact volumes") {
    CHECK(rel(quadrature_volume(sphere(4), 16), 8.0 * kPi * kPi / 3.0) <= 1e-8);
    CHECK(rel(quadrature_volume(product_of_spheres({1.0, 1.0}), 16), 16.0 * kPi * kPi) <= 1e-8);
    CHECK(rel(quadrature_volume(cp2_fubini_study(), 8), kPi * kPi / 2.0) <= 1e-8);
    CHECK(rel(quadrature_volume(sphere(3, 1.5), 16), *sphere(3, 1.5).exact_volume) <= 1e-8);
  }
  SUBCASE("doubling the node count") {
    for (const char* name : {"s4", "s2xs2", "cp2", "perturbed-s4"}) {
      const auto m = model_by_name(name);
      const double a = quadrature_volume(m, 10), b = quadrature_volume(m, 20);
      CAPTURE(name);
      CHECK(rel(a, b) < 1e-8);
    }
  }
  SUBCASE("rule structure") {
    const auto q = make_quadrature(sphere(2), 5);
    CHECK(q.size() == 25);
    CHECK(q.exactness_degree == 9);
    double total = 0.0;
    q.for_each([&](std::span<const double>, double w) { total += w; });
    CHECK(total == doctest::Approx((kPi - 2e-6) * 2.0 * kPi).epsilon(1e-14));
    CHECK_THROWS_AS(make_quadrature(sphere(2), 0), std::invalid_argument);
  }
}

TEST_CASE("integrate_scalar") {
  SUBCASE("homogeneous short-circuit agrees with quadrature") {
    for (const char* name : {"s2xs2", "cp2"}) {
      const auto m = model_by_name(name);
      const auto f = [&](std::span<const double> x) { return weyl_norm_at(m, x); };
      const double fast = integrate_scalar(f, m);
      const double slow = integrate_scalar(f, m, {8, false});
      CAPTURE(name);
      CHECK(rel(fast, slow) <= 1e-10);
    }
  }
  SUBCASE("|W|^2 integrals") {
    const auto s22 = product_of_spheres({1.0, 1.0});
    const auto cp2 = cp2_fubini_study();
    CHECK(rel(integrate_scalar([&](std::span<const double> x) { return weyl_norm_at(s22, x); }, s22),
              256.0 * kPi * kPi / 3.0) <= 1e-12);
    CHECK(rel(integrate_scalar([&](std::span<const double> x) { return weyl_norm_at(cp2, x); }, cp2),
              48.0 * kPi * kPi) <= 1e-12);
  }
  SUBCASE("noncompact models are rejected") {
    CHECK_THROWS_AS(integrate_scalar([](std::span<const double>) { return 1.0; }, hyperbolic_normal_form(4)),
                    std::invalid_argument);
  }
  SUBCASE("pairwise summation is deterministic and accurate") {
    std::vector<double> v(10001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    const double a = pairwise_sum(v), b = pairwise_sum(v);
    CHECK(a == b);
    double k = 0.0;
    for (std::size_t i = v.size(); i-- > 0;) k += v[i];
    CHECK(a == doctest::Approx(k).epsilon(1e-15));
    CHECK(pairwise_sum({}) == 0.0);
  }
}

TEST_CASE("LaurentSeries") {
  LaurentSeries a, b;
  a.add(-3, 2.0);
  a.add(0, 1.5);
  a.add(2, 4.0);
  b.add(-1, -1.0);
  b.add(0, 0.25);
  SUBCASE("fp reads the constant term") {
    CHECK(a.fp() == 1.5);
    CHECK(a.coefficient(-3) == 2.0);
    CHECK(a.coefficient(7) == 0.0);
  }
  SUBCASE("fp is linear") {
    CHECK((a + b).fp() == doctest::Approx(a.fp() + b.fp()));
    CHECK((a * 3.0).fp() == doctest::Approx(3.0 * a.fp()));
    CHECK((a * 2.0 + b * -5.0).fp() == doctest::Approx(2.0 * a.fp() - 5.0 * b.fp()));
  }
  SUBCASE("pure powers have no finite part") {
    LaurentSeries d;
    for (int e : {-5, -3, -1, 1, 2}) d.add(e, 1.0 + e);
    CHECK(d.fp() == 0.0);
  }
  SUBCASE("truncation") {
    LaurentSeries t(1);
    t.add(2, 5.0);
    t.add(1, 3.0);
    CHECK(t.coefficient(2) == 0.0);
    CHECK(t.coefficient(1) == 3.0);
  }
  SUBCASE("log coefficient") {
    LaurentSeries l;
    l.add_log(0.5);
    l += l;
    CHECK(l.log_coefficient() == 1.0);
  }
}

TEST_CASE("renormalized volume of hyperbolic space") {
  SUBCASE("H4") {
    const auto r = renormalized_volume(4);
    CHECK(std::abs(r.value - 4.0 * kPi * kPi / 3.0) <= 1e-12);
    CHECK(r.expansion.coefficient(-3) == doctest::Approx(2.0 * kPi * kPi / 3.0).epsilon(1e-14));
    CHECK(r.expansion.coefficient(-1) == doctest::Approx(-1.5 * kPi * kPi).epsilon(1e-14));
    CHECK(r.expansion.coefficient(-2) == 0.0);
    CHECK(r.expansion.log_coefficient() == 0.0);
  }
  SUBCASE("H6 and H8") {
    CHECK(std::abs(renormalized_volume(6).value + 8.0 * std::pow(kPi, 3) / 15.0) <= 1e-12);
    CHECK(std::abs(renormalized_volume(8).value - 16.0 * std::pow(kPi, 4) / 105.0) <= 1e-12);
  }
  SUBCASE("agreement with the conformally flat Gauss-Bonnet value") {
    for (int n : {2, 4, 6, 8, 10})
      CHECK(std::abs(renormalized_volume(n).value - conformally_flat_renormalized_volume(n)) <=
            1e-12 * std::abs(conformally_flat_renormalized_volume(n)));
  }
  SUBCASE("log terms are reported") {
    WarpedNormalForm w = hyperbolic_warp(4);
    w.density = {0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(renormalized_volume(w), std::domain_error);
    CHECK_THROWS_AS(conformally_flat_renormalized_volume(5), std::invalid_argument);
  }
}

TEST_CASE("verify_cgb") {
  for (const char* name : {"s4", "s2xs2", "cp2", "s2^3", "s6"}) {
    const auto r = verify_cgb(model_by_name(name));
    CAPTURE(name);
    CHECK(r.pass);
    CHECK(r.rel_err <= 1e-10);
  }
  CHECK(verify_cgb(cp2_fubini_study()).lhs == doctest::Approx(12.0 * kPi * kPi).epsilon(1e-12));
  CHECK(verify_cgb(cp2_fubini_study(), 1e-6, {8, false}).rel_err <= 1e-10);
  CHECK_THROWS_AS(verify_cgb(hyperbolic_normal_form(4)), std::invalid_argument);
  CHECK_THROWS_AS(verify_cgb(sphere(5)), std::invalid_argument);
}

TEST_CASE("verify_gbc") {
  SUBCASE("closure on Einstein models") {
    for (const char* name : {"s4", "s2xs2", "cp2", "s2^3"}) {
      for (const auto& r : verify_gbc(model_by_name(name))) {
        CAPTURE(r.id);
        CHECK(r.pass);
        CHECK(r.rel_err <= 1e-10);
      }
    }
  }
  SUBCASE("W = 0 collapse matches cgb") {
    const auto s4 = sphere(4);
    const auto g = verify_gbc(s4);
    CHECK(g[0].rhs == doctest::Approx(verify_cgb(s4).lhs).epsilon(1e-12));
  }
  SUBCASE("S2xS2 ingredients") {
    const auto r = verify_gbc(product_of_spheres({1.0, 1.0}));
    CHECK(r[0].note.find("volume_term=52.637890") != std::string::npos);
    CHECK(r[0].note.find("int_P2=105.27578") != std::string::npos);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(verify_gbc(perturbed_sphere(4, 0.2)), std::invalid_argument);
    CHECK_THROWS_AS(verify_gbc(sphere(5)), std::invalid_argument);
  }
}

TEST_CASE("main theorem coefficient") {
  CHECK(main_theorem_coefficient(4, 2) == 1.0);
  CHECK(main_theorem_coefficient(6, 2) == doctest::Approx(0.25));
  CHECK(main_theorem_coefficient(8, 3) == doctest::Approx(0.5 * 2.0 / 6.0));
  for (int n : {4, 6, 8, 10})
    for (int k = 1; 2 * k <= n; ++k) {
      const double j = 0.37;
      const double prod = main_theorem_coefficient(n, k) * i_ell_closed_form_coefficient(n, k, n / 2 - k, j);
      CHECK(prod == doctest::Approx(std::pow(-2.0 * j / n, n / 2 - k)).epsilon(1e-13));
    }
  CHECK_THROWS_AS(main_theorem_coefficient(5, 2), std::invalid_argument);

  SUBCASE("compact shadow on products of spheres") {
    struct Case {
      const char* model;
      const char* inv;
    };
    for (auto [model, inv] : {Case{"s2^3", "|W|^2"}, Case{"s2^3", "Pf3(W)"}, Case{"s2^3", "W32"}, Case{"s2xs2", "|W|^2"}}) {
      const auto r = verify_main_theorem_coefficient(model_by_name(model), inv);
      CAPTURE(r.id);
      CHECK(r.pass);
      CHECK(r.rel_err <= 1e-9);
    }
  }
  SUBCASE("k = n/2 compares int I with itself") {
    const auto r = verify_main_theorem_coefficient(model_by_name("s2^3"), "Pf3(W)");
    CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-14));
  }
  SUBCASE("the (S2)^3 coefficient is -4/5") {
    const auto m = model_by_name("s2^3");
    const auto r = verify_main_theorem_coefficient(m, "|W|^2");
    const double w2 = weyl_norm_at(m, m.base_point) * *m.exact_volume;
    CHECK(r.note.find("int_I=") != std::string::npos);
    const double int_amb = r.lhs / main_theorem_coefficient(6, 2);
    CHECK(int_amb == doctest::Approx(-0.8 * w2).epsilon(1e-10));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(verify_main_theorem_coefficient(model_by_name("s2^3"), "|Rm|^2"), std::invalid_argument);
    CHECK_THROWS_AS(verify_main_theorem_coefficient(model_by_name("s2xs2"), "Pf3(W)"), std::invalid_argument);
    CHECK_THROWS_AS(verify_main_theorem_coefficient(perturbed_sphere(4, 0.2), "|W|^2"), std::invalid_argument);
  }
}

TEST_CASE("worked examples") {
  SUBCASE("homogeneous models give zero on both sides") {
    for (const char* name : {"s2xs2", "cp2"}) {
      for (const auto& r : verify_worked_examples(model_by_name(name))) {
        CAPTURE(r.id);
        CHECK(r.pass);
        CHECK(std::abs(r.lhs) <= 1e-8);
      }
    }
  }
  SUBCASE("Delta W identity over S2xS2 and CP2 at random points") {
    std::mt19937_64 rng(3);
    for (const char* name : {"s2xs2", "cp2", "s2^3"}) {
      const auto m = model_by_name(name);
      const auto r = delta_weyl_identity(m, m.random_point(rng), 1e-8);
      CAPTURE(name);
      CHECK(r.pass);
      CHECK(r.abs_err <= 1e-8);
    }
    CHECK_THROWS_AS(delta_weyl_identity(perturbed_sphere(4, 0.2), sphere(4).base_point, 1e-8), std::invalid_argument);
  }
  SUBCASE("integration by parts on perturbed S4") {
    const auto m = perturbed_sphere(4, 0.2);
    const auto r = ibp_weyl_norm_gradient(m, 1e-6, {10, true});
    CHECK(r.pass);
    CHECK(r.lhs > 1e-6);
  }
}
