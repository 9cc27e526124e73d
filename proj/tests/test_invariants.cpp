#include <cmath>
#include <random>

#include "doctest.h"
#include "rcurv/catalog.hpp"
#include "rcurv/contraction.hpp"
#include "rcurv/invariants.hpp"
#include "rcurv/linalg.hpp"
#include "support.hpp"

using namespace rcurv;
using rcurv::test::identity_metric;

namespace {

struct Algebra {
  Tensor w, g, gi;
};

Algebra random_algebra(int dim, std::uint64_t seed) {
  return {random_weyl(dim, seed), identity_metric(dim), identity_metric(dim, Variance::Upper)};
}

double cubic(const char* expr, const Algebra& a) {
  return contract_scalar<double>(expr, {&a.w, &a.w, &a.w}, a.g, a.gi);
}

double quartic(const char* expr, const Algebra& a) {
  return contract_scalar<double>(expr, {&a.w, &a.w, &a.w, &a.w}, a.g, a.gi);
}

}  // namespace

TEST_CASE("factorials") {
  CHECK(double_factorial(-1) == 1.0);
  CHECK(double_factorial(0) == 1.0);
  CHECK(double_factorial(7) == 105.0);
  CHECK(double_factorial(8) == 384.0);
  CHECK_THROWS_AS(double_factorial(-3), std::invalid_argument);
  CHECK(factorial(0) == 1.0);
  CHECK(factorial(6) == 720.0);
}

TEST_CASE("pf_ell") {
  SUBCASE("Pf_0 is one") {
    const auto a = random_algebra(5, 1);
    CHECK(pf_ell(a.w, 0, a.gi) == 1.0);
  }
  SUBCASE("Pf_1 of a Weyl-type tensor vanishes") {
    for (int n : {4, 5, 6, 8}) {
      const auto a = random_algebra(n, 10 + n);
      CHECK(std::abs(pf_ell(a.w, 1, a.gi)) <= 1e-12 * std::sqrt(squared_norm(a.w, a.gi)));
    }
  }
  SUBCASE("Pf_2 of the round S4 curvature") {
    const auto s4 = sphere(4);
    const Curvature geo = s4.curvature(s4.base_point, 2);
    const Tensor rm = values(geo.riemann()), gi = values(geo.inverse_metric());
    CHECK(pf_ell(rm, 2, gi) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(pf_ell(rm, 1, gi) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(pf_ell_brute_force(mixed_curvature(rm, gi), 2) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("pfaffian of catalog models") {
    struct Case {
      const char* name;
      double pf;
    };
    for (auto [name, pf] : {Case{"s4", 3.0}, Case{"s2xs2", 1.0}, Case{"cp2", 24.0}, Case{"s2^3", 1.0}}) {
      const auto m = model_by_name(name);
      const Curvature geo = m.curvature(m.base_point, 2);
      CAPTURE(name);
      CHECK(pfaffian(values(geo.riemann()), values(geo.inverse_metric())) == doctest::Approx(pf).epsilon(1e-12));
    }
  }
  SUBCASE("optimized expansion agrees with the brute-force oracle") {
    for (int n : {4, 5, 6}) {
      std::mt19937_64 rng(n);
      const Tensor t = test::random_tensor(n, {Variance::Lower, Variance::Lower, Variance::Upper, Variance::Upper}, rng);
      for (int l = 0; 2 * l <= n; ++l) {
        const double fast = pf_ell_mixed(t, l), slow = pf_ell_brute_force(t, l);
        CAPTURE(n);
        CAPTURE(l);
        CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, std::abs(slow)));
      }
    }
  }
  SUBCASE("errors") {
    const auto a = random_algebra(5, 2);
    CHECK_THROWS_AS(pf_ell(a.w, 3, a.gi), std::invalid_argument);
    CHECK_THROWS_AS(pf_ell(a.w, -1, a.gi), std::invalid_argument);
    CHECK_THROWS_AS(pfaffian(a.w, a.gi), std::invalid_argument);
  }
}

TEST_CASE("weyl_basis") {
  SUBCASE("zero tensor") {
    const Tensor z = Tensor::lower(6, 4), g = identity_metric(6), gi = identity_metric(6, Variance::Upper);
    for (int k : {2, 3, 4})
      for (double v : weyl_basis(z, g, gi, k)) CHECK(v == 0.0);
  }
  SUBCASE("S2xS2") {
    const auto m = product_of_spheres({1.0, 1.0});
    const Curvature geo = m.curvature(m.base_point, 2);
    const auto b = weyl_basis(values(geo.weyl()), values(geo.metric()), values(geo.inverse_metric()), 2);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("W41 is the square of W21") {
    const auto a = random_algebra(6, 3);
    const double w21 = weyl_basis(a.w, a.g, a.gi, 2)[0];
    const auto w4 = weyl_basis(a.w, a.g, a.gi, 4);
    REQUIRE(w4.size() == 7);
    CHECK(w4[0] == doctest::Approx(w21 * w21).epsilon(1e-12));
  }
  SUBCASE("unsupported degree") {
    const auto a = random_algebra(4, 4);
    CHECK_THROWS_AS(weyl_basis(a.w, a.g, a.gi, 5), std::invalid_argument);
    CHECK_THROWS_AS(pfaffian_weyl_coefficients(1), std::invalid_argument);
  }
}

TEST_CASE("low_order_pfaffian_identity") {
  SUBCASE("zero tensor") {
    const Tensor z = Tensor::lower(4, 4);
    const auto r = low_order_pfaffian_identity(z, identity_metric(4), identity_metric(4, Variance::Upper), 2);
    CHECK(r.pass);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  SUBCASE("random Weyl tensors") {
    for (int n : {4, 5, 6, 8})
      for (int l = 2; l <= 4 && 2 * l <= n; ++l)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const auto a = random_algebra(n, 1000 * n + seed);
          const auto r = low_order_pfaffian_identity(a.w, a.g, a.gi, l, 1e-10);
          CAPTURE(r.id);
          CHECK(r.pass);
          CHECK(r.rel_err <= 1e-10);
        }
  }
  SUBCASE("S2xS2 Pf_2(W)") {
    const auto m = product_of_spheres({1.0, 1.0});
    const Curvature geo = m.curvature(m.base_point, 2);
    const Tensor w = values(geo.weyl()), gi = values(geo.inverse_metric());
    CHECK(pf_ell(w, 2, gi) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(low_order_pfaffian_identity(w, values(geo.metric()), gi, 2).pass);
  }
}

TEST_CASE("Bianchi rearrangements") {
  for (int n : {4, 5, 6, 7}) {
    const auto a = random_algebra(n, 77 + n);
    CAPTURE(n);
    SUBCASE("cubic") {
      const double lhs = cubic("abce,cdaf,efbd", a);
      const double rhs = cubic("abce,afcd,bfed", a) - 0.25 * cubic("acbe,acfd,befd", a);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(std::abs(lhs), 1e-300));
      // Pf_3 from the direct expansion, before rearrangement
      const double w31 = cubic("abcd,cdef,efab", a);
      if (n >= 6) CHECK(pf_ell(a.w, 3, a.gi) == doctest::Approx((2.0 * w31 - 8.0 * lhs) / 48.0).epsilon(1e-11));
    }
    SUBCASE("quartic") {
      const double lhs = quartic("abeg,cdab,efch,ghdf", a);
      const double rhs =
          quartic("cdab,abeg,chef,dhgf", a) - 0.5 * quartic("cdab,abeg,cefh,dgfh", a);
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
    }
  }
}

TEST_CASE("random_weyl") {
  SUBCASE("symmetry residuals") {
    for (int n : {4, 6, 8}) {
      const auto a = random_algebra(n, 5 + n);
      CHECK(curvature_symmetry_residuals(a.w, a.gi).max() <= 1e-12);
      CHECK(max_abs(a.w) > 0.1);
    }
  }
  SUBCASE("projector idempotence") {
    std::mt19937_64 rng(9);
    for (int n : {4, 5, 7}) {
      const Tensor g = test::random_spd(n, rng);
      const Tensor gi = matrix_inverse(g);
      const Tensor t = test::random_tensor(n, std::vector<Variance>(4, Variance::Lower), rng);
      const Tensor p = project_weyl(t, g, gi);
      CHECK(max_abs_diff(project_weyl(p, g, gi), p) <= 1e-13 * max_abs(p));
      CHECK(curvature_symmetry_residuals(p, gi).max() <= 1e-12);
    }
  }
  SUBCASE("Weyl space in dimension 4 has dimension 10") {
    std::vector<std::vector<double>> rows;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Tensor w = random_weyl(4, 500 + s);
      rows.emplace_back(w.data().begin(), w.data().end());
    }
    CHECK(numerical_rank(rows) == 10);
  }
  SUBCASE("dimension below four") { CHECK_THROWS_AS(random_weyl(3, 1), std::invalid_argument); }
}

TEST_CASE("einstein_pfaffian_expansion") {
  for (const char* name : {"s4", "s2xs2", "cp2", "s2^3", "s2^4"}) {
    const auto m = model_by_name(name);
    const auto r = einstein_pfaffian_expansion(m, m.base_point, 1e-9);
    CAPTURE(name);
    CHECK(r.pass);
  }
  const auto s4 = sphere(4);
  CHECK(einstein_pfaffian_expansion(s4, s4.base_point).lhs == doctest::Approx(3.0).epsilon(1e-12));
  const auto s22 = product_of_spheres({1.0, 1.0});
  CHECK(einstein_pfaffian_expansion(s22, s22.base_point).lhs == doctest::Approx(1.0).epsilon(1e-12));
  const auto p = perturbed_sphere(4, 0.2);
  CHECK_THROWS_AS(einstein_pfaffian_expansion(p, p.base_point), std::invalid_argument);
}

TEST_CASE("weight homogeneity under g -> c^2 g") {
  std::mt19937_64 rng(13);
  struct Inv {
    const char* name;
    int dim;
    double weight;
    std::function<double(const Curvature&)> eval;
  };
  const std::vector<Inv> invs{
      {"|W|^2", 4, -4, [](const Curvature& g) { return squared_norm(values(g.weyl()), values(g.inverse_metric())); }},
      {"Pf1(Rm)", 5, -2, [](const Curvature& g) { return pf_ell(values(g.riemann()), 1, values(g.inverse_metric())); }},
      {"Pf2(Rm)", 5, -4, [](const Curvature& g) { return pf_ell(values(g.riemann()), 2, values(g.inverse_metric())); }},
      {"Pf3(W)", 6, -6, [](const Curvature& g) { return pf_ell(values(g.weyl()), 3, values(g.inverse_metric())); }},
      {"W32", 6, -6,
       [](const Curvature& g) {
         return weyl_basis(values(g.weyl()), values(g.metric()), values(g.inverse_metric()), 3)[1];
       }},
      {"J", 4, -2, [](const Curvature& g) { return g.schouten_trace().value(); }},
  };
  for (const auto& inv : invs) {
    const auto m = perturbed_sphere(inv.dim, 0.3);
    const auto x = m.random_point(rng);
    const double base = inv.eval(m.curvature(x, 2));
    for (double c : {2.0, 1.0 / 3.0}) {
      const double v = inv.eval(scaled(m, c).curvature(x, 2));
      CAPTURE(inv.name);
      CHECK(v == doctest::Approx(std::pow(c, inv.weight) * base).epsilon(1e-10));
    }
  }
}

TEST_CASE("i_ell_operator") {
  SUBCASE("shift and closed-form coefficient") {
    CHECK(i_ell_shift(6, 2, 0) == doctest::Approx(4.0 * 2 * 1 / 6.0));
    CHECK(i_ell_closed_form_coefficient(6, 2, 0, 0.6) == 1.0);
    CHECK(i_ell_closed_form_coefficient(6, 2, 1, 0.6) == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(i_ell_closed_form_coefficient(8, 2, 2, 4.0 / 7.0) == doctest::Approx(72.0 / 49.0).epsilon(1e-15));
  }
  SUBCASE("ell = 0 returns the input") {
    const auto s4 = sphere(4);
    const Curvature geo = s4.curvature(s4.base_point, 2);
    const Jet f = cos(geo.coordinates()[0]);
    CHECK(i_ell_operator(f, 2, 0, geo).value() == f.value());
  }
  SUBCASE("closed form on homogeneous models") {
    struct Case {
      const char* name;
      int ell;
      double coefficient;
    };
    for (auto [name, ell, coef] : {Case{"s2^3", 1, -0.8}, Case{"s2^4", 2, 72.0 / 49.0}, Case{"s2^4", 1, -12.0 / 7.0}}) {
      const auto m = model_by_name(name);
      const Curvature geo = m.curvature(m.base_point, 2 * ell + 2);
      const Jet w2 = squared_norm(geo.weyl(), geo.inverse_metric());
      CAPTURE(name);
      CHECK(i_ell_operator(w2, 2, ell, geo).value() == doctest::Approx(coef * w2.value()).epsilon(1e-10));
      CHECK(i_ell_closed_form_coefficient(m.dim, 2, ell, geo.schouten_trace().value()) ==
            doctest::Approx(coef).epsilon(1e-12));
    }
  }
  SUBCASE("composition matches the product structure") {
    const auto s4 = sphere(4);
    const Curvature geo = s4.curvature(s4.base_point, 8);
    const auto& c = geo.coordinates();
    const Jet f = cos(c[0]) * sin(c[1]) + c[2] * c[3] * c[3];
    for (auto [l1, l2] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 1}}) {
      const double whole = i_ell_operator(f, 1, l1 + l2, geo).value();
      const double split = i_ell_operator(i_ell_operator(f, 1, l1, geo), 1 + l1, l2, geo).value();
      CHECK(split == doctest::Approx(whole).epsilon(1e-11));
    }
  }
  SUBCASE("non-Einstein model") {
    const auto m = perturbed_sphere(4, 0.3);
    const Curvature geo = m.curvature(m.base_point, 4);
    CHECK_THROWS_AS(i_ell_operator(squared_norm(geo.weyl(), geo.inverse_metric()), 2, 1, geo), std::domain_error);
  }
}

TEST_CASE("divergence construction") {
  std::mt19937_64 rng(17);
  SUBCASE("the metric on Einstein models") {
    for (const char* name : {"s4", "cp2", "s2^3"}) {
      const auto m = model_by_name(name);
      const Curvature geo = m.curvature(m.random_point(rng), 3);
      CAPTURE(name);
      CHECK(max_abs(divergence_construction(geo.metric(), -2.0, geo)) <= 1e-12);
      CHECK(std::abs(double_divergence(geo.metric(), -2.0, geo).value()) <= 1e-12);
    }
  }
  SUBCASE("rejected weight") {
    const auto m = sphere(4);
    const Curvature geo = m.curvature(m.base_point, 3);
    CHECK_THROWS_AS(divergence_construction(geo.metric(), 2.0, geo), std::invalid_argument);
  }
  SUBCASE("D vanishes on Einstein models") {
    for (const char* name : {"s2xs2", "cp2", "s2^3", "s2^4"}) {
      const auto m = model_by_name(name);
      const Curvature geo = m.curvature(m.random_point(rng), 4);
      CAPTURE(name);
      CHECK(std::abs(weyl_cotton_divergence(geo).value()) <= 1e-9);
      CHECK(std::abs(double_divergence(weyl_square_tensor(geo), -2.0, geo).value()) <= 1e-9);
    }
  }
  SUBCASE("D is the double divergence of W_acde W_b^cde") {
    for (int n : {5, 6}) {
      const auto m = perturbed_sphere(n, 0.2);
      const Curvature geo = m.curvature(m.random_point(rng), 4);
      const double d = weyl_cotton_divergence(geo).value();
      const double dd = double_divergence(weyl_square_tensor(geo), -2.0, geo).value();
      CAPTURE(n);
      CHECK(std::abs(d) > 1e-4);
      CHECK(dd == doctest::Approx(d).epsilon(1e-10));
    }
  }
  SUBCASE("weight -8 scalars vanish on (S2)^4") {
    const auto m = model_by_name("s2^4");
    const Curvature geo = m.curvature(m.random_point(rng), 4);
    const auto v = weight_eight_divergences(geo);
    REQUIRE(v.size() == 2);
    for (const auto& s : v) CHECK(std::abs(s.value()) <= 1e-8);
  }
  SUBCASE("weight -8 scalars are nonzero away from Einstein metrics") {
    const auto m = perturbed_sphere(5, 0.2);
    const Curvature geo = m.curvature(m.random_point(rng), 4);
    for (const auto& s : weight_eight_divergences(geo)) CHECK(std::abs(s.value()) > 1e-6);
  }
}
