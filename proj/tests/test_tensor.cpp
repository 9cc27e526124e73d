#include <array>
#include <random>

#include "doctest.h"
#include "rcurv/catalog.hpp"
#include "rcurv/contraction.hpp"
#include "rcurv/kronecker.hpp"
#include "rcurv/linalg.hpp"
#include "support.hpp"

using namespace rcurv;
using rcurv::test::identity_metric;
using rcurv::test::random_spd;
using rcurv::test::random_tensor;

namespace {

const auto L = Variance::Lower;
const auto U = Variance::Upper;

}  // namespace

TEST_CASE("tensor_product") {
  SUBCASE("identity metric squared in dim 2") {
    const Tensor g = identity_metric(2);
    const Tensor gg = tensor_product(g, g);
    CHECK(gg.rank() == 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) CHECK(gg({a, b, c, d}) == double((a == b) * (c == d)));
  }
  SUBCASE("scalar one is the unit") {
    std::mt19937_64 rng(3);
    const Tensor t = random_tensor(3, {L, U, L}, rng);
    const Tensor p = tensor_product(Tensor::scalar(1.0), t);
    CHECK(p.variance() == t.variance());
    CHECK(max_abs_diff(p, t) == 0.0);
  }
  SUBCASE("outer product of vectors") {
    std::mt19937_64 rng(4);
    const Tensor u = random_tensor(3, {L}, rng), v = random_tensor(3, {L}, rng);
    const Tensor uv = tensor_product(u, v);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(uv({i, j}) == u({i}) * v({j}));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(tensor_product(identity_metric(2), identity_metric(3)), std::invalid_argument);
  }
}

TEST_CASE("DenseTensor shape invariants") {
  CHECK_THROWS_AS(Tensor(0, {L}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(3, {L, L}, std::vector<double>(8)), std::invalid_argument);
  const Tensor t(3, {L, U, L});
  CHECK(t.size() == 27);
  CHECK(t.rank() == 3);
  CHECK_THROWS_AS(identity_metric(3) + identity_metric(3, U), std::invalid_argument);
}

TEST_CASE("contract") {
  SUBCASE("trace of the metric") {
    for (int n = 1; n <= 6; ++n) {
      std::mt19937_64 rng(n);
      const Tensor g = random_spd(n, rng);
      const Tensor gi = matrix_inverse(g);
      CHECK(contract_scalar<double>("ab,ab", {&g, &g}, g, gi) == doctest::Approx(n).epsilon(1e-12));
    }
  }
  SUBCASE("Riemann against Weyl on S4") {
    const auto s4 = sphere(4);
    const Curvature geo = s4.curvature(s4.base_point, 2);
    const Tensor rm = values(geo.riemann()), w = values(geo.weyl());
    const double v = contract_scalar<double>("abcd,abcd", {&rm, &w}, values(geo.metric()), values(geo.inverse_metric()));
    CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("|W|^2 on S2xS2 with greedy and naive schedules") {
    const auto m = product_of_spheres({1.0, 1.0});
    const Curvature geo = m.curvature(m.base_point, 2);
    const Tensor w = values(geo.weyl()), g = values(geo.metric()), gi = values(geo.inverse_metric());
    const double greedy = contract_scalar<double>("abcd,abcd", {&w, &w}, g, gi);
    const double naive = contract_scalar<double>("abcd,abcd", {&w, &w}, g, gi, {Schedule::Naive, 0});
    CHECK(greedy == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
    CHECK(naive == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("schedule independence on random inputs") {
    for (int n : {3, 5, 8}) {
      std::mt19937_64 rng(100 + n);
      const Tensor g = random_spd(n, rng), gi = matrix_inverse(g);
      const Tensor a = random_tensor(n, {L, L, L, L}, rng);
      const Tensor b = random_tensor(n, {U, L, L, U}, rng);
      const Tensor c = random_tensor(n, {L, L, L, L}, rng);
      const std::vector<const Tensor*> f{&a, &b, &c};
      const Tensor ref = contract("abcd,cefg,dgbh->aefh", f, g, gi);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Tensor alt = contract("abcd,cefg,dgbh->aefh", f, g, gi, {Schedule::Random, seed});
        CHECK(max_abs_diff(ref, alt) <= 1e-12 * max_abs(ref));
      }
      if (n <= 5) {
        const Tensor naive = contract("abcd,cefg,dgbh->aefh", f, g, gi, {Schedule::Naive, 0});
        CHECK(max_abs_diff(ref, naive) <= 1e-12 * max_abs(ref));
      }
    }
  }
  SUBCASE("explicit specs and errors") {
    const Tensor g = identity_metric(3), gi = identity_metric(3, U);
    ContractionSpec<double> spec;
    spec.factors = {&g};
    spec.pairings = {{{0, 0}, {0, 0}}};
    CHECK_THROWS_AS(contract(spec, g, gi), std::invalid_argument);
    spec.pairings = {{{0, 0}, {0, 2}}};
    CHECK_THROWS_AS(contract(spec, g, gi), std::out_of_range);
    spec.pairings.clear();
    CHECK_THROWS_AS(contract(spec, g, gi), std::invalid_argument);
    CHECK_THROWS_AS(contract<double>("ab,bc,cd", {&g, &g}, g, gi), std::invalid_argument);
    CHECK_THROWS_AS(contract<double>("aa,ab", {&g, &g}, g, gi), std::invalid_argument);
    CHECK_THROWS_AS(contract_scalar<double>("ab,bc", {&g, &g}, g, gi), std::invalid_argument);
  }
  SUBCASE("indefinite metric pairing inserts the inverse metric") {
    Tensor eta(2, {L, L});
    eta({0, 1}) = eta({1, 0}) = 1.0;
    const Tensor etai = matrix_inverse(eta);
    Tensor v(2, {L});
    v({0}) = 3.0;
    v({1}) = 5.0;
    CHECK(contract_scalar<double>("a,a", {&v, &v}, eta, etai) == doctest::Approx(30.0));
  }
}

TEST_CASE("raise_lower round trip") {
  std::mt19937_64 rng(7);
  SUBCASE("identity metric leaves components") {
    const Tensor g = identity_metric(4), gi = identity_metric(4, U);
    const Tensor x = random_tensor(4, {U}, rng);
    const Tensor y = raise_lower(x, 0, g, gi);
    CHECK(y.variance(0) == L);
    CHECK(max_abs_diff(x, y) == 0.0);
  }
  SUBCASE("random SPD metric") {
    for (int n = 2; n <= 6; ++n) {
      const Tensor g = random_spd(n, rng), gi = matrix_inverse(g);
      const Tensor t = random_tensor(n, {L, U, L}, rng);
      for (std::size_t s = 0; s < 3; ++s) {
        const Tensor back = raise_lower(raise_lower(t, s, g, gi), s, g, gi);
        CHECK(back.variance() == t.variance());
        CHECK(max_abs_diff(back, t) <= 1e-12 * max_abs(t));
      }
    }
  }
  SUBCASE("indefinite metric") {
    const int n = 4;
    Tensor g = identity_metric(n);
    g({0, 0}) = 0.0;
    g({0, 3}) = g({3, 0}) = 1.0;
    g({1, 2}) = g({2, 1}) = 0.3;
    const Tensor gi = matrix_inverse(g);
    const Tensor t = random_tensor(n, {U, L}, rng);
    for (std::size_t s = 0; s < 2; ++s)
      CHECK(max_abs_diff(raise_lower(raise_lower(t, s, g, gi), s, g, gi), t) <= 1e-12 * max_abs(t));
  }
  SUBCASE("lowering the last index of R_abc^e on S4") {
    const auto s4 = sphere(4);
    const Curvature geo = s4.curvature(s4.random_point(rng), 2);
    const Tensor g = values(geo.metric()), gi = values(geo.inverse_metric());
    const Tensor rm = values(geo.riemann());
    const Tensor lowered = raise_lower(raise_lower(rm, 3, g, gi), 3, g, gi);
    Tensor closed(4, {L, L, L, L});
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) closed({a, b, c, d}) = g({a, c}) * g({b, d}) - g({a, d}) * g({b, c});
    CHECK(max_abs_diff(lowered, closed) <= 1e-12);
  }
  SUBCASE("slot out of range") {
    const Tensor g = identity_metric(2);
    CHECK_THROWS_AS(raise_lower(g, 2, g, g), std::out_of_range);
  }
}

TEST_CASE("symmetrize and antisymmetrize") {
  const std::array<int, 2> s01{0, 1};
  const std::array<int, 3> s012{0, 1, 2};
  std::mt19937_64 rng(11);
  SUBCASE("antisymmetric part of a symmetric tensor") {
    const Tensor g = random_spd(4, rng);
    CHECK(max_abs(antisymmetrize(g, s01)) == 0.0);
  }
  SUBCASE("normalization of T_(abc)") {
    Tensor t = Tensor::lower(2, 3);
    t({0, 0, 1}) = 6.0;
    const Tensor s = symmetrize(t, s012);
    CHECK(s({0, 0, 1}) == doctest::Approx(2.0));
    CHECK(s({0, 1, 0}) == doctest::Approx(2.0));
    CHECK(s({1, 0, 0}) == doctest::Approx(2.0));
    CHECK(s({0, 0, 0}) == 0.0);
    CHECK(s({1, 1, 0}) == 0.0);
  }
  SUBCASE("projector properties") {
    for (int trial = 0; trial < 5; ++trial) {
      const Tensor t = random_tensor(3, {L, L, L, U}, rng);
      const Tensor a = antisymmetrize(t, s012);
      const Tensor s = symmetrize(t, s012);
      CHECK(max_abs_diff(antisymmetrize(antisymmetrize(a, s012), s012), a) <= 1e-13 * max_abs(t));
      CHECK(max_abs_diff(symmetrize(s, s012), s) <= 1e-13 * max_abs(t));
      CHECK(max_abs(symmetrize(a, s01)) <= 1e-13 * max_abs(t));
      CHECK(max_abs(antisymmetrize(s, s01)) <= 1e-13 * max_abs(t));
    }
  }
  SUBCASE("errors") {
    const Tensor t(3, {L, L, U});
    const std::array<int, 2> rep{1, 1}, mixed{1, 2}, out{0, 3};
    CHECK_THROWS_AS(symmetrize(t, rep), std::invalid_argument);
    CHECK_THROWS_AS(antisymmetrize(t, mixed), std::invalid_argument);
    CHECK_THROWS_AS(antisymmetrize(t, out), std::out_of_range);
  }
}

TEST_CASE("generalized_kronecker") {
  SUBCASE("k = 1 is the identity") {
    const Tensor d = generalized_kronecker(1, 5);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) CHECK(d({a, b}) == double(a == b));
  }
  SUBCASE("single trace at k = 2, dim 4") {
    const Tensor d2 = generalized_kronecker(2, 4), d1 = generalized_kronecker(1, 4);
    const Tensor g = identity_metric(4);
    const Tensor tr = contract<double>("abcb->ac", {&d2}, g, g);
    CHECK(max_abs_diff(tr, d1 * 1.5) == 0.0);
  }
  SUBCASE("k = dim entries are sgn/k!") {
    const int k = 4;
    const Tensor d = generalized_kronecker(k, k);
    std::array<int, 8> idx{0, 1, 2, 3, 0, 1, 2, 3};
    const std::array<int, 4> up{0, 1, 2, 3};
    std::array<int, 4> perm = up;
    do {
      std::copy(perm.begin(), perm.end(), idx.begin() + 4);
      const int sign = detail::permutation_sign(perm);
      CHECK(d.at(idx) == doctest::Approx(sign / 24.0).epsilon(1e-15));
      CHECK(kronecker_entry(up, perm) == d.at(idx));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  SUBCASE("k > dim is the flagged zero") {
    CHECK(kronecker_vanishes(4, 3));
    CHECK(max_abs(generalized_kronecker(4, 3)) == 0.0);
  }
  SUBCASE("trace recursion, exact for k <= n <= 6") {
    for (int n = 2; n <= 6; ++n)
      for (int k = 2; k <= std::min(n, 4); ++k) {
        const auto r = kronecker_trace_recursion(k, n);
        CAPTURE(n);
        CAPTURE(k);
        CHECK(r.max_abs_residual <= 1e-12);
        CHECK(r.checked > 0);
      }
  }
  SUBCASE("materialization limit") {
    CHECK(kronecker_materializable(4, 6));
    CHECK_FALSE(kronecker_materializable(8, 8));
    CHECK_THROWS_AS(generalized_kronecker(8, 8), std::length_error);
  }
}

TEST_CASE("linear algebra helpers") {
  std::mt19937_64 rng(5);
  const Tensor g = random_spd(5, rng);
  const Tensor gi = matrix_inverse(g);
  CHECK(gi.variance(0) == U);
  const Tensor id = contract<double>("ab,bc->ac", {&g, &gi}, g, gi);
  CHECK(max_abs_diff(id, identity_metric(5)) <= 1e-13);
  Tensor sing(2, {L, L});
  sing({0, 0}) = sing({0, 1}) = sing({1, 0}) = sing({1, 1}) = 1.0;
  CHECK_THROWS_AS(matrix_inverse(sing), std::domain_error);
  CHECK(determinant(identity_metric(3) * 2.0) == doctest::Approx(8.0));
  CHECK(numerical_rank({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}) == 2);
}
