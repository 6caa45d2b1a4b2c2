#include <cmath>

#include "doctest.h"
#include "spine/eigen.hpp"
#include "spine/errors.hpp"
#include "spine/models.hpp"
#include "spine/rate_expr.hpp"

using namespace spine;

namespace {

PopVector pv(std::initializer_list<std::int64_t> c) {
  return PopVector(std::vector<std::int64_t>(c));
}

const TypeId X{0};

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

RateKernel random_capacity_kernel(std::size_t d, std::int64_t cap, Rng& rng) {
  RateKernel k(d, cap);
  for (std::size_t x = 0; x < d; ++x) {
    PopVector birth(d);
    birth.add(TypeId{std::uint32_t(x)}, 2);
    k.add(TypeId{std::uint32_t(x)}, birth,
          RateExpr::constant(0.2 + rng.uniform()).as_rate_fn());
    for (std::size_t y = 0; y < d; ++y) {
      if (y == x) continue;
      k.add(TypeId{std::uint32_t(x)}, PopVector::unit(d, TypeId{std::uint32_t(y)}),
            RateExpr::constant(0.1 + rng.uniform()).as_rate_fn());
    }
    k.add(TypeId{std::uint32_t(x)}, PopVector(d),
          RateExpr::logistic_death(0.1 + rng.uniform()).as_rate_fn());
  }
  return k;
}

}  // namespace

TEST_CASE("state counts") {
  for (std::size_t d = 1; d <= 3; ++d) {
    for (std::int64_t zb = 1; zb <= 5; ++zb) {
      const auto s = enumerate_states(d, zb);
      std::size_t brute = 0;
      // Count (x, z) with z_x >= 1 and |z| <= zb over a full grid.
      std::vector<std::int64_t> z(d, 0);
      while (true) {
        std::int64_t n = 0;
        for (auto v : z) n += v;
        if (n <= zb) {
          for (std::size_t x = 0; x < d; ++x) brute += z[x] >= 1;
        }
        std::size_t i = 0;
        while (i < d && ++z[i] > zb) z[i++] = 0;
        if (i == d) break;
      }
      CHECK(s.size() == brute);
      CHECK(state_count(d, zb) ==
            doctest::Approx(double(d) * binom(int(zb) - 1 + int(d), int(d))));
      for (std::size_t a = 0; a < s.size(); ++a) {
        CHECK(s.index_of(s[a].type, s[a].z) == a);
      }
    }
  }
  CHECK(state_count(2, 2) == 6.0);
  CHECK_THROWS_AS(enumerate_states(3, 100, 1000), Error);
}

TEST_CASE("two state Perron triplet against closed form") {
  const double b = 1.3, c = 0.6;
  RateKernel k(1, 2);
  k.add(X, pv({2}), RateExpr::constant(b).as_rate_fn());
  k.add(X, pv({0}), RateExpr::constant(c).as_rate_fn());
  const auto s = enumerate_states(1, 2);
  const auto m = build_generator_matrix(k, s);
  // States (1), (2); hand-derived first-moment operator.
  const double a11 = -(b + c), a12 = 2 * b, a21 = c, a22 = -2 * c;
  const Eigen::MatrixXd dense(m);
  CHECK(dense(0, 0) == doctest::Approx(a11));
  CHECK(dense(0, 1) == doctest::Approx(a12));
  CHECK(dense(1, 0) == doctest::Approx(a21));
  CHECK(dense(1, 1) == doctest::Approx(a22));

  const double lam = (a11 + a22) / 2 +
                     std::sqrt((a11 - a22) * (a11 - a22) / 4 + a12 * a21);
  double h1 = a12, h2 = lam - a11;
  double g1 = a21, g2 = lam - a11;
  const double gs = g1 + g2;
  g1 /= gs;
  g2 /= gs;
  const double hs = h1 * g1 + h2 * g2;
  h1 /= hs;
  h2 /= hs;

  const auto t = perron_frobenius(m, 1e-13);
  CHECK(std::fabs(t.lambda - lam) < 1e-10);
  CHECK(std::fabs(t.h[0] - h1) < 1e-10);
  CHECK(std::fabs(t.h[1] - h2) < 1e-10);
  CHECK(std::fabs(t.gamma[0] - g1) < 1e-10);
  CHECK(std::fabs(t.gamma[1] - g2) < 1e-10);
  const auto pi = stationary_law(t);
  CHECK(std::fabs(pi[0] - h1 * g1) < 1e-10);
  CHECK(std::fabs(pi.sum() - 1.0) < 1e-12);
  // Birth from state (1): gamma_1 * b * 2 h_2.
  CHECK(std::fabs(ancestral_branch_intensity(k, s, t, 0, 0) - g1 * b * 2 * h2) < 1e-10);
  CHECK(ancestral_branch_intensity(k, s, t, 0, 1) == 0.0);
}

TEST_CASE("matrix agrees with the operator") {
  Rng rng(17);
  for (std::size_t d : {1u, 2u, 3u}) {
    const std::int64_t cap = 4;
    const auto k = random_capacity_kernel(d, cap, rng);
    const auto s = std::make_shared<const StateSpace>(enumerate_states(d, cap));
    const auto m = build_generator_matrix(k, *s);
    std::vector<double> vals(s->size());
    for (auto& v : vals) v = 0.5 + rng.uniform();
    const auto f = tabulated_psi("f", s, vals);
    const Eigen::VectorXd fv = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
    const Eigen::VectorXd mf = m * fv;
    for (std::size_t a = 0; a < s->size(); ++a) {
      CHECK(mf[a] == doctest::Approx(generator_apply(k, f.fn(), (*s)[a].type, (*s)[a].z)));
    }
    CHECK(irreducibility_check(m).irreducible);
    const auto t = perron_frobenius(m);
    CHECK(t.residualRight < 1e-9);
    CHECK(t.residualLeft < 1e-9);
    CHECK((t.h.array() > 0).all());
    CHECK((t.gamma.array() > 0).all());
    CHECK(std::fabs(t.gamma.sum() - 1) < 1e-12);
    CHECK(std::fabs(t.h.dot(t.gamma) - 1) < 1e-12);
    // lambda of the eigen psi is the eigenvalue everywhere.
    const auto psi = eigen_psi(s, t.h);
    for (std::size_t a = 0; a < s->size(); ++a) {
      CHECK(std::fabs(lambda_of(k, psi, (*s)[a].type, (*s)[a].z) - t.lambda) < 1e-8);
    }
  }
}

TEST_CASE("reducible matrices are rejected") {
  SparseMatrix diag(2, 2);
  diag.insert(0, 0) = -1;
  diag.insert(1, 1) = -2;
  diag.makeCompressed();
  CHECK_FALSE(irreducibility_check(diag).irreducible);
  CHECK_THROWS_AS(perron_frobenius(diag), Error);
  try {
    perron_frobenius(diag);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIrreducible);
  }
  const auto sir = sir_model(0.5, 0.2, 6);
  const auto s = enumerate_states(2, 6);
  const auto r = irreducibility_check(build_generator_matrix(sir.kernel, s));
  CHECK_FALSE(r.irreducible);
  SparseMatrix one(1, 1);
  one.insert(0, 0) = -0.5;
  const auto t = perron_frobenius(one);
  CHECK(t.lambda == doctest::Approx(-0.5));
}

TEST_CASE("tabulated psi outside the state space") {
  const auto s = std::make_shared<const StateSpace>(enumerate_states(1, 2));
  const auto f = tabulated_psi("f", s, {1.0, 2.0});
  CHECK(f(X, pv({2})) == 2.0);
  CHECK_THROWS_AS(f(X, pv({3})), Error);
}
