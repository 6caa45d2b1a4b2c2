#include <cmath>

#include "doctest.h"
#include "spine/core_model.hpp"
#include "spine/errors.hpp"
#include "spine/models.hpp"
#include "spine/rate_expr.hpp"

using namespace spine;

namespace {

PopVector pv(std::initializer_list<std::int64_t> c) {
  return PopVector(std::vector<std::int64_t>(c));
}

RateKernel pure_death(double rate) {
  RateKernel k(1);
  k.add(TypeId{0}, pv({0}), RateExpr::constant(rate).as_rate_fn());
  return k;
}

}  // namespace

TEST_CASE("pop vector bookkeeping") {
  auto z = pv({2, 3});
  CHECK(z.norm1() == 5);
  const auto next = z.after_branch(TypeId{0}, pv({0, 2}));
  CHECK(next[0] == 1);
  CHECK(next[1] == 5);
  CHECK(next.norm1() == 6);
  CHECK_THROWS_AS(pv({-1}), Error);
}

TEST_CASE("total rate") {
  CHECK(total_rate(pure_death(1.0), TypeId{0}, pv({4})) == 1.0);
  const auto logistic = logistic_model(1.0, 0.5, 3);
  CHECK(total_rate(logistic.kernel, TypeId{0}, pv({3})) == doctest::Approx(2.0));
  CHECK_THROWS_AS(total_rate(logistic.kernel, TypeId{0}, pv({0})), Error);
}

TEST_CASE("total rate is invariant under support permutation") {
  RateKernel a(1), b(1);
  a.add(TypeId{0}, pv({2}), RateExpr::constant(1.5).as_rate_fn());
  a.add(TypeId{0}, pv({0}), RateExpr::logistic_death(0.25).as_rate_fn());
  a.add(TypeId{0}, pv({3}), RateExpr::constant(0.5).as_rate_fn());
  b.add(TypeId{0}, pv({3}), RateExpr::constant(0.5).as_rate_fn());
  b.add(TypeId{0}, pv({0}), RateExpr::logistic_death(0.25).as_rate_fn());
  b.add(TypeId{0}, pv({2}), RateExpr::constant(1.5).as_rate_fn());
  for (std::int64_t z = 1; z < 30; ++z) {
    const double ta = total_rate(a, TypeId{0}, pv({z}));
    CHECK(ta == doctest::Approx(total_rate(b, TypeId{0}, pv({z}))));
    CHECK(ta == doctest::Approx(2.0 + 0.25 * static_cast<double>(z - 1)));
  }
}

TEST_CASE("capacity gate removes births that overflow") {
  RateKernel k(2, 2);
  k.add(TypeId{0}, pv({2, 0}), RateExpr::constant(3.0).as_rate_fn());
  k.add(TypeId{0}, pv({0, 0}), RateExpr::constant(1.0).as_rate_fn());
  CHECK(k.rate(TypeId{0}, pv({1, 1}), pv({2, 0})) == 0.0);
  CHECK(k.rate(TypeId{0}, pv({1, 0}), pv({2, 0})) == 3.0);
  CHECK(total_rate(k, TypeId{0}, pv({1, 1})) == 1.0);
}

TEST_CASE("generator on constants") {
  const StateFn c = [](TypeId, const PopVector&) { return 2.5; };
  CHECK(generator_apply(pure_death(1.0), c, TypeId{0}, pv({1})) ==
        doctest::Approx(-2.5));
  // G1 = sum_k tau_k (|k| - 1) for a single type.
  const auto m = logistic_model(1.3, 0.4, 1);
  const StateFn one = [](TypeId, const PopVector&) { return 1.0; };
  for (std::int64_t z = 1; z <= 40; ++z) {
    const double expect = 1.3 - 0.4 * static_cast<double>(z - 1);
    CHECK(generator_apply(m.kernel, one, TypeId{0}, pv({z})) ==
          doctest::Approx(expect));
    CHECK(generator_apply(m.kernel, c, TypeId{0}, pv({z})) ==
          doctest::Approx(2.5 * expect));
  }
}

TEST_CASE("lambda for inverse size vanishes when no single death") {
  const auto m = logistic_model(1.0, 0.5, 1);
  const auto psi = PsiFunction::inverse_size();
  for (std::int64_t z = 2; z <= 100; ++z) {
    CHECK(lambda_of(m.kernel, psi, TypeId{0}, pv({z})) == 0.0);
  }
  CHECK(lambda_of(m.kernel, psi, TypeId{0}, pv({1})) == 0.0);
}

TEST_CASE("lambda for inverse size at one individual is minus the death rate") {
  RateKernel k(1);
  k.add(TypeId{0}, pv({2}), RateExpr::constant(1.0).as_rate_fn());
  k.add(TypeId{0}, pv({0}), RateExpr::constant(0.7).as_rate_fn());
  const auto psi = PsiFunction::inverse_size();
  CHECK(lambda_of(k, psi, TypeId{0}, pv({1})) == doctest::Approx(-0.7));
}

TEST_CASE("lambda for constant psi is the mean growth") {
  RateKernel k(1);
  k.add(TypeId{0}, pv({2}), RateExpr::constant(1.0).as_rate_fn());
  k.add(TypeId{0}, pv({3}), RateExpr::constant(0.25).as_rate_fn());
  k.add(TypeId{0}, pv({0}), RateExpr::logistic_death(0.1).as_rate_fn());
  const auto psi = PsiFunction::constant_one();
  for (std::int64_t z = 1; z < 20; ++z) {
    const double expect = 1.0 + 2 * 0.25 - 0.1 * static_cast<double>(z - 1);
    CHECK(lambda_of(k, psi, TypeId{0}, pv({z})) == doctest::Approx(expect));
  }
}

TEST_CASE("psi must be positive") {
  const PsiFunction bad("bad", [](TypeId, const PopVector&) { return 0.0; });
  CHECK_THROWS_AS(bad(TypeId{0}, pv({1})), Error);
}

TEST_CASE("exchangeable assignment keeps the multiset") {
  Rng rng(3);
  TypeAssignmentLaw law;
  std::vector<TypeId> out;
  int firstIsOne = 0;
  for (int i = 0; i < 2000; ++i) {
    law.assign(pv({2, 1}), rng, out);
    REQUIRE(out.size() == 3);
    int ones = 0;
    for (auto t : out) ones += t.index == 1;
    CHECK(ones == 1);
    firstIsOne += out[0].index == 1;
  }
  CHECK(firstIsOne > 550);
  CHECK(firstIsOne < 780);
  TypeAssignmentLaw ordered(TypeAssignmentLaw::Kind::TypeOrdered);
  ordered.assign(pv({1, 2}), rng, out);
  CHECK(out[0].index == 0);
  CHECK(out[2].index == 1);
}

TEST_CASE("rate expressions") {
  const auto z = pv({3, 2});
  CHECK(RateExpr::constant(2.0).on_counts(z) == 2.0);
  CHECK(RateExpr::logistic_death(0.5).on_counts(z) == doctest::Approx(2.0));
  CHECK(RateExpr::capacity_gated(1.5, 7.0).on_counts(z) == doctest::Approx(3.0));
  CHECK(RateExpr::capacity_gated(1.5, 4.0).on_counts(z) == 0.0);
  CHECK(RateExpr::capacity_gated(1.0, 4.0, {0.0, 1.0}).on_counts(z) ==
        doctest::Approx(2.0));
  CHECK(RateExpr::affine(1.0, {0.5, -1.0}).on_counts(z) == doctest::Approx(0.5));
  CHECK(RateExpr::affine(1.0, {-1.0, -1.0}).on_counts(z) == 0.0);
  const double l = std::log(6.0);
  CHECK(RateExpr::decaying(0.25, 0.5).on_counts(z) ==
        doctest::Approx(0.25 + 0.5 / (1 + l * l)));
  CHECK(RateExpr::affine(0.0, {2.0}).on_density({0.25}) == doctest::Approx(0.5));
}
