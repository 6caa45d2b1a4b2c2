#include <cmath>

#include "doctest.h"
#include "spine/errors.hpp"
#include "spine/models.hpp"
#include "spine/rate_expr.hpp"
#include "spine/stats.hpp"

using namespace spine;

namespace {

PopVector pv(std::initializer_list<std::int64_t> c) {
  return PopVector(std::vector<std::int64_t>(c));
}

const TypeId X{0};

ModelSpec single(std::vector<std::pair<std::int64_t, double>> rates,
                 std::int64_t n0) {
  RateKernel k(1);
  for (auto [kk, r] : rates) k.add(X, pv({kk}), RateExpr::constant(r).as_rate_fn());
  return make_model({"x"}, std::move(k), std::vector<TypeId>(n0, X));
}

}  // namespace

TEST_CASE("estimates and comparisons") {
  const auto e = estimate_of({1, 2, 3}, 1);
  CHECK(e.mean == 2.0);
  CHECK(e.stdError == doctest::Approx(1 / std::sqrt(3.0)));
  CHECK(e.n == 3);
  const Estimate a{1.0, 0.1, 10, 0}, b{1.4, 0.1, 10, 0};
  CHECK(compare(a, b).pass);
  CHECK_FALSE(compare(a, Estimate{2.0, 0.1, 10, 0}).pass);
  CHECK(compare(Estimate{1, 0, 1, 0}, Estimate{1, 0, 1, 0}).pass);
}

TEST_CASE("Kolmogorov tail") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(std::fabs(kolmogorov_q(1.0) - 0.2699996716735) < 1e-9);
  CHECK(std::fabs(kolmogorov_q(1.3581) - 0.05) < 2e-4);
  CHECK(std::fabs(kolmogorov_q(0.5) - 0.9639452436648) < 1e-9);
  CHECK(kolmogorov_q(5.0) < 1e-20);
}

TEST_CASE("KS test calibration and power") {
  int rejections = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_replica(21, r);
    std::vector<double> a(2000), b(2000);
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    rejections += ks_two_sample(a, b).pValue < 0.05;
  }
  CHECK(rejections >= 2);
  CHECK(rejections <= 22);
  Rng rng(3);
  std::vector<double> a(2000), b(2000);
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform() + 0.1;
  CHECK(ks_two_sample(a, b).pValue < 1e-6);
  CHECK_THROWS_AS(ks_two_sample({1.0}, {2.0}), Error);
}

TEST_CASE("chi-square test calibration and power") {
  auto geom = [](Rng& rng, double p) {
    return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open0()) /
                                                std::log1p(-p)));
  };
  int rejections = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_replica(22, r);
    std::vector<std::int64_t> a(3000), b(3000);
    for (auto& v : a) v = geom(rng, 0.3);
    for (auto& v : b) v = geom(rng, 0.3);
    rejections += chi2_two_sample(a, b).pValue < 0.05;
  }
  CHECK(rejections >= 2);
  CHECK(rejections <= 22);
  Rng rng(4);
  std::vector<std::int64_t> a(3000), b(3000);
  for (auto& v : a) v = geom(rng, 0.3);
  for (auto& v : b) v = geom(rng, 0.25);
  CHECK(chi2_two_sample(a, b).pValue < 1e-4);
  std::vector<std::int64_t> same(2000, 4);
  const auto t = chi2_two_sample(same, same);
  CHECK(t.statistic == 0.0);
  CHECK(t.pValue == 1.0);
}

TEST_CASE("total variation") {
  CHECK(total_variation({{1, 0.5}, {2, 0.5}}, {{2, 0.5}, {3, 0.5}}) ==
        doctest::Approx(0.5));
  CHECK(total_variation({{1, 1.0}}, {{1, 1.0}}) == 0.0);
}

TEST_CASE("Yule mean size and pure death survival") {
  RunOptions opt;
  opt.horizon = 1.0;
  opt.replicas = 20000;
  opt.seed = 31;
  const auto yule = estimate_lhs(single({{2, 1.0}}, 1),
                                 {Functional::population_size()}, {}, opt);
  CHECK(std::fabs(yule[0].mean - std::exp(1.0)) < 4 * yule[0].stdError);
  const auto death = estimate_lhs(single({{0, 1.0}}, 1), {Functional::one()}, {}, opt);
  CHECK(std::fabs(death[0].mean - std::exp(-1.0)) < 4 * death[0].stdError);
}

TEST_CASE("lineage integrals") {
  GenealogyTree t(1, {X, X});
  t.branch(0, 0.5, pv({2}), {X, X});
  const auto one = lineage_integrals(t, 2.0, [](TypeId, const PopVector&) { return 1.0; });
  CHECK(std::isnan(one[0]));
  CHECK(one[1] == doctest::Approx(2.0));
  CHECK(one[2] == doctest::Approx(2.0));
  CHECK(one[3] == doctest::Approx(2.0));
  const auto sz = lineage_integrals(
      t, 2.0, [](TypeId, const PopVector& z) { return double(z.norm1()); });
  CHECK(sz[2] == doctest::Approx(0.5 * 2 + 1.5 * 3));
}

TEST_CASE("inverse size martingale is identically one") {
  const auto m = logistic_model(2.0, 0.5, 3);
  RunOptions opt;
  opt.replicas = 50;
  opt.horizon = 3.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::for_replica(1, i);
    SimConfig cfg;
    cfg.horizon = 3.0;
    const auto out = simulate_original(m, cfg, rng);
    CHECK(martingale_value(m, PsiFunction::inverse_size(), out.tree, 3.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("many-to-one for the logistic model") {
  const auto m = logistic_model(1.0, 0.5, 2);
  RunOptions opt;
  opt.horizon = 2.0;
  opt.replicas = 4000;
  opt.seed = 77;
  const auto c = many_to_one_check(m, PsiFunction::constant_one(),
                                   PathFunctional::occupation(pv({2})), opt);
  CHECK(c.pass);
  const auto f = {Functional::lineage_branch_count(), Functional::one()};
  const auto l = estimate_lhs(m, f, {}, opt);
  const auto r = estimate_rhs(m, PsiFunction::inverse_size(), f, {}, opt);
  CHECK(compare(l[0], r[0]).pass);
  CHECK(compare(l[1], r[1]).pass);
  CHECK(r[1].mean == 1.0);
  CHECK(r[1].stdError == 0.0);
}
