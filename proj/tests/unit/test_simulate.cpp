#include <cmath>

#include "doctest.h"
#include "spine/errors.hpp"
#include "spine/models.hpp"
#include "spine/rate_expr.hpp"
#include "spine/simulate.hpp"

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

TEST_CASE("config validation") {
  SimConfig c;
  c.horizon = -1;
  CHECK_THROWS_AS(validate(c), Error);
  c.horizon = std::nan("");
  CHECK_THROWS_AS(validate(c), Error);
  c.horizon = 1.0;
  c.maxEvents = 0;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("pure death extinction time is exponential") {
  const auto m = single({{0, 1.0}}, 1);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  SimConfig cfg;
  cfg.horizon = 1e9;
  cfg.recordTree = false;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::for_replica(3, i);
    const auto out = simulate_original(m, cfg, rng);
    REQUIRE(out.status == SimStatus::Extinct);
    sum += out.endTime;
    sq += out.endTime * out.endTime;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::fabs(mean - 1.0) < 4 * se);
}

TEST_CASE("zero kernel leaves the population unchanged") {
  const auto m = single({{2, 0.0}}, 3);
  Rng rng(1);
  SimConfig cfg;
  cfg.horizon = 10.0;
  const auto out = simulate_original(m, cfg, rng);
  CHECK(out.status == SimStatus::Completed);
  CHECK(out.events == 0);
  CHECK(out.finalComposition == pv({3}));
  CHECK(out.tree.num_nodes() == 3);
}

TEST_CASE("logistic population never dies out") {
  const auto m = logistic_model(0.5, 3.0, 1);
  SimConfig cfg;
  cfg.horizon = 20.0;
  cfg.recordTree = false;
  for (int i = 0; i < 500; ++i) {
    Rng rng = Rng::for_replica(4, i);
    const auto out = simulate_original(m, cfg, rng);
    CHECK(out.status == SimStatus::Completed);
    CHECK(out.finalComposition.norm1() >= 1);
  }
}

TEST_CASE("censoring") {
  const auto m = single({{2, 1.0}}, 1);
  SimConfig cfg;
  cfg.horizon = 50.0;
  cfg.maxEvents = 100;
  Rng rng(2);
  const auto out = simulate_original(m, cfg, rng);
  CHECK(out.status == SimStatus::Censored);
  CHECK(out.events == 100);
  CHECK(out.endTime < 50.0);
}

TEST_CASE("same seed reproduces the tree") {
  const auto m = logistic_model(1.0, 0.3, 2);
  SimConfig cfg;
  cfg.horizon = 3.0;
  Rng a = Rng::for_replica(8, 3), b = Rng::for_replica(8, 3);
  const auto x = simulate_original(m, cfg, a);
  const auto y = simulate_original(m, cfg, b);
  CHECK(tree_distance(x.tree, y.tree) == 0.0);
  CHECK(x.events == y.events);
}

TEST_CASE("spine is a descendant line and stays alive") {
  const auto m = logistic_model(1.5, 0.5, 3);
  const auto psi = PsiFunction::inverse_size();
  SimConfig cfg;
  cfg.horizon = 4.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::for_replica(6, i);
    const auto out = simulate_spine(m, psi, cfg, rng);
    const auto& tree = out.tree;
    CHECK(std::isinf(tree.node(out.spine()).end));
    for (std::size_t s = 1; s < out.spinePath.size(); ++s) {
      CHECK(tree.node(out.spinePath[s].node).parent == out.spinePath[s - 1].node);
      CHECK(out.spinePath[s].time == tree.node(out.spinePath[s].node).birth);
    }
    CHECK(tree.node(out.spine()).generation + 1 ==
          tree.node(out.spinePath.front().node).generation + out.spinePath.size());
    CHECK(tree.composition_at(4.0) == out.finalComposition);
  }
}

TEST_CASE("inverse size weight is exactly one") {
  for (double b : {0.5, 1.0, 3.0}) {
    const auto m = logistic_model(b, 0.7, 3);
    const auto psi = PsiFunction::inverse_size();
    SimConfig cfg;
    cfg.horizon = 5.0;
    cfg.recordTree = false;
    for (int i = 0; i < 200; ++i) {
      Rng rng = Rng::for_replica(7, i);
      const auto out = simulate_spine(m, psi, cfg, rng);
      CHECK(out.lambdaIntegral == 0.0);
      CHECK(spine_weight(out) == 1.0);
    }
  }
}

TEST_CASE("spine never takes a death event under inverse size") {
  const auto m = logistic_model(0.2, 5.0, 4);
  SimConfig cfg;
  cfg.horizon = 5.0;
  Rng rng(1);
  CHECK_NOTHROW(simulate_spine(m, PsiFunction::inverse_size(), cfg, rng));
}

TEST_CASE("constant psi on a Yule tree") {
  const auto m = single({{2, 1.0}}, 1);
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.recordTree = false;
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::for_replica(12, i);
    const auto out = simulate_spine(m, PsiFunction::constant_one(), cfg, rng);
    CHECK(out.lambdaIntegral == doctest::Approx(1.0));
    const double w = spine_weight(out);
    sum += w;
    sq += w * w;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::fabs(mean - 1.0) < 4 * se);
}

TEST_CASE("fraction laws") {
  CHECK(FractionLaw::point(0.25).mean_log_inverse() ==
        doctest::Approx(std::log(4.0)));
  CHECK(FractionLaw::uniform().mean_log_inverse() == doctest::Approx(1.0));
  // Beta(2,2): digamma(4) - digamma(2) = 1/2 + 1/3.
  CHECK(FractionLaw::beta(2.0).mean_log_inverse() == doctest::Approx(5.0 / 6.0));
  Rng rng(5);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log(1 / FractionLaw::beta(2.0).sample(rng));
  CHECK(std::fabs(s / n - 5.0 / 6.0) < 0.01);
}

TEST_CASE("mass is conserved on a pure division tree") {
  const auto m = single({{2, 1.0}}, 1);
  SimConfig cfg;
  cfg.horizon = 3.0;
  const double r = 0.4;
  for (int i = 0; i < 20; ++i) {
    Rng rng = Rng::for_replica(13, i);
    const auto out = simulate_original(m, cfg, rng);
    const auto birth = decorate_masses(m, out.tree, r, FractionLaw::beta(2.0), 2.0, rng);
    for (double t : {0.5, 1.7, 3.0}) {
      double total = 0.0;
      for (NodeId u : out.tree.alive_nodes(t)) total += mass_at(out.tree, birth, u, r, t);
      CHECK(total == doctest::Approx(2.0 * std::exp(r * t)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(require_division_model(single({{3, 1.0}}, 1)), Error);
}

TEST_CASE("spine mass path with halving") {
  const auto m = logistic_model(1.0, 1.0, 1);
  SimConfig cfg;
  cfg.horizon = 10.0;
  Rng rng(3);
  const auto out = simulate_spine(m, PsiFunction::inverse_size(), cfg, rng);
  const auto path = spine_mass_path(m, out, 0.3, FractionLaw::point(0.5), 1.0, rng);
  const double divisions = static_cast<double>(out.spinePath.size() - 1);
  CHECK(path.back().time == 10.0);
  CHECK(path.back().logMass ==
        doctest::Approx(0.3 * 10.0 - divisions * std::log(2.0)));
}
