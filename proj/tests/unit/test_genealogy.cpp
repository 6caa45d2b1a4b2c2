#include <cmath>
#include <sstream>

#include "doctest.h"
#include "spine/errors.hpp"
#include "spine/genealogy.hpp"
#include "spine/models.hpp"
#include "spine/simulate.hpp"
#include "spine/stats.hpp"

using namespace spine;

namespace {

PopVector pv(std::initializer_list<std::int64_t> c) {
  return PopVector(std::vector<std::int64_t>(c));
}

const TypeId X{0};

GenealogyTree one_split(double s) {
  GenealogyTree t(1, {X});
  t.branch(0, s, pv({2}), {X, X});
  return t;
}

}  // namespace

TEST_CASE("child labels") {
  CHECK(child_label(Label{{1}}, 2).to_string() == "1.2");
  CHECK(child_label(Label{{1, 2}}, 1).to_string() == "1.2.1");
  CHECK(child_label(Label{{7}}, 3).path == std::vector<std::uint32_t>{7, 3});
  CHECK_THROWS_AS(child_label(Label{{1}}, 0), Error);
}

TEST_CASE("alive set and labels") {
  GenealogyTree t(1, {X, X});
  CHECK(alive_set(t, 0.3).size() == 2);
  t.branch(0, 0.5, pv({2}), {X, X});
  t.set_horizon(1.0);
  const auto a = alive_set(t, 0.7);
  REQUIRE(a.size() == 3);
  CHECK(a[0].to_string() == "2");
  CHECK(a[1].to_string() == "1.1");
  CHECK(a[2].to_string() == "1.2");
  CHECK(t.find(Label{{1, 2}}) == 3);
  CHECK(t.find(Label{{2, 1}}) == kNoNode);
  CHECK(t.composition_at(0.7).norm1() == 3);

  GenealogyTree d(1, {X});
  d.branch(0, 0.2, pv({0}), {});
  CHECK(alive_set(d, 0.5).empty());
}

TEST_CASE("truncation") {
  auto t = one_split(0.5);
  t.set_horizon(2.0);
  const auto t0 = truncate(t, 0.0);
  CHECK(t0.num_nodes() == 1);
  CHECK(t0.life_length(0) == 0.0);
  const auto tr = truncate(t, 0.7);
  CHECK(tr.num_nodes() == 3);
  CHECK(tr.life_length(0) == doctest::Approx(0.5));
  CHECK(tr.life_length(1) == doctest::Approx(0.2));
  CHECK(tree_distance(truncate(t, 5.0), t) == 0.0);
}

TEST_CASE("uniform and weighted sampling frequencies") {
  GenealogyTree t(1, {X, X});
  Rng rng(11);
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += sample_uniform(t, 0.0, rng) == 0;
  CHECK(std::fabs(first / double(n) - 0.5) < 3 * std::sqrt(0.25 / n) + 1e-3);
  int w1 = 0;
  for (int i = 0; i < n; ++i) {
    w1 += sample_individual(
              t, 0.0, [](NodeId u) { return u == 0 ? 1.0 : 3.0; }, rng) == 0;
  }
  CHECK(std::fabs(w1 / double(n) - 0.25) < 4 * std::sqrt(0.1875 / n));
  GenealogyTree s(1, {X});
  CHECK(sample_uniform(s, 0.0, rng) == 0);
  GenealogyTree dead(1, {X});
  dead.branch(0, 0.1, pv({0}), {});
  CHECK_THROWS_AS(sample_uniform(dead, 1.0, rng), Error);
}

TEST_CASE("lineage statistics") {
  GenealogyTree t(1, {X});
  auto s0 = lineage_statistics(t, 0, 1.5);
  REQUIRE(s0.occupation.size() == 1);
  CHECK(s0.occupation.begin()->second == 1.5);
  CHECK(s0.branches.empty());

  t.branch(0, 0.4, pv({2}), {X, X});
  t.branch(2, 0.9, pv({0}), {});
  const auto s = lineage_statistics(t, 1, 1.5);
  double total = 0.0;
  for (const auto& [a, v] : s.occupation) total += v;
  CHECK(total == doctest::Approx(1.5));
  CHECK(s.occupation.at({X, pv({1})}) == doctest::Approx(0.4 + 0.6));
  CHECK(s.occupation.at({X, pv({2})}) == doctest::Approx(0.5));
  REQUIRE(s.branches.size() == 1);
  CHECK(s.branches.begin()->first.first.second == pv({1}));
  CHECK(s.branches.begin()->first.second == pv({2}));
  CHECK(s.branches.begin()->second == 1);
  CHECK_THROWS_AS(lineage_statistics(t, 2, 1.5), Error);
}

TEST_CASE("tree distance") {
  const auto a = one_split(0.5);
  auto b = one_split(0.8);
  CHECK(tree_distance(a, a) == 0.0);
  // root life differs by 0.3; children lives are infinite-capped at horizon.
  auto ah = a;
  ah.set_horizon(1.0);
  b.set_horizon(1.0);
  CHECK(tree_distance(ah, b) == doctest::Approx(0.3 + 0.3 + 0.3));
  GenealogyTree c(1, {X});
  c.set_horizon(1.0);
  GenealogyTree d(1, {X});
  d.set_horizon(1.0);
  CHECK(tree_distance(c, d) == 0.0);
  GenealogyTree e(1, {X});
  e.branch(0, 0.5, pv({1}), {X});
  e.set_horizon(1.0);
  CHECK(tree_distance(e, c) >= 1.0);
}

TEST_CASE("tree distance is a metric on random trees") {
  const auto m = logistic_model(1.0, 0.5, 2);
  std::vector<GenealogyTree> trees;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = Rng::for_replica(5, i);
    SimConfig cfg;
    cfg.horizon = 1.0;
    trees.push_back(simulate_original(m, cfg, rng).tree);
    trees.back().set_horizon(1.0);
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    CHECK(tree_distance(trees[i], trees[i]) == 0.0);
    for (std::size_t j = 0; j < trees.size(); ++j) {
      const double dij = tree_distance(trees[i], trees[j]);
      CHECK(dij == doctest::Approx(tree_distance(trees[j], trees[i])));
      if (i != j && dij == 0.0) continue;
      for (std::size_t k = 0; k < trees.size(); k += 7) {
        CHECK(dij <= tree_distance(trees[i], trees[k]) +
                         tree_distance(trees[k], trees[j]) + 1e-9);
      }
    }
  }
}

TEST_CASE("replay consistency on simulated trees") {
  const auto m = logistic_model(2.0, 0.5, 3);
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng = Rng::for_replica(9, r);
    SimConfig cfg;
    cfg.horizon = 3.0;
    const auto out = simulate_original(m, cfg, rng);
    CHECK(out.tree.composition_at(3.0) == out.finalComposition);
    for (int i = 0; i < 200; ++i) {
      const double t = rng.uniform() * 3.0;
      CHECK(static_cast<std::size_t>(out.tree.composition_at(t).norm1()) ==
            out.tree.alive_nodes(t).size());
    }
    const auto& ev = out.tree.events();
    for (std::size_t e = 1; e < ev.size(); ++e) CHECK(ev[e - 1].time < ev[e].time);
  }
}

TEST_CASE("tree and event log export") {
  GenealogyTree t(1, {X});
  t.branch(0, 0.5, pv({2}), {X, X});
  t.set_horizon(1.0);
  std::ostringstream a, b;
  write_tree(a, t);
  write_event_log(b, t);
  CHECK(a.str() ==
        "label;type;birth;end;offspring\n1;0;0;0.5;2\n1.1;0;0.5;inf;\n"
        "1.2;0;0.5;inf;\n");
  CHECK(b.str() == "t,label,k\n0.5,1,2\n");
}
