#include "spine/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "spine/errors.hpp"
#include "spine/parallel.hpp"
#include "spine/spine_transform.hpp"

namespace spine {

namespace {

constexpr std::uint64_t kOriginalSide = 1;
constexpr std::uint64_t kSpineSide = 2;
constexpr std::uint64_t kReducedSide = 3;

SimConfig sim_config(const RunOptions& opt, bool tree) {
  SimConfig cfg;
  cfg.horizon = opt.horizon;
  cfg.maxEvents = opt.maxEvents;
  cfg.recordTree = tree;
  cfg.seed = opt.seed;
  cfg.spineRateFactor = opt.spineRateFactor;
  return cfg;
}

void check_replicas(const RunOptions& opt) {
  if (opt.replicas < 2) raise(ErrorCode::Config, "need at least 2 replicas");
}

NodeId draw_individual(const GenealogyTree& tree, const PopVector& z,
                       double t, const SamplingWeights& p, Rng& rng) {
  if (!p.weight) return sample_uniform(tree, t, rng);
  return sample_individual(
      tree, t, [&](NodeId u) { return p.weight(tree.node(u).type, z); }, rng);
}

}  // namespace

Estimate estimate_of(const std::vector<double>& values, std::size_t censored) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  const double n = static_cast<double>(e.n);
  e.mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
  }
  e.stdError = e.n > 1 ? std::sqrt(pairwise_sum(sq) / (n - 1.0) / n) : 0.0;
  e.censoredFraction = static_cast<double>(censored) / n;
  return e;
}

Functional Functional::one() { return {}; }

Functional Functional::lineage_branch_count() {
  Functional f;
  f.kind = Kind::LineageBranchCount;
  f.name = "lineage-branch-count";
  return f;
}

Functional Functional::population_size() {
  Functional f;
  f.kind = Kind::PopulationSizeAt;
  f.name = "population-size";
  return f;
}

Functional Functional::lineage_occupation(PopVector z,
                                          std::optional<TypeId> x) {
  Functional f;
  f.kind = Kind::LineageOccupation;
  f.name = "lineage-occupation(" + z.to_string() + ")";
  f.stateType = x;
  f.stateComposition = std::move(z);
  return f;
}

Functional Functional::lineage_branch(TypeId x, PopVector z,
                                      OffspringVector k) {
  Functional f;
  f.kind = Kind::LineageBranch;
  f.name = "lineage-branch(" + z.to_string() + ";" + k.to_string() + ")";
  f.stateType = x;
  f.stateComposition = std::move(z);
  f.offspring = std::move(k);
  return f;
}

Functional Functional::terminal_type(TypeId x) {
  Functional f;
  f.kind = Kind::TerminalTypeIndicator;
  f.name = "terminal-type(" + std::to_string(x.index) + ")";
  f.type = x;
  return f;
}

Functional Functional::make_custom(
    std::string name,
    std::function<double(const GenealogyTree&, NodeId, double)> fn) {
  Functional f;
  f.kind = Kind::Custom;
  f.name = std::move(name);
  f.custom = std::move(fn);
  return f;
}

double Functional::operator()(const GenealogyTree& tree, NodeId u,
                              double t) const {
  switch (kind) {
    case Kind::One:
      return 1.0;
    case Kind::LineageBranchCount:
      return static_cast<double>(tree.node(u).generation - 1);
    case Kind::PopulationSizeAt:
      return static_cast<double>(tree.composition_at(t).norm1());
    case Kind::LineageOccupation: {
      const auto s = lineage_statistics(tree, u, t);
      double sum = 0.0;
      for (const auto& [a, v] : s.occupation) {
        if (a.second == stateComposition && (!stateType || a.first == *stateType)) {
          sum += v;
        }
      }
      return sum;
    }
    case Kind::LineageBranch: {
      const auto s = lineage_statistics(tree, u, t);
      const auto it = s.branches.find({{*stateType, stateComposition}, offspring});
      return it == s.branches.end() ? 0.0 : static_cast<double>(it->second);
    }
    case Kind::TerminalTypeIndicator:
      return tree.node(u).type == type ? 1.0 : 0.0;
    case Kind::Custom:
      return custom(tree, u, t);
  }
  return 0.0;
}

std::vector<Estimate> estimate_lhs(const ModelSpec& model,
                                   const std::vector<Functional>& fs,
                                   const SamplingWeights& p,
                                   const RunOptions& opt) {
  check_replicas(opt);
  const std::size_t m = fs.size();
  std::vector<std::vector<double>> vals(m, std::vector<double>(opt.replicas));
  std::vector<char> censored(opt.replicas, 0);
  const SimConfig base = sim_config(opt, true);
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kOriginalSide);
    SimConfig cfg = base;
    cfg.replicaIndex = i;
    const auto out = simulate_original(model, cfg, rng);
    if (out.status != SimStatus::Completed) {
      censored[i] = out.status == SimStatus::Censored;
      for (std::size_t f = 0; f < m; ++f) vals[f][i] = 0.0;
      return;
    }
    const NodeId u =
        draw_individual(out.tree, out.finalComposition, opt.horizon, p, rng);
    for (std::size_t f = 0; f < m; ++f) {
      vals[f][i] = fs[f](out.tree, u, opt.horizon);
    }
  });
  const auto nc = static_cast<std::size_t>(
      std::count(censored.begin(), censored.end(), 1));
  std::vector<Estimate> out;
  for (std::size_t f = 0; f < m; ++f) out.push_back(estimate_of(vals[f], nc));
  return out;
}

std::vector<Estimate> estimate_rhs(const ModelSpec& model,
                                   const PsiFunction& psi,
                                   const std::vector<Functional>& fs,
                                   const SamplingWeights& p,
                                   const RunOptions& opt) {
  check_replicas(opt);
  const std::size_t m = fs.size();
  const double prefactor = psi_mass(psi, model.initialComposition);
  std::vector<std::vector<double>> vals(m, std::vector<double>(opt.replicas));
  std::vector<char> censored(opt.replicas, 0);
  const SimConfig base = sim_config(opt, true);
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kSpineSide);
    SimConfig cfg = base;
    cfg.replicaIndex = i;
    const auto out = simulate_spine(model, psi, cfg, rng);
    censored[i] = out.status == SimStatus::Censored;
    const double w = prefactor * spine_weight(out, p);
    for (std::size_t f = 0; f < m; ++f) {
      vals[f][i] = w == 0.0 ? 0.0 : w * fs[f](out.tree, out.spine(), opt.horizon);
    }
  });
  const auto nc = static_cast<std::size_t>(
      std::count(censored.begin(), censored.end(), 1));
  std::vector<Estimate> out;
  for (std::size_t f = 0; f < m; ++f) out.push_back(estimate_of(vals[f], nc));
  return out;
}

Comparison compare(const Estimate& lhs, const Estimate& rhs, double band,
                   double floor) {
  Comparison c{lhs, rhs, 0.0, false};
  const double diff = lhs.mean - rhs.mean;
  const double se = std::hypot(lhs.stdError, rhs.stdError);
  c.pass = std::fabs(diff) <= band * se + floor;
  if (se > 0.0) {
    c.zscore = diff / se;
  } else {
    c.zscore = std::fabs(diff) <= floor
                   ? 0.0
                   : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return c;
}

std::vector<double> lineage_integrals(const GenealogyTree& tree, double t,
                                      const StateFn& f) {
  const std::size_t d = tree.num_types();
  std::vector<double> C(d, 0.0);
  std::vector<double> base(tree.num_nodes(), 0.0);
  std::vector<double> cb(tree.num_nodes(), 0.0);
  PopVector z = tree.initial_composition();
  double prev = 0.0;
  auto advance = [&](double until) {
    const double dt = until - prev;
    if (dt <= 0.0) return;
    for (std::size_t x = 0; x < d; ++x) {
      if (z[x] == 0) continue;
      C[x] += dt * f(TypeId{static_cast<std::uint32_t>(x)}, z);
    }
    prev = until;
  };
  const auto& events = tree.events();
  for (std::size_t e = 0; e < events.size() && events[e].time <= t; ++e) {
    advance(events[e].time);
    const NodeId u = events[e].brancher;
    const auto& r = tree.node(u);
    const double total = base[u] + C[r.type.index] - cb[u];
    for (std::uint32_t i = 0; i < r.childCount; ++i) {
      const NodeId c = r.firstChild + i;
      base[c] = total;
      cb[c] = C[tree.node(c).type.index];
    }
    z.apply_branch(r.type, tree.offspring(e));
  }
  advance(t);
  std::vector<double> out(tree.num_nodes(),
                          std::numeric_limits<double>::quiet_NaN());
  for (NodeId u = 0; u < tree.num_nodes(); ++u) {
    if (tree.alive_at(u, t)) {
      out[u] = base[u] + C[tree.node(u).type.index] - cb[u];
    }
  }
  return out;
}

Comparison many_to_one_check(const ModelSpec& model, const PsiFunction& psi,
                             const PathFunctional& G, const RunOptions& opt) {
  check_replicas(opt);
  const double prefactor = psi_mass(psi, model.initialComposition);
  std::vector<double> lhs(opt.replicas), rhs(opt.replicas);
  std::vector<char> lc(opt.replicas, 0), rc(opt.replicas, 0);
  const StateFn indicator = [&G](TypeId x, const PopVector& z) {
    return G.in_state(x, z) ? 1.0 : 0.0;
  };
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kOriginalSide);
    SimConfig cfg = sim_config(opt, true);
    cfg.replicaIndex = i;
    const auto out = simulate_original(model, cfg, rng);
    lc[i] = out.status == SimStatus::Censored;
    double s = 0.0;
    if (out.status == SimStatus::Completed) {
      std::vector<double> g;
      if (G.kind == PathFunctional::Kind::Occupation) {
        g = lineage_integrals(out.tree, opt.horizon, indicator);
      }
      const auto& z = out.finalComposition;
      for (NodeId u : out.tree.alive_nodes(opt.horizon)) {
        const double gu = g.empty() ? 1.0 : g[u];
        s += psi(out.tree.node(u).type, z) * gu;
      }
    }
    lhs[i] = s;
  });
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kSpineSide);
    SimConfig cfg = sim_config(opt, false);
    cfg.replicaIndex = i;
    double occ = 0.0;
    const auto out = simulate_spine(
        model, psi, cfg, rng,
        [&](double t0, double t1, TypeId y, const PopVector& z) {
          if (G.in_state(y, z)) occ += t1 - t0;
        });
    rc[i] = out.status == SimStatus::Censored;
    if (out.status == SimStatus::Censored) {
      rhs[i] = 0.0;
      return;
    }
    const double g = G.kind == PathFunctional::Kind::One ? 1.0 : occ;
    rhs[i] = prefactor * std::exp(out.lambdaIntegral) * g;
  });
  const auto count = [](const std::vector<char>& v) {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
  };
  return compare(estimate_of(lhs, count(lc)), estimate_of(rhs, count(rc)));
}

double martingale_value(const ModelSpec& model, const PsiFunction& psi,
                        const GenealogyTree& tree, double t) {
  const StateFn lambda = [&](TypeId x, const PopVector& z) {
    return lambda_of(model.kernel, psi, x, z);
  };
  const auto integrals = lineage_integrals(tree, t, lambda);
  const PopVector z = tree.composition_at(t);
  double m = 0.0;
  for (NodeId u : tree.alive_nodes(t)) {
    m += std::exp(-integrals[u]) * psi(tree.node(u).type, z);
  }
  return m;
}

MartingaleReport martingale_check(const ModelSpec& model,
                                  const PsiFunction& psi,
                                  const std::vector<double>& times,
                                  const RunOptions& opt) {
  check_replicas(opt);
  if (times.empty()) raise(ErrorCode::Config, "empty time grid");
  const double horizon = *std::max_element(times.begin(), times.end());
  std::vector<std::vector<double>> vals(times.size(),
                                        std::vector<double>(opt.replicas));
  std::vector<char> censored(opt.replicas, 0);
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kOriginalSide);
    RunOptions o = opt;
    o.horizon = horizon;
    SimConfig cfg = sim_config(o, true);
    cfg.replicaIndex = i;
    const auto out = simulate_original(model, cfg, rng);
    censored[i] = out.status == SimStatus::Censored;
    for (std::size_t k = 0; k < times.size(); ++k) {
      vals[k][i] = out.status == SimStatus::Censored
                       ? 0.0
                       : martingale_value(model, psi, out.tree, times[k]);
    }
  });
  MartingaleReport rep;
  rep.times = times;
  rep.initial = psi_mass(psi, model.initialComposition);
  const auto nc = static_cast<std::size_t>(
      std::count(censored.begin(), censored.end(), 1));
  rep.pass = true;
  for (std::size_t k = 0; k < times.size(); ++k) {
    rep.values.push_back(estimate_of(vals[k], nc));
    rep.checks.push_back(compare(rep.values.back(), Estimate{rep.initial, 0.0, 1, 0.0}));
    rep.pass = rep.pass && rep.checks.back().pass;
  }
  return rep;
}

Comparison many_to_one_mass_check(const ModelSpec& model,
                                  const PsiFunction& psi,
                                  const RunOptions& opt) {
  check_replicas(opt);
  const auto rep = martingale_check(model, psi, {opt.horizon}, opt);
  const double prefactor = rep.initial;
  std::vector<double> rhs(opt.replicas);
  parallel_for(opt.replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kSpineSide);
    SimConfig cfg = sim_config(opt, false);
    cfg.replicaIndex = i;
    const auto out = simulate_spine(model, psi, cfg, rng);
    rhs[i] = out.status == SimStatus::Censored ? 0.0 : prefactor;
  });
  std::size_t nc = 0;
  for (double v : rhs) nc += v == 0.0;
  return compare(rep.values.front(), estimate_of(rhs, nc));
}

TestResult chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           std::size_t minSize) {
  if (a.size() < std::max<std::size_t>(minSize, 1) ||
      b.size() < std::max<std::size_t>(minSize, 1)) {
    raise(ErrorCode::DegenerateSample, "sample smaller than the minimum size");
  }
  std::map<std::int64_t, std::pair<double, double>> cells;
  for (auto v : a) cells[v].first += 1.0;
  for (auto v : b) cells[v].second += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double fa = na / (na + nb);
  const double fb = nb / (na + nb);
  std::vector<std::pair<double, double>> pooled;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [v, c] : cells) {
    acc.first += c.first;
    acc.second += c.second;
    const double tot = acc.first + acc.second;
    if (tot * std::min(fa, fb) >= 5.0) {
      pooled.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (pooled.empty()) {
      pooled.push_back(acc);
    } else {
      pooled.back().first += acc.first;
      pooled.back().second += acc.second;
    }
  }
  TestResult r;
  if (pooled.size() < 2) return r;
  const double k1 = std::sqrt(nb / na);
  const double k2 = std::sqrt(na / nb);
  for (const auto& [x, y] : pooled) {
    const double dlt = k1 * x - k2 * y;
    r.statistic += dlt * dlt / (x + y);
  }
  r.dof = pooled.size() - 1;
  r.pValue = boost::math::gamma_q(0.5 * static_cast<double>(r.dof),
                                  0.5 * r.statistic);
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Complementary series, accurate for small lambda.
    constexpr double pi2 = 9.869604401089358;
    double s = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double m = 2.0 * j - 1.0;
      s += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * 3.141592653589793) / lambda * s,
                      0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                         std::size_t minSize) {
  if (a.size() < std::max<std::size_t>(minSize, 1) ||
      b.size() < std::max<std::size_t>(minSize, 1)) {
    raise(ErrorCode::DegenerateSample, "sample smaller than the minimum size");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    D = std::max(D, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  TestResult r;
  r.statistic = D;
  r.pValue = kolmogorov_q((en + 0.12 + 0.11 / en) * D);
  return r;
}

double total_variation(const std::map<std::int64_t, double>& p,
                       const std::map<std::int64_t, double>& q) {
  std::map<std::int64_t, double> diff = p;
  for (const auto& [k, v] : q) diff[k] -= v;
  double s = 0.0;
  for (const auto& [k, v] : diff) s += std::fabs(v);
  return 0.5 * s;
}

std::vector<std::int64_t> reduced_chain_samples(const RateKernel& kernel,
                                                std::int64_t start, double t,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                std::size_t threads) {
  if (kernel.num_types() != 1) {
    raise(ErrorCode::ModelShape, "reduced chain needs a single-type kernel");
  }
  const auto& sup = kernel.support(TypeId{0});
  std::vector<std::int64_t> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(seed, i, kReducedSide);
    std::int64_t z = start;
    double now = 0.0;
    std::vector<double> w(sup.size());
    for (;;) {
      double total = 0.0;
      for (std::size_t j = 0; j < sup.size(); ++j) {
        w[j] = xi_minus_one_rate(kernel, z, sup[j].offspring[0]);
        total += w[j];
      }
      if (!(total > 0.0)) break;
      now += rng.exponential(total);
      if (now > t) break;
      double target = rng.uniform() * total;
      std::size_t j = 0;
      for (; j + 1 < sup.size(); ++j) {
        if (target < w[j]) break;
        target -= w[j];
      }
      z += sup[j].offspring[0] - 1;
    }
    out[i] = z;
  });
  return out;
}

double log_growth_slope(const ModelSpec& model, double T, Rng& rng,
                        std::uint64_t maxEvents) {
  constexpr std::size_t kGrid = 200;
  std::vector<double> grid(kGrid), logz(kGrid, 0.0);
  for (std::size_t j = 0; j < kGrid; ++j) {
    grid[j] = 0.5 * T + 0.5 * T * static_cast<double>(j) / kGrid;
  }
  std::size_t next = 0;
  SimConfig cfg;
  cfg.horizon = T;
  cfg.maxEvents = maxEvents;
  cfg.recordTree = false;
  const auto out = simulate_original(
      model, cfg, rng, [&](double t0, double t1, const PopVector& z) {
        while (next < kGrid && grid[next] >= t0 && grid[next] < t1) {
          logz[next++] = std::log(static_cast<double>(z.norm1()));
        }
      });
  if (out.status != SimStatus::Completed) return std::nan("");
  double mt = 0.0, my = 0.0;
  for (std::size_t j = 0; j < kGrid; ++j) {
    mt += grid[j];
    my += logz[j];
  }
  mt /= kGrid;
  my /= kGrid;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = 0; j < kGrid; ++j) {
    sxy += (grid[j] - mt) * (logz[j] - my);
    sxx += (grid[j] - mt) * (grid[j] - mt);
  }
  return sxy / sxx;
}

LLogLReport llogl_suite(const ModelSpec& model, const LLogLOptions& opt) {
  if (model.num_types() != 1) {
    raise(ErrorCode::ModelShape, "the L log L suite needs a single type");
  }
  const auto one = PsiFunction::constant_one();
  for (std::int64_t z = 1; z <= opt.probeRange; ++z) {
    const double l = lambda_of(model.kernel, one, TypeId{0},
                               PopVector(std::vector<std::int64_t>{z}));
    if (!(l > 0.0)) {
      raise(ErrorCode::AssumptionViolated,
            "lambda(" + std::to_string(z) + ") = " + std::to_string(l) +
                " is not positive");
    }
  }
  const ModelSpec start =
      make_model(model.typeNames, model.kernel,
                 initial_types_from(PopVector(std::vector<std::int64_t>{
                     opt.initialSize})),
                 model.assignment);
  LLogLReport rep;

  std::vector<std::int64_t> xi(opt.chi2Replicas);
  parallel_for(opt.chi2Replicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kSpineSide);
    SimConfig cfg;
    cfg.horizon = opt.chi2Time;
    cfg.maxEvents = opt.maxEvents;
    cfg.recordTree = false;
    const auto out = simulate_spine(start, one, cfg, rng);
    xi[i] = out.finalComposition.norm1() - 1;
  });
  const auto reduced =
      reduced_chain_samples(model.kernel, opt.initialSize - 1, opt.chi2Time,
                            opt.chi2Replicas, opt.seed, opt.threads);
  rep.reducedChain = chi2_two_sample(xi, reduced);

  RunOptions ro;
  ro.horizon = opt.martingaleTime;
  ro.replicas = opt.martingaleReplicas;
  ro.seed = opt.seed;
  ro.maxEvents = opt.maxEvents;
  ro.threads = opt.threads;
  std::vector<double> m(opt.martingaleReplicas);
  parallel_for(opt.martingaleReplicas, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kOriginalSide);
    SimConfig cfg;
    cfg.horizon = opt.martingaleTime;
    cfg.maxEvents = opt.maxEvents;
    const auto out = simulate_original(start, cfg, rng);
    m[i] = out.status == SimStatus::Censored
               ? 0.0
               : martingale_value(start, one, out.tree, opt.martingaleTime);
  });
  rep.martingaleMean = estimate_of(m);
  rep.martingaleTarget = static_cast<double>(opt.initialSize);
  rep.martingale = compare(rep.martingaleMean,
                           Estimate{rep.martingaleTarget, 0.0, 1, 0.0});
  const double cut = 1e-3 * rep.martingaleTarget;
  rep.nearZeroMass =
      static_cast<double>(std::count_if(m.begin(), m.end(),
                                        [cut](double v) { return v < cut; })) /
      static_cast<double>(m.size());

  std::vector<double> slopes(opt.slopePaths);
  parallel_for(opt.slopePaths, opt.threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(opt.seed, i, kReducedSide + 1);
    slopes[i] = log_growth_slope(start, opt.slopeHorizon, rng, opt.maxEvents);
  });
  std::vector<double> ok;
  for (double s : slopes) {
    if (std::isfinite(s)) ok.push_back(s);
  }
  const auto se = estimate_of(ok);
  rep.slope = se.mean;
  rep.slopeStdError = se.stdError;
  rep.slopeRelativeError =
      opt.limitRate != 0.0 ? std::fabs(se.mean - opt.limitRate) / opt.limitRate
                           : std::nan("");
  return rep;
}

}  // namespace spine
