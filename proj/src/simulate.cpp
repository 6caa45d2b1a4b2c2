#include "spine/simulate.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

#include "internal.hpp"
#include "spine/errors.hpp"
#include "spine/spine_transform.hpp"

namespace spine {

const char* to_string(SimStatus s) noexcept {
  switch (s) {
    case SimStatus::Completed: return "completed";
    case SimStatus::Extinct: return "extinct";
    case SimStatus::Censored: return "censored";
  }
  return "unknown";
}

void validate(const SimConfig& cfg) {
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    raise(ErrorCode::Config, "horizon must be positive and finite");
  }
  if (cfg.maxEvents < 1) raise(ErrorCode::Config, "maxEvents must be >= 1");
}

using internal::pick_weighted;
using internal::TypeLists;

SimOutcome simulate_original(const ModelSpec& model, const SimConfig& cfg,
                             Rng& rng, const CompositionObserver& observer) {
  validate(cfg);
  const RateKernel& kernel = model.kernel;
  const std::size_t d = model.num_types();
  SimOutcome out;
  PopVector z = model.initialComposition;
  TypeLists lists(d);
  if (cfg.recordTree) {
    out.tree = GenealogyTree(d, model.initialTypes);
    for (NodeId u = 0; u < model.initialTypes.size(); ++u) {
      lists.insert(u, model.initialTypes[u]);
    }
  }

  std::vector<double> w;
  std::vector<std::pair<TypeId, std::size_t>> which;
  std::vector<TypeId> childTypes;
  double t = 0.0;
  for (;;) {
    if (z.empty()) {
      out.status = SimStatus::Extinct;
      break;
    }
    w.clear();
    which.clear();
    double total = 0.0;
    for (std::size_t xi = 0; xi < d; ++xi) {
      const TypeId x{static_cast<std::uint32_t>(xi)};
      if (z[x] == 0) continue;
      const auto m = static_cast<double>(z[x]);
      for (std::size_t j = 0; j < kernel.support(x).size(); ++j) {
        const double r = m * kernel.rate(x, z, j);
        w.push_back(r);
        which.emplace_back(x, j);
        total += r;
      }
    }
    const double dt = total > 0.0 ? rng.exponential(total) : kAlive;
    if (t + dt > cfg.horizon) {
      if (observer) observer(t, cfg.horizon, z);
      t = cfg.horizon;
      out.status = SimStatus::Completed;
      break;
    }
    if (out.events >= cfg.maxEvents) {
      out.status = SimStatus::Censored;
      break;
    }
    if (observer) observer(t, t + dt, z);
    t += dt;
    const auto [x, j] = which[pick_weighted(w, total, rng.uniform())];
    const auto& k = kernel.support(x)[j].offspring;
    if (cfg.recordTree) {
      const NodeId u = lists.pick(x, rng);
      model.assignment.assign(k, rng, childTypes);
      lists.erase(u, x);
      const NodeId first = out.tree.branch(u, t, k, childTypes);
      for (std::size_t i = 0; i < childTypes.size(); ++i) {
        lists.insert(first + static_cast<NodeId>(i), childTypes[i]);
      }
    }
    z.apply_branch(x, k);
    ++out.events;
  }
  out.endTime = t;
  if (cfg.recordTree) out.tree.set_horizon(t);
  out.finalComposition = std::move(z);
  return out;
}

SpineOutcome simulate_spine(const ModelSpec& model, const PsiFunction& psi,
                            const SimConfig& cfg, Rng& rng,
                            const SpineObserver& observer) {
  validate(cfg);
  const RateKernel& kernel = model.kernel;
  const std::size_t d = model.num_types();
  const BiasedRates biased(kernel, psi);
  SpineOutcome out;
  PopVector z = model.initialComposition;

  // Initial spine with probability psi(x_e, v) / <v, psi(., v)>.
  std::vector<double> w;
  double total = 0.0;
  for (auto x : model.initialTypes) {
    w.push_back(psi(x, z));
    total += w.back();
  }
  NodeId spineNode =
      static_cast<NodeId>(pick_weighted(w, total, rng.uniform()));
  TypeId x = model.initialTypes[spineNode];

  TypeLists lists(d);
  if (cfg.recordTree) {
    out.tree = GenealogyTree(d, model.initialTypes);
    for (NodeId u = 0; u < model.initialTypes.size(); ++u) {
      if (u != spineNode) lists.insert(u, model.initialTypes[u]);
    }
  }
  out.spinePath.push_back(
      {0.0, cfg.recordTree ? spineNode : kNoNode, x});

  struct Choice {
    bool spine;
    TypeId type;
    std::size_t j;
  };
  std::vector<Choice> which;
  std::vector<TypeId> childTypes;
  std::vector<double> typeWeight(d);
  double t = 0.0;
  double lambdaInt = 0.0;
  for (;;) {
    w.clear();
    which.clear();
    total = 0.0;
    for (std::size_t j = 0; j < kernel.support(x).size(); ++j) {
      const double r = cfg.spineRateFactor * biased.spine_rate(x, z, j);
      w.push_back(r);
      which.push_back({true, x, j});
      total += r;
    }
    for (std::size_t yi = 0; yi < d; ++yi) {
      const TypeId y{static_cast<std::uint32_t>(yi)};
      const std::int64_t m = z[y] - (y == x ? 1 : 0);
      if (m == 0) continue;
      for (std::size_t j = 0; j < kernel.support(y).size(); ++j) {
        const double r =
            static_cast<double>(m) * biased.nonspine_rate(y, x, z, j);
        w.push_back(r);
        which.push_back({false, y, j});
        total += r;
      }
    }
    const double lambda = lambda_of(kernel, psi, x, z);
    const double dt = total > 0.0 ? rng.exponential(total) : kAlive;
    if (t + dt > cfg.horizon) {
      if (observer) observer(t, cfg.horizon, x, z);
      lambdaInt += (cfg.horizon - t) * lambda;
      t = cfg.horizon;
      out.status = SimStatus::Completed;
      break;
    }
    if (out.events >= cfg.maxEvents) {
      out.status = SimStatus::Censored;
      break;
    }
    if (observer) observer(t, t + dt, x, z);
    lambdaInt += dt * lambda;
    t += dt;
    const Choice c = which[pick_weighted(w, total, rng.uniform())];
    const auto& k = kernel.support(c.type)[c.j].offspring;
    model.assignment.assign(k, rng, childTypes);
    if (c.spine) {
      if (childTypes.empty()) {
        raise(ErrorCode::AssumptionViolated, "spine selected a death event");
      }
      const PopVector next = z.after_branch(x, k);
      double tw = 0.0;
      for (std::size_t yi = 0; yi < d; ++yi) {
        typeWeight[yi] = 0.0;
        if (k[yi] == 0) continue;
        const TypeId y{static_cast<std::uint32_t>(yi)};
        typeWeight[yi] = static_cast<double>(k[yi]) * psi(y, next);
        tw += typeWeight[yi];
      }
      const auto ychosen = static_cast<std::uint32_t>(
          pick_weighted(typeWeight, tw, rng.uniform()));
      std::int64_t nth = static_cast<std::int64_t>(rng.index(
          static_cast<std::size_t>(k[ychosen])));
      std::size_t childIndex = 0;
      for (std::size_t i = 0; i < childTypes.size(); ++i) {
        if (childTypes[i].index == ychosen && nth-- == 0) {
          childIndex = i;
          break;
        }
      }
      NodeId newSpine = kNoNode;
      if (cfg.recordTree) {
        const NodeId first = out.tree.branch(spineNode, t, k, childTypes);
        for (std::size_t i = 0; i < childTypes.size(); ++i) {
          if (i == childIndex) continue;
          lists.insert(first + static_cast<NodeId>(i), childTypes[i]);
        }
        newSpine = first + static_cast<NodeId>(childIndex);
      }
      spineNode = newSpine;
      z = next;
      x = TypeId{ychosen};
      out.spinePath.push_back({t, spineNode, x});
    } else {
      if (cfg.recordTree) {
        const NodeId u = lists.pick(c.type, rng);
        lists.erase(u, c.type);
        const NodeId first = out.tree.branch(u, t, k, childTypes);
        for (std::size_t i = 0; i < childTypes.size(); ++i) {
          lists.insert(first + static_cast<NodeId>(i), childTypes[i]);
        }
      }
      z.apply_branch(c.type, k);
    }
    ++out.events;
  }
  out.endTime = t;
  out.lambdaIntegral = lambdaInt;
  out.terminalPsi = psi(x, z);
  if (cfg.recordTree) out.tree.set_horizon(t);
  out.finalComposition = std::move(z);
  return out;
}

double SamplingWeights::probability(TypeId x, const PopVector& z) const {
  if (!weight) return 1.0 / static_cast<double>(z.norm1());
  double s = 0.0;
  for (std::size_t y = 0; y < z.size(); ++y) {
    if (z[y] == 0) continue;
    s += static_cast<double>(z[y]) *
         weight(TypeId{static_cast<std::uint32_t>(y)}, z);
  }
  return weight(x, z) / s;
}

double spine_weight(const SpineOutcome& out, const SamplingWeights& p) {
  if (out.status == SimStatus::Censored) return 0.0;
  const double pe = p.probability(out.spine_type(), out.finalComposition);
  return std::exp(out.lambdaIntegral) * (pe / out.terminalPsi);
}

double FractionLaw::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Point: return param;
    case Kind::Beta: return rng.beta(param, param);
    case Kind::Uniform: return rng.uniform_open0();
  }
  return param;
}

double FractionLaw::mean_log_inverse() const {
  switch (kind) {
    case Kind::Point: return -std::log(param);
    case Kind::Beta:
      return boost::math::digamma(2.0 * param) - boost::math::digamma(param);
    case Kind::Uniform: return 1.0;
  }
  return 0.0;
}

void require_division_model(const ModelSpec& model) {
  if (model.num_types() != 1) {
    raise(ErrorCode::ModelShape, "growth-fragmentation needs a single type");
  }
  for (const auto& e : model.kernel.support(TypeId{0})) {
    if (e.offspring[0] != 0 && e.offspring[0] != 2) {
      raise(ErrorCode::ModelShape,
            "growth-fragmentation allows only death or binary division");
    }
  }
}

std::vector<double> decorate_masses(const ModelSpec& model,
                                    const GenealogyTree& tree, double r,
                                    const FractionLaw& law, double zeta0,
                                    Rng& rng) {
  require_division_model(model);
  std::vector<double> birthMass(tree.num_nodes(), 0.0);
  for (NodeId u = 0; u < tree.num_roots(); ++u) birthMass[u] = zeta0;
  for (const auto& ev : tree.events()) {
    const auto& p = tree.node(ev.brancher);
    if (p.childCount == 0) continue;
    const double m = birthMass[ev.brancher] * std::exp(r * (ev.time - p.birth));
    const double f = law.sample(rng);
    birthMass[p.firstChild] = f * m;
    birthMass[p.firstChild + 1] = (1.0 - f) * m;
  }
  return birthMass;
}

double mass_at(const GenealogyTree& tree, const std::vector<double>& birthMass,
               NodeId u, double r, double t) {
  return birthMass[u] * std::exp(r * (t - tree.node(u).birth));
}

std::vector<MassPoint> spine_mass_path(const ModelSpec& model,
                                       const SpineOutcome& out, double r,
                                       const FractionLaw& law, double zeta0,
                                       Rng& rng) {
  require_division_model(model);
  std::vector<MassPoint> path;
  double logm = std::log(zeta0);
  path.push_back({0.0, logm});
  double prev = 0.0;
  for (std::size_t i = 1; i < out.spinePath.size(); ++i) {
    const double s = out.spinePath[i].time;
    logm += r * (s - prev) + std::log(law.sample(rng));
    path.push_back({s, logm});
    prev = s;
  }
  logm += r * (out.endTime - prev);
  path.push_back({out.endTime, logm});
  return path;
}

}  // namespace spine
