#include "spine/models.hpp"

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "spine/eigen.hpp"
#include "spine/errors.hpp"
#include "spine/parallel.hpp"
#include "spine/spine_transform.hpp"

namespace spine {

namespace {

PopVector single(std::int64_t n) {
  return PopVector(std::vector<std::int64_t>{n});
}

}  // namespace

ModelSpec logistic_model(double b, double c, std::int64_t initialSize) {
  if (!(b > 0.0) || !(c >= 0.0)) {
    raise(ErrorCode::Domain, "logistic model needs b > 0 and c >= 0");
  }
  RateKernel kernel(1);
  kernel.add(TypeId{0}, single(2), RateExpr::constant(b).as_rate_fn());
  kernel.add(TypeId{0}, single(0), RateExpr::logistic_death(c).as_rate_fn());
  return make_model({"x"}, std::move(kernel),
                    initial_types_from(single(initialSize)));
}

std::map<std::int64_t, double> logistic_stationary(double b, double c,
                                                   std::int64_t zmax) {
  if (!(b > 0.0) || !(c > 0.0)) {
    raise(ErrorCode::Domain, "stationary law needs b, c > 0");
  }
  const double y = b / c;
  const double logNorm = std::log(std::expm1(y));
  std::map<std::int64_t, double> pi;
  double total = 0.0;
  for (std::int64_t z = 1;; ++z) {
    const double zd = static_cast<double>(z);
    const double p = std::exp(zd * std::log(y) - std::lgamma(zd + 1.0) - logNorm);
    pi[z] = p;
    total += p;
    if (zmax > 0 ? z >= zmax : (zd > y && p < 1e-14 * (1.0 - y / (zd + 1.0)))) {
      break;
    }
  }
  for (auto& [z, p] : pi) p /= total;
  return pi;
}

double gf_threshold(double b, double c, const FractionLaw& law) {
  if (c == 0.0) return 2.0 * b * law.mean_log_inverse();
  return 2.0 * b * (1.0 - c / b + 1.0 / std::expm1(b / c)) *
         law.mean_log_inverse();
}

double gf_theoretical_slope(double b, double c, double r,
                            const FractionLaw& law) {
  const auto model = logistic_model(b, c, 1);
  const double pihat = pi_hat(logistic_stationary(b, c), model.kernel, 2);
  return r - law.mean_log_inverse() * pihat;
}

const char* to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Regulated: return "Regulated";
    case Phase::Growing: return "Growing";
    case Phase::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

PhaseResult classify_phase(double b, double c, double r,
                           const FractionLaw& law, const PhaseOptions& opt) {
  if (opt.paths < 2) raise(ErrorCode::Config, "phase needs at least 2 paths");
  const auto model = logistic_model(b, c, 1);
  const auto psi = PsiFunction::inverse_size();
  std::vector<double> slopes(opt.paths);
  parallel_for(opt.paths, opt.threads, [&](std::size_t p) {
    Rng rng = Rng::for_replica(opt.seed, p);
    SimConfig cfg;
    cfg.horizon = opt.horizon;
    cfg.maxEvents = opt.maxEvents;
    cfg.recordTree = false;
    const auto out = simulate_spine(model, psi, cfg, rng);
    if (out.status == SimStatus::Censored) {
      raise(ErrorCode::AssumptionViolated,
            "spine path censored before the horizon");
    }
    const auto path = spine_mass_path(model, out, r, law, 1.0, rng);
    slopes[p] = path.back().logMass / out.endTime;
  });
  PhaseResult res;
  const double n = static_cast<double>(opt.paths);
  res.slope = pairwise_sum(slopes) / n;
  double ss = 0.0;
  for (double s : slopes) ss += (s - res.slope) * (s - res.slope);
  res.slopeStdError = std::sqrt(ss / (n - 1.0) / n);
  res.theory = gf_theoretical_slope(b, c, r, law);
  res.threshold = gf_threshold(b, c, law);
  if (std::fabs(res.slope) <= opt.margin) {
    res.phase = Phase::Inconclusive;
  } else {
    res.phase = res.slope < 0.0 ? Phase::Regulated : Phase::Growing;
  }
  return res;
}

std::pair<MassSamples, MassSamples> mass_identity_samples(
    const ModelSpec& model, double r, const FractionLaw& law, double zeta0,
    double t, std::size_t n, std::uint64_t seed, std::size_t threads,
    std::uint64_t maxEvents) {
  require_division_model(model);
  auto snap = [](double x) { return std::round(x * 1e9) / 1e9; };
  MassSamples tree, spine;
  tree.size.resize(n);
  tree.logMass.resize(n);
  spine.size.resize(n);
  spine.logMass.resize(n);
  SimConfig cfg;
  cfg.horizon = t;
  cfg.maxEvents = maxEvents;
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(seed, i, 1);
    const auto out = simulate_original(model, cfg, rng);
    if (out.status != SimStatus::Completed) {
      raise(ErrorCode::AssumptionViolated, "full tree extinct or censored");
    }
    const auto birth = decorate_masses(model, out.tree, r, law, zeta0, rng);
    const NodeId u = sample_uniform(out.tree, t, rng);
    tree.size[i] = out.finalComposition.norm1();
    tree.logMass[i] = snap(std::log(mass_at(out.tree, birth, u, r, t)));
  });
  const auto psi = PsiFunction::inverse_size();
  SimConfig scfg = cfg;
  scfg.recordTree = false;
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = Rng::for_replica(seed, i, 2);
    const auto out = simulate_spine(model, psi, scfg, rng);
    if (out.status != SimStatus::Completed) {
      raise(ErrorCode::AssumptionViolated, "spine run censored");
    }
    spine.size[i] = out.finalComposition.norm1();
    spine.logMass[i] =
        snap(spine_mass_path(model, out, r, law, zeta0, rng).back().logMass);
  });
  return {std::move(tree), std::move(spine)};
}

ModelSpec sir_model(double beta, double gamma, std::int64_t N,
                    std::int64_t infected, std::int64_t recovered) {
  if (N < 1) raise(ErrorCode::Domain, "SIR population must be >= 1");
  if (infected < 1 || infected + recovered > N) {
    raise(ErrorCode::Domain, "SIR initial condition out of range");
  }
  RateKernel kernel(2, N);
  kernel.add(TypeId{0}, PopVector(std::vector<std::int64_t>{2, 0}),
             RateExpr::capacity_gated(beta, static_cast<double>(N))
                 .as_rate_fn());
  kernel.add(TypeId{0}, PopVector(std::vector<std::int64_t>{0, 1}),
             RateExpr::constant(gamma).as_rate_fn());
  return make_model(
      {"infected", "recovered"}, std::move(kernel),
      initial_types_from(PopVector(std::vector<std::int64_t>{infected, recovered})));
}

ModelSpec LargeNModel::scaled(std::int64_t N,
                              const std::vector<double>& v) const {
  if (N < 1) raise(ErrorCode::Domain, "scale N must be >= 1");
  const std::size_t d = num_types();
  RateKernel kernel(d);
  const double invN = 1.0 / static_cast<double>(N);
  for (std::size_t x = 0; x < d; ++x) {
    for (const auto& e : support[x]) {
      kernel.add(TypeId{static_cast<std::uint32_t>(x)}, e.offspring,
                 [expr = e.rate, invN](TypeId, const PopVector& z) {
                   return expr.eval(
                       [&z, invN](std::size_t i) {
                         return static_cast<double>(z[i]) * invN;
                       },
                       z.size());
                 });
    }
  }
  std::vector<std::int64_t> counts(d);
  for (std::size_t x = 0; x < d; ++x) {
    counts[x] = std::llround(v.at(x) * static_cast<double>(N));
  }
  const PopVector init(counts);
  if (init.empty()) raise(ErrorCode::Domain, "N v rounds to an empty population");
  return make_model(typeNames, std::move(kernel), initial_types_from(init));
}

LargeNModel logistic_large_n(double b, double c) {
  LargeNModel m;
  m.typeNames = {"x"};
  m.support.resize(1);
  m.support[0].push_back({single(2), RateExpr::constant(b)});
  m.support[0].push_back({single(0), RateExpr::affine(0.0, {c})});
  return m;
}

Eigen::MatrixXd growth_matrix(const LargeNModel& model,
                              const std::vector<double>& z) {
  const std::size_t d = model.num_types();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                            static_cast<Eigen::Index>(d));
  for (std::size_t x = 0; x < d; ++x) {
    for (const auto& e : model.support[x]) {
      const double r = e.rate.on_density(z);
      for (std::size_t y = 0; y < d; ++y) {
        A(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +=
            r * static_cast<double>(e.offspring[y]);
      }
      A(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) -= r;
    }
  }
  return A;
}

std::vector<double> ode_field(const LargeNModel& model,
                              const std::vector<double>& z) {
  const auto A = growth_matrix(model, z);
  const std::size_t d = z.size();
  std::vector<double> f(d, 0.0);
  for (std::size_t y = 0; y < d; ++y) {
    for (std::size_t x = 0; x < d; ++x) {
      f[y] += z[x] * A(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  return f;
}

namespace {

std::vector<double> axpy(const std::vector<double>& z, double h,
                         const std::vector<double>& k) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + h * k[i];
  return out;
}

void check_floor(const std::vector<double>& z, double t, double floor) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= floor)) {
      raise(ErrorCode::PositivityLoss,
            "coordinate " + std::to_string(i) + " fell to " +
                std::to_string(z[i]) + " at t=" + std::to_string(t));
    }
  }
}

OdeTrajectory rk4(const LargeNModel& model, const std::vector<double>& v,
                  double T, double dt, double floor) {
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = T / static_cast<double>(n);
  OdeTrajectory tr;
  tr.dt = h;
  std::vector<double> z = v;
  check_floor(z, 0.0, floor);
  tr.times.push_back(0.0);
  tr.states.push_back(z);
  tr.slopes.push_back(ode_field(model, z));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k1 = tr.slopes.back();
    const auto k2 = ode_field(model, axpy(z, 0.5 * h, k1));
    const auto k3 = ode_field(model, axpy(z, 0.5 * h, k2));
    const auto k4 = ode_field(model, axpy(z, h, k3));
    for (std::size_t j = 0; j < z.size(); ++j) {
      z[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    const double t = static_cast<double>(i + 1) * h;
    check_floor(z, t, floor);
    tr.times.push_back(t);
    tr.states.push_back(z);
    tr.slopes.push_back(ode_field(model, z));
  }
  return tr;
}

}  // namespace

OdeTrajectory ode_solve(const LargeNModel& model, const std::vector<double>& v,
                        double T, double dt, double floor) {
  if (!(T > 0.0) || !(dt > 0.0)) {
    raise(ErrorCode::Config, "ODE horizon and step must be positive");
  }
  if (v.size() != model.num_types()) {
    raise(ErrorCode::ModelShape, "initial density has wrong dimension");
  }
  auto tr = rk4(model, v, T, dt, floor);
  const auto half = rk4(model, v, T, tr.dt / 2.0, floor);
  double err = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    err = std::max(err, std::fabs(tr.states.back()[j] - half.states.back()[j]));
  }
  tr.halvingError = err;
  return tr;
}

std::vector<double> OdeTrajectory::at(double t) const {
  const std::size_t n = times.size() - 1;
  if (t <= 0.0) return states.front();
  if (t >= times.back()) return states.back();
  const std::size_t i = std::min(n - 1, static_cast<std::size_t>(t / dt));
  const double s = (t - times[i]) / dt;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  std::vector<double> out(states[i].size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = h00 * states[i][j] + h10 * dt * slopes[i][j] +
             h01 * states[i + 1][j] + h11 * dt * slopes[i + 1][j];
  }
  return out;
}

double ode_path_error(const LargeNModel& model, const OdeTrajectory& traj,
                      std::int64_t N, const SimConfig& cfg, Rng& rng) {
  const auto spec = model.scaled(N, traj.states.front());
  const double invN = 1.0 / static_cast<double>(N);
  double sup = 0.0;
  auto dist = [&](double t, const PopVector& z) {
    const auto ref = traj.at(t);
    double e = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      e += std::fabs(static_cast<double>(z[i]) * invN - ref[i]);
    }
    return e;
  };
  SimConfig c = cfg;
  c.recordTree = false;
  const auto out = simulate_original(
      spec, c, rng, [&](double t0, double t1, const PopVector& z) {
        sup = std::max({sup, dist(t0, z), dist(t1, z)});
      });
  if (out.status == SimStatus::Censored) {
    raise(ErrorCode::AssumptionViolated, "scaled run censored");
  }
  return sup;
}

LimitPsi LimitPsi::constant_one(std::size_t numTypes) {
  return {"constant-one",
          [](TypeId, const std::vector<double>&) { return 1.0; },
          [numTypes](TypeId, const std::vector<double>&) {
            return std::vector<double>(numTypes, 0.0);
          }};
}

LimitPsi LimitPsi::inverse_size(std::size_t numTypes) {
  return {"inverse-size",
          [](TypeId, const std::vector<double>& z) {
            double s = 0.0;
            for (double v : z) s += v;
            return 1.0 / s;
          },
          [numTypes](TypeId, const std::vector<double>& z) {
            double s = 0.0;
            for (double v : z) s += v;
            return std::vector<double>(numTypes, -1.0 / (s * s));
          }};
}

LimitPsi LimitPsi::type_weights(std::vector<double> phi) {
  const std::size_t d = phi.size();
  return {"type-weights",
          [phi](TypeId x, const std::vector<double>&) { return phi[x.index]; },
          [d](TypeId, const std::vector<double>&) {
            return std::vector<double>(d, 0.0);
          }};
}

double limit_lambda(const LargeNModel& model, const LimitPsi& psi, TypeId x,
                    const std::vector<double>& z) {
  const std::size_t d = model.num_types();
  internal::CancellingSum acc;
  std::vector<double> values(d);
  for (std::size_t w = 0; w < d; ++w) {
    values[w] = psi.value(TypeId{static_cast<std::uint32_t>(w)}, z);
  }
  for (const auto& e : model.support[x.index]) {
    const double r = e.rate.on_density(z);
    for (std::size_t w = 0; w < d; ++w) {
      const double kw = static_cast<double>(e.offspring[w]) -
                        (w == x.index ? 1.0 : 0.0);
      if (kw != 0.0) acc.add(r * kw * values[w]);
    }
  }
  const auto grad = psi.gradient(x, z);
  for (std::size_t y = 0; y < d; ++y) {
    if (z[y] == 0.0) continue;
    for (const auto& e : model.support[y]) {
      const double r = e.rate.on_density(z);
      for (std::size_t w = 0; w < d; ++w) {
        const double kw =
            static_cast<double>(e.offspring[w]) - (w == y ? 1.0 : 0.0);
        if (kw != 0.0 && grad[w] != 0.0) acc.add(z[y] * r * kw * grad[w]);
      }
    }
  }
  return acc.value() / values[x.index];
}

std::vector<LimitRate> limit_spine_rates(const LargeNModel& model,
                                         const LimitPsi& psi, TypeId x,
                                         const std::vector<double>& z) {
  const std::size_t d = model.num_types();
  const double px = psi.value(x, z);
  std::vector<LimitRate> out;
  for (const auto& e : model.support[x.index]) {
    const double r = e.rate.on_density(z);
    double kpsi = 0.0;
    for (std::size_t w = 0; w < d; ++w) {
      if (e.offspring[w] != 0) {
        kpsi += static_cast<double>(e.offspring[w]) *
                psi.value(TypeId{static_cast<std::uint32_t>(w)}, z);
      }
    }
    out.push_back({e.offspring, r * kpsi / px, r});
  }
  return out;
}

namespace {

double total_spine(const std::vector<LimitRate>& r) {
  double s = 0.0;
  for (const auto& e : r) s += e.spine;
  return s;
}

double total_nonspine(const std::vector<LimitRate>& r) {
  double s = 0.0;
  for (const auto& e : r) s += e.nonSpine;
  return s;
}

}  // namespace

LimitSpineOutcome simulate_limit_spine(const LargeNModel& model,
                                       const LimitPsi& psi,
                                       const OdeTrajectory& traj, double T,
                                       Rng& rng, std::uint64_t maxEvents) {
  if (T > traj.times.back() + 1e-12) {
    raise(ErrorCode::Config, "trajectory shorter than the horizon");
  }
  constexpr double kSafety = 1.25;
  const std::size_t d = model.num_types();
  const auto& v = traj.states.front();
  LimitSpineOutcome out;

  std::vector<double> w(d);
  double mass = 0.0;
  for (std::size_t x = 0; x < d; ++x) {
    w[x] = v[x] > 0.0 ? v[x] * psi.value(TypeId{static_cast<std::uint32_t>(x)}, v)
                      : 0.0;
    mass += w[x];
  }
  out.prefactor = mass;
  TypeId y{static_cast<std::uint32_t>(
      internal::pick_weighted(w, mass, rng.uniform()))};
  out.tree = GenealogyTree(d, {y});
  NodeId spineNode = 0;
  out.spinePath.push_back({0.0, spineNode, y});
  internal::TypeLists lists(d);
  std::vector<std::size_t> counts(d, 0);

  auto lambda_at = [&](TypeId x, double t) {
    return limit_lambda(model, psi, x, traj.at(t));
  };
  auto integrate = [&](TypeId x, double a, double b) {
    if (b <= a) return 0.0;
    return (b - a) / 6.0 *
           (lambda_at(x, a) + 4.0 * lambda_at(x, 0.5 * (a + b)) +
            lambda_at(x, b));
  };

  std::vector<TypeId> childTypes;
  const TypeAssignmentLaw assign;
  double t = 0.0;
  std::uint64_t events = 0;
  const std::size_t n = traj.times.size() - 1;
  for (std::size_t i = 0; i < n && t < T; ++i) {
    const double end = std::min(traj.times[i + 1], T);
    if (end <= t) continue;
    const auto za = traj.states[i];
    const auto zb = traj.at(end);
    std::vector<double> mNon(d), mSpine(d);
    for (std::size_t x = 0; x < d; ++x) {
      const TypeId tx{static_cast<std::uint32_t>(x)};
      const auto ra = limit_spine_rates(model, psi, tx, za);
      const auto rb = limit_spine_rates(model, psi, tx, zb);
      mNon[x] = kSafety * std::max(total_nonspine(ra), total_nonspine(rb));
      mSpine[x] = kSafety * std::max(total_spine(ra), total_spine(rb));
    }
    for (;;) {
      double bound = mSpine[y.index];
      for (std::size_t x = 0; x < d; ++x) {
        bound += static_cast<double>(counts[x]) * mNon[x];
      }
      const double s = bound > 0.0 ? t + rng.exponential(bound) : kAlive;
      if (s >= end) {
        out.lambdaIntegral += integrate(y, t, end);
        t = end;
        break;
      }
      out.lambdaIntegral += integrate(y, t, s);
      t = s;
      if (++events > maxEvents) {
        out.status = SimStatus::Censored;
        out.tree.set_horizon(t);
        return out;
      }
      const auto zt = traj.at(t);
      double u = rng.uniform() * bound;
      if (u < mSpine[y.index]) {
        const auto rates = limit_spine_rates(model, psi, y, zt);
        const double actual = total_spine(rates);
        if (actual > mSpine[y.index]) {
          raise(ErrorCode::MajorantExceeded, "spine rate above majorant");
        }
        if (rng.uniform() * mSpine[y.index] >= actual) continue;
        std::vector<double> rw;
        for (const auto& r : rates) rw.push_back(r.spine);
        const auto& k = rates[internal::pick_weighted(rw, actual, rng.uniform())]
                            .offspring;
        assign.assign(k, rng, childTypes);
        std::vector<double> tw(d, 0.0);
        double twSum = 0.0;
        for (std::size_t x = 0; x < d; ++x) {
          if (k[x] == 0) continue;
          tw[x] = static_cast<double>(k[x]) *
                  psi.value(TypeId{static_cast<std::uint32_t>(x)}, zt);
          twSum += tw[x];
        }
        const auto chosen = static_cast<std::uint32_t>(
            internal::pick_weighted(tw, twSum, rng.uniform()));
        auto nth = static_cast<std::int64_t>(
            rng.index(static_cast<std::size_t>(k[chosen])));
        std::size_t childIndex = 0;
        for (std::size_t c = 0; c < childTypes.size(); ++c) {
          if (childTypes[c].index == chosen && nth-- == 0) {
            childIndex = c;
            break;
          }
        }
        const NodeId first = out.tree.branch(spineNode, t, k, childTypes);
        for (std::size_t c = 0; c < childTypes.size(); ++c) {
          if (c == childIndex) continue;
          lists.insert(first + static_cast<NodeId>(c), childTypes[c]);
          ++counts[childTypes[c].index];
        }
        spineNode = first + static_cast<NodeId>(childIndex);
        y = TypeId{chosen};
        out.spinePath.push_back({t, spineNode, y});
        continue;
      }
      u -= mSpine[y.index];
      std::size_t x = 0;
      for (; x + 1 < d; ++x) {
        const double m = static_cast<double>(counts[x]) * mNon[x];
        if (u < m) break;
        u -= m;
      }
      const TypeId tx{static_cast<std::uint32_t>(x)};
      const auto rates = limit_spine_rates(model, psi, tx, zt);
      const double actual = total_nonspine(rates);
      if (actual > mNon[x]) {
        raise(ErrorCode::MajorantExceeded, "rate above majorant");
      }
      if (rng.uniform() * mNon[x] >= actual) continue;
      std::vector<double> rw;
      for (const auto& r : rates) rw.push_back(r.nonSpine);
      const auto& k =
          rates[internal::pick_weighted(rw, actual, rng.uniform())].offspring;
      assign.assign(k, rng, childTypes);
      const NodeId u0 = lists.pick(tx, rng);
      lists.erase(u0, tx);
      --counts[x];
      const NodeId first = out.tree.branch(u0, t, k, childTypes);
      for (std::size_t c = 0; c < childTypes.size(); ++c) {
        lists.insert(first + static_cast<NodeId>(c), childTypes[c]);
        ++counts[childTypes[c].index];
      }
    }
  }
  out.tree.set_horizon(T);
  out.terminalPsi = psi.value(y, traj.at(T));
  return out;
}

double limit_spine_weight(const LimitSpineOutcome& out,
                          const OdeTrajectory& traj, double T) {
  if (out.status == SimStatus::Censored) return 0.0;
  const auto z = traj.at(T);
  double norm = 0.0;
  for (double v : z) norm += v;
  return out.prefactor * std::exp(out.lambdaIntegral) /
         (out.terminalPsi * norm);
}

Eigen::VectorXd equilibrium_reproductive_value(const Eigen::MatrixXd& A,
                                               const std::vector<double>& zstar,
                                               double tol) {
  const auto d = A.rows();
  if (A.cols() != d || static_cast<std::size_t>(d) != zstar.size() || d == 0) {
    raise(ErrorCode::ModelShape, "growth matrix and equilibrium mismatch");
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  Eigen::VectorXd zs(d);
  for (Eigen::Index i = 0; i < d; ++i) zs[i] = zstar[static_cast<std::size_t>(i)];
  const double drift = (zs.transpose() * A).cwiseAbs().maxCoeff();
  if (drift > tol * scale * std::max(1.0, zs.cwiseAbs().maxCoeff())) {
    raise(ErrorCode::NoNullVector,
          "z* is not an equilibrium: |z* A(z*)| = " + std::to_string(drift));
  }
  if (d == 1) return Eigen::VectorXd::Ones(1);
  SparseMatrix m = A.sparseView();
  const auto trip = perron_frobenius(m, 1e-14);
  if (std::fabs(trip.lambda) > tol * scale) {
    raise(ErrorCode::NoNullVector,
          "Perron root " + std::to_string(trip.lambda) + " is not zero");
  }
  return trip.h / trip.h.sum();
}

}  // namespace spine
