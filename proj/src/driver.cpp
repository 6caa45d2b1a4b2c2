#include "spine/driver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "spine/csv.hpp"
#include "spine/eigen.hpp"
#include "spine/errors.hpp"
#include "spine/parallel.hpp"

namespace spine {

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output.dir);
  const auto path = fs::path(cfg.output.dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

const ModelSpec& need_model(const ExperimentConfig& cfg, const char* cmd) {
  if (!cfg.model) {
    raise(ErrorCode::Config, std::string(cmd) + " needs a model section");
  }
  return *cfg.model;
}

std::shared_ptr<const StateSpace> states_of(const ModelSpec& model,
                                            std::size_t limit) {
  const auto cap = model.kernel.capacity();
  if (!cap) {
    raise(ErrorCode::Config,
          "the finite state space needs a model with a capacity");
  }
  return std::make_shared<const StateSpace>(
      enumerate_states(model.num_types(), *cap, limit));
}

std::string state_text(const ModelSpec& m, const SpineState& s) {
  return m.typeNames[s.type.index] + "," + s.z.to_string(';');
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& model = need_model(cfg, "simulate");
  const std::size_t n = cfg.run.replicas;
  std::vector<SimOutcome> outs(n);
  const bool trees = cfg.output.trees;
  if (trees) fs::create_directories(fs::path(cfg.output.dir) / "trees");
  parallel_for(n, cfg.threads(), [&](std::size_t i) {
    SimConfig sc;
    sc.horizon = cfg.run.horizon;
    sc.maxEvents = cfg.run.maxEvents;
    sc.recordTree = trees;
    Rng rng = Rng::for_replica(cfg.seed(), i, 1);
    outs[i] = simulate_original(model, sc, rng);
    if (trees) {
      auto& tree = outs[i].tree;
      tree.set_horizon(outs[i].endTime);
      const auto base = fs::path(cfg.output.dir) / "trees" /
                        ("replica_" + std::to_string(i));
      std::ofstream t(base.string() + ".tree", std::ios::binary);
      std::ofstream e(base.string() + ".events.csv", std::ios::binary);
      write_tree(t, tree);
      write_event_log(e, tree);
      tree = GenealogyTree(model.num_types(), {});
    }
  });

  auto csv = open_csv(cfg, "simulate.csv");
  csv << "replica,status,end_time,events";
  for (const auto& name : model.typeNames) csv << ",z_" << name;
  csv << "\n";
  std::vector<std::map<std::int64_t, std::size_t>> marg(model.num_types());
  std::size_t censored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = outs[i];
    csv << i << "," << to_string(o.status) << "," << fmt_real(o.endTime) << ","
        << o.events;
    for (std::size_t x = 0; x < model.num_types(); ++x) {
      csv << "," << o.finalComposition[x];
      ++marg[x][o.finalComposition[x]];
    }
    csv << "\n";
    censored += o.status == SimStatus::Censored;
  }
  auto mc = open_csv(cfg, "marginals.csv");
  mc << "type,count,replicas,frequency\n";
  for (std::size_t x = 0; x < model.num_types(); ++x) {
    for (auto [k, c] : marg[x]) {
      mc << model.typeNames[x] << "," << k << "," << c << ","
         << fmt_real(static_cast<double>(c) / static_cast<double>(n)) << "\n";
    }
  }
  log << "simulate: " << n << " replicas, " << censored << " censored\n";
  return kExitPass;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& model = need_model(cfg, "compare");
  if (cfg.run.replicas < cfg.compare.minReplicas) {
    raise(ErrorCode::Config,
          "compare needs at least " + std::to_string(cfg.compare.minReplicas) +
              " replicas per side (got " + std::to_string(cfg.run.replicas) + ")");
  }
  auto fsv = cfg.compare.functionals;
  if (fsv.empty()) {
    fsv = {Functional::lineage_branch_count(), Functional::population_size(),
           Functional::lineage_occupation(model.initialComposition)};
  }
  auto psis = cfg.compare.psis;
  if (psis.empty()) psis = {cfg.psi};

  RunOptions opt;
  opt.horizon = cfg.run.horizon;
  opt.replicas = cfg.run.replicas;
  opt.seed = cfg.seed();
  opt.maxEvents = cfg.run.maxEvents;
  opt.threads = cfg.threads();
  opt.spineRateFactor = cfg.compare.spineRateFactor;

  const auto lhs = estimate_lhs(model, fsv, {}, opt);
  auto csv = open_csv(cfg, "compare.csv");
  csv << "check,model,psi,functional,lhs,se_lhs,rhs,se_rhs,zscore,pass\n";
  bool all = true;
  auto row = [&](const char* check, const std::string& psi,
                 const std::string& f, const Comparison& c) {
    csv << check << "," << cfg.modelName << "," << psi << "," << f << ","
        << fmt_real(c.lhs.mean) << "," << fmt_real(c.lhs.stdError) << ","
        << fmt_real(c.rhs.mean) << "," << fmt_real(c.rhs.stdError) << ","
        << fmt_real(c.zscore) << "," << (c.pass ? "true" : "false") << "\n";
    all = all && c.pass;
    log << check << " psi=" << psi << " " << f << ": z=" << fmt_real(c.zscore)
        << (c.pass ? " pass\n" : " FAIL\n");
  };
  for (const auto& ps : psis) {
    const auto psi = make_psi(ps, model, cfg.eigen.stateLimit);
    const auto rhs = estimate_rhs(model, psi, fsv, {}, opt);
    for (std::size_t i = 0; i < fsv.size(); ++i) {
      row("two-sided", ps.name, fsv[i].name,
          compare(lhs[i], rhs[i], cfg.compare.band));
    }
    const auto m = many_to_one_mass_check(model, psi, opt);
    row("many-to-one", ps.name, "weighted-mass",
        compare(m.lhs, m.rhs, cfg.compare.band));
  }
  return all ? kExitPass : kExitCheckFailed;
}

int cmd_eigen(const ExperimentConfig& cfg, std::ostream& log) {
  const auto& model = need_model(cfg, "eigen");
  const auto states = states_of(model, cfg.eigen.stateLimit);
  const auto m = build_generator_matrix(model.kernel, *states);
  const auto reach = irreducibility_check(m);
  if (!reach.irreducible) {
    raise(ErrorCode::NotIrreducible,
          "state (" + state_text(model, (*states)[reach.to]) +
              ") is not reachable from (" +
              state_text(model, (*states)[reach.from]) + ")");
  }
  const auto t = perron_frobenius(m, cfg.eigen.tolerance);
  const auto pi = stationary_law(t);
  auto csv = open_csv(cfg, "eigen.csv");
  csv << "state-index,type,composition,h,gamma,pi\n";
  for (std::size_t a = 0; a < states->size(); ++a) {
    csv << a << "," << state_text(model, (*states)[a]) << ","
        << fmt_real(t.h[a]) << "," << fmt_real(t.gamma[a]) << ","
        << fmt_real(pi[a]) << "\n";
  }
  auto anc = open_csv(cfg, "ancestral.csv");
  anc << "state-index,type,composition,offspring,intensity\n";
  const std::int64_t cap = states->capacity();
  for (std::size_t a = 0; a < states->size(); ++a) {
    const auto& s = (*states)[a];
    const auto& sup = model.kernel.support(s.type);
    for (std::size_t j = 0; j < sup.size(); ++j) {
      if (s.z.norm1() + sup[j].offspring.norm1() - 1 > cap) continue;
      if (sup[j].offspring.empty()) continue;
      anc << a << "," << state_text(model, s) << ","
          << sup[j].offspring.to_string(';') << ","
          << fmt_real(ancestral_branch_intensity(model.kernel, *states, t, a, j))
          << "\n";
    }
  }
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    scale = std::max(scale, std::fabs(m.coeff(i, i)));
  }
  const bool ok = t.residualRight <= 1e-10 * scale &&
                  t.residualLeft <= 1e-10 * scale && t.lambda <= 1e-10 * scale;
  auto sum = open_csv(cfg, "eigen_summary.csv");
  sum << "states,lambda,residual_right,residual_left,iterations,pass\n"
      << states->size() << "," << fmt_real(t.lambda) << ","
      << fmt_real(t.residualRight) << "," << fmt_real(t.residualLeft) << ","
      << t.iterations << "," << (ok ? "true" : "false") << "\n";
  log << "eigen: " << states->size() << " states, lambda=" << fmt_real(t.lambda)
      << (ok ? "\n" : " (residual or sign check failed)\n");
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_phase(const ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.phase) raise(ErrorCode::Config, "phase needs a phase section");
  const auto& ph = *cfg.phase;
  auto csv = open_csv(cfg, "phase.csv");
  csv << "b,c,r,threshold,slope_estimate,classification\n";
  bool ok = true;
  std::uint64_t row = 0;
  for (double b : ph.b) {
    for (double c : ph.c) {
      for (double r : ph.r) {
        PhaseOptions opt;
        opt.horizon = ph.horizon;
        opt.paths = ph.paths;
        opt.margin = ph.margin;
        opt.seed = mix64(cfg.seed() ^ mix64(++row));
        opt.maxEvents = cfg.run.maxEvents;
        opt.threads = cfg.threads();
        const auto res = classify_phase(b, c, r, ph.law, opt);
        csv << fmt_real(b) << "," << fmt_real(c) << "," << fmt_real(r) << ","
            << fmt_real(res.threshold) << "," << fmt_real(res.slope) << ","
            << to_string(res.phase) << "\n";
        const Phase expected =
            r < res.threshold ? Phase::Regulated : Phase::Growing;
        if (res.phase != Phase::Inconclusive && res.phase != expected) {
          ok = false;
          log << "phase: b=" << b << " c=" << c << " r=" << r
              << " classified " << to_string(res.phase) << " but threshold is "
              << fmt_real(res.threshold) << "\n";
        }
      }
    }
  }
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_odelimit(const ExperimentConfig& cfg, std::ostream& log) {
  if (!cfg.odelimit) raise(ErrorCode::Config, "odelimit needs an odelimit section");
  const auto& od = *cfg.odelimit;
  auto csv = open_csv(cfg, "odelimit.csv");
  csv << "N,replicas,median_error,mean_error,max_error,halving_error,flag\n";
  OdeTrajectory traj;
  try {
    traj = ode_solve(od.model, od.v, od.horizon, od.dt, od.floor);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PositivityLoss) throw;
    for (auto n : od.N) csv << n << ",0,nan,nan,nan,nan,positivity-loss\n";
    log << "odelimit: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  auto tc = open_csv(cfg, "ode_trajectory.csv");
  tc << "t";
  for (std::size_t x = 0; x < od.model.num_types(); ++x) tc << ",z_" << x + 1;
  tc << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    tc << fmt_real(traj.times[i]);
    for (double v : traj.states[i]) tc << "," << fmt_real(v);
    tc << "\n";
  }
  const std::size_t reps = cfg.run.replicas;
  for (auto n : od.N) {
    std::vector<double> err(reps);
    parallel_for(reps, cfg.threads(), [&](std::size_t i) {
      SimConfig sc;
      sc.horizon = od.horizon;
      sc.maxEvents = cfg.run.maxEvents;
      Rng rng = Rng::for_replica(cfg.seed(), i, 100 + static_cast<std::uint64_t>(n));
      err[i] = ode_path_error(od.model, traj, n, sc, rng);
    });
    const double mean = pairwise_sum(err) / static_cast<double>(reps);
    auto sorted = err;
    std::sort(sorted.begin(), sorted.end());
    const double median = reps % 2 ? sorted[reps / 2]
                                   : 0.5 * (sorted[reps / 2 - 1] + sorted[reps / 2]);
    csv << n << "," << reps << "," << fmt_real(median) << "," << fmt_real(mean)
        << "," << fmt_real(sorted.back()) << "," << fmt_real(traj.halvingError)
        << ",ok\n";
    log << "odelimit: N=" << n << " median sup error " << fmt_real(median) << "\n";
  }
  return kExitPass;
}

}  // namespace

PsiFunction make_psi(const PsiSpec& spec, const ModelSpec& model,
                     std::size_t stateLimit) {
  if (spec.name == "inverse-size") return PsiFunction::inverse_size();
  if (spec.name == "constant-one") return PsiFunction::constant_one();
  const auto states = states_of(model, stateLimit);
  if (spec.name == "eigen-h") {
    const auto t =
        perron_frobenius(build_generator_matrix(model.kernel, *states));
    return eigen_psi(states, t.h);
  }
  if (spec.name == "custom-tabulated") {
    if (spec.values.size() != states->size()) {
      raise(ErrorCode::Config,
            "psi.values has " + std::to_string(spec.values.size()) +
                " entries, the state space has " +
                std::to_string(states->size()));
    }
    for (double v : spec.values) {
      if (!(v > 0) || !std::isfinite(v)) {
        raise(ErrorCode::Config, "psi.values must be positive and finite");
      }
    }
    return tabulated_psi("custom-tabulated", states, spec.values);
  }
  raise(ErrorCode::Config, "unknown psi '" + spec.name + "'");
}

int run_command(const std::string& command, const ExperimentConfig& cfg,
                std::ostream& log) {
  try {
    if (command == "simulate") return cmd_simulate(cfg, log);
    if (command == "compare") return cmd_compare(cfg, log);
    if (command == "eigen") return cmd_eigen(cfg, log);
    if (command == "phase") return cmd_phase(cfg, log);
    if (command == "odelimit") return cmd_odelimit(cfg, log);
    log << "unknown command '" << command
        << "' (simulate, compare, eigen, phase, odelimit)\n";
  } catch (const Error& e) {
    log << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    log << "Io: " << e.what() << "\n";
  }
  return kExitConfig;
}

}  // namespace spine
