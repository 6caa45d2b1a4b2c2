#include "spine/spine.h"

#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "spine/config.hpp"
#include "spine/driver.hpp"
#include "spine/eigen.hpp"
#include "spine/errors.hpp"
#include "spine/models.hpp"
#include "spine/simulate.hpp"

struct spine_config {
  std::string text;
  spine::ConfigOverrides overrides;
};

struct spine_model {
  spine::ModelSpec spec;
};

struct spine_eigen {
  std::shared_ptr<const spine::StateSpace> states;
  spine::EigenTriplet triplet;
  Eigen::VectorXd pi;
};

namespace {

thread_local std::string lastError;
thread_local std::string lastLog;

spine_status fail(spine_status s, std::string msg) {
  lastError = std::move(msg);
  return s;
}

template <class F>
spine_status guarded(F&& f) {
  try {
    f();
    lastError.clear();
    return SPINE_OK;
  } catch (const spine::Error& e) {
    return fail(static_cast<spine_status>(static_cast<int>(e.code()) + 1),
                e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPINE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPINE_ERR_INTERNAL, e.what());
  }
}

#define SPINE_REQUIRE(cond)                                              \
  do {                                                                   \
    if (!(cond)) return fail(SPINE_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

spine::PsiFunction psi_named(const spine::ModelSpec& m, const char* name) {
  spine::PsiSpec spec;
  spec.name = name;
  if (spec.name == "custom-tabulated") {
    spine::raise(spine::ErrorCode::Config,
                 "custom-tabulated psi is only available through a config");
  }
  return spine::make_psi(spec, m);
}

void copy_counts(const spine::PopVector& z, int64_t* out) {
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i];
}

}  // namespace

extern "C" {

const char* spine_last_error(void) { return lastError.c_str(); }
const char* spine_last_log(void) { return lastLog.c_str(); }

const char* spine_status_name(spine_status s) {
  switch (s) {
    case SPINE_OK: return "Ok";
    case SPINE_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case SPINE_ERR_INTERNAL: return "Internal";
    default:
      if (s > SPINE_OK && s < SPINE_ERR_INVALID_ARGUMENT) {
        return spine::to_string(static_cast<spine::ErrorCode>(s - 1));
      }
      return "Unknown";
  }
}

const char* spine_version(void) { return "1.0.0"; }

spine_status spine_config_load(const char* path, spine_config** out) {
  SPINE_REQUIRE(path && out);
  return guarded([&] {
    std::ifstream in(path);
    if (!in) {
      spine::raise(spine::ErrorCode::Io,
                   std::string("cannot read configuration '") + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = std::make_unique<spine_config>();
    cfg->text = ss.str();
    *out = cfg.release();
  });
}

spine_status spine_config_parse(const char* text, spine_config** out) {
  SPINE_REQUIRE(text && out);
  return guarded([&] {
    auto cfg = std::make_unique<spine_config>();
    cfg->text = text;
    *out = cfg.release();
  });
}

void spine_config_free(spine_config* cfg) { delete cfg; }

spine_status spine_config_set_seed(spine_config* cfg, uint64_t seed) {
  SPINE_REQUIRE(cfg);
  cfg->overrides.seed = seed;
  return SPINE_OK;
}

spine_status spine_config_set_replicas(spine_config* cfg, uint64_t n) {
  SPINE_REQUIRE(cfg);
  cfg->overrides.replicas = n;
  return SPINE_OK;
}

spine_status spine_config_set_horizon(spine_config* cfg, double t) {
  SPINE_REQUIRE(cfg);
  cfg->overrides.horizon = t;
  return SPINE_OK;
}

spine_status spine_config_set_max_events(spine_config* cfg, uint64_t m) {
  SPINE_REQUIRE(cfg);
  cfg->overrides.maxEvents = m;
  return SPINE_OK;
}

spine_status spine_config_set_threads(spine_config* cfg, uint64_t k) {
  SPINE_REQUIRE(cfg);
  cfg->overrides.threads = k;
  return SPINE_OK;
}

spine_status spine_config_set_out_dir(spine_config* cfg, const char* dir) {
  SPINE_REQUIRE(cfg && dir);
  cfg->overrides.outDir = dir;
  return SPINE_OK;
}

spine_status spine_run(spine_config* cfg, const char* command, int* exit_code) {
  SPINE_REQUIRE(cfg && command && exit_code);
  lastLog.clear();
  const spine_status st = guarded([&] {
    std::ostringstream log;
    int code = spine::kExitConfig;
    try {
      const auto parsed = spine::parse_config(cfg->text, cfg->overrides);
      code = spine::run_command(command, parsed, log);
    } catch (const spine::Error& e) {
      log << e.what() << "\n";
    }
    lastLog = log.str();
    *exit_code = code;
  });
  if (st == SPINE_OK && *exit_code == spine::kExitConfig) lastError = lastLog;
  return st;
}

spine_status spine_model_logistic(double b, double c, int64_t initial,
                                  spine_model** out) {
  SPINE_REQUIRE(out);
  return guarded([&] {
    *out = new spine_model{spine::logistic_model(b, c, initial)};
  });
}

spine_status spine_model_sir(double beta, double gamma, int64_t n,
                             spine_model** out) {
  SPINE_REQUIRE(out);
  return guarded([&] { *out = new spine_model{spine::sir_model(beta, gamma, n)}; });
}

spine_status spine_model_from_config(const spine_config* cfg, spine_model** out) {
  SPINE_REQUIRE(cfg && out);
  return guarded([&] {
    auto parsed = spine::parse_config(cfg->text, cfg->overrides);
    if (!parsed.model) {
      spine::raise(spine::ErrorCode::Config, "configuration has no model section");
    }
    *out = new spine_model{std::move(*parsed.model)};
  });
}

void spine_model_free(spine_model* m) { delete m; }

spine_status spine_model_num_types(const spine_model* m, size_t* out) {
  SPINE_REQUIRE(m && out);
  *out = m->spec.num_types();
  return SPINE_OK;
}

spine_status spine_lambda(const spine_model* m, const char* psi, uint32_t type,
                          const int64_t* counts, double* out) {
  SPINE_REQUIRE(m && psi && counts && out);
  SPINE_REQUIRE(type < m->spec.num_types());
  return guarded([&] {
    const spine::PopVector z(
        std::vector<std::int64_t>(counts, counts + m->spec.num_types()));
    *out = spine::lambda_of(m->spec.kernel, psi_named(m->spec, psi),
                            spine::TypeId{type}, z);
  });
}

spine_status spine_simulate(const spine_model* m, double horizon, uint64_t seed,
                            uint64_t replica, uint64_t max_events,
                            int64_t* final_counts, spine_sim_status* status,
                            double* end_time) {
  SPINE_REQUIRE(m && final_counts);
  return guarded([&] {
    spine::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.maxEvents = max_events;
    cfg.recordTree = false;
    auto rng = spine::Rng::for_replica(seed, replica, 1);
    const auto o = spine::simulate_original(m->spec, cfg, rng);
    copy_counts(o.finalComposition, final_counts);
    if (status) *status = static_cast<spine_sim_status>(o.status);
    if (end_time) *end_time = o.endTime;
  });
}

spine_status spine_simulate_spine(const spine_model* m, const char* psi,
                                  double horizon, uint64_t seed, uint64_t replica,
                                  uint64_t max_events, int64_t* final_counts,
                                  double* weight) {
  SPINE_REQUIRE(m && psi && final_counts && weight);
  return guarded([&] {
    spine::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.maxEvents = max_events;
    cfg.recordTree = false;
    auto rng = spine::Rng::for_replica(seed, replica, 2);
    const auto o =
        spine::simulate_spine(m->spec, psi_named(m->spec, psi), cfg, rng);
    copy_counts(o.finalComposition, final_counts);
    *weight = spine::spine_weight(o);
  });
}

spine_status spine_eigen_solve(const spine_model* m, double tol, spine_eigen** out) {
  SPINE_REQUIRE(m && out);
  return guarded([&] {
    const auto cap = m->spec.kernel.capacity();
    if (!cap) {
      spine::raise(spine::ErrorCode::Config, "model has no capacity");
    }
    auto e = std::make_unique<spine_eigen>();
    e->states = std::make_shared<const spine::StateSpace>(
        spine::enumerate_states(m->spec.num_types(), *cap));
    e->triplet = spine::perron_frobenius(
        spine::build_generator_matrix(m->spec.kernel, *e->states), tol);
    e->pi = spine::stationary_law(e->triplet);
    *out = e.release();
  });
}

void spine_eigen_free(spine_eigen* e) { delete e; }

spine_status spine_eigen_size(const spine_eigen* e, size_t* out) {
  SPINE_REQUIRE(e && out);
  *out = e->states->size();
  return SPINE_OK;
}

spine_status spine_eigen_lambda(const spine_eigen* e, double* out) {
  SPINE_REQUIRE(e && out);
  *out = e->triplet.lambda;
  return SPINE_OK;
}

spine_status spine_eigen_state(const spine_eigen* e, size_t index, double* h,
                               double* gamma, double* pi) {
  SPINE_REQUIRE(e && index < e->states->size());
  const auto i = static_cast<Eigen::Index>(index);
  if (h) *h = e->triplet.h[i];
  if (gamma) *gamma = e->triplet.gamma[i];
  if (pi) *pi = e->pi[i];
  return SPINE_OK;
}

spine_status spine_gf_threshold(double b, double c, spine_fraction_law law,
                                double param, double* out) {
  SPINE_REQUIRE(out);
  return guarded([&] {
    spine::FractionLaw f;
    switch (law) {
      case SPINE_FRACTION_POINT: f = spine::FractionLaw::point(param); break;
      case SPINE_FRACTION_BETA: f = spine::FractionLaw::beta(param); break;
      case SPINE_FRACTION_UNIFORM: f = spine::FractionLaw::uniform(); break;
      default: spine::raise(spine::ErrorCode::Domain, "unknown fraction law");
    }
    *out = spine::gf_threshold(b, c, f);
  });
}

}  // extern "C"
