#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spine/spine.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "spine_capi_tests" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& json, const char* cmd, const fs::path& out,
        unsigned threads = 1) {
  spine_config* cfg = nullptr;
  REQUIRE(spine_config_parse(json.c_str(), &cfg) == SPINE_OK);
  spine_config_set_out_dir(cfg, out.string().c_str());
  spine_config_set_threads(cfg, threads);
  int code = -1;
  REQUIRE(spine_run(cfg, cmd, &code) == SPINE_OK);
  spine_config_free(cfg);
  return code;
}

const std::string kLogistic =
    R"({"model": {"builtin": "logistic", "b": 1, "c": 0.5, "initial": 3},
        "run": {"t": 1.5, "replicas": 1000, "seed": 99}})";

const std::string kTwoState = R"({
  "model": {"types": ["x"], "capacity": 2, "initial": [1],
    "rates": [
      {"type": "x", "offspring": [2], "expr": {"family": "constant", "rate": 1}},
      {"type": "x", "offspring": [0], "expr": {"family": "logistic-death", "rate": 1}}]},
  "run": {"seed": 1}})";

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(spine_status_name(SPINE_OK)) == "Ok");
  CHECK(std::string(spine_status_name(SPINE_ERR_NOT_IRREDUCIBLE)) == "NotIrreducible");
  spine_model* m = nullptr;
  CHECK(spine_model_logistic(-1, 1, 1, &m) == SPINE_ERR_DOMAIN);
  CHECK(std::string(spine_last_error()).find("Domain") == 0);
  CHECK(spine_model_logistic(1, 1, 1, nullptr) == SPINE_ERR_INVALID_ARGUMENT);
  spine_config* cfg = nullptr;
  CHECK(spine_config_load("/nonexistent/config.json", &cfg) == SPINE_ERR_IO);
}

TEST_CASE("model handles") {
  spine_model* m = nullptr;
  REQUIRE(spine_model_logistic(1.0, 0.5, 3, &m) == SPINE_OK);
  size_t d = 0;
  CHECK(spine_model_num_types(m, &d) == SPINE_OK);
  CHECK(d == 1);
  const int64_t z[] = {4};
  double lam = 1.0;
  CHECK(spine_lambda(m, "inverse-size", 0, z, &lam) == SPINE_OK);
  CHECK(lam == 0.0);
  CHECK(spine_lambda(m, "constant-one", 0, z, &lam) == SPINE_OK);
  CHECK(lam == doctest::Approx(1.0 - 0.5 * 3));
  CHECK(spine_lambda(m, "no-such-psi", 0, z, &lam) == SPINE_ERR_CONFIG);
  int64_t fin[1];
  spine_sim_status st;
  double end = 0.0;
  CHECK(spine_simulate(m, 2.0, 5, 0, 1000000, fin, &st, &end) == SPINE_OK);
  CHECK(st == SPINE_SIM_COMPLETED);
  CHECK(end == 2.0);
  CHECK(fin[0] >= 1);
  double w = 0.0;
  CHECK(spine_simulate_spine(m, "inverse-size", 2.0, 5, 0, 1000000, fin, &w) == SPINE_OK);
  CHECK(w == 1.0);
  spine_model_free(m);
}

TEST_CASE("eigen handle on the two-state model") {
  spine_config* cfg = nullptr;
  REQUIRE(spine_config_parse(kTwoState.c_str(), &cfg) == SPINE_OK);
  spine_model* m = nullptr;
  REQUIRE(spine_model_from_config(cfg, &m) == SPINE_OK);
  spine_eigen* e = nullptr;
  REQUIRE(spine_eigen_solve(m, 1e-12, &e) == SPINE_OK);
  size_t n = 0;
  double lam = 1, h = 0, g = 0, pi = 0;
  spine_eigen_size(e, &n);
  CHECK(n == 2);
  spine_eigen_lambda(e, &lam);
  CHECK(std::fabs(lam) < 1e-10);
  spine_eigen_state(e, 0, &h, &g, &pi);
  CHECK(std::fabs(h - 4.0 / 3.0) < 1e-10);
  CHECK(std::fabs(g - 0.5) < 1e-10);
  CHECK(std::fabs(pi - 2.0 / 3.0) < 1e-10);
  CHECK(spine_eigen_state(e, 2, &h, &g, &pi) == SPINE_ERR_INVALID_ARGUMENT);
  spine_eigen_free(e);
  spine_model_free(m);
  spine_config_free(cfg);

  spine_model* sir = nullptr;
  REQUIRE(spine_model_sir(0.5, 0.2, 5, &sir) == SPINE_OK);
  CHECK(spine_eigen_solve(sir, 1e-12, &e) == SPINE_ERR_NOT_IRREDUCIBLE);
  spine_model_free(sir);
}

TEST_CASE("threshold") {
  double r = 0;
  CHECK(spine_gf_threshold(1, 1, SPINE_FRACTION_POINT, 0.5, &r) == SPINE_OK);
  CHECK(std::fabs(r - 2 * std::log(2.0) / (std::exp(1.0) - 1)) < 1e-12);
}

TEST_CASE("simulate command is deterministic across thread counts") {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  CHECK(run(kLogistic, "simulate", a, 1) == 0);
  CHECK(run(kLogistic, "simulate", b, 3) == 0);
  const auto sa = slurp(a / "simulate.csv");
  CHECK(sa == slurp(b / "simulate.csv"));
  CHECK(slurp(a / "marginals.csv") == slurp(b / "marginals.csv"));
  std::size_t lines = 0;
  for (char ch : sa) lines += ch == '\n';
  CHECK(lines == 1001);
  CHECK(sa.find('\r') == std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  const auto o = scratch("errors");
  CHECK(run(R"({"model": {"builtin": "logistic", "b": 1, "c": 1, "initial": 1}})",
            "simulate", o) == 2);
  CHECK(std::string(spine_last_error()).find("seed") != std::string::npos);
  CHECK(run(R"({"model": {"builtin": "logistic", "b": 1, "c": 1, "initial": 1},
               "run": {"seed": 1, "replicas": 0}})", "simulate", o) == 2);
  CHECK(run(R"({"model": {"builtin": "logistic", "b": 1, "c": 1, "initial": 1},
               "run": {"seed": 1, "replicas": 10}})", "compare", o) == 2);
  CHECK(run(R"({"run": {"seed": 1}, "phase": {"b": [], "c": [1], "r": [1]}})",
            "phase", o) == 2);
  CHECK(run(R"({"run": {"seed": 1}, "bogus": {}})", "simulate", o) == 2);
  CHECK(run(kLogistic, "no-such-command", o) == 2);
  CHECK(run(R"({"model": {"builtin": "sir", "beta": 0.5, "gamma": 0.2, "N": 8},
               "run": {"seed": 1}})", "eigen", o) == 2);
  CHECK(std::string(spine_last_error()).find("NotIrreducible") != std::string::npos);
  CHECK(run(R"({"model": {"types": ["a", "b", "c"], "capacity": 300,
               "initial": [1, 0, 0], "rates": []}, "run": {"seed": 1}})",
            "eigen", o) == 2);
  CHECK(std::string(spine_last_error()).find("Capacity") != std::string::npos);
  CHECK(run(R"({malformed)", "simulate", o) == 2);
}

TEST_CASE("eigen command on the two-state model") {
  const auto o = scratch("eigen");
  CHECK(run(kTwoState, "eigen", o) == 0);
  const auto csv = slurp(o / "eigen.csv");
  CHECK(csv.rfind("state-index,type,composition,h,gamma,pi\n", 0) == 0);
  CHECK(csv.find("0,x,1,1.333333333333333") != std::string::npos);
}

TEST_CASE("phase command straddling the threshold") {
  const std::string cfg = R"({"run": {"seed": 3},
    "phase": {"b": [1], "c": [1], "r": [0.4, 1.2], "horizon": 100, "paths": 16}})";
  const auto a = scratch("phase_a"), b = scratch("phase_b");
  CHECK(run(cfg, "phase", a) == 0);
  CHECK(run(cfg, "phase", b, 2) == 0);
  const auto s = slurp(a / "phase.csv");
  CHECK(s == slurp(b / "phase.csv"));
  CHECK(s.find("Regulated") != std::string::npos);
  CHECK(s.find("Growing") != std::string::npos);
}

TEST_CASE("odelimit command") {
  const auto o = scratch("ode");
  CHECK(run(R"({"run": {"seed": 2, "replicas": 20},
    "odelimit": {"model": {"builtin": "logistic", "b": 1, "c": 1},
                 "v": [1.0], "N": [100, 1000], "horizon": 2}})",
            "odelimit", o) == 0);
  const auto s = slurp(o / "odelimit.csv");
  CHECK(s.find(",ok\n") != std::string::npos);
  const auto f = scratch("ode_flag");
  CHECK(run(R"({"run": {"seed": 2, "replicas": 5},
    "odelimit": {"model": {"types": ["x"], "rates": [
        {"type": "x", "offspring": [0], "expr": {"family": "constant", "rate": 5}}]},
      "v": [0.001], "N": [100], "horizon": 10, "floor": 1e-6}})",
            "odelimit", f) == 1);
  CHECK(slurp(f / "odelimit.csv").find("positivity-loss") != std::string::npos);
}
