#include "spine/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spine/errors.hpp"
#include "spine/parallel.hpp"

namespace spine {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  raise(ErrorCode::Config, where + ": " + what);
}

const json& need(const json& j, const std::string& key,
                 const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where, "missing key '" + key + "'");
  return j.at(key);
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

double num(const json& j, const std::string& key, const std::string& where) {
  return num(need(j, key, where), where + "." + key);
}

double num_or(const json& j, const std::string& key, double dflt,
              const std::string& where) {
  return j.contains(key) ? num(j.at(key), where + "." + key) : dflt;
}

std::uint64_t count(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (d >= 0 && d == std::floor(d) && d < 1.8e19) {
      return static_cast<std::uint64_t>(d);
    }
  }
  bad(where, "expected a nonnegative integer");
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> reals(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::int64_t> ints(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected a list of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<std::int64_t>(
        count(j[i], where + "[" + std::to_string(i) + "]")));
  }
  return out;
}

TypeId type_of(const std::vector<std::string>& names, const json& j,
               const std::string& where) {
  if (j.is_number()) {
    const auto i = count(j, where);
    if (i >= names.size()) bad(where, "type index out of range");
    return TypeId{static_cast<std::uint32_t>(i)};
  }
  const auto s = str(j, where);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return TypeId{static_cast<std::uint32_t>(i)};
  }
  bad(where, "unknown type '" + s + "'");
}

PopVector counts_of(const json& j, std::size_t d, const std::string& where) {
  const auto v = ints(j, where);
  if (v.size() != d) bad(where, "expected " + std::to_string(d) + " counts");
  return PopVector(v);
}

RateExpr expr_of(const json& j, std::size_t d, const std::string& where) {
  const auto fam = str(need(j, "family", where), where + ".family");
  auto sized = [&](const char* key) {
    auto v = reals(need(j, key, where), where + "." + key);
    if (v.size() != d) bad(where + "." + key, "length must equal the type count");
    return v;
  };
  if (fam == "constant") return RateExpr::constant(num(j, "rate", where));
  if (fam == "logistic-death") {
    return RateExpr::logistic_death(num(j, "rate", where));
  }
  if (fam == "capacity-gated") {
    std::vector<double> mask(d, 1.0);
    if (j.contains("mask")) mask = sized("mask");
    return RateExpr::capacity_gated(num(j, "rate", where),
                                    num(j, "level", where), mask);
  }
  if (fam == "affine") {
    return RateExpr::affine(num_or(j, "intercept", 0.0, where), sized("coeffs"));
  }
  if (fam == "decaying") {
    return RateExpr::decaying(num(j, "rate", where),
                              num(j, "amplitude", where));
  }
  bad(where + ".family", "unknown family '" + fam +
                             "' (constant, logistic-death, capacity-gated, "
                             "affine, decaying)");
}

std::vector<std::string> type_names(const json& m, const std::string& where) {
  const auto& t = need(m, "types", where);
  if (!t.is_array() || t.empty()) bad(where + ".types", "expected a nonempty list");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < t.size(); ++i) {
    names.push_back(str(t[i], where + ".types[" + std::to_string(i) + "]"));
  }
  return names;
}

struct RateEntry {
  TypeId type;
  OffspringVector offspring;
  RateExpr expr;
};

std::vector<RateEntry> rate_entries(const json& m,
                                    const std::vector<std::string>& names,
                                    const std::string& where) {
  const auto& rs = need(m, "rates", where);
  if (!rs.is_array()) bad(where + ".rates", "expected a list");
  std::vector<RateEntry> out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string w = where + ".rates[" + std::to_string(i) + "]";
    out.push_back({type_of(names, need(rs[i], "type", w), w + ".type"),
                   counts_of(need(rs[i], "offspring", w), names.size(),
                             w + ".offspring"),
                   expr_of(need(rs[i], "expr", w), names.size(), w + ".expr")});
  }
  return out;
}

PopVector initial_of(const json& m, const std::vector<std::string>& names,
                     const std::string& where) {
  const auto& v = need(m, "initial", where);
  if (v.is_array()) return counts_of(v, names.size(), where + ".initial");
  if (!v.is_object()) bad(where + ".initial", "expected a list or an object");
  PopVector z(names.size());
  for (const auto& [k, n] : v.items()) {
    z.add(type_of(names, json(k), where + ".initial"),
          static_cast<std::int64_t>(count(n, where + ".initial." + k)));
  }
  return z;
}

ModelSpec model_of(const json& m, std::string& name) {
  const std::string where = "model";
  if (m.contains("builtin")) {
    name = str(m.at("builtin"), "model.builtin");
    if (name == "logistic") {
      return logistic_model(num(m, "b", where), num(m, "c", where),
                            static_cast<std::int64_t>(
                                count(need(m, "initial", where), "model.initial")));
    }
    if (name == "sir") {
      return sir_model(
          num(m, "beta", where), num(m, "gamma", where),
          static_cast<std::int64_t>(count(need(m, "N", where), "model.N")),
          static_cast<std::int64_t>(
              m.contains("infected") ? count(m.at("infected"), "model.infected") : 1),
          static_cast<std::int64_t>(
              m.contains("recovered") ? count(m.at("recovered"), "model.recovered")
                                      : 0));
    }
    bad("model.builtin", "unknown model '" + name + "' (logistic, sir)");
  }
  name = m.contains("name") ? str(m.at("name"), "model.name") : "custom";
  const auto names = type_names(m, where);
  std::optional<std::int64_t> cap;
  if (m.contains("capacity")) {
    cap = static_cast<std::int64_t>(count(m.at("capacity"), "model.capacity"));
  }
  RateKernel kernel(names.size(), cap);
  for (auto& e : rate_entries(m, names, where)) {
    kernel.add(e.type, e.offspring, e.expr.as_rate_fn());
  }
  TypeAssignmentLaw law;
  if (m.contains("assignment")) {
    const auto a = str(m.at("assignment"), "model.assignment");
    if (a == "ordered") {
      law = TypeAssignmentLaw(TypeAssignmentLaw::Kind::TypeOrdered);
    } else if (a != "exchangeable") {
      bad("model.assignment", "expected 'exchangeable' or 'ordered'");
    }
  }
  return make_model(names, std::move(kernel),
                    initial_types_from(initial_of(m, names, where)), law);
}

LargeNModel large_n_of(const json& m) {
  const std::string where = "odelimit.model";
  if (m.contains("builtin")) {
    const auto name = str(m.at("builtin"), where + ".builtin");
    if (name == "logistic") {
      return logistic_large_n(num(m, "b", where), num(m, "c", where));
    }
    bad(where + ".builtin", "unknown model '" + name + "' (logistic)");
  }
  LargeNModel out;
  out.typeNames = type_names(m, where);
  out.support.resize(out.typeNames.size());
  for (auto& e : rate_entries(m, out.typeNames, where)) {
    out.support[e.type.index].push_back({e.offspring, e.expr});
  }
  return out;
}

PsiSpec psi_of(const json& j, const std::string& where) {
  PsiSpec p;
  if (j.is_string()) {
    p.name = j.get<std::string>();
  } else {
    p.name = str(need(j, "name", where), where + ".name");
    if (j.contains("values")) p.values = reals(j.at("values"), where + ".values");
  }
  if (p.name != "inverse-size" && p.name != "constant-one" &&
      p.name != "eigen-h" && p.name != "custom-tabulated") {
    bad(where, "unknown psi '" + p.name +
                   "' (inverse-size, constant-one, eigen-h, custom-tabulated)");
  }
  if (p.name == "custom-tabulated" && p.values.empty()) {
    bad(where, "custom-tabulated psi needs 'values'");
  }
  return p;
}

Functional functional_of(const json& j, const std::vector<std::string>& names,
                         const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "one") return Functional::one();
    if (s == "lineage-branch-count") return Functional::lineage_branch_count();
    if (s == "population-size") return Functional::population_size();
    bad(where, "unknown functional '" + s + "'");
  }
  const std::size_t d = names.size();
  if (j.contains("occupation")) {
    std::optional<TypeId> x;
    if (j.contains("type")) x = type_of(names, j.at("type"), where + ".type");
    return Functional::lineage_occupation(
        counts_of(j.at("occupation"), d, where + ".occupation"), x);
  }
  if (j.contains("lineage-branch")) {
    const auto& b = j.at("lineage-branch");
    const std::string w = where + ".lineage-branch";
    return Functional::lineage_branch(
        type_of(names, need(b, "type", w), w + ".type"),
        counts_of(need(b, "composition", w), d, w + ".composition"),
        counts_of(need(b, "offspring", w), d, w + ".offspring"));
  }
  if (j.contains("terminal-type")) {
    return Functional::terminal_type(
        type_of(names, j.at("terminal-type"), where + ".terminal-type"));
  }
  bad(where, "unknown functional");
}

FractionLaw fraction_of(const json& j, const std::string& where) {
  const auto law = str(need(j, "law", where), where + ".law");
  if (law == "point") {
    const double f = num(j, "value", where);
    if (!(f > 0 && f < 1)) bad(where + ".value", "must lie in (0, 1)");
    return FractionLaw::point(f);
  }
  if (law == "beta") {
    const double a = num(j, "shape", where);
    if (!(a > 0)) bad(where + ".shape", "must be positive");
    return FractionLaw::beta(a);
  }
  if (law == "uniform") return FractionLaw::uniform();
  bad(where + ".law", "unknown law '" + law + "' (point, beta, uniform)");
}

std::vector<double> grid(const json& p, const char* key) {
  const std::string where = std::string("phase.") + key;
  const auto& g = need(p, key, "phase");
  if (g.is_number()) return {num(g, where)};
  auto v = reals(g, where);
  if (v.empty()) bad(where, "empty grid");
  for (double x : v) {
    if (!(x > 0)) bad(where, "grid values must be positive");
  }
  return v;
}

}  // namespace

std::size_t ExperimentConfig::threads() const {
  return run.threads == 0 ? default_threads() : run.threads;
}

std::uint64_t ExperimentConfig::seed() const {
  if (!run.seed) bad("run.seed", "a seed is required (no clock default)");
  return *run.seed;
}

ExperimentConfig parse_config(std::string_view text,
                              const ConfigOverrides& ov) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::Config, std::string("malformed configuration: ") + e.what());
  }
  if (!root.is_object()) bad("<root>", "expected an object");
  for (const auto& [k, v] : root.items()) {
    static const char* known[] = {"model", "psi", "run", "output", "compare",
                                  "eigen", "phase", "odelimit"};
    if (std::find(std::begin(known), std::end(known), k) == std::end(known)) {
      bad(k, "unknown section");
    }
  }

  ExperimentConfig cfg;
  try {
    if (root.contains("model")) {
      cfg.model = model_of(root.at("model"), cfg.modelName);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    raise(ErrorCode::Config, std::string("model: ") + e.what());
  }
  if (root.contains("psi")) cfg.psi = psi_of(root.at("psi"), "psi");

  if (root.contains("run")) {
    const auto& r = root.at("run");
    cfg.run.horizon = num_or(r, "t", cfg.run.horizon, "run");
    if (r.contains("replicas")) cfg.run.replicas = count(r.at("replicas"), "run.replicas");
    if (r.contains("seed")) cfg.run.seed = count(r.at("seed"), "run.seed");
    if (r.contains("maxEvents")) cfg.run.maxEvents = count(r.at("maxEvents"), "run.maxEvents");
    if (r.contains("threads")) cfg.run.threads = count(r.at("threads"), "run.threads");
  }
  if (ov.seed) cfg.run.seed = ov.seed;
  if (ov.replicas) cfg.run.replicas = *ov.replicas;
  if (ov.horizon) cfg.run.horizon = *ov.horizon;
  if (ov.maxEvents) cfg.run.maxEvents = *ov.maxEvents;
  if (ov.threads) cfg.run.threads = *ov.threads;
  if (!cfg.run.seed) bad("run.seed", "a seed is required (no clock default)");
  if (cfg.run.replicas == 0) bad("run.replicas", "must be at least 1");
  if (!(cfg.run.horizon >= 0) || !std::isfinite(cfg.run.horizon)) {
    bad("run.t", "must be finite and nonnegative");
  }
  if (cfg.run.maxEvents == 0) bad("run.maxEvents", "must be at least 1");

  if (root.contains("output")) {
    const auto& o = root.at("output");
    if (o.contains("dir")) cfg.output.dir = str(o.at("dir"), "output.dir");
    if (o.contains("trees")) {
      if (!o.at("trees").is_boolean()) bad("output.trees", "expected true or false");
      cfg.output.trees = o.at("trees").get<bool>();
    }
  }
  if (ov.outDir) cfg.output.dir = *ov.outDir;

  const std::vector<std::string> names =
      cfg.model ? cfg.model->typeNames : std::vector<std::string>{};
  if (root.contains("compare")) {
    const auto& c = root.at("compare");
    if (c.contains("functionals")) {
      if (!cfg.model) bad("compare.functionals", "needs a model section");
      const auto& fs = c.at("functionals");
      if (!fs.is_array()) bad("compare.functionals", "expected a list");
      for (std::size_t i = 0; i < fs.size(); ++i) {
        cfg.compare.functionals.push_back(functional_of(
            fs[i], names, "compare.functionals[" + std::to_string(i) + "]"));
      }
    }
    if (c.contains("psi")) {
      const auto& ps = c.at("psi");
      if (ps.is_array()) {
        for (std::size_t i = 0; i < ps.size(); ++i) {
          cfg.compare.psis.push_back(
              psi_of(ps[i], "compare.psi[" + std::to_string(i) + "]"));
        }
      } else {
        cfg.compare.psis.push_back(psi_of(ps, "compare.psi"));
      }
    }
    cfg.compare.band = num_or(c, "band", cfg.compare.band, "compare");
    if (c.contains("minReplicas")) {
      cfg.compare.minReplicas = count(c.at("minReplicas"), "compare.minReplicas");
    }
    cfg.compare.spineRateFactor =
        num_or(c, "spineRateFactor", 1.0, "compare");
    if (!(cfg.compare.band > 0)) bad("compare.band", "must be positive");
    if (!(cfg.compare.spineRateFactor > 0)) {
      bad("compare.spineRateFactor", "must be positive");
    }
  }

  if (root.contains("eigen")) {
    const auto& e = root.at("eigen");
    cfg.eigen.tolerance = num_or(e, "tolerance", cfg.eigen.tolerance, "eigen");
    if (e.contains("stateLimit")) {
      cfg.eigen.stateLimit = count(e.at("stateLimit"), "eigen.stateLimit");
    }
    if (!(cfg.eigen.tolerance > 0)) bad("eigen.tolerance", "must be positive");
  }

  if (root.contains("phase")) {
    const auto& p = root.at("phase");
    PhaseSection ph;
    ph.b = grid(p, "b");
    ph.c = grid(p, "c");
    ph.r = grid(p, "r");
    if (p.contains("fraction")) ph.law = fraction_of(p.at("fraction"), "phase.fraction");
    ph.horizon = num_or(p, "horizon", ph.horizon, "phase");
    if (p.contains("paths")) ph.paths = count(p.at("paths"), "phase.paths");
    ph.margin = num_or(p, "margin", ph.margin, "phase");
    if (!(ph.horizon > 0)) bad("phase.horizon", "must be positive");
    if (ph.paths < 2) bad("phase.paths", "must be at least 2");
    cfg.phase = std::move(ph);
  }

  if (root.contains("odelimit")) {
    const auto& o = root.at("odelimit");
    OdeSection od;
    od.model = large_n_of(need(o, "model", "odelimit"));
    od.v = reals(need(o, "v", "odelimit"), "odelimit.v");
    if (od.v.size() != od.model.num_types()) {
      bad("odelimit.v", "length must equal the type count");
    }
    od.N = ints(need(o, "N", "odelimit"), "odelimit.N");
    if (od.N.empty()) bad("odelimit.N", "empty list");
    for (auto n : od.N) {
      if (n < 1) bad("odelimit.N", "scales must be positive");
    }
    od.horizon = num_or(o, "horizon", od.horizon, "odelimit");
    od.dt = num_or(o, "dt", od.dt, "odelimit");
    od.floor = num_or(o, "floor", od.floor, "odelimit");
    if (!(od.horizon > 0)) bad("odelimit.horizon", "must be positive");
    if (!(od.dt > 0)) bad("odelimit.dt", "must be positive");
    cfg.odelimit = std::move(od);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path,
                             const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot read configuration '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace spine
