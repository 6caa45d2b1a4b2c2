#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/models.hpp"
#include "spine/simulate.hpp"
#include "spine/stats.hpp"

namespace spine {

struct PsiSpec {
  std::string name = "inverse-size";  // inverse-size | constant-one | eigen-h | custom-tabulated
  std::vector<double> values;         // custom-tabulated, in state-space order
};

struct RunSection {
  double horizon = 1.0;
  std::size_t replicas = 1000;
  std::optional<std::uint64_t> seed;
  std::uint64_t maxEvents = 1'000'000;
  std::size_t threads = 0;  // 0 = available parallelism
};

struct OutputSection {
  std::string dir = ".";
  bool trees = false;
};

struct CompareSection {
  std::vector<Functional> functionals;
  std::vector<PsiSpec> psis;  // empty = the top-level psi
  double band = 3.0;
  std::size_t minReplicas = 1000;
  double spineRateFactor = 1.0;  // test hook; 1 in real runs
};

struct EigenSection {
  double tolerance = 1e-12;
  std::size_t stateLimit = 200000;
};

struct PhaseSection {
  std::vector<double> b, c, r;
  FractionLaw law = FractionLaw::point(0.5);
  double horizon = 200.0;
  std::size_t paths = 64;
  double margin = 0.0;
};

struct OdeSection {
  LargeNModel model;
  std::vector<double> v;
  std::vector<std::int64_t> N;
  double horizon = 10.0;
  double dt = 0.01;
  double floor = 1e-9;
};

struct ExperimentConfig {
  std::string modelName;
  std::optional<ModelSpec> model;
  PsiSpec psi;
  RunSection run;
  OutputSection output;
  CompareSection compare;
  EigenSection eigen;
  std::optional<PhaseSection> phase;
  std::optional<OdeSection> odelimit;

  std::size_t threads() const;
  std::uint64_t seed() const;  // throws Config when absent
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<double> horizon;
  std::optional<std::uint64_t> maxEvents;
  std::optional<std::size_t> threads;
  std::optional<std::string> outDir;
};

/// Parses the JSON configuration text. Throws Error(Config) with the
/// offending key path on any validation failure.
ExperimentConfig parse_config(std::string_view text,
                              const ConfigOverrides& overrides = {});

ExperimentConfig load_config(const std::string& path,
                             const ConfigOverrides& overrides = {});

}  // namespace spine
