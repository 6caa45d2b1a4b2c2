#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/genealogy.hpp"
#include "spine/rng.hpp"

namespace spine {

struct SimConfig {
  double horizon = 1.0;
  std::uint64_t maxEvents = 1'000'000;
  bool recordTree = true;
  std::uint64_t seed = 0;
  std::uint64_t replicaIndex = 0;
  /// Multiplies every spine branching rate. 1 in normal use; other values
  /// deliberately corrupt the construction to exercise the comparison tests.
  double spineRateFactor = 1.0;
};

void validate(const SimConfig& cfg);

enum class SimStatus { Completed, Extinct, Censored };
const char* to_string(SimStatus s) noexcept;

struct SimOutcome {
  GenealogyTree tree;  // empty unless recordTree
  PopVector finalComposition;
  SimStatus status = SimStatus::Completed;
  double endTime = 0.0;  // horizon, extinction time, or censoring time
  std::uint64_t events = 0;
};

/// Called once per holding interval [t0, t1) with the composition held.
using CompositionObserver =
    std::function<void(double t0, double t1, const PopVector& z)>;

SimOutcome simulate_original(const ModelSpec& model, const SimConfig& cfg,
                             Rng& rng,
                             const CompositionObserver& observer = nullptr);

struct SpinePoint {
  double time = 0.0;
  NodeId node = kNoNode;  // kNoNode when the tree is not recorded
  TypeId type;
};

struct SpineOutcome {
  GenealogyTree tree;
  std::vector<SpinePoint> spinePath;
  double lambdaIntegral = 0.0;
  double terminalPsi = 1.0;
  PopVector finalComposition;
  SimStatus status = SimStatus::Completed;
  double endTime = 0.0;
  std::uint64_t events = 0;

  NodeId spine() const { return spinePath.back().node; }
  TypeId spine_type() const { return spinePath.back().type; }
};

/// Called once per holding interval with the spine type and composition.
using SpineObserver = std::function<void(double t0, double t1, TypeId spine,
                                         const PopVector& z)>;

SpineOutcome simulate_spine(const ModelSpec& model, const PsiFunction& psi,
                            const SimConfig& cfg, Rng& rng,
                            const SpineObserver& observer = nullptr);

/// Law p_e of the sampled individual: uniform, or proportional to a
/// function of (type, composition).
struct SamplingWeights {
  StateFn weight;  // empty = uniform

  double probability(TypeId x, const PopVector& z) const;
};

/// exp(int lambda) p_E / psi(Y, Xi); zero for censored runs.
double spine_weight(const SpineOutcome& out,
                    const SamplingWeights& p = SamplingWeights{});

/// Law of the fraction F in (0,1) given to the first daughter at division.
struct FractionLaw {
  enum class Kind { Point, Beta, Uniform };
  Kind kind = Kind::Point;
  double param = 0.5;  // point location, or Beta(param, param) shape

  static FractionLaw point(double f) { return {Kind::Point, f}; }
  static FractionLaw beta(double a) { return {Kind::Beta, a}; }
  static FractionLaw uniform() { return {Kind::Uniform, 0.0}; }

  double sample(Rng& rng) const;
  /// E log(1/F).
  double mean_log_inverse() const;
};

/// Checks that the kernel is single-type with support within {0, 2}.
void require_division_model(const ModelSpec& model);

/// Mass of every node at its birth time for a full growth-fragmentation
/// tree: exponential growth at rate r, split (F, 1-F) at division.
std::vector<double> decorate_masses(const ModelSpec& model,
                                    const GenealogyTree& tree, double r,
                                    const FractionLaw& law, double zeta0,
                                    Rng& rng);

/// Mass of node u at time t (u alive at t).
double mass_at(const GenealogyTree& tree, const std::vector<double>& birthMass,
               NodeId u, double r, double t);

struct MassPoint {
  double time;
  double logMass;
};

/// Path of log zeta* along the spine: growth at rate r, multiplied by an
/// independent F at every spine division. Last point is at the end time.
std::vector<MassPoint> spine_mass_path(const ModelSpec& model,
                                       const SpineOutcome& out, double r,
                                       const FractionLaw& law, double zeta0,
                                       Rng& rng);

}  // namespace spine
