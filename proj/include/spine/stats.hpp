#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/genealogy.hpp"
#include "spine/simulate.hpp"

namespace spine {

struct Estimate {
  double mean = 0.0;
  double stdError = 0.0;
  std::size_t n = 0;
  double censoredFraction = 0.0;
};

/// Mean and standard error (sample sd / sqrt n) with pairwise summation.
Estimate estimate_of(const std::vector<double>& values,
                     std::size_t censored = 0);

/// Functional F(tree, label) evaluated on a tree truncated at t.
struct Functional {
  enum class Kind {
    One,
    LineageBranchCount,
    PopulationSizeAt,
    LineageOccupation,
    LineageBranch,
    TerminalTypeIndicator,
    Custom,
  };

  Kind kind = Kind::One;
  std::string name = "one";
  std::optional<TypeId> stateType;  // unset: any ancestor type
  PopVector stateComposition;
  OffspringVector offspring;
  TypeId type;
  std::function<double(const GenealogyTree&, NodeId, double)> custom;

  static Functional one();
  static Functional lineage_branch_count();
  static Functional population_size();
  static Functional lineage_occupation(PopVector z,
                                       std::optional<TypeId> x = std::nullopt);
  static Functional lineage_branch(TypeId x, PopVector z, OffspringVector k);
  static Functional terminal_type(TypeId x);
  static Functional make_custom(
      std::string name,
      std::function<double(const GenealogyTree&, NodeId, double)> f);

  double operator()(const GenealogyTree& tree, NodeId u, double t) const;
};

struct RunOptions {
  double horizon = 1.0;
  std::size_t replicas = 1000;
  std::uint64_t seed = 0;
  std::uint64_t maxEvents = 1'000'000;
  std::size_t threads = 1;
  double spineRateFactor = 1.0;
};

/// Means of 1{not censored, alive} F(T(t), U(t)) over original-process
/// replicas, one Estimate per functional (replicas shared).
std::vector<Estimate> estimate_lhs(const ModelSpec& model,
                                   const std::vector<Functional>& fs,
                                   const SamplingWeights& p,
                                   const RunOptions& opt);

/// Means of <v, psi(., v)> W(t) F(A(t), E(t)) over spine replicas.
std::vector<Estimate> estimate_rhs(const ModelSpec& model,
                                   const PsiFunction& psi,
                                   const std::vector<Functional>& fs,
                                   const SamplingWeights& p,
                                   const RunOptions& opt);

struct Comparison {
  Estimate lhs;
  Estimate rhs;
  double zscore = 0.0;
  bool pass = false;
};

/// |lhs - rhs| <= band * sqrt(se_l^2 + se_r^2) + floor.
Comparison compare(const Estimate& lhs, const Estimate& rhs,
                   double band = 3.0, double floor = 1e-12);

/// Path functional G of (ancestor type, composition) along a lineage:
/// constant one, or time spent in a state.
struct PathFunctional {
  enum class Kind { One, Occupation };
  Kind kind = Kind::One;
  std::optional<TypeId> stateType;
  PopVector stateComposition;

  static PathFunctional one() { return {}; }
  static PathFunctional occupation(PopVector z,
                                   std::optional<TypeId> x = std::nullopt) {
    return {Kind::Occupation, x, std::move(z)};
  }
  bool in_state(TypeId x, const PopVector& z) const {
    return (!stateType || *stateType == x) && z == stateComposition;
  }
};

/// For every node alive at t, the integral over [0, t] of f(ancestor type,
/// Z(s)) along its ancestral line. f is only evaluated where the ancestor
/// type is present. Nodes not alive at t get NaN.
std::vector<double> lineage_integrals(const GenealogyTree& tree, double t,
                                      const StateFn& f);

/// Full tree: sum over alive u of psi(Z_u(t), Z(t)) G(path of u).
/// Spine: <v, psi(., v)> exp(int lambda) G((Y, Xi) path).
Comparison many_to_one_check(const ModelSpec& model, const PsiFunction& psi,
                             const PathFunctional& G, const RunOptions& opt);

/// M(t) = sum_u exp(-int lambda) psi(Z_u(t), Z(t)) for one tree.
double martingale_value(const ModelSpec& model, const PsiFunction& psi,
                        const GenealogyTree& tree, double t);

struct MartingaleReport {
  std::vector<double> times;
  std::vector<Estimate> values;
  double initial = 0.0;  // <v, psi(., v)>
  std::vector<Comparison> checks;
  bool pass = false;
};

MartingaleReport martingale_check(const ModelSpec& model,
                                  const PsiFunction& psi,
                                  const std::vector<double>& times,
                                  const RunOptions& opt);

/// <v, psi(., v)> (1 - censored fraction of spine runs) against the
/// full-tree mean of M(t).
Comparison many_to_one_mass_check(const ModelSpec& model,
                                  const PsiFunction& psi,
                                  const RunOptions& opt);

struct TestResult {
  double statistic = 0.0;
  double pValue = 1.0;
  std::size_t dof = 0;
};

/// Two-sample chi-square on integer-valued samples; adjacent categories are
/// pooled until each pooled cell has expected count >= 5 in both samples.
TestResult chi2_two_sample(const std::vector<std::int64_t>& a,
                           const std::vector<std::int64_t>& b,
                           std::size_t minSize = 1000);

/// Two-sample Kolmogorov-Smirnov with the asymptotic distribution.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                         std::size_t minSize = 1000);

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 l^2}.
double kolmogorov_q(double lambda);

double total_variation(const std::map<std::int64_t, double>& p,
                       const std::map<std::int64_t, double>& q);

struct LLogLOptions {
  std::int64_t initialSize = 2;
  double chi2Time = 2.0;
  std::size_t chi2Replicas = 100000;
  double martingaleTime = 10.0;
  std::size_t martingaleReplicas = 10000;
  double slopeHorizon = 50.0;
  std::size_t slopePaths = 16;
  double limitRate = 0.0;  // lim lambda(z)
  std::int64_t probeRange = 1000;
  std::uint64_t seed = 0;
  std::uint64_t maxEvents = 50'000'000;
  std::size_t threads = 1;
};

struct LLogLReport {
  TestResult reducedChain;
  Estimate martingaleMean;
  double martingaleTarget = 0.0;
  Comparison martingale;
  double nearZeroMass = 0.0;  // fraction of replicas with M(T) < 1e-3 z
  double slope = 0.0;
  double slopeStdError = 0.0;
  double slopeRelativeError = 0.0;
};

/// Reduced-chain equivalence of Xi - 1, flatness of E_z M(T), and the
/// growth rate of log Z for a single-type kernel with inf lambda > 0.
LLogLReport llogl_suite(const ModelSpec& model, const LLogLOptions& opt);

/// Least-squares slope of log Z(t) on [T/2, T] for one pure-growth path.
double log_growth_slope(const ModelSpec& model, double T, Rng& rng,
                        std::uint64_t maxEvents);

/// Samples of Xi(t) - 1 under psi = 1 and of the reduced chain started
/// at initialSize - 1.
std::vector<std::int64_t> reduced_chain_samples(const RateKernel& kernel,
                                                std::int64_t start, double t,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                std::size_t threads);

}  // namespace spine
