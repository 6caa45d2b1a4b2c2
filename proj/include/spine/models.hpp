#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/rate_expr.hpp"
#include "spine/rng.hpp"
#include "spine/simulate.hpp"

namespace spine {

// ---- Logistic birth-death --------------------------------------------------

/// Single type, binary birth at rate b, death at rate c (z - 1).
ModelSpec logistic_model(double b, double c, std::int64_t initialSize);

/// (b/c)^z / (z! (e^{b/c} - 1)) for z >= 1, truncated where the tail drops
/// below 1e-14 (or at zmax when given) and renormalized.
std::map<std::int64_t, double> logistic_stationary(double b, double c,
                                                   std::int64_t zmax = 0);

// ---- Growth-fragmentation --------------------------------------------------

/// 2b (1 - c/b + 1/(e^{b/c} - 1)) E log(1/F).
double gf_threshold(double b, double c, const FractionLaw& law);

/// r - E log(1/F) * 2 sum_z pi_z b z / (z + 1) for the logistic model.
double gf_theoretical_slope(double b, double c, double r,
                            const FractionLaw& law);

enum class Phase { Regulated, Growing, Inconclusive };
const char* to_string(Phase p) noexcept;

struct PhaseOptions {
  double horizon = 200.0;
  std::size_t paths = 64;
  double margin = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t maxEvents = 1'000'000;
  std::size_t threads = 1;
};

struct PhaseResult {
  Phase phase = Phase::Inconclusive;
  double slope = 0.0;       // mean over paths of (log zeta*(T) - log zeta0)/T
  double slopeStdError = 0.0;
  double theory = 0.0;
  double threshold = 0.0;
};

/// Simulates the mass of the 1/z-spine of the logistic growth-fragmentation
/// model and classifies the sign of its exponential growth rate.
PhaseResult classify_phase(double b, double c, double r,
                           const FractionLaw& law, const PhaseOptions& opt);

struct MassSamples {
  std::vector<std::int64_t> size;
  std::vector<double> logMass;
};

/// Samples of (Z(t), log zeta_U(t)) with U uniform among the living cells
/// of full trees, and of (Xi(t), log zeta*(t)) along the 1/z-spine. Log
/// masses are rounded to a 1e-9 grid so lattice laws tie exactly.
std::pair<MassSamples, MassSamples> mass_identity_samples(
    const ModelSpec& model, double r, const FractionLaw& law, double zeta0,
    double t, std::size_t n, std::uint64_t seed, std::size_t threads,
    std::uint64_t maxEvents = 1'000'000);

// ---- SIR ------------------------------------------------------------------

/// Types (infected, recovered); infection k = 2 e(i) at rate
/// beta (N - z_i - z_r), recovery k = e(r) at rate gamma. Capacity N.
ModelSpec sir_model(double beta, double gamma, std::int64_t N,
                    std::int64_t infected = 1, std::int64_t recovered = 0);

// ---- Large population limit ------------------------------------------------

struct LargeNModel {
  struct Entry {
    OffspringVector offspring;
    RateExpr rate;  // evaluated on densities z / N
  };
  std::vector<std::string> typeNames;
  std::vector<std::vector<Entry>> support;

  std::size_t num_types() const { return typeNames.size(); }
  /// Exact process at scale N: tau^N_k(x, z) = tau_k(x, z / N).
  ModelSpec scaled(std::int64_t N, const std::vector<double>& v) const;
};

/// Single type: binary birth b, death c * density.
LargeNModel logistic_large_n(double b, double c);

/// A_{x,y}(z) = sum_k tau_k(x,z) k_y - delta_{xy} tau(x,z).
Eigen::MatrixXd growth_matrix(const LargeNModel& model,
                              const std::vector<double>& z);

/// Vector field z -> z A(z).
std::vector<double> ode_field(const LargeNModel& model,
                              const std::vector<double>& z);

struct OdeTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> slopes;
  /// Max-norm difference of the endpoint against a half-step solve.
  double halvingError = 0.0;

  /// Cubic Hermite interpolation between grid points.
  std::vector<double> at(double t) const;
};

/// Classical RK4 with fixed step. Throws PositivityLoss if a coordinate
/// drops below `floor`.
OdeTrajectory ode_solve(const LargeNModel& model, const std::vector<double>& v,
                        double T, double dt, double floor = 1e-9);

/// sup over the event times of |Z^N(t)/N - z(t)|_1 for one replica.
double ode_path_error(const LargeNModel& model, const OdeTrajectory& traj,
                      std::int64_t N, const SimConfig& cfg, Rng& rng);

/// Differentiable psi on densities for the limit spine.
struct LimitPsi {
  std::string name;
  std::function<double(TypeId, const std::vector<double>&)> value;
  std::function<std::vector<double>(TypeId, const std::vector<double>&)>
      gradient;

  static LimitPsi constant_one(std::size_t numTypes);
  static LimitPsi inverse_size(std::size_t numTypes);
  /// psi(x, z) = phi(x), constant in z.
  static LimitPsi type_weights(std::vector<double> phi);
};

/// Limit lambda = G psi / psi with the differential form of G.
double limit_lambda(const LargeNModel& model, const LimitPsi& psi, TypeId x,
                    const std::vector<double>& z);

struct LimitRate {
  OffspringVector offspring;
  double spine;
  double nonSpine;
};

/// Spine rates tau_k(x,z) <k, psi(., z)> / psi(x, z) and non-spine rates
/// tau_k(x, z) at density z.
std::vector<LimitRate> limit_spine_rates(const LargeNModel& model,
                                         const LimitPsi& psi, TypeId x,
                                         const std::vector<double>& z);

struct LimitSpineOutcome {
  GenealogyTree tree;  // tree rooted at the initial spine
  std::vector<SpinePoint> spinePath;
  double lambdaIntegral = 0.0;
  double terminalPsi = 1.0;
  double prefactor = 1.0;  // <v, psi(., v)>
  SimStatus status = SimStatus::Completed;
};

/// Time-inhomogeneous branching tree along z(t), simulated by thinning
/// against a per-grid-interval majorant.
LimitSpineOutcome simulate_limit_spine(const LargeNModel& model,
                                       const LimitPsi& psi,
                                       const OdeTrajectory& traj, double T,
                                       Rng& rng,
                                       std::uint64_t maxEvents = 1'000'000);

/// exp(int lambda) / (psi(Y, z(T)) |z(T)|_1) times the prefactor.
double limit_spine_weight(const LimitSpineOutcome& out,
                          const OdeTrajectory& traj, double T);

/// Positive phi with A(z*) phi = 0, sum phi = 1.
Eigen::VectorXd equilibrium_reproductive_value(const Eigen::MatrixXd& A,
                                               const std::vector<double>& zstar,
                                               double tol = 1e-10);

}  // namespace spine
