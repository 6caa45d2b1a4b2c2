#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "spine/core_model.hpp"

namespace spine {

struct SpineState {
  TypeId type;
  PopVector z;
};

/// Finite state space {(r, v) : v_r >= 1, |v|_1 <= capacity}.
class StateSpace {
 public:
  StateSpace(std::size_t numTypes, std::int64_t capacity,
             std::vector<SpineState> states);

  std::size_t size() const noexcept { return states_.size(); }
  std::size_t num_types() const noexcept { return numTypes_; }
  std::int64_t capacity() const noexcept { return capacity_; }
  const SpineState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<SpineState>& states() const noexcept { return states_; }
  std::optional<std::size_t> index_of(TypeId x, const PopVector& z) const;

 private:
  std::size_t numTypes_;
  std::int64_t capacity_;
  std::vector<SpineState> states_;
  std::vector<std::unordered_map<PopVector, std::size_t, PopVectorHash>>
      index_;
};

/// Number of states for the given dimensions (as a double, may be huge).
double state_count(std::size_t numTypes, std::int64_t capacity);

/// Lexicographic enumeration ordered by type, then composition. Throws
/// Capacity when the count exceeds `limit`.
StateSpace enumerate_states(std::size_t numTypes, std::int64_t capacity,
                            std::size_t limit = 200000);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Matrix of the first-moment operator restricted to the state space.
SparseMatrix build_generator_matrix(const RateKernel& kernel,
                                    const StateSpace& states);

struct Reachability {
  bool irreducible = false;
  /// When reducible: a pair (from, to) of state indices such that `to`
  /// cannot be reached from `from`.
  std::size_t from = 0;
  std::size_t to = 0;
};

/// Strong connectivity of the graph of nonzero off-diagonal entries.
Reachability irreducibility_check(const SparseMatrix& m);

struct EigenTriplet {
  double lambda = 0.0;
  Eigen::VectorXd h;
  Eigen::VectorXd gamma;
  double residualRight = 0.0;
  double residualLeft = 0.0;
  std::size_t iterations = 0;
};

/// Perron eigenvalue and positive right/left eigenvectors of a matrix with
/// nonnegative off-diagonal entries. Normalized so sum(gamma) = 1 and
/// sum(h * gamma) = 1. Throws NotIrreducible or NoConvergence.
EigenTriplet perron_frobenius(const SparseMatrix& m, double tol = 1e-12,
                              std::size_t maxIterations = 1000000);

/// pi = h * gamma.
Eigen::VectorXd stationary_law(const EigenTriplet& trip);

/// gamma_a tau_k(a) <k, h(., z + k - e(x))> for the support entry j of the
/// type of state a. Throws Capacity if the move leaves the state space.
double ancestral_branch_intensity(const RateKernel& kernel,
                                  const StateSpace& states,
                                  const EigenTriplet& trip, std::size_t a,
                                  std::size_t j);

/// psi given by the tabulated eigenvector h.
PsiFunction eigen_psi(std::shared_ptr<const StateSpace> states,
                      const Eigen::VectorXd& h);

/// psi tabulated from explicit values over a state space.
PsiFunction tabulated_psi(std::string name,
                          std::shared_ptr<const StateSpace> states,
                          std::vector<double> values);

}  // namespace spine
