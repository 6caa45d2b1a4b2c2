#pragma once

#include <cstdint>
#include <map>

#include "spine/core_model.hpp"

namespace spine {

/// Spine branching rate tau_k(x,z) <k, psi(., z-e(x)+k)> / psi(x,z).
double spine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                         TypeId x, const PopVector& z, std::size_t j);
double spine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                         TypeId x, const PopVector& z,
                         const OffspringVector& k);

/// Rate tau_k(y,z) psi(x, z-e(y)+k) / psi(x,z) of a non-spine individual of
/// type y when the spine has type x.
double nonspine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                            TypeId y, TypeId x, const PopVector& z,
                            std::size_t j);
double nonspine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                            TypeId y, TypeId x, const PopVector& z,
                            const OffspringVector& k);

/// Probability psi(y, z-e(x)+k) / <k, psi(., z-e(x)+k)> that a given child of
/// type y becomes the spine.
double spine_choice_prob(const PsiFunction& psi, TypeId y,
                         const OffspringVector& k, const PopVector& z,
                         TypeId x);

/// Single-type: rate of the jump z -> z + k - 1 of Xi - 1 under psi = 1,
/// k tau_k(z+1) + z tau_k(z+1).
double xi_minus_one_rate(const RateKernel& kernel, std::int64_t z,
                         std::int64_t k);

/// k sum_z pi_z tau_k(z) z / (z - 1 + k) for a single-type kernel.
double pi_hat(const std::map<std::int64_t, double>& stationary,
              const RateKernel& kernel, std::int64_t k);

/// Biased rates bound to one kernel and psi.
class BiasedRates {
 public:
  BiasedRates(const RateKernel& kernel, const PsiFunction& psi)
      : kernel_(&kernel), psi_(&psi) {}

  double spine_rate(TypeId x, const PopVector& z, std::size_t j) const {
    return spine_branch_rate(*kernel_, *psi_, x, z, j);
  }
  double nonspine_rate(TypeId y, TypeId x, const PopVector& z,
                       std::size_t j) const {
    return nonspine_branch_rate(*kernel_, *psi_, y, x, z, j);
  }
  double spine_choice(TypeId y, const OffspringVector& k, const PopVector& z,
                      TypeId x) const {
    return spine_choice_prob(*psi_, y, k, z, x);
  }
  const RateKernel& kernel() const { return *kernel_; }
  const PsiFunction& psi() const { return *psi_; }

 private:
  const RateKernel* kernel_;
  const PsiFunction* psi_;
};

}  // namespace spine
