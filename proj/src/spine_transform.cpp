#include "spine/spine_transform.hpp"

#include "spine/errors.hpp"

namespace spine {

namespace {

std::size_t support_index(const RateKernel& kernel, TypeId x,
                          const OffspringVector& k) {
  const auto& s = kernel.support(x);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j].offspring == k) return j;
  }
  return s.size();
}

double weighted_psi(const PsiFunction& psi, const OffspringVector& k,
                    const PopVector& next) {
  double s = 0.0;
  for (std::size_t w = 0; w < k.size(); ++w) {
    if (k[w] == 0) continue;
    s += static_cast<double>(k[w]) *
         psi(TypeId{static_cast<std::uint32_t>(w)}, next);
  }
  return s;
}

void require_single_type(const RateKernel& kernel) {
  if (kernel.num_types() != 1) {
    raise(ErrorCode::ModelShape, "single-type kernel required");
  }
}

}  // namespace

double spine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                         TypeId x, const PopVector& z, std::size_t j) {
  if (z[x] < 1) raise(ErrorCode::Domain, "spine type absent from z");
  const auto& k = kernel.support(x)[j].offspring;
  if (k.empty()) return 0.0;
  const double r = kernel.rate(x, z, j);
  if (r == 0.0) return 0.0;
  return r * weighted_psi(psi, k, z.after_branch(x, k)) / psi(x, z);
}

double spine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                         TypeId x, const PopVector& z,
                         const OffspringVector& k) {
  const auto j = support_index(kernel, x, k);
  if (j == kernel.support(x).size()) return 0.0;
  return spine_branch_rate(kernel, psi, x, z, j);
}

double nonspine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                            TypeId y, TypeId x, const PopVector& z,
                            std::size_t j) {
  if (z[x] < 1 || z[y] < 1) raise(ErrorCode::Domain, "type absent from z");
  const double r = kernel.rate(y, z, j);
  if (r == 0.0) return 0.0;
  const auto& k = kernel.support(y)[j].offspring;
  return r * psi(x, z.after_branch(y, k)) / psi(x, z);
}

double nonspine_branch_rate(const RateKernel& kernel, const PsiFunction& psi,
                            TypeId y, TypeId x, const PopVector& z,
                            const OffspringVector& k) {
  const auto j = support_index(kernel, y, k);
  if (j == kernel.support(y).size()) return 0.0;
  return nonspine_branch_rate(kernel, psi, y, x, z, j);
}

double spine_choice_prob(const PsiFunction& psi, TypeId y,
                         const OffspringVector& k, const PopVector& z,
                         TypeId x) {
  if (k[y] < 1) raise(ErrorCode::Domain, "offspring has no child of type y");
  const PopVector next = z.after_branch(x, k);
  return psi(y, next) / weighted_psi(psi, k, next);
}

double xi_minus_one_rate(const RateKernel& kernel, std::int64_t z,
                         std::int64_t k) {
  require_single_type(kernel);
  if (z < 0 || k < 0) raise(ErrorCode::Domain, "negative size or offspring");
  const PopVector zp(std::vector<std::int64_t>{z + 1});
  const double r =
      kernel.rate(TypeId{0}, zp, OffspringVector(std::vector<std::int64_t>{k}));
  return static_cast<double>(k + z) * r;
}

double pi_hat(const std::map<std::int64_t, double>& stationary,
              const RateKernel& kernel, std::int64_t k) {
  require_single_type(kernel);
  if (k <= 0) return 0.0;
  const OffspringVector kv(std::vector<std::int64_t>{k});
  double s = 0.0;
  for (const auto& [z, p] : stationary) {
    if (z < 1 || p == 0.0) continue;
    const double r =
        kernel.rate(TypeId{0}, PopVector(std::vector<std::int64_t>{z}), kv);
    s += p * r * static_cast<double>(z) / static_cast<double>(z - 1 + k);
  }
  return static_cast<double>(k) * s;
}

}  // namespace spine
