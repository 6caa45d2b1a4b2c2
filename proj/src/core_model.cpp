#include "spine/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "spine/errors.hpp"

namespace spine {

PopVector::PopVector(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  for (auto c : counts_) {
    if (c < 0) raise(ErrorCode::Domain, "negative count in population vector");
    norm1_ += c;
  }
}

PopVector PopVector::unit(std::size_t numTypes, TypeId x) {
  PopVector e(numTypes);
  e.add(x, 1);
  return e;
}

void PopVector::add(TypeId x, std::int64_t delta) {
  counts_[x.index] += delta;
  norm1_ += delta;
}

void PopVector::apply_branch(TypeId x, const PopVector& k) {
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += k.counts_[i];
  counts_[x.index] -= 1;
  norm1_ += k.norm1_ - 1;
}

PopVector PopVector::after_branch(TypeId x, const PopVector& k) const {
  PopVector out = *this;
  out.apply_branch(x, k);
  return out;
}

std::string PopVector::to_string(char sep) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) os << sep;
    os << counts_[i];
  }
  return os.str();
}

std::size_t PopVectorHash::operator()(const PopVector& z) const noexcept {
  std::uint64_t h = 0x12345678ULL;
  for (auto c : z.counts()) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<std::size_t>(h);
}

RateKernel::RateKernel(std::size_t numTypes,
                       std::optional<std::int64_t> capacity)
    : support_(numTypes), capacity_(capacity) {
  if (capacity_ && *capacity_ < 1) {
    raise(ErrorCode::ModelShape, "capacity must be at least 1");
  }
}

void RateKernel::add(TypeId x, OffspringVector k, RateFn rate) {
  if (x.index >= support_.size()) {
    raise(ErrorCode::ModelShape, "type index out of range");
  }
  if (k.size() != support_.size()) {
    raise(ErrorCode::ModelShape, "offspring vector has wrong dimension");
  }
  for (const auto& e : support_[x.index]) {
    if (e.offspring == k) {
      raise(ErrorCode::ModelShape,
            "duplicate offspring vector (" + k.to_string() + ")");
    }
  }
  support_[x.index].push_back({std::move(k), std::move(rate)});
}

double RateKernel::rate(TypeId x, const PopVector& z, std::size_t j) const {
  const auto& e = support_[x.index][j];
  if (gated(z, e.offspring)) return 0.0;
  const double r = e.rate(x, z);
  if (!(r >= 0.0) || !std::isfinite(r)) {
    raise(ErrorCode::Domain, "rate is negative or not finite at z=(" +
                                 z.to_string() + ")");
  }
  return r;
}

double RateKernel::rate(TypeId x, const PopVector& z,
                        const OffspringVector& k) const {
  const auto& s = support_[x.index];
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j].offspring == k) return rate(x, z, j);
  }
  return 0.0;
}

void TypeAssignmentLaw::assign(const OffspringVector& k, Rng& rng,
                               std::vector<TypeId>& out) const {
  out.clear();
  for (std::size_t y = 0; y < k.size(); ++y) {
    for (std::int64_t i = 0; i < k[y]; ++i) {
      out.push_back(TypeId{static_cast<std::uint32_t>(y)});
    }
  }
  if (kind_ == Kind::Exchangeable) {
    for (std::size_t i = out.size(); i > 1; --i) {
      std::swap(out[i - 1], out[rng.index(i)]);
    }
  }
}

PsiFunction PsiFunction::constant_one() {
  return PsiFunction("constant-one", [](TypeId, const PopVector&) {
    return 1.0;
  });
}

PsiFunction PsiFunction::inverse_size() {
  return PsiFunction("inverse-size", [](TypeId, const PopVector& z) {
    return 1.0 / static_cast<double>(z.norm1());
  });
}

double PsiFunction::operator()(TypeId x, const PopVector& z) const {
  const double v = fn_(x, z);
  if (!(v > 0.0) || !std::isfinite(v)) {
    raise(ErrorCode::Domain, "psi '" + name_ + "' is not positive at type " +
                                 std::to_string(x.index) + ", z=(" +
                                 z.to_string() + ")");
  }
  return v;
}

std::vector<TypeId> initial_types_from(const PopVector& v) {
  std::vector<TypeId> out;
  for (std::size_t x = 0; x < v.size(); ++x) {
    for (std::int64_t i = 0; i < v[x]; ++i) {
      out.push_back(TypeId{static_cast<std::uint32_t>(x)});
    }
  }
  return out;
}

ModelSpec make_model(std::vector<std::string> typeNames, RateKernel kernel,
                     std::vector<TypeId> initialTypes,
                     TypeAssignmentLaw assignment) {
  if (typeNames.empty()) raise(ErrorCode::ModelShape, "no types declared");
  if (kernel.num_types() != typeNames.size()) {
    raise(ErrorCode::ModelShape, "kernel dimension does not match types");
  }
  if (initialTypes.empty()) {
    raise(ErrorCode::ModelShape, "initial population is empty");
  }
  PopVector v(typeNames.size());
  for (auto x : initialTypes) {
    if (x.index >= typeNames.size()) {
      raise(ErrorCode::ModelShape, "initial type out of range");
    }
    v.add(x, 1);
  }
  if (kernel.capacity() && v.norm1() > *kernel.capacity()) {
    raise(ErrorCode::ModelShape, "initial population exceeds capacity");
  }
  return ModelSpec{std::move(typeNames), std::move(kernel), assignment,
                   std::move(initialTypes), std::move(v)};
}

namespace {

void require_present(TypeId x, const PopVector& z) {
  if (x.index >= z.size() || z[x] < 1) {
    raise(ErrorCode::Domain, "type " + std::to_string(x.index) +
                                 " absent from z=(" + z.to_string() + ")");
  }
}

}  // namespace

double total_rate(const RateKernel& kernel, TypeId x, const PopVector& z) {
  require_present(x, z);
  double s = 0.0;
  for (std::size_t j = 0; j < kernel.support(x).size(); ++j) {
    s += kernel.rate(x, z, j);
  }
  return s;
}

double generator_apply(const RateKernel& kernel, const StateFn& f, TypeId x,
                       const PopVector& z) {
  require_present(x, z);
  internal::CancellingSum acc;
  double outflow = 0.0;
  const std::size_t d = kernel.num_types();
  for (std::size_t yi = 0; yi < d; ++yi) {
    const TypeId y{static_cast<std::uint32_t>(yi)};
    if (z[y] == 0) continue;
    const std::int64_t others = z[y] - (y == x ? 1 : 0);
    const auto& sup = kernel.support(y);
    for (std::size_t j = 0; j < sup.size(); ++j) {
      const double r = kernel.rate(y, z, j);
      if (r == 0.0) continue;
      outflow += r * static_cast<double>(z[y]);
      const PopVector next = z.after_branch(y, sup[j].offspring);
      if (y == x) {
        const auto& k = sup[j].offspring;
        for (std::size_t w = 0; w < d; ++w) {
          if (k[w] == 0) continue;
          acc.add(r * static_cast<double>(k[w]) *
                  f(TypeId{static_cast<std::uint32_t>(w)}, next));
        }
      }
      if (others > 0) {
        acc.add(r * static_cast<double>(others) * f(x, next));
      }
    }
  }
  acc.add(-outflow * f(x, z));
  return acc.value();
}

double lambda_of(const RateKernel& kernel, const PsiFunction& psi, TypeId x,
                 const PopVector& z) {
  const StateFn f = [&psi](TypeId y, const PopVector& w) { return psi(y, w); };
  return generator_apply(kernel, f, x, z) / psi(x, z);
}

double psi_mass(const PsiFunction& psi, const PopVector& v) {
  double s = 0.0;
  for (std::size_t x = 0; x < v.size(); ++x) {
    if (v[x] == 0) continue;
    const TypeId t{static_cast<std::uint32_t>(x)};
    s += static_cast<double>(v[x]) * psi(t, v);
  }
  return s;
}

}  // namespace spine
