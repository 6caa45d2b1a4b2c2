#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spine/rng.hpp"

namespace spine {

struct TypeId {
  std::uint32_t index = 0;
  auto operator<=>(const TypeId&) const = default;
};

/// Population composition: dense nonnegative counts over a finite type set.
class PopVector {
 public:
  PopVector() = default;
  explicit PopVector(std::size_t numTypes) : counts_(numTypes, 0) {}
  explicit PopVector(std::vector<std::int64_t> counts);

  static PopVector unit(std::size_t numTypes, TypeId x);

  std::size_t size() const noexcept { return counts_.size(); }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  std::int64_t operator[](TypeId x) const { return counts_[x.index]; }
  std::int64_t norm1() const noexcept { return norm1_; }
  bool empty() const noexcept { return norm1_ == 0; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

  void add(TypeId x, std::int64_t delta);
  /// In-place z <- z + k - e(x).
  void apply_branch(TypeId x, const PopVector& k);
  /// z + k - e(x).
  PopVector after_branch(TypeId x, const PopVector& k) const;

  bool operator==(const PopVector& o) const { return counts_ == o.counts_; }
  auto operator<=>(const PopVector& o) const { return counts_ <=> o.counts_; }

  std::string to_string(char sep = ' ') const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t norm1_ = 0;
};

using OffspringVector = PopVector;

struct PopVectorHash {
  std::size_t operator()(const PopVector& z) const noexcept;
};

using RateFn = std::function<double(TypeId, const PopVector&)>;

struct SupportEntry {
  OffspringVector offspring;
  RateFn rate;
};

/// Branching rates tau_k(x, z) over a declared finite offspring support.
class RateKernel {
 public:
  RateKernel() = default;
  explicit RateKernel(std::size_t numTypes,
                      std::optional<std::int64_t> capacity = std::nullopt);

  void add(TypeId x, OffspringVector k, RateFn rate);

  std::size_t num_types() const noexcept { return support_.size(); }
  std::optional<std::int64_t> capacity() const noexcept { return capacity_; }
  const std::vector<SupportEntry>& support(TypeId x) const {
    return support_[x.index];
  }

  /// Rate of the j-th support entry of type x, zero when the capacity gate
  /// would be exceeded.
  double rate(TypeId x, const PopVector& z, std::size_t j) const;
  /// Rate for an arbitrary offspring vector (zero outside the support).
  double rate(TypeId x, const PopVector& z, const OffspringVector& k) const;

  bool gated(const PopVector& z, const OffspringVector& k) const {
    return capacity_ && z.norm1() + k.norm1() - 1 > *capacity_;
  }

 private:
  std::vector<std::vector<SupportEntry>> support_;
  std::optional<std::int64_t> capacity_;
};

/// Law Q_k of the ordered child types given the offspring composition k.
class TypeAssignmentLaw {
 public:
  enum class Kind { Exchangeable, TypeOrdered };

  TypeAssignmentLaw() = default;
  explicit TypeAssignmentLaw(Kind kind) : kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  void assign(const OffspringVector& k, Rng& rng,
              std::vector<TypeId>& out) const;

 private:
  Kind kind_ = Kind::Exchangeable;
};

using StateFn = std::function<double(TypeId, const PopVector&)>;

/// Strictly positive function psi(x, z) on {z_x >= 1}.
class PsiFunction {
 public:
  PsiFunction(std::string name, StateFn fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  static PsiFunction constant_one();
  static PsiFunction inverse_size();

  const std::string& name() const noexcept { return name_; }
  /// Throws Domain if the value is not strictly positive and finite.
  double operator()(TypeId x, const PopVector& z) const;
  const StateFn& fn() const noexcept { return fn_; }

 private:
  std::string name_;
  StateFn fn_;
};

struct ModelSpec {
  std::vector<std::string> typeNames;
  RateKernel kernel;
  TypeAssignmentLaw assignment;
  /// Types of the initial individuals, labelled 1..n in this order.
  std::vector<TypeId> initialTypes;
  PopVector initialComposition;

  std::size_t num_types() const noexcept { return typeNames.size(); }
};

ModelSpec make_model(std::vector<std::string> typeNames, RateKernel kernel,
                     std::vector<TypeId> initialTypes,
                     TypeAssignmentLaw assignment = TypeAssignmentLaw{});

/// Initial types from a composition, listed type by type.
std::vector<TypeId> initial_types_from(const PopVector& v);

double total_rate(const RateKernel& kernel, TypeId x, const PopVector& z);

/// (G f)(x, z): the first-moment operator of the individual in state (x, z).
double generator_apply(const RateKernel& kernel, const StateFn& f, TypeId x,
                       const PopVector& z);

double lambda_of(const RateKernel& kernel, const PsiFunction& psi, TypeId x,
                 const PopVector& z);

/// <v, psi(., v)>.
double psi_mass(const PsiFunction& psi, const PopVector& v);

}  // namespace spine
