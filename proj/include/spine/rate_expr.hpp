#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spine/core_model.hpp"

namespace spine {

/// Built-in parametric rate families. Each evaluates on integer counts (the
/// exact process) or on densities (the large-population limit) with the same
/// formula.
struct RateExpr {
  enum class Family {
    Constant,              // rate
    LogisticDeath,         // rate * (|z| - 1), floored at 0
    CapacityGated,         // rate * max(0, level - sum_{y in mask} z_y)
    AffineInCounts,        // max(0, level + sum_y coeffs[y] * z_y)
    DecayingPerturbation,  // rate + amplitude / (1 + log(1 + |z|)^2)
  };

  Family family = Family::Constant;
  double rate = 0.0;
  double level = 0.0;
  double amplitude = 0.0;
  std::vector<double> coeffs;  // affine coefficients or gating mask (0/1)

  static RateExpr constant(double r) {
    return {Family::Constant, r, 0.0, 0.0, {}};
  }
  static RateExpr logistic_death(double c) {
    return {Family::LogisticDeath, c, 0.0, 0.0, {}};
  }
  static RateExpr capacity_gated(double r, double level,
                                 std::vector<double> mask = {}) {
    return {Family::CapacityGated, r, level, 0.0, std::move(mask)};
  }
  static RateExpr affine(double intercept, std::vector<double> coeffs) {
    return {Family::AffineInCounts, 0.0, intercept, 0.0, std::move(coeffs)};
  }
  static RateExpr decaying(double b, double eps) {
    return {Family::DecayingPerturbation, b, 0.0, eps, {}};
  }

  template <class Get>
  double eval(Get&& get, std::size_t d) const {
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += get(i);
    switch (family) {
      case Family::Constant:
        return rate;
      case Family::LogisticDeath:
        return std::max(0.0, rate * (total - 1.0));
      case Family::CapacityGated: {
        double used = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          if (coeffs.empty() || coeffs[i] != 0.0) used += get(i);
        }
        return rate * std::max(0.0, level - used);
      }
      case Family::AffineInCounts: {
        double s = level;
        for (std::size_t i = 0; i < d && i < coeffs.size(); ++i) {
          s += coeffs[i] * get(i);
        }
        return std::max(0.0, s);
      }
      case Family::DecayingPerturbation: {
        const double l = std::log1p(total);
        return rate + amplitude / (1.0 + l * l);
      }
    }
    return 0.0;
  }

  double on_counts(const PopVector& z) const {
    return eval([&z](std::size_t i) { return static_cast<double>(z[i]); },
                z.size());
  }
  double on_density(const std::vector<double>& z) const {
    return eval([&z](std::size_t i) { return z[i]; }, z.size());
  }

  RateFn as_rate_fn() const {
    return [e = *this](TypeId, const PopVector& z) { return e.on_counts(z); };
  }
};

inline const char* family_name(RateExpr::Family f) noexcept {
  switch (f) {
    case RateExpr::Family::Constant: return "constant";
    case RateExpr::Family::LogisticDeath: return "logistic-death";
    case RateExpr::Family::CapacityGated: return "capacity-gated";
    case RateExpr::Family::AffineInCounts: return "affine-in-counts";
    case RateExpr::Family::DecayingPerturbation: return "decaying-perturbation";
  }
  return "unknown";
}

}  // namespace spine
