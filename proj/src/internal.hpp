#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/genealogy.hpp"
#include "spine/rng.hpp"

namespace spine::internal {

// Sums terms and flushes the result to zero when it is below the rounding
// error of the summation, so exact cancellations come out exactly.
class CancellingSum {
 public:
  void add(double v) {
    sum_ += v;
    abs_ += std::fabs(v);
    ++n_;
  }
  double value() const {
    const double bound = 4.0 * static_cast<double>(n_ + 1) *
                         std::numeric_limits<double>::epsilon() * abs_;
    return std::fabs(sum_) <= bound ? 0.0 : sum_;
  }

 private:
  double sum_ = 0.0;
  double abs_ = 0.0;
  std::size_t n_ = 0;
};

// Alive individuals grouped by type, with O(1) removal and uniform pick.
class TypeLists {
 public:
  explicit TypeLists(std::size_t numTypes) : lists_(numTypes) {}

  void insert(NodeId u, TypeId x) {
    if (pos_.size() <= u) pos_.resize(u + 1 + pos_.size() / 2);
    pos_[u] = static_cast<std::uint32_t>(lists_[x.index].size());
    lists_[x.index].push_back(u);
  }
  void erase(NodeId u, TypeId x) {
    auto& l = lists_[x.index];
    const auto i = pos_[u];
    l[i] = l.back();
    pos_[l[i]] = i;
    l.pop_back();
  }
  NodeId pick(TypeId x, Rng& rng) const {
    const auto& l = lists_[x.index];
    return l[rng.index(l.size())];
  }
  std::size_t count(TypeId x) const { return lists_[x.index].size(); }

 private:
  std::vector<std::vector<NodeId>> lists_;
  std::vector<std::uint32_t> pos_;
};

// Index drawn with probability proportional to w (given their total).
inline std::size_t pick_weighted(const std::vector<double>& w, double total,
                                 double u) {
  double target = u * total;
  std::size_t last = w.size();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    if (target < w[i]) return i;
    target -= w[i];
    last = i;
  }
  return last;
}

}  // namespace spine::internal
