#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spine/core_model.hpp"
#include "spine/rng.hpp"

namespace spine {

/// Ulam-Harris label (u_1, ..., u_k), all entries >= 1.
struct Label {
  std::vector<std::uint32_t> path;

  std::size_t generation() const noexcept { return path.size(); }
  std::string to_string() const;  // "1.2.1"
  auto operator<=>(const Label&) const = default;
};

Label child_label(const Label& u, std::uint32_t i);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr double kAlive = std::numeric_limits<double>::infinity();

struct NodeRecord {
  NodeId parent = kNoNode;
  std::uint32_t rank = 0;  // last label entry
  std::uint32_t generation = 1;
  TypeId type;
  double birth = 0.0;
  double end = kAlive;
  std::int64_t event = -1;  // index of the branch event ending this node
  NodeId firstChild = kNoNode;
  std::uint32_t childCount = 0;
};

struct BranchEvent {
  double time = 0.0;
  NodeId brancher = kNoNode;
};

/// Arena of labelled nodes plus the ordered event log.
class GenealogyTree {
 public:
  GenealogyTree() = default;
  GenealogyTree(std::size_t numTypes, const std::vector<TypeId>& initialTypes);

  /// Records a branch of node u at time t with offspring k and ordered child
  /// types. Returns the id of the first child (children are contiguous).
  NodeId branch(NodeId u, double t, const OffspringVector& k,
                const std::vector<TypeId>& childTypes);
  void set_horizon(double t) { horizon_ = t; }

  std::size_t num_types() const noexcept { return numTypes_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_roots() const noexcept { return numRoots_; }
  double horizon() const noexcept { return horizon_; }
  const NodeRecord& node(NodeId u) const { return nodes_[u]; }
  const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
  const std::vector<BranchEvent>& events() const noexcept { return events_; }
  OffspringVector offspring(std::size_t event) const;
  const PopVector& initial_composition() const noexcept { return initial_; }

  Label label(NodeId u) const;
  /// Node with the given label, or kNoNode.
  NodeId find(const Label& u) const;
  /// Life length capped at the horizon.
  double life_length(NodeId u) const;
  bool alive_at(NodeId u, double t) const {
    return nodes_[u].birth <= t && t < nodes_[u].end;
  }

  PopVector composition_at(double t) const;
  std::vector<NodeId> alive_nodes(double t) const;

 private:
  std::size_t numTypes_ = 0;
  std::size_t numRoots_ = 0;
  double horizon_ = kAlive;
  PopVector initial_;
  std::vector<NodeRecord> nodes_;
  std::vector<BranchEvent> events_;
  std::vector<std::int32_t> offspringData_;  // numTypes_ entries per event
};

std::vector<Label> alive_set(const GenealogyTree& tree, double t);

/// Tree restricted to [0, t]: nodes born by t, events up to t, lives capped.
GenealogyTree truncate(const GenealogyTree& tree, double t);

/// Draws an alive individual with probability proportional to weight(u).
/// Throws EmptyPopulation when nobody is alive.
NodeId sample_individual(const GenealogyTree& tree, double t,
                         const std::function<double(NodeId)>& weight,
                         Rng& rng);
NodeId sample_uniform(const GenealogyTree& tree, double t, Rng& rng);

using LineageState = std::pair<TypeId, PopVector>;

struct LineageStatistics {
  std::map<LineageState, double> occupation;
  std::map<std::pair<LineageState, OffspringVector>, std::int64_t> branches;
};

/// Time spent by the ancestral line of u in each (ancestor type, composition)
/// state over [0, t], and ancestral branch counts by state and offspring.
LineageStatistics lineage_statistics(const GenealogyTree& tree, NodeId u,
                                     double t);

/// Ancestors of u from the root down to u itself.
std::vector<NodeId> ancestry(const GenealogyTree& tree, NodeId u);

/// #(symmetric difference of labels) + sum over shared labels of
/// |life difference| + |k - k'|_1 + [types differ].
double tree_distance(const GenealogyTree& a, const GenealogyTree& b);

/// `label;type;birth;end;offspring` records, one per node.
void write_tree(std::ostream& os, const GenealogyTree& tree);
/// `t,label,k` records, one per branch event.
void write_event_log(std::ostream& os, const GenealogyTree& tree);

}  // namespace spine
