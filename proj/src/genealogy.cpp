#include "spine/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spine/csv.hpp"
#include "spine/errors.hpp"

namespace spine {

std::string Label::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

Label child_label(const Label& u, std::uint32_t i) {
  if (i == 0) raise(ErrorCode::Domain, "child index must be positive");
  Label c = u;
  c.path.push_back(i);
  return c;
}

GenealogyTree::GenealogyTree(std::size_t numTypes,
                             const std::vector<TypeId>& initialTypes)
    : numTypes_(numTypes), numRoots_(initialTypes.size()), initial_(numTypes) {
  nodes_.reserve(initialTypes.size() * 4);
  for (std::size_t i = 0; i < initialTypes.size(); ++i) {
    NodeRecord n;
    n.rank = static_cast<std::uint32_t>(i + 1);
    n.type = initialTypes[i];
    nodes_.push_back(n);
    initial_.add(initialTypes[i], 1);
  }
}

NodeId GenealogyTree::branch(NodeId u, double t, const OffspringVector& k,
                             const std::vector<TypeId>& childTypes) {
  NodeRecord& p = nodes_[u];
  p.end = t;
  p.event = static_cast<std::int64_t>(events_.size());
  events_.push_back({t, u});
  for (std::size_t y = 0; y < numTypes_; ++y) {
    offspringData_.push_back(static_cast<std::int32_t>(k[y]));
  }
  const auto first = static_cast<NodeId>(nodes_.size());
  const std::uint32_t gen = p.generation + 1;
  nodes_[u].firstChild = childTypes.empty() ? kNoNode : first;
  nodes_[u].childCount = static_cast<std::uint32_t>(childTypes.size());
  for (std::size_t i = 0; i < childTypes.size(); ++i) {
    NodeRecord c;
    c.parent = u;
    c.rank = static_cast<std::uint32_t>(i + 1);
    c.generation = gen;
    c.type = childTypes[i];
    c.birth = t;
    nodes_.push_back(c);
  }
  return first;
}

OffspringVector GenealogyTree::offspring(std::size_t event) const {
  std::vector<std::int64_t> k(numTypes_);
  for (std::size_t y = 0; y < numTypes_; ++y) {
    k[y] = offspringData_[event * numTypes_ + y];
  }
  return OffspringVector(std::move(k));
}

Label GenealogyTree::label(NodeId u) const {
  Label l;
  l.path.resize(nodes_[u].generation);
  for (std::size_t i = l.path.size(); u != kNoNode; u = nodes_[u].parent) {
    l.path[--i] = nodes_[u].rank;
  }
  return l;
}

NodeId GenealogyTree::find(const Label& u) const {
  if (u.path.empty() || u.path[0] == 0 || u.path[0] > numRoots_) return kNoNode;
  NodeId n = u.path[0] - 1;
  for (std::size_t i = 1; i < u.path.size(); ++i) {
    const auto& r = nodes_[n];
    if (u.path[i] == 0 || u.path[i] > r.childCount) return kNoNode;
    n = r.firstChild + u.path[i] - 1;
  }
  return n;
}

double GenealogyTree::life_length(NodeId u) const {
  return std::min(nodes_[u].end, horizon_) - nodes_[u].birth;
}

PopVector GenealogyTree::composition_at(double t) const {
  PopVector z = initial_;
  for (std::size_t e = 0; e < events_.size() && events_[e].time <= t; ++e) {
    z.apply_branch(nodes_[events_[e].brancher].type, offspring(e));
  }
  return z;
}

std::vector<NodeId> GenealogyTree::alive_nodes(double t) const {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    if (alive_at(u, t)) out.push_back(u);
  }
  return out;
}

std::vector<Label> alive_set(const GenealogyTree& tree, double t) {
  std::vector<Label> out;
  for (NodeId u : tree.alive_nodes(t)) out.push_back(tree.label(u));
  return out;
}

GenealogyTree truncate(const GenealogyTree& tree, double t) {
  GenealogyTree out(tree.num_types(), [&] {
    std::vector<TypeId> roots;
    for (NodeId u = 0; u < tree.num_roots(); ++u) {
      roots.push_back(tree.node(u).type);
    }
    return roots;
  }());
  for (std::size_t e = 0; e < tree.events().size(); ++e) {
    const auto& ev = tree.events()[e];
    if (ev.time > t) break;
    const auto& p = tree.node(ev.brancher);
    std::vector<TypeId> types;
    for (std::uint32_t i = 0; i < p.childCount; ++i) {
      types.push_back(tree.node(p.firstChild + i).type);
    }
    out.branch(ev.brancher, ev.time, tree.offspring(e), types);
  }
  out.set_horizon(std::min(t, tree.horizon()));
  return out;
}

NodeId sample_individual(const GenealogyTree& tree, double t,
                         const std::function<double(NodeId)>& weight,
                         Rng& rng) {
  const auto alive = tree.alive_nodes(t);
  if (alive.empty()) raise(ErrorCode::EmptyPopulation, "no individual alive");
  std::vector<double> w(alive.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    w[i] = weight(alive[i]);
    if (!(w[i] >= 0.0)) raise(ErrorCode::Domain, "negative sampling weight");
    total += w[i];
  }
  if (!(total > 0.0)) raise(ErrorCode::Domain, "sampling weights all zero");
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (target < w[i]) return alive[i];
    target -= w[i];
  }
  for (std::size_t i = alive.size(); i > 0; --i) {
    if (w[i - 1] > 0.0) return alive[i - 1];
  }
  return alive.back();
}

NodeId sample_uniform(const GenealogyTree& tree, double t, Rng& rng) {
  const auto alive = tree.alive_nodes(t);
  if (alive.empty()) raise(ErrorCode::EmptyPopulation, "no individual alive");
  return alive[rng.index(alive.size())];
}

std::vector<NodeId> ancestry(const GenealogyTree& tree, NodeId u) {
  std::vector<NodeId> chain;
  for (; u != kNoNode; u = tree.node(u).parent) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

LineageStatistics lineage_statistics(const GenealogyTree& tree, NodeId u,
                                     double t) {
  if (u >= tree.num_nodes()) raise(ErrorCode::UnknownLabel, "unknown node");
  if (!tree.alive_at(u, t)) {
    raise(ErrorCode::UnknownLabel,
          "individual " + tree.label(u).to_string() + " not alive at t");
  }
  const auto chain = ancestry(tree, u);
  LineageStatistics out;
  PopVector z = tree.initial_composition();
  std::size_t j = 0;
  double prev = 0.0;
  const auto& events = tree.events();
  for (std::size_t e = 0; e < events.size() && events[e].time <= t; ++e) {
    const TypeId cur = tree.node(chain[j]).type;
    const double dt = events[e].time - prev;
    if (dt > 0.0) out.occupation[{cur, z}] += dt;
    const NodeId b = events[e].brancher;
    const auto k = tree.offspring(e);
    if (b == chain[j]) {
      ++out.branches[{{cur, z}, k}];
      ++j;
    }
    z.apply_branch(tree.node(b).type, k);
    prev = events[e].time;
  }
  if (t > prev) out.occupation[{tree.node(chain[j]).type, z}] += t - prev;
  return out;
}

namespace {

std::size_t subtree_size(const GenealogyTree& t, NodeId u) {
  std::size_t n = 0;
  std::vector<NodeId> stack{u};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    ++n;
    const auto& r = t.node(v);
    for (std::uint32_t i = 0; i < r.childCount; ++i) {
      stack.push_back(r.firstChild + i);
    }
  }
  return n;
}

OffspringVector node_offspring(const GenealogyTree& t, NodeId u) {
  const auto& r = t.node(u);
  if (r.event < 0 || r.end > t.horizon()) return OffspringVector(t.num_types());
  return t.offspring(static_cast<std::size_t>(r.event));
}

}  // namespace

double tree_distance(const GenealogyTree& a, const GenealogyTree& b) {
  double d = 0.0;
  std::vector<std::pair<NodeId, NodeId>> stack;
  const std::size_t shared = std::min(a.num_roots(), b.num_roots());
  for (NodeId i = 0; i < shared; ++i) stack.emplace_back(i, i);
  for (NodeId i = shared; i < a.num_roots(); ++i) d += subtree_size(a, i);
  for (NodeId i = shared; i < b.num_roots(); ++i) d += subtree_size(b, i);
  const std::size_t dims = std::max(a.num_types(), b.num_types());
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    const auto& ru = a.node(u);
    const auto& rv = b.node(v);
    const double lu = a.life_length(u), lv = b.life_length(v);
    if (lu != lv) d += std::fabs(lu - lv);
    const auto ku = node_offspring(a, u);
    const auto kv = node_offspring(b, v);
    for (std::size_t y = 0; y < dims; ++y) {
      const auto x1 = y < ku.size() ? ku[y] : 0;
      const auto x2 = y < kv.size() ? kv[y] : 0;
      d += static_cast<double>(std::llabs(x1 - x2));
    }
    if (ru.type != rv.type) d += 1.0;
    const auto cu = a.node(u).end <= a.horizon() ? ru.childCount : 0u;
    const auto cv = b.node(v).end <= b.horizon() ? rv.childCount : 0u;
    const auto common = std::min(cu, cv);
    for (std::uint32_t i = 0; i < common; ++i) {
      stack.emplace_back(ru.firstChild + i, rv.firstChild + i);
    }
    for (std::uint32_t i = common; i < cu; ++i) {
      d += subtree_size(a, ru.firstChild + i);
    }
    for (std::uint32_t i = common; i < cv; ++i) {
      d += subtree_size(b, rv.firstChild + i);
    }
  }
  return d;
}

void write_tree(std::ostream& os, const GenealogyTree& tree) {
  os << "label;type;birth;end;offspring\n";
  for (NodeId u = 0; u < tree.num_nodes(); ++u) {
    const auto& r = tree.node(u);
    os << tree.label(u).to_string() << ';' << r.type.index << ';'
       << fmt_real(r.birth) << ';' << fmt_real(r.end) << ';';
    if (r.event >= 0) {
      os << tree.offspring(static_cast<std::size_t>(r.event)).to_string(' ');
    }
    os << '\n';
  }
}

void write_event_log(std::ostream& os, const GenealogyTree& tree) {
  os << "t,label,k\n";
  for (std::size_t e = 0; e < tree.events().size(); ++e) {
    const auto& ev = tree.events()[e];
    os << fmt_real(ev.time) << ',' << tree.label(ev.brancher).to_string()
       << ',' << tree.offspring(e).to_string(' ') << '\n';
  }
}

}  // namespace spine
