#include "popda/hierarchy.hpp"

#include <algorithm>
#include <stdexcept>

#include "popda/stats.hpp"

namespace popda {

NodeId NodeId::age_node(AgeGroup a) {
  NodeId id;
  id.kind = NodeKind::Age;
  id.age = a;
  return id;
}

NodeId NodeId::gender_node(Gender g) {
  NodeId id;
  id.kind = NodeKind::Gender;
  id.gender = g;
  return id;
}

NodeId NodeId::env_node(CollectionMode c) {
  NodeId id;
  id.kind = NodeKind::Env;
  id.mode = c;
  return id;
}

NodeId NodeId::leaf_node(std::string name) {
  NodeId id;
  id.kind = NodeKind::Leaf;
  id.dataset = std::move(name);
  return id;
}

std::string NodeId::label() const {
  switch (kind) {
    case NodeKind::Root: return "root";
    case NodeKind::Age: return "age:" + std::string(to_string(age));
    case NodeKind::Gender: return "gender:" + std::string(to_string(gender));
    case NodeKind::Env: return "env:" + std::string(to_string(mode));
    case NodeKind::Leaf: return "leaf:" + dataset;
  }
  return "?";
}

std::optional<std::size_t> HierarchyGraph::find(const NodeId& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] == id) return i;
  }
  return std::nullopt;
}

std::size_t HierarchyGraph::index_of(const NodeId& id) const {
  auto i = find(id);
  if (!i) throw std::out_of_range("no hierarchy node " + id.label());
  return *i;
}

std::size_t HierarchyGraph::add(NodeId id, std::vector<std::size_t> parents) {
  nodes_.push_back(std::move(id));
  parents_.push_back(std::move(parents));
  return nodes_.size() - 1;
}

HierarchyGraph build_hierarchy(std::span<const Dataset> datasets,
                               bool population_nodes) {
  if (datasets.empty()) {
    throw std::invalid_argument("build_hierarchy needs at least one dataset");
  }
  HierarchyGraph g;
  g.population_nodes_ = population_nodes;
  const std::size_t root = g.add(NodeId::root(), {});

  std::vector<std::size_t> env_parents{root};
  if (population_nodes) {
    env_parents.clear();
    for (AgeGroup a : kAgeGroups) {
      env_parents.push_back(g.add(NodeId::age_node(a), {root}));
    }
    for (Gender s : kGenders) {
      env_parents.push_back(g.add(NodeId::gender_node(s), {root}));
    }
  }

  for (CollectionMode c : kCollectionModes) {
    const bool present =
        std::any_of(datasets.begin(), datasets.end(),
                    [c](const Dataset& d) { return d.mode == c; });
    if (present) g.add(NodeId::env_node(c), env_parents);
  }

  for (const Dataset& d : datasets) {
    if (g.find(NodeId::leaf_node(d.name))) {
      throw std::invalid_argument("duplicate dataset name '" + d.name + "'");
    }
    const std::size_t env = g.index_of(NodeId::env_node(d.mode));
    g.leaves_.push_back(g.add(NodeId::leaf_node(d.name), {env}));
  }
  return g;
}

PriorCenters empirical_centers(const HierarchyGraph& graph,
                               std::span<const Dataset> datasets) {
  PriorCenters centers(graph.size());
  std::vector<Record> pool;
  for (std::size_t n = 0; n < graph.size(); ++n) {
    const NodeId& id = graph.node(n);
    pool.clear();
    for (const Dataset& d : datasets) {
      for (const Record& r : d.records) {
        if (!r.labeled()) continue;
        bool keep = false;
        switch (id.kind) {
          case NodeKind::Root: keep = true; break;
          case NodeKind::Age: keep = r.age == id.age; break;
          case NodeKind::Gender: keep = r.gender == id.gender; break;
          case NodeKind::Env: keep = d.mode == id.mode; break;
          case NodeKind::Leaf: keep = d.name == id.dataset; break;
        }
        if (keep) pool.push_back(r);
      }
    }
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      centers[n][j] = ppv(pool, j, 1.0);
    }
  }
  return centers;
}

SubgroupComponents hierarchy_subgroup_components(const HierarchyGraph& graph,
                                                 SubgroupKey key,
                                                 const std::string& dataset) {
  return {graph.index_of(NodeId::leaf_node(dataset)),
          graph.index_of(NodeId::age_node(key.age)),
          graph.index_of(NodeId::gender_node(key.gender))};
}

}  // namespace popda
