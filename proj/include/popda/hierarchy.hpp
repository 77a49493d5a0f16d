#pragma once

// Node graph of the population-aware hierarchy and its empirical-Bayes
// prior centers.
//
//   Root
//    ├── Age(0-4) ... Age(65+), Gender(M), Gender(F)
//    │        (every Env node has all seven demographic nodes as parents)
//    ├── Env(citizen_science), Env(health_worker)
//    └── Leaf(dataset) with its Env node as sole parent
//
// Without population nodes the Env nodes hang directly off the Root.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popda/types.hpp"

namespace popda {

using ParamVector = std::array<double, kNumSymptoms>;

enum class NodeKind : std::uint8_t { Root, Age, Gender, Env, Leaf };

struct NodeId {
  NodeKind kind = NodeKind::Root;
  AgeGroup age = AgeGroup::A0_4;       // Age nodes
  Gender gender = Gender::Male;        // Gender nodes
  CollectionMode mode = CollectionMode::CitizenScience;  // Env nodes
  std::string dataset;                 // Leaf nodes

  static NodeId root() { return {}; }
  static NodeId age_node(AgeGroup a);
  static NodeId gender_node(Gender g);
  static NodeId env_node(CollectionMode c);
  static NodeId leaf_node(std::string name);

  /// "root", "age:16-44", "gender:F", "env:health_worker", "leaf:goviral".
  std::string label() const;

  friend bool operator==(const NodeId& a, const NodeId& b) {
    return a.label() == b.label();
  }
};

class HierarchyGraph {
 public:
  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const NodeId& node(std::size_t i) const { return nodes_.at(i); }
  std::span<const std::size_t> parents(std::size_t i) const {
    return parents_.at(i);
  }
  bool has_population_nodes() const { return population_nodes_; }

  std::optional<std::size_t> find(const NodeId& id) const;
  std::size_t index_of(const NodeId& id) const;  // throws std::out_of_range

  /// Leaf index for each dataset, in construction order.
  const std::vector<std::size_t>& leaves() const { return leaves_; }

 private:
  friend HierarchyGraph build_hierarchy(std::span<const Dataset>, bool);
  std::size_t add(NodeId id, std::vector<std::size_t> parents);

  std::vector<NodeId> nodes_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> leaves_;
  bool population_nodes_ = true;
};

/// Builds Root, the demographic nodes (when `population_nodes`), one Env
/// node per collection mode present, and one Leaf per dataset.
HierarchyGraph build_hierarchy(std::span<const Dataset> datasets,
                               bool population_nodes = true);

/// One prior center per node, indexed like HierarchyGraph::nodes().
using PriorCenters = std::vector<ParamVector>;

/// Per-symptom PPV (laplace 1) over the labeled records pooled at each node:
/// a Leaf pools its dataset, an Env node the datasets of its mode, Age and
/// Gender nodes the matching slice of every dataset, the Root everything.
PriorCenters empirical_centers(const HierarchyGraph& graph,
                               std::span<const Dataset> datasets);

struct SubgroupComponents {
  std::size_t leaf = 0;
  std::size_t age = 0;
  std::size_t gender = 0;
};

/// Node indices feeding the blend predictor for (dataset, subgroup).
/// Throws std::out_of_range for an unknown dataset or a graph without
/// population nodes.
SubgroupComponents hierarchy_subgroup_components(const HierarchyGraph& graph,
                                                 SubgroupKey key,
                                                 const std::string& dataset);

}  // namespace popda
