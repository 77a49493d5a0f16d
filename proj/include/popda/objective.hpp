#pragma once

// MAP objective over every node's symptom parameters and the joint fit.
//
//   F(theta) = - sum_leaves [ sum_j (f_j + lambda) theta_j - logsumexp(theta) ]
//              + beta  * sum_n mean_{p in par(n)} Div(theta^n, theta^p)
//              + alpha * sum_n ||theta^n - c^n||^2
//
// Div is the squared L2 distance by default. The alpha term anchors each
// node at its empirical prior center; without it the data term is unbounded
// along the all-ones direction.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "popda/hierarchy.hpp"
#include "popda/powell.hpp"

namespace popda {

enum class Divergence : std::uint8_t { SquaredL2, L2 };

struct ObjectiveSpec {
  HierarchyGraph graph;
  PriorCenters centers;
  /// Per-node PPV vector; only entries of leaf nodes are read.
  std::vector<ParamVector> leaf_stats;
  double lambda = 1.0;
  double beta = 0.2;
  double alpha = 0.1;
  Divergence divergence = Divergence::SquaredL2;
};

/// Centers and leaf PPVs from the datasets' labeled records.
ObjectiveSpec make_objective_spec(std::span<const Dataset> datasets,
                                  bool population_nodes, double lambda,
                                  double beta, double alpha);

/// Flat layout: node n, symptom j lives at 4 * n + j.
inline std::size_t flat_dim(const HierarchyGraph& g) {
  return kNumSymptoms * g.size();
}

/// Throws std::invalid_argument on a size mismatch or non-finite input.
double objective(const ObjectiveSpec& spec, std::span<const double> params);

std::vector<double> flatten(const std::vector<ParamVector>& per_node);
std::vector<ParamVector> unflatten(std::span<const double> flat);

struct HierarchyFit {
  std::vector<ParamVector> params;  // indexed like graph nodes
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Starts at the prior centers and runs Powell on the full flat vector.
HierarchyFit fit_hierarchy(const ObjectiveSpec& spec,
                           const PowellOptions& opts = {});

/// CSV `node,symptom,value`.
void write_node_params(const std::string& path, const HierarchyGraph& graph,
                       const std::vector<ParamVector>& params);

}  // namespace popda
