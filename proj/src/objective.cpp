#include "popda/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "popda/data_io.hpp"
#include "popda/stats.hpp"

namespace popda {

namespace {

double log_sum_exp(const double* v) {
  double m = v[0];
  for (std::size_t k = 1; k < kNumSymptoms; ++k) m = std::max(m, v[k]);
  double s = 0.0;
  for (std::size_t k = 0; k < kNumSymptoms; ++k) s += std::exp(v[k] - m);
  return m + std::log(s);
}

double sq_dist(const double* a, const double* b) {
  double s = 0.0;
  for (std::size_t j = 0; j < kNumSymptoms; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace

ObjectiveSpec make_objective_spec(std::span<const Dataset> datasets,
                                  bool population_nodes, double lambda,
                                  double beta, double alpha) {
  ObjectiveSpec spec;
  spec.graph = build_hierarchy(datasets, population_nodes);
  spec.centers = empirical_centers(spec.graph, datasets);
  spec.leaf_stats.assign(spec.graph.size(), ParamVector{});
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const std::size_t leaf = spec.graph.leaves()[i];
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      spec.leaf_stats[leaf][j] = ppv(datasets[i].records, j, 1.0);
    }
  }
  spec.lambda = lambda;
  spec.beta = beta;
  spec.alpha = alpha;
  return spec;
}

double objective(const ObjectiveSpec& spec, std::span<const double> params) {
  const HierarchyGraph& g = spec.graph;
  if (params.size() != flat_dim(g)) {
    throw std::invalid_argument("objective: parameter vector has wrong size");
  }
  for (double v : params) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("objective: non-finite parameter");
    }
  }
  const double* theta = params.data();

  double data = 0.0;
  for (std::size_t leaf : g.leaves()) {
    const double* t = theta + kNumSymptoms * leaf;
    double lin = 0.0;
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      lin += (spec.leaf_stats[leaf][j] + spec.lambda) * t[j];
    }
    data += lin - log_sum_exp(t);
  }

  double div = 0.0;
  double anchor = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double* t = theta + kNumSymptoms * n;
    auto parents = g.parents(n);
    if (!parents.empty()) {
      double s = 0.0;
      for (std::size_t p : parents) {
        const double d2 = sq_dist(t, theta + kNumSymptoms * p);
        s += spec.divergence == Divergence::SquaredL2 ? d2 : std::sqrt(d2);
      }
      div += s / static_cast<double>(parents.size());
    }
    anchor += sq_dist(t, spec.centers[n].data());
  }
  return -data + spec.beta * div + spec.alpha * anchor;
}

std::vector<double> flatten(const std::vector<ParamVector>& per_node) {
  std::vector<double> flat;
  flat.reserve(per_node.size() * kNumSymptoms);
  for (const ParamVector& v : per_node) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

std::vector<ParamVector> unflatten(std::span<const double> flat) {
  if (flat.size() % kNumSymptoms != 0) {
    throw std::invalid_argument("unflatten: size not a multiple of 4");
  }
  std::vector<ParamVector> out(flat.size() / kNumSymptoms);
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(kNumSymptoms * n),
                kNumSymptoms, out[n].begin());
  }
  return out;
}

HierarchyFit fit_hierarchy(const ObjectiveSpec& spec,
                           const PowellOptions& opts) {
  if (spec.lambda < 0.0 || spec.beta < 0.0 || !(spec.alpha > 0.0)) {
    throw std::invalid_argument("fit_hierarchy: need lambda, beta >= 0, alpha > 0");
  }
  if (spec.centers.size() != spec.graph.size() ||
      spec.leaf_stats.size() != spec.graph.size()) {
    throw std::invalid_argument("fit_hierarchy: spec does not match graph");
  }
  auto f = [&spec](std::span<const double> x) { return objective(spec, x); };
  PowellResult r = powell_minimize(f, flatten(spec.centers), opts);
  HierarchyFit fit;
  fit.params = unflatten(r.x);
  fit.objective = r.fx;
  fit.converged = r.converged;
  fit.iterations = r.iterations;
  return fit;
}

void write_node_params(const std::string& path, const HierarchyGraph& graph,
                       const std::vector<ParamVector>& params) {
  CsvWriter out(path);
  out.line("node,symptom,value");
  for (std::size_t n = 0; n < graph.size(); ++n) {
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      out.line(graph.node(n).label() + "," + std::string(kSymptomNames[j]) +
               "," + format_real(params.at(n)[j]));
    }
  }
  out.close();
}

}  // namespace popda
