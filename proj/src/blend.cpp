#include "popda/blend.hpp"

#include <stdexcept>

#include "popda/data_io.hpp"
#include "popda/nnls.hpp"

namespace popda {

namespace {

double dot(const ParamVector& theta, SymptomVector x) {
  double s = 0.0;
  for (std::size_t j = 0; j < kNumSymptoms; ++j) s += theta[j] * x[j];
  return s;
}

Components components_for(const HierarchyGraph& graph,
                          const std::vector<ParamVector>& params,
                          const std::string& dataset, SubgroupKey key) {
  Components c;
  if (graph.has_population_nodes()) {
    const SubgroupComponents ids =
        hierarchy_subgroup_components(graph, key, dataset);
    c.leaf = params.at(ids.leaf);
    c.age = params.at(ids.age);
    c.gender = params.at(ids.gender);
  } else {
    c.leaf = params.at(graph.index_of(NodeId::leaf_node(dataset)));
  }
  return c;
}

GammaSample make_sample(const Record& r, const Components& c) {
  const auto s = component_scores(r.x, c);
  return {s[0], s[1], s[2], *r.label ? 1.0 : 0.0};
}

}  // namespace

std::string_view to_string(ThetaSource s) {
  return s == ThetaSource::Local ? "Local" : "Invariant";
}

std::string_view to_string(ChoiceReason r) {
  switch (r) {
    case ChoiceReason::DeltaCondition: return "DeltaCondition";
    case ChoiceReason::PrevalenceCondition: return "PrevalenceCondition";
    case ChoiceReason::Default: return "Default";
  }
  return "?";
}

std::array<double, 3> component_scores(SymptomVector x, const Components& c) {
  return {dot(c.leaf, x), dot(c.age, x), dot(c.gender, x)};
}

GammaWeights fit_gamma(std::span<const GammaSample> samples, bool local_only) {
  if (samples.empty()) throw std::invalid_argument("fit_gamma: no samples");
  const auto m = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index cols = local_only ? 2 : 4;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const GammaSample& s = samples[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = s.s_leaf;
    if (!local_only) {
      A(i, 2) = s.s_age;
      A(i, 3) = s.s_gender;
    }
    b(i) = s.y;
  }
  const NnlsResult r = nnls(A, b);
  GammaWeights g;
  g.g0 = r.x(0);
  g.g1 = r.x(1);
  if (!local_only) {
    g.g2 = r.x(2);
    g.g3 = r.x(3);
  }
  return g;
}

ThetaChoice licensing_select(const SubgroupStats& st, double tau) {
  if (st.delta_local && st.delta_pop && *st.delta_local < *st.delta_pop) {
    return {ThetaSource::Local, ChoiceReason::DeltaCondition};
  }
  if (st.prev_local && st.prev_pop && *st.prev_local - *st.prev_pop >= tau) {
    return {ThetaSource::Local, ChoiceReason::PrevalenceCondition};
  }
  return {ThetaSource::Invariant, ChoiceReason::Default};
}

int licensing_case_oracle(double p_local, double p_pop) {
  const double diff = information(p_local) - information(p_pop);
  return (diff > 0.0) - (diff < 0.0);
}

double predict(const SubgroupClassifier& clf, SymptomVector x) {
  const GammaWeights& g = clf.gamma;
  double score = g.g0 + g.g1 * dot(clf.components.leaf, x);
  // Local classifiers never read the demographic components.
  if (clf.choice.source == ThetaSource::Invariant) {
    score += g.g2 * dot(clf.components.age, x) +
             g.g3 * dot(clf.components.gender, x);
  }
  return score;
}

const SubgroupClassifier& ClassifierSet::at(const std::string& dataset,
                                            SubgroupKey key) const {
  for (const SubgroupClassifier& c : items_) {
    if (c.dataset == dataset && c.key == key) return c;
  }
  throw std::out_of_range("no classifier for dataset '" + dataset + "'");
}

ClassifierSet train_subgroup_classifiers(const HierarchyGraph& graph,
                                         const std::vector<ParamVector>& params,
                                         std::span<const Dataset> datasets,
                                         const BlendOptions& opts) {
  const bool pop = opts.population_components && graph.has_population_nodes();
  ClassifierSet set;
  for (const Dataset& d : datasets) {
    std::array<std::vector<GammaSample>, kNumSubgroups> by_group;
    std::vector<GammaSample> all;
    std::array<Components, kNumSubgroups> comps;
    for (std::size_t k = 0; k < kNumSubgroups; ++k) {
      comps[k] = components_for(graph, params, d.name, SubgroupKey::from_index(k));
    }
    for (const Record& r : d.records) {
      if (!r.labeled()) continue;
      const std::size_t k = r.key().index();
      by_group[k].push_back(make_sample(r, comps[k]));
      all.push_back(by_group[k].back());
    }
    if (all.empty()) {
      throw DatasetError("dataset '" + d.name + "' has no labeled records");
    }
    const GammaWeights dataset_gamma = fit_gamma(all, !pop);
    std::optional<GammaWeights> dataset_local;

    for (std::size_t k = 0; k < kNumSubgroups; ++k) {
      SubgroupClassifier clf;
      clf.key = SubgroupKey::from_index(k);
      clf.dataset = d.name;
      clf.components = comps[k];
      clf.n_labeled = by_group[k].size();
      clf.inherited = by_group[k].size() < opts.min_samples;
      clf.gamma = clf.inherited ? dataset_gamma : fit_gamma(by_group[k], !pop);

      if (pop) {
        const SubgroupStats st =
            subgroup_stats(d, datasets, clf.key, opts.condition_y);
        clf.choice = licensing_select(st, opts.tau);
        if (clf.choice.source == ThetaSource::Local) {
          if (clf.inherited) {
            if (!dataset_local) dataset_local = fit_gamma(all, true);
            clf.gamma = *dataset_local;
          } else {
            clf.gamma = fit_gamma(by_group[k], true);
          }
        }
      }
      set.add(std::move(clf));
    }
  }
  return set;
}

void write_classifiers(const std::string& path, const ClassifierSet& set) {
  CsvWriter out(path);
  out.line("dataset,age_group,gender,g0,g1,g2,g3,choice,reason");
  for (const SubgroupClassifier& c : set.all()) {
    out.line(c.dataset + "," + std::string(to_string(c.key.age)) + "," +
             std::string(to_string(c.key.gender)) + "," +
             format_real(c.gamma.g0) + "," + format_real(c.gamma.g1) + "," +
             format_real(c.gamma.g2) + "," + format_real(c.gamma.g3) + "," +
             std::string(to_string(c.choice.source)) + "," +
             std::string(to_string(c.choice.reason)));
  }
  out.close();
}

HierarchicalModel train_hierarchical(std::span<const Dataset> datasets,
                                     const HierarchicalOptions& opts) {
  HierarchicalModel model;
  model.spec = make_objective_spec(datasets, opts.blend.population_components,
                                   opts.lambda, opts.beta, opts.alpha);
  model.fit = fit_hierarchy(model.spec, opts.powell);
  model.classifiers = train_subgroup_classifiers(
      model.spec.graph, model.fit.params, datasets, opts.blend);
  return model;
}

std::vector<double> score_records(const HierarchicalModel& model,
                                  const Dataset& d,
                                  std::span<const std::size_t> indices) {
  std::vector<double> scores;
  scores.reserve(indices.size());
  for (std::size_t i : indices) {
    const Record& r = d.records.at(i);
    scores.push_back(predict(model.classifiers.at(d.name, r.key()), r.x));
  }
  return scores;
}

}  // namespace popda
