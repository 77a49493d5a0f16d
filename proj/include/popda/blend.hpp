#pragma once

// Second stage of the hierarchical model: per-subgroup nonnegative blend
// weights over the dataset, age and gender parameter vectors, the
// local-vs-invariant licensing rule, and scoring.
//
//   score(x) = g0 + g1 (theta^leaf . x) + g2 (theta^age . x)
//                 + g3 (theta^gender . x),     all g >= 0

#include <array>
#include <span>
#include <string>
#include <vector>

#include "popda/hierarchy.hpp"
#include "popda/objective.hpp"
#include "popda/stats.hpp"

namespace popda {

struct GammaWeights {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
};

enum class ThetaSource : std::uint8_t { Local, Invariant };
enum class ChoiceReason : std::uint8_t {
  DeltaCondition,
  PrevalenceCondition,
  Default
};

struct ThetaChoice {
  ThetaSource source = ThetaSource::Invariant;
  ChoiceReason reason = ChoiceReason::Default;

  friend bool operator==(const ThetaChoice&, const ThetaChoice&) = default;
};

std::string_view to_string(ThetaSource s);
std::string_view to_string(ChoiceReason r);

struct Components {
  ParamVector leaf{};
  ParamVector age{};
  ParamVector gender{};
};

struct SubgroupClassifier {
  SubgroupKey key;
  std::string dataset;
  GammaWeights gamma;
  ThetaChoice choice;
  Components components;
  std::size_t n_labeled = 0;  // labeled records of this subgroup
  bool inherited = false;     // gamma fit at dataset level
};

/// (theta^leaf . x, theta^age . x, theta^gender . x)
std::array<double, 3> component_scores(SymptomVector x, const Components& c);

struct GammaSample {
  double s_leaf = 0.0;
  double s_age = 0.0;
  double s_gender = 0.0;
  double y = 0.0;
};

/// Nonnegative least squares of y on (1, s_leaf, s_age, s_gender). With
/// `local_only` the design is (1, s_leaf) and g2 = g3 = 0.
GammaWeights fit_gamma(std::span<const GammaSample> samples,
                       bool local_only = false);

/// Local when delta_local < delta_pop (DeltaCondition), else Local when
/// prev_local - prev_pop >= tau (PrevalenceCondition), else Invariant.
/// Undefined statistics never select Local.
ThetaChoice licensing_select(const SubgroupStats& st, double tau);

/// Sign of information(p_local) - information(p_pop): -1, 0 or +1.
/// Throws std::domain_error unless both probabilities are positive.
int licensing_case_oracle(double p_local, double p_pop);

double predict(const SubgroupClassifier& clf, SymptomVector x);

struct BlendOptions {
  std::size_t min_samples = 5;
  double tau = 0.9;
  bool condition_y = true;
  /// False for the hierarchy without demographic nodes: g2 = g3 = 0 and no
  /// licensing step.
  bool population_components = true;
};

class ClassifierSet {
 public:
  const SubgroupClassifier& at(const std::string& dataset,
                               SubgroupKey key) const;
  const std::vector<SubgroupClassifier>& all() const { return items_; }
  void add(SubgroupClassifier c) { items_.push_back(std::move(c)); }

 private:
  std::vector<SubgroupClassifier> items_;
};

/// One classifier per (dataset, subgroup). Subgroups with fewer than
/// min_samples labeled records inherit the dataset-level gamma. A Local
/// licensing decision refits (g0, g1) with g2 = g3 = 0. Throws DatasetError
/// for a dataset without labeled records.
ClassifierSet train_subgroup_classifiers(const HierarchyGraph& graph,
                                         const std::vector<ParamVector>& params,
                                         std::span<const Dataset> datasets,
                                         const BlendOptions& opts);

/// CSV `dataset,age_group,gender,g0,g1,g2,g3,choice,reason`.
void write_classifiers(const std::string& path, const ClassifierSet& set);

struct HierarchicalOptions {
  double lambda = 1.0;
  double beta = 0.2;
  double alpha = 0.1;
  PowellOptions powell;
  BlendOptions blend;
};

/// Fitted hierarchy plus its subgroup classifiers.
struct HierarchicalModel {
  ObjectiveSpec spec;
  HierarchyFit fit;
  ClassifierSet classifiers;
};

/// Runs both stages on the labeled records of `datasets`.
HierarchicalModel train_hierarchical(std::span<const Dataset> datasets,
                                     const HierarchicalOptions& opts);

/// Scores of d.records[i] for i in `indices`.
std::vector<double> score_records(const HierarchicalModel& model,
                                  const Dataset& d,
                                  std::span<const std::size_t> indices);

}  // namespace popda
