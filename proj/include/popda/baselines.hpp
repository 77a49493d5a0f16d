#pragma once

// Comparison methods: target-only and pooled logistic regression, feature
// augmentation (with and without demographic indicators), and the
// hierarchy without demographic nodes.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "popda/experiment_types.hpp"
#include "popda/types.hpp"

namespace popda {

struct LogRegModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  bool degenerate = false;  // trained on a single class; constant score
  int epochs = 0;

  double score(const Eigen::VectorXd& features) const;
};

/// L2-regularized logistic regression (bias unpenalized) by damped Newton
/// steps with Armijo backtracking:
///   mean_i log(1 + exp(-s_i (w.x_i + b))) + l2/2 ||w||^2.
/// Stops when the gradient max-norm drops below 1e-6 or after max_epochs
/// Newton steps.
/// Throws std::invalid_argument when labels and rows disagree.
LogRegModel train_logreg(const Eigen::MatrixXd& features,
                         std::span<const int> labels, double l2,
                         int max_epochs);

/// (K+1) blocks of length x.size(): the shared copy, then the copy for
/// `domain`; other blocks stay zero.
Eigen::VectorXd feda_augment(const Eigen::VectorXd& x, std::size_t domain,
                             std::size_t domain_count);

/// Symptom bits, optionally followed by one-hot age (5) and gender (2).
Eigen::VectorXd base_features(const Record& r, bool demographics);

/// Training data after masking: the target carries labels only on the
/// training split; `test` holds the evaluation indices into the target.
struct TrainingView {
  std::vector<Dataset> datasets;  // target's test labels removed
  std::size_t target = 0;         // index into datasets
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  Dataset full_target;            // unmasked target, for test features
};

/// Builds the masked view and checks that train and test are disjoint.
TrainingView make_training_view(const std::vector<Dataset>& datasets,
                                const std::string& target, const Split& split);

/// Scores for the target's test records, in `view.test` order. Covers TR,
/// LR, FEDA, FEDA_pop and Hier; throws std::invalid_argument for Hier_pop.
std::vector<double> run_baseline(Method method, const TrainingView& view,
                                 const ExperimentConfig& cfg);

}  // namespace popda
