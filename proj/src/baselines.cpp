#include "popda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "popda/blend.hpp"

namespace popda {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
};

double loss_only(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w, double b, double l2) {
  const Eigen::VectorXd z = (X * w).array() + b;
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += softplus(z(i)) - y(i) * z(i);
  return s / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

LossGrad loss_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& w, double b, double l2) {
  const double n = static_cast<double>(X.rows());
  const Eigen::VectorXd z = (X * w).array() + b;
  Eigen::VectorXd r(z.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    s += softplus(z(i)) - y(i) * z(i);
    r(i) = sigmoid(z(i)) - y(i);
  }
  LossGrad out;
  out.loss = s / n + 0.5 * l2 * w.squaredNorm();
  out.grad_w = X.transpose() * r / n + l2 * w;
  out.grad_b = r.sum() / n;
  return out;
}

struct Samples {
  std::vector<Eigen::VectorXd> rows;
  std::vector<int> labels;

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                      rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      X.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return X;
  }
};

}  // namespace

double LogRegModel::score(const Eigen::VectorXd& features) const {
  return weights.dot(features) + bias;
}

LogRegModel train_logreg(const Eigen::MatrixXd& features,
                         std::span<const int> labels, double l2,
                         int max_epochs) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw std::invalid_argument("train_logreg: labels and rows differ");
  }
  LogRegModel m;
  m.weights = Eigen::VectorXd::Zero(features.cols());
  const auto positives = std::count_if(labels.begin(), labels.end(),
                                       [](int v) { return v != 0; });
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    m.degenerate = true;
    return m;
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels[i] != 0 ? 1.0 : 0.0;
  }

  // Damped Newton on (w, b) with Armijo backtracking along the Newton step.
  const Eigen::Index d = features.cols();
  LossGrad cur = loss_grad(features, y, m.weights, m.bias, l2);
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    const double gmax =
        std::max(d ? cur.grad_w.cwiseAbs().maxCoeff() : 0.0, std::abs(cur.grad_b));
    if (gmax < 1e-6) break;
    m.epochs = epoch + 1;

    const Eigen::VectorXd z = (features * m.weights).array() + m.bias;
    Eigen::VectorXd curv(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = sigmoid(z(i));
      curv(i) = p * (1.0 - p);
    }
    const double n = static_cast<double>(features.rows());
    Eigen::MatrixXd H(d + 1, d + 1);
    H.topLeftCorner(d, d) = features.transpose() * curv.asDiagonal() * features / n;
    H.topLeftCorner(d, d).diagonal().array() += l2;
    const Eigen::VectorXd hx = features.transpose() * curv / n;
    H.topRightCorner(d, 1) = hx;
    H.bottomLeftCorner(1, d) = hx.transpose();
    H(d, d) = curv.sum() / n;
    // Tiny ridge keeps separable or duplicated columns solvable.
    H.diagonal().array() += 1e-10;
    Eigen::VectorXd g(d + 1);
    g << cur.grad_w, cur.grad_b;
    Eigen::VectorXd dir = -H.ldlt().solve(g);
    double slope = g.dot(dir);
    if (!dir.allFinite() || slope >= 0.0) {
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd w_new;
    double b_new = 0.0;
    double new_loss = 0.0;
    for (int k = 0; k < 60; ++k) {
      w_new = m.weights + step * dir.head(d);
      b_new = m.bias + step * dir(d);
      new_loss = loss_only(features, y, w_new, b_new, l2);
      if (new_loss <= cur.loss + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(new_loss < cur.loss)) break;  // no further progress possible
    m.weights = std::move(w_new);
    m.bias = b_new;
    cur = loss_grad(features, y, m.weights, m.bias, l2);
  }
  return m;
}

Eigen::VectorXd feda_augment(const Eigen::VectorXd& x, std::size_t domain,
                             std::size_t domain_count) {
  if (domain >= domain_count) {
    throw std::out_of_range("feda_augment: domain index out of range");
  }
  const Eigen::Index d = x.size();
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain_count + 1) * d);
  out.segment(0, d) = x;
  out.segment(static_cast<Eigen::Index>(domain + 1) * d, d) = x;
  return out;
}

Eigen::VectorXd base_features(const Record& r, bool demographics) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(kNumSymptoms + (demographics ? 7 : 0)));
  for (std::size_t j = 0; j < kNumSymptoms; ++j) {
    f(static_cast<Eigen::Index>(j)) = r.x[j];
  }
  if (demographics) {
    f(static_cast<Eigen::Index>(kNumSymptoms + static_cast<std::size_t>(r.age))) = 1.0;
    f(static_cast<Eigen::Index>(kNumSymptoms + kNumAgeGroups +
                                static_cast<std::size_t>(r.gender))) = 1.0;
  }
  return f;
}

TrainingView make_training_view(const std::vector<Dataset>& datasets,
                                const std::string& target, const Split& split) {
  TrainingView view;
  view.datasets = datasets;
  bool found = false;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (datasets[i].name == target) {
      view.target = i;
      view.full_target = datasets[i];
      found = true;
    }
  }
  if (!found) throw DatasetError("target dataset '" + target + "' not found");

  std::vector<char> in_train(datasets[view.target].size(), 0);
  for (std::size_t i : split.train) in_train.at(i) = 1;
  for (std::size_t i : split.test) {
    if (in_train.at(i)) {
      throw std::logic_error("protocol violation: record " + std::to_string(i) +
                             " is in both train and test");
    }
  }
  Dataset& t = view.datasets[view.target];
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    if (!in_train[i]) t.records[i].label.reset();
  }
  view.train = split.train;
  view.test = split.test;
  return view;
}

std::vector<double> run_baseline(Method method, const TrainingView& view,
                                 const ExperimentConfig& cfg) {
  const Dataset& target = view.full_target;

  if (method == Method::Hier) {
    HierarchicalOptions opts;
    opts.lambda = cfg.lambda;
    opts.beta = cfg.beta;
    opts.alpha = cfg.alpha;
    opts.powell = {cfg.powell_tol, cfg.powell_max_iter};
    opts.blend.min_samples = cfg.min_samples;
    opts.blend.tau = cfg.tau;
    opts.blend.condition_y = cfg.delta_condition_y;
    opts.blend.population_components = false;
    const HierarchicalModel model = train_hierarchical(view.datasets, opts);
    return score_records(model, target, view.test);
  }
  if (method == Method::Hier_pop) {
    throw std::invalid_argument("run_baseline: Hier_pop is not a baseline");
  }

  const bool demographics = method == Method::FEDA_pop;
  const bool augment = method == Method::FEDA || method == Method::FEDA_pop;
  const bool target_only = method == Method::TR;

  // Domain index of each dataset for feature augmentation.
  std::vector<std::size_t> domain(view.datasets.size());
  std::size_t domain_count = view.datasets.size();
  for (std::size_t i = 0; i < view.datasets.size(); ++i) domain[i] = i;
  if (cfg.feda_domains == FedaDomains::CollectionMode) {
    domain_count = kCollectionModes.size();
    for (std::size_t i = 0; i < view.datasets.size(); ++i) {
      domain[i] = static_cast<std::size_t>(view.datasets[i].mode);
    }
  }
  auto features = [&](const Record& r, std::size_t dataset) {
    Eigen::VectorXd f = base_features(r, demographics);
    return augment ? feda_augment(f, domain[dataset], domain_count) : f;
  };

  Samples train;
  for (std::size_t i = 0; i < view.datasets.size(); ++i) {
    if (target_only && i != view.target) continue;
    for (const Record& r : view.datasets[i].records) {
      if (!r.labeled()) continue;
      train.rows.push_back(features(r, i));
      train.labels.push_back(*r.label ? 1 : 0);
    }
  }
  if (train.rows.empty()) throw DatasetError("no labeled training records");

  const LogRegModel model = train_logreg(train.matrix(), train.labels,
                                         cfg.logreg_l2, cfg.logreg_max_epochs);
  std::vector<double> scores;
  scores.reserve(view.test.size());
  for (std::size_t i : view.test) {
    scores.push_back(model.score(features(target.records.at(i), view.target)));
  }
  return scores;
}

}  // namespace popda
