#include "popda/experiment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "popda/data_io.hpp"
#include "popda/rng.hpp"
#include "popda/stats.hpp"

namespace popda {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::TR: return "TR";
    case Method::LR: return "LR";
    case Method::FEDA: return "FEDA";
    case Method::FEDA_pop: return "FEDA_pop";
    case Method::Hier: return "Hier";
    case Method::Hier_pop: return "Hier_pop";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (target.empty()) throw std::invalid_argument("target must be set");
  if (std::find(sources.begin(), sources.end(), target) != sources.end()) {
    throw std::invalid_argument("target must not also be a source");
  }
  if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
    throw std::invalid_argument("label_fraction must lie in (0, 1]");
  }
  if (seeds.empty()) throw std::invalid_argument("seeds must not be empty");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (!(powell_tol > 0.0)) throw std::invalid_argument("powell_tol must be > 0");
  if (powell_max_iter < 1) throw std::invalid_argument("powell_max_iter must be >= 1");
  if (methods.empty()) throw std::invalid_argument("methods must not be empty");
  if (!(logreg_l2 >= 0.0)) throw std::invalid_argument("logreg_l2 must be >= 0");
  if (logreg_max_epochs < 1) throw std::invalid_argument("logreg_max_epochs must be >= 1");
}

std::vector<Dataset> select_datasets(const ExperimentConfig& cfg,
                                     std::vector<Dataset> available) {
  auto take = [&](const std::string& name, Role role) {
    for (Dataset& d : available) {
      if (d.name == name) {
        Dataset out = d;
        out.role = role;
        return out;
      }
    }
    throw DatasetError("dataset '" + name + "' not found");
  };
  std::vector<Dataset> out;
  out.push_back(take(cfg.target, Role::Target));
  for (const std::string& s : cfg.sources) out.push_back(take(s, Role::Source));
  validate_experiment_datasets(out);
  return out;
}

HierarchicalOptions hierarchical_options(const ExperimentConfig& cfg) {
  HierarchicalOptions opts;
  opts.lambda = cfg.lambda;
  opts.beta = cfg.beta;
  opts.alpha = cfg.alpha;
  opts.powell.tol = cfg.powell_tol;
  opts.powell.max_iter = cfg.powell_max_iter;
  opts.blend.min_samples = cfg.min_samples;
  opts.blend.tau = cfg.tau;
  opts.blend.condition_y = cfg.delta_condition_y;
  opts.blend.population_components = true;
  return opts;
}

MethodOutput run_method(Method method, const TrainingView& view,
                        const ExperimentConfig& cfg) {
  MethodOutput out;
  if (method != Method::Hier_pop) {
    out.scores = run_baseline(method, view, cfg);
    return out;
  }
  const HierarchicalModel model =
      train_hierarchical(view.datasets, hierarchical_options(cfg));
  const Dataset& target = view.full_target;
  out.scores = score_records(model, target, view.test);
  for (std::size_t k = 0; k < kNumSubgroups; ++k) {
    out.choices[k] =
        model.classifiers.at(target.name, SubgroupKey::from_index(k)).choice.source;
  }
  return out;
}

std::uint64_t split_seed(std::uint64_t seed) { return mix_seed(seed, 0x5EED); }

std::vector<ResultRow> evaluate_cells(const std::string& method,
                                      const Dataset& target,
                                      const std::vector<std::size_t>& test,
                                      const MethodOutput& out,
                                      double label_fraction,
                                      std::uint64_t seed) {
  if (out.scores.size() != test.size()) {
    throw std::logic_error("method returned the wrong number of scores");
  }
  std::vector<int> labels;
  labels.reserve(test.size());
  for (std::size_t i : test) labels.push_back(*target.records.at(i).label ? 1 : 0);

  std::vector<ResultRow> rows;
  ResultRow overall{method, target.name, "ALL", "ALL", label_fraction, seed,
                    auc(out.scores, labels), ""};
  rows.push_back(overall);

  for (std::size_t k = 0; k < kNumSubgroups; ++k) {
    const SubgroupKey key = SubgroupKey::from_index(k);
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t t = 0; t < test.size(); ++t) {
      if (target.records[test[t]].key() == key) {
        s.push_back(out.scores[t]);
        y.push_back(labels[t]);
      }
    }
    if (s.empty()) continue;
    ResultRow row{method, target.name, std::string(to_string(key.age)),
                  std::string(to_string(key.gender)), label_fraction, seed,
                  auc(s, y), ""};
    if (out.choices[k]) row.theta_choice = std::string(to_string(*out.choices[k]));
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<Dataset>& datasets) {
  cfg.validate();
  const std::vector<Dataset> selected = select_datasets(cfg, datasets);
  const Dataset& target = selected.front();

  ExperimentResult result;
  for (std::uint64_t seed : cfg.seeds) {
    const Split split = split_labeled(target, cfg.label_fraction,
                                      split_seed(seed), cfg.stratify);
    const TrainingView view = make_training_view(selected, cfg.target, split);

    // Every method sees exactly the split's training labels of the target.
    std::vector<std::size_t> consumed;
    const Dataset& masked = view.datasets[view.target];
    for (std::size_t i = 0; i < masked.records.size(); ++i) {
      if (masked.records[i].labeled()) consumed.push_back(i);
    }
    if (consumed != split.train) {
      throw std::logic_error("protocol violation: training labels differ from split");
    }

    for (Method m : cfg.methods) {
      const MethodOutput out = run_method(m, view, cfg);
      auto rows = evaluate_cells(std::string(to_string(m)), target, split.test,
                                 out, cfg.label_fraction, seed);
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
  }
  return result;
}

std::vector<SweepPoint> aggregate_sweep(const ExperimentResult& raw) {
  struct Acc {
    std::map<std::uint64_t, std::pair<double, std::size_t>> subgroup;  // seed -> (sum, n)
    std::map<std::uint64_t, double> overall;
  };
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, Acc> acc;
  for (const ResultRow& r : raw.rows) {
    const auto key = std::make_pair(r.method, r.label_fraction);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    if (!r.auc) continue;
    if (r.overall()) {
      a.overall[r.seed] = *r.auc;
    } else {
      auto& [sum, n] = a.subgroup[r.seed];
      sum += *r.auc;
      ++n;
    }
  }
  std::vector<SweepPoint> points;
  for (const auto& key : order) {
    const Acc& a = acc[key];
    SweepPoint p;
    p.method = key.first;
    p.label_fraction = key.second;
    double sum = 0.0;
    for (const auto& [seed, sn] : a.subgroup) {
      sum += sn.first / static_cast<double>(sn.second);
      ++p.seeds;
    }
    p.mean_subgroup_auc = p.seeds ? sum / static_cast<double>(p.seeds) : 0.0;
    double osum = 0.0;
    for (const auto& [seed, v] : a.overall) osum += v;
    p.mean_overall_auc =
        a.overall.empty() ? 0.0 : osum / static_cast<double>(a.overall.size());
    points.push_back(p);
  }
  return points;
}

SweepResult label_fraction_sweep(const ExperimentConfig& cfg,
                                 const std::vector<Dataset>& datasets,
                                 const std::vector<double>& fractions) {
  if (fractions.empty()) throw std::invalid_argument("sweep: no label fractions");
  SweepResult out;
  for (double f : fractions) {
    ExperimentConfig c = cfg;
    c.label_fraction = f;
    ExperimentResult r = run_experiment(c, datasets);
    out.raw.rows.insert(out.raw.rows.end(), r.rows.begin(), r.rows.end());
  }
  out.points = aggregate_sweep(out.raw);
  return out;
}

void write_sweep(const std::vector<SweepPoint>& points, const std::string& path) {
  if (points.empty()) throw std::invalid_argument("write_sweep: no points");
  CsvWriter w(path);
  w.line("method,label_fraction,mean_subgroup_auc,mean_overall_auc,seeds");
  for (const SweepPoint& p : points) {
    w.line(p.method + "," + format_real(p.label_fraction) + "," +
           format_fixed(p.mean_subgroup_auc, 6) + "," +
           format_fixed(p.mean_overall_auc, 6) + "," + std::to_string(p.seeds));
  }
  w.close();
}

std::string render_report(const ExperimentResult& results) {
  if (results.rows.empty()) throw std::invalid_argument("report: no rows");

  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<double> fractions;
  auto remember = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const ResultRow& r : results.rows) {
    remember(methods, r.method);
    remember(datasets, r.dataset);
    remember(fractions, r.label_fraction);
  }

  struct Cell {
    double sum = 0.0;
    std::size_t defined = 0;
    std::size_t local = 0;
    std::size_t choices = 0;
  };
  // (method, dataset, fraction, age, gender) -> cell
  std::map<std::tuple<std::string, std::string, double, std::string, std::string>, Cell>
      cells;
  for (const ResultRow& r : results.rows) {
    Cell& c = cells[{r.method, r.dataset, r.label_fraction, r.age_group, r.gender}];
    if (r.auc) {
      c.sum += *r.auc;
      ++c.defined;
    }
    if (!r.theta_choice.empty()) {
      ++c.choices;
      if (r.theta_choice == "Local") ++c.local;
    }
  }
  auto render = [&](const std::string& m, const std::string& d, double f,
                    const std::string& age, const std::string& gender) {
    auto it = cells.find({m, d, f, age, gender});
    if (it == cells.end() || it->second.defined == 0) {
      if (it != cells.end() && 2 * it->second.local > it->second.choices) return std::string("-†");
      return std::string("-");
    }
    const Cell& c = it->second;
    std::string s = format_fixed(c.sum / static_cast<double>(c.defined), 3);
    if (c.choices > 0 && 2 * c.local > c.choices) s += "†";
    return s;
  };

  std::ostringstream md;
  md << "# AUC report\n";
  for (double f : fractions) {
    md << "\n## Overall AUC, label fraction " << format_real(f) << "\n\n| Method |";
    for (const auto& d : datasets) md << ' ' << d << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < datasets.size(); ++i) md << "---|";
    md << '\n';
    for (const auto& m : methods) {
      md << "| " << m << " |";
      for (const auto& d : datasets) md << ' ' << render(m, d, f, "ALL", "ALL") << " |";
      md << '\n';
    }
  }
  for (double f : fractions) {
    for (const auto& d : datasets) {
      md << "\n## Subgroup AUC, " << d << ", label fraction " << format_real(f)
         << "\n\n| Age | Gender |";
      for (const auto& m : methods) md << ' ' << m << " |";
      md << "\n|---|---|";
      for (std::size_t i = 0; i < methods.size(); ++i) md << "---|";
      md << '\n';
      for (const SubgroupKey key : all_subgroups()) {
        const std::string age(to_string(key.age));
        const std::string gender(to_string(key.gender));
        bool any = false;
        for (const auto& m : methods) any = any || cells.count({m, d, f, age, gender});
        if (!any) continue;
        md << "| " << age << " | " << gender << " |";
        for (const auto& m : methods) md << ' ' << render(m, d, f, age, gender) << " |";
        md << '\n';
      }
    }
  }
  md << "\n`-`: the test slice lacks one of the classes. "
        "`†`: the hierarchical model used the dataset-specific parameters "
        "for this subgroup in most seeds.\n";
  return md.str();
}

}  // namespace popda
