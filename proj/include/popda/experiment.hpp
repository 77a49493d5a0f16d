#pragma once

// End-to-end protocol: split the target, train every requested method on
// the sources plus the target's labeled subset, and score the held-out
// target records overall and per subgroup.

#include <string>
#include <vector>

#include "popda/baselines.hpp"
#include "popda/blend.hpp"
#include "popda/experiment_types.hpp"

namespace popda {

/// Orders `datasets` as [target, sources...] with roles assigned from the
/// config and validates them. Throws DatasetError for a missing dataset.
std::vector<Dataset> select_datasets(const ExperimentConfig& cfg,
                                     std::vector<Dataset> available);

HierarchicalOptions hierarchical_options(const ExperimentConfig& cfg);

/// Scores of one method on the target test records plus, for Hier_pop, the
/// target's per-subgroup theta choices.
struct MethodOutput {
  std::vector<double> scores;
  std::array<std::optional<ThetaSource>, kNumSubgroups> choices{};
};

MethodOutput run_method(Method method, const TrainingView& view,
                        const ExperimentConfig& cfg);

/// Split seed for the `seed` entry of the config.
std::uint64_t split_seed(std::uint64_t seed);

/// Rows for one (method, seed): the overall row followed by one row per
/// subgroup present in the test split, in SubgroupKey order.
std::vector<ResultRow> evaluate_cells(const std::string& method,
                                      const Dataset& target,
                                      const std::vector<std::size_t>& test,
                                      const MethodOutput& out,
                                      double label_fraction,
                                      std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<Dataset>& datasets);

struct SweepPoint {
  std::string method;
  double label_fraction = 0.0;
  double mean_subgroup_auc = 0.0;  // mean over seeds of per-seed subgroup mean
  double mean_overall_auc = 0.0;   // mean over seeds of overall AUC
  std::size_t seeds = 0;           // seeds with a defined subgroup mean
};

struct SweepResult {
  ExperimentResult raw;
  std::vector<SweepPoint> points;
};

/// Aggregates raw rows into (method, label_fraction) points.
std::vector<SweepPoint> aggregate_sweep(const ExperimentResult& raw);

SweepResult label_fraction_sweep(const ExperimentConfig& cfg,
                                 const std::vector<Dataset>& datasets,
                                 const std::vector<double>& fractions);

/// CSV `method,label_fraction,mean_subgroup_auc,mean_overall_auc,seeds`.
void write_sweep(const std::vector<SweepPoint>& points, const std::string& path);

/// Markdown with an overall table (methods x datasets) and a subgroup table
/// per (dataset, label fraction). Cells are seed means rounded to three
/// decimals, "-" where no seed had a defined AUC, and a dagger where the
/// hierarchical model used the local parameters in most seeds.
std::string render_report(const ExperimentResult& results);

/// Loads `<dir>/manifest.csv` and every dataset it lists. Roles are
/// provisional (Target) until select_datasets assigns them.
std::vector<Dataset> load_data_dir(const std::string& dir);

/// CLI entry point; returns 0 on success, 1 on runtime errors, 2 on usage
/// errors. Diagnostics go to standard error.
int cli_main(int argc, const char* const* argv);

}  // namespace popda
