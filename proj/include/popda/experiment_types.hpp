#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "popda/types.hpp"

namespace popda {

enum class Method : std::uint8_t { TR, LR, FEDA, FEDA_pop, Hier, Hier_pop };

inline constexpr std::array<Method, 6> kAllMethods{
    Method::TR, Method::LR, Method::FEDA, Method::FEDA_pop, Method::Hier,
    Method::Hier_pop};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

enum class FedaDomains : std::uint8_t { Dataset, CollectionMode };

struct ExperimentConfig {
  std::string target = "goviral";
  std::vector<std::string> sources{"fluwatch", "hongkong", "hutterite"};
  double label_fraction = 0.2;
  std::vector<std::uint64_t> seeds{1};
  double lambda = 1.0;
  double beta = 0.2;
  double alpha = 0.1;
  double tau = 0.9;
  double powell_tol = 1e-6;
  int powell_max_iter = 500;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};

  std::size_t min_samples = 5;
  bool stratify = true;
  bool delta_condition_y = true;  // licensing deltas conditioned on Y=1
  FedaDomains feda_domains = FedaDomains::Dataset;
  double logreg_l2 = 1e-3;
  int logreg_max_epochs = 5000;

  /// Raw `dgp.*` entries, interpreted by the synthetic generator.
  std::map<std::string, std::string> dgp_overrides;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// One evaluation cell. `age_group`/`gender` hold "ALL" for overall rows.
struct ResultRow {
  std::string method;
  std::string dataset;
  std::string age_group;
  std::string gender;
  double label_fraction = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> auc;  // nullopt renders as "-"
  std::string theta_choice;   // "Local", "Invariant" or empty

  bool overall() const { return age_group == "ALL"; }
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

}  // namespace popda
