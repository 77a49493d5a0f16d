#pragma once

// Statistical primitives: symptom PPV, conditional-probability contrasts,
// subgroup prevalences, the information function and AUC.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "popda/types.hpp"

namespace popda {

/// Smoothed positive predictive value of symptom j over the labeled records:
/// (#{x_j=1, y=1} + laplace) / (#{x_j=1} + 2 laplace). Unlabeled records are
/// ignored. With laplace = 0 and no x_j=1 records the result is 0.5.
double ppv(std::span<const Record> records, std::size_t j,
           double laplace = 1.0);

/// |P(X_j=1 | Y=y) - P(X_j=0 | Y=y)| over the labeled records; nullopt when
/// no record has Y=y.
std::optional<double> p_diff(std::span<const Record> records, std::size_t j,
                             bool y);

/// Mean of p_diff over the four symptoms, conditioned on Y=y.
std::optional<double> delta(std::span<const Record> records, bool y = true);

/// Fraction of labeled records with Y=1; nullopt when none are labeled.
std::optional<double> prevalence(std::span<const Record> records);

struct SubgroupStats {
  std::optional<double> delta_local;
  std::optional<double> delta_pop;
  std::optional<double> prev_local;
  std::optional<double> prev_pop;
  std::size_t n_local = 0;  // labeled records in the target's subgroup
  std::size_t n_pop = 0;    // labeled records in the pooled subgroup
};

/// Local fields come from `target`'s labeled records in `key`; pooled fields
/// from the labeled records in `key` across every dataset in `all`
/// (which normally includes `target`).
SubgroupStats subgroup_stats(const Dataset& target,
                             std::span<const Dataset> all, SubgroupKey key,
                             bool condition_y = true);

/// -ln p. Throws std::domain_error when p <= 0.
double information(double p);

/// Mann-Whitney AUC with ties counted 1/2; nullopt when either class is
/// absent. Throws std::invalid_argument on length mismatch.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const int> labels);

}  // namespace popda
