#pragma once

// Synthetic multi-environment data following the selection diagram
//
//     S~ -> D -> Y -> X <- S*        (and D -> X)
//
// S~ : each dataset samples its own mix of demographic subgroups;
// D -> Y : P(Y | age, gender) is shared by every dataset;
// S* : each collection mode distorts the reported symptoms.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "popda/rng.hpp"
#include "popda/types.hpp"

namespace popda {

/// Per-symptom bit noise applied to the base symptom draw of one
/// collection mode: a present symptom is kept with probability
/// keep_if_present[j]; an absent one is reported with probability
/// report_if_absent[j].
struct Distortion {
  std::array<double, kNumSymptoms> keep_if_present{1.0, 1.0, 1.0, 1.0};
  std::array<double, kNumSymptoms> report_if_absent{0.0, 0.0, 0.0, 0.0};
};

struct DatasetDesign {
  std::string name;
  CollectionMode mode = CollectionMode::CitizenScience;
  std::array<double, kNumSubgroups> subgroup_mix{};  // by SubgroupKey::index()
  std::size_t size = 0;
};

using EmissionTable =
    std::array<std::array<std::array<double, kNumSymptoms>, 2>, kNumSubgroups>;

struct DgpConfig {
  std::vector<DatasetDesign> datasets;
  /// P(Y=1 | age, gender); keyed by subgroup only.
  std::array<double, kNumSubgroups> prevalence{};
  /// emission[subgroup][y][j] = P(base X_j = 1 | Y=y, age, gender).
  EmissionTable emission{};
  std::array<Distortion, 2> distortion{};  // by CollectionMode
  std::string target;

  const Distortion& distortion_for(CollectionMode c) const {
    return distortion[static_cast<std::size_t>(c)];
  }
  /// Throws std::invalid_argument on any out-of-range probability, a mix
  /// that does not sum to 1 (+-1e-9), or an unknown target.
  void validate() const;
};

struct GeneratedBundle {
  std::vector<Dataset> datasets;
  DgpConfig config;
  std::uint64_t seed = 0;
};

/// Four synthetic datasets shaped after two citizen-science and two
/// health-worker influenza cohorts. The numbers are synthetic.
DgpConfig default_config();

/// Ancestral draw for dataset `dataset_index`: subgroup, then label, then
/// base symptoms, then the mode's distortion.
Record sample_record(const DgpConfig& cfg, std::size_t dataset_index,
                     Rng& rng);

/// Every dataset is drawn from its own stream mix_seed(seed, index). All
/// records keep their labels; masking happens when the target is split.
GeneratedBundle generate(const DgpConfig& cfg, std::uint64_t seed);

/// Applies `dgp.*` config entries (prefix stripped):
///   size.<dataset> = n
///   keep.<mode> = k0,k1,k2,k3
///   false_report.<mode> = r0,r1,r2,r3
///   prevalence.<age>.<gender> = p
///   mix.<dataset> = ten subgroup shares, SubgroupKey order
///   emission.<age>.<gender>.<y> = e0,e1,e2,e3
/// with <mode> in {citizen_science, health_worker}.
void apply_overrides(DgpConfig& cfg,
                     const std::map<std::string, std::string>& overrides);

}  // namespace popda
