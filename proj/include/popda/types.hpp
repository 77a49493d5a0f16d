#pragma once

// Domain types shared by every module: symptom vectors, demographic
// subgroups, records and datasets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace popda {

inline constexpr std::size_t kNumSymptoms = 4;
inline constexpr std::size_t kNumAgeGroups = 5;
inline constexpr std::size_t kNumGenders = 2;
inline constexpr std::size_t kNumSubgroups = kNumAgeGroups * kNumGenders;

/// Symptom order used by every parameter vector in the library.
inline constexpr std::array<std::string_view, kNumSymptoms> kSymptomNames{
    "fever", "cough", "muscle_pain", "sore_throat"};

/// Four binary symptom indicators packed into a bit mask.
class SymptomVector {
 public:
  SymptomVector() = default;

  /// Throws std::invalid_argument unless every entry is 0 or 1.
  SymptomVector(int fever, int cough, int muscle_pain, int sore_throat);

  static SymptomVector from_mask(std::uint8_t mask);

  int operator[](std::size_t j) const { return (mask_ >> j) & 1U; }
  void set(std::size_t j, bool present);
  int count() const;
  std::uint8_t mask() const { return mask_; }

  friend bool operator==(SymptomVector, SymptomVector) = default;

 private:
  std::uint8_t mask_ = 0;
};

enum class AgeGroup : std::uint8_t { A0_4, A5_15, A16_44, A45_64, A65plus };
enum class Gender : std::uint8_t { Male, Female };
enum class CollectionMode : std::uint8_t { CitizenScience, HealthWorker };
enum class Role : std::uint8_t { Source, Target };

inline constexpr std::array<AgeGroup, kNumAgeGroups> kAgeGroups{
    AgeGroup::A0_4, AgeGroup::A5_15, AgeGroup::A16_44, AgeGroup::A45_64,
    AgeGroup::A65plus};
inline constexpr std::array<Gender, kNumGenders> kGenders{Gender::Male,
                                                          Gender::Female};
inline constexpr std::array<CollectionMode, 2> kCollectionModes{
    CollectionMode::CitizenScience, CollectionMode::HealthWorker};

// File-format spellings ("16-44", "F", "citizen_science").
std::string_view to_string(AgeGroup a);
std::string_view to_string(Gender g);
std::string_view to_string(CollectionMode c);
std::string_view to_string(Role r);
std::optional<AgeGroup> parse_age_group(std::string_view s);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<CollectionMode> parse_collection_mode(std::string_view s);

struct SubgroupKey {
  AgeGroup age = AgeGroup::A0_4;
  Gender gender = Gender::Male;

  /// Dense index in [0, 10): age-major, gender-minor.
  std::size_t index() const {
    return static_cast<std::size_t>(age) * kNumGenders +
           static_cast<std::size_t>(gender);
  }
  static SubgroupKey from_index(std::size_t i);

  friend bool operator==(const SubgroupKey&, const SubgroupKey&) = default;
};

std::array<SubgroupKey, kNumSubgroups> all_subgroups();

struct Record {
  SymptomVector x;
  AgeGroup age = AgeGroup::A0_4;
  Gender gender = Gender::Male;
  std::optional<bool> label;  // flu; absent = unlabeled

  SubgroupKey key() const { return {age, gender}; }
  bool labeled() const { return label.has_value(); }

  friend bool operator==(const Record&, const Record&) = default;
};

struct Dataset {
  std::string name;
  CollectionMode mode = CollectionMode::CitizenScience;
  Role role = Role::Source;
  std::vector<Record> records;

  std::size_t size() const { return records.size(); }
  std::size_t labeled_count() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Raised when a dataset collection violates the experiment invariants.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks: exactly one target, every source record labeled, target has at
/// least one label.
void validate_experiment_datasets(const std::vector<Dataset>& datasets);

using SubgroupBuckets = std::array<std::vector<std::size_t>, kNumSubgroups>;

/// Record indices bucketed by SubgroupKey::index(). Throws on empty dataset.
SubgroupBuckets subgroup_partition(const Dataset& d);

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Draws round(fraction * n) of the n labeled records into the training
/// split. With `stratify`, each (subgroup, label) cell holding at least
/// ceil(1 / fraction) records contributes floor(fraction * size) members and
/// the remainder is filled by simple random sampling. Unlabeled records are
/// in neither split.
Split split_labeled(const Dataset& d, double fraction, std::uint64_t seed,
                    bool stratify = true);

}  // namespace popda
