#include "popda/types.hpp"

#include <algorithm>
#include <cmath>

#include "popda/rng.hpp"

namespace popda {

namespace {

std::uint8_t checked_bit(int v, std::size_t j) {
  if (v != 0 && v != 1) {
    throw std::invalid_argument("symptom " + std::string(kSymptomNames[j]) +
                                " must be 0 or 1, got " + std::to_string(v));
  }
  return static_cast<std::uint8_t>(v);
}

}  // namespace

SymptomVector::SymptomVector(int fever, int cough, int muscle_pain,
                             int sore_throat)
    : mask_(static_cast<std::uint8_t>(
          checked_bit(fever, 0) | (checked_bit(cough, 1) << 1) |
          (checked_bit(muscle_pain, 2) << 2) |
          (checked_bit(sore_throat, 3) << 3))) {}

SymptomVector SymptomVector::from_mask(std::uint8_t mask) {
  if (mask > 0x0F) throw std::invalid_argument("symptom mask out of range");
  SymptomVector v;
  v.mask_ = mask;
  return v;
}

void SymptomVector::set(std::size_t j, bool present) {
  if (j >= kNumSymptoms) throw std::out_of_range("symptom index");
  const auto bit = static_cast<std::uint8_t>(1U << j);
  mask_ = present ? static_cast<std::uint8_t>(mask_ | bit)
                  : static_cast<std::uint8_t>(mask_ & ~bit);
}

int SymptomVector::count() const {
  return (*this)[0] + (*this)[1] + (*this)[2] + (*this)[3];
}

std::string_view to_string(AgeGroup a) {
  switch (a) {
    case AgeGroup::A0_4: return "0-4";
    case AgeGroup::A5_15: return "5-15";
    case AgeGroup::A16_44: return "16-44";
    case AgeGroup::A45_64: return "45-64";
    case AgeGroup::A65plus: return "65+";
  }
  return "?";
}

std::string_view to_string(Gender g) {
  return g == Gender::Male ? "M" : "F";
}

std::string_view to_string(CollectionMode c) {
  return c == CollectionMode::CitizenScience ? "citizen_science"
                                             : "health_worker";
}

std::string_view to_string(Role r) {
  return r == Role::Source ? "source" : "target";
}

std::optional<AgeGroup> parse_age_group(std::string_view s) {
  for (AgeGroup a : kAgeGroups) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "M") return Gender::Male;
  if (s == "F") return Gender::Female;
  return std::nullopt;
}

std::optional<CollectionMode> parse_collection_mode(std::string_view s) {
  for (CollectionMode c : kCollectionModes) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

SubgroupKey SubgroupKey::from_index(std::size_t i) {
  if (i >= kNumSubgroups) throw std::out_of_range("subgroup index");
  return {static_cast<AgeGroup>(i / kNumGenders),
          static_cast<Gender>(i % kNumGenders)};
}

std::array<SubgroupKey, kNumSubgroups> all_subgroups() {
  std::array<SubgroupKey, kNumSubgroups> keys;
  for (std::size_t i = 0; i < kNumSubgroups; ++i) {
    keys[i] = SubgroupKey::from_index(i);
  }
  return keys;
}

std::size_t Dataset::labeled_count() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const Record& r) { return r.labeled(); }));
}

void validate_experiment_datasets(const std::vector<Dataset>& datasets) {
  std::size_t targets = 0;
  for (const Dataset& d : datasets) {
    if (d.role == Role::Target) {
      ++targets;
      if (d.labeled_count() == 0) {
        throw DatasetError("target dataset '" + d.name + "' has no labels");
      }
    } else if (d.labeled_count() != d.size()) {
      throw DatasetError("source dataset '" + d.name +
                         "' has unlabeled records");
    }
  }
  if (targets != 1) {
    throw DatasetError("expected exactly one target dataset, found " +
                       std::to_string(targets));
  }
}

SubgroupBuckets subgroup_partition(const Dataset& d) {
  if (d.records.empty()) {
    throw DatasetError("cannot partition empty dataset '" + d.name + "'");
  }
  SubgroupBuckets buckets;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    buckets[d.records[i].key().index()].push_back(i);
  }
  return buckets;
}

Split split_labeled(const Dataset& d, double fraction, std::uint64_t seed,
                    bool stratify) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("label fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].labeled()) labeled.push_back(i);
  }
  const std::size_t n = labeled.size();
  const auto quota = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));

  Rng rng(mix_seed(seed, 0));
  std::vector<bool> chosen(d.records.size(), false);
  std::size_t taken = 0;

  if (stratify && quota < n) {
    // Cells keyed by (subgroup, label).
    std::array<std::vector<std::size_t>, kNumSubgroups * 2> cells;
    for (std::size_t i : labeled) {
      const Record& r = d.records[i];
      cells[r.key().index() * 2 + (*r.label ? 1 : 0)].push_back(i);
    }
    const auto quantum =
        static_cast<std::size_t>(std::ceil(1.0 / fraction - 1e-12));
    for (auto& cell : cells) {
      if (cell.empty() || cell.size() < quantum) continue;
      shuffle_in_place(cell, rng);
      const auto k = static_cast<std::size_t>(
          std::floor(fraction * static_cast<double>(cell.size()) + 1e-12));
      for (std::size_t t = 0; t < k && taken < quota; ++t) {
        chosen[cell[t]] = true;
        ++taken;
      }
    }
  }

  std::vector<std::size_t> pool;
  for (std::size_t i : labeled) {
    if (!chosen[i]) pool.push_back(i);
  }
  shuffle_in_place(pool, rng);
  for (std::size_t t = 0; taken < quota && t < pool.size(); ++t) {
    chosen[pool[t]] = true;
    ++taken;
  }

  Split split;
  for (std::size_t i : labeled) {
    (chosen[i] ? split.train : split.test).push_back(i);
  }
  return split;
}

std::size_t sample_categorical(Rng& rng, const double* weights,
                               std::size_t n) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding slack: return the last category with positive weight.
  for (std::size_t i = n; i > 0; --i) {
    if (weights[i - 1] > 0.0) return i - 1;
  }
  return n - 1;
}

}  // namespace popda
