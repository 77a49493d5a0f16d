#include "popda/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "popda/data_io.hpp"

namespace popda {

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(what + " must lie in [0, 1]");
  }
}

// Mixes are written age-major: {0-4 M, 0-4 F, 5-15 M, 5-15 F, ...}.
using Mix = std::array<double, kNumSubgroups>;

}  // namespace

void DgpConfig::validate() const {
  if (datasets.empty()) throw std::invalid_argument("DgpConfig: no datasets");
  bool target_found = false;
  for (const DatasetDesign& d : datasets) {
    double sum = 0.0;
    for (double p : d.subgroup_mix) {
      check_probability(p, "subgroup_mix of " + d.name);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("subgroup_mix of " + d.name +
                                  " does not sum to 1");
    }
    target_found = target_found || d.name == target;
  }
  if (!target_found) {
    throw std::invalid_argument("DgpConfig: target '" + target +
                                "' is not a configured dataset");
  }
  for (double p : prevalence) check_probability(p, "prevalence");
  for (const auto& by_label : emission) {
    for (const auto& probs : by_label) {
      for (double p : probs) check_probability(p, "emission");
    }
  }
  for (const Distortion& dist : distortion) {
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      check_probability(dist.keep_if_present[j], "keep probability");
      check_probability(dist.report_if_absent[j], "false-report probability");
    }
  }
}

DgpConfig default_config() {
  DgpConfig cfg;
  cfg.target = "goviral";
  cfg.datasets = {
      {"goviral", CollectionMode::CitizenScience,
       Mix{0.015, 0.025, 0.04, 0.05, 0.22, 0.48, 0.05, 0.09, 0.01, 0.02}, 520},
      {"fluwatch", CollectionMode::CitizenScience,
       Mix{0.04, 0.04, 0.10, 0.11, 0.07, 0.09, 0.20, 0.24, 0.05, 0.06}, 915},
      {"hongkong", CollectionMode::HealthWorker,
       Mix{0.02, 0.02, 0.03, 0.03, 0.36, 0.10, 0.06, 0.05, 0.18, 0.15}, 4954},
      {"hutterite", CollectionMode::HealthWorker,
       Mix{0.06, 0.06, 0.19, 0.19, 0.08, 0.10, 0.09, 0.09, 0.07, 0.07}, 1281},
  };

  cfg.prevalence = {0.55, 0.60,   // 0-4
                    0.75, 0.80,   // 5-15
                    0.15, 0.65,   // 16-44
                    0.70, 0.75,   // 45-64
                    0.10, 0.15};  // 65+

  // Base symptom probabilities by age group, [y][symptom].
  using AgeEmission = std::array<std::array<double, kNumSymptoms>, 2>;
  const std::array<AgeEmission, kNumAgeGroups> by_age{{
      {{{0.80, 0.35, 0.08, 0.10}, {0.92, 0.85, 0.10, 0.70}}},  // 0-4
      {{{0.35, 0.45, 0.20, 0.40}, {0.88, 0.80, 0.45, 0.55}}},  // 5-15
      {{{0.20, 0.45, 0.25, 0.40}, {0.82, 0.80, 0.65, 0.60}}},  // 16-44
      {{{0.18, 0.45, 0.28, 0.35}, {0.72, 0.82, 0.65, 0.50}}},  // 45-64
      {{{0.20, 0.50, 0.30, 0.30}, {0.55, 0.80, 0.60, 0.40}}},  // 65+
  }};
  for (std::size_t k = 0; k < kNumSubgroups; ++k) {
    const SubgroupKey key = SubgroupKey::from_index(k);
    cfg.emission[k] = by_age[static_cast<std::size_t>(key.age)];
    if (key.gender == Gender::Female) {
      // Women report muscle pain and sore throat slightly more often.
      for (auto& probs : cfg.emission[k]) {
        probs[2] = std::min(1.0, probs[2] + 0.03);
        probs[3] = std::min(1.0, probs[3] + 0.03);
      }
    }
  }

  // Self-reported symptoms are noisier than worker-recorded ones.
  cfg.distortion[static_cast<std::size_t>(CollectionMode::CitizenScience)] = {
      {0.80, 0.85, 0.75, 0.80}, {0.20, 0.15, 0.25, 0.20}};
  cfg.distortion[static_cast<std::size_t>(CollectionMode::HealthWorker)] = {
      {0.97, 0.96, 0.95, 0.95}, {0.03, 0.04, 0.05, 0.05}};
  return cfg;
}

Record sample_record(const DgpConfig& cfg, std::size_t dataset_index,
                     Rng& rng) {
  const DatasetDesign& design = cfg.datasets.at(dataset_index);
  const std::size_t k =
      sample_categorical(rng, design.subgroup_mix.data(), kNumSubgroups);
  const SubgroupKey key = SubgroupKey::from_index(k);

  Record r;
  r.age = key.age;
  r.gender = key.gender;
  const bool y = bernoulli(rng, cfg.prevalence[k]);
  r.label = y;

  const auto& base = cfg.emission[k][y ? 1 : 0];
  const Distortion& dist = cfg.distortion_for(design.mode);
  for (std::size_t j = 0; j < kNumSymptoms; ++j) {
    const bool present = bernoulli(rng, base[j]);
    const bool reported = present ? bernoulli(rng, dist.keep_if_present[j])
                                  : bernoulli(rng, dist.report_if_absent[j]);
    r.x.set(j, reported);
  }
  return r;
}

GeneratedBundle generate(const DgpConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GeneratedBundle bundle;
  bundle.config = cfg;
  bundle.seed = seed;
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
    const DatasetDesign& design = cfg.datasets[i];
    Rng rng(mix_seed(seed, i));
    Dataset d;
    d.name = design.name;
    d.mode = design.mode;
    d.role = design.name == cfg.target ? Role::Target : Role::Source;
    d.records.reserve(design.size);
    for (std::size_t n = 0; n < design.size; ++n) {
      d.records.push_back(sample_record(cfg, i, rng));
    }
    bundle.datasets.push_back(std::move(d));
  }
  return bundle;
}

void apply_overrides(DgpConfig& cfg,
                     const std::map<std::string, std::string>& overrides) {
  auto real = [](const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw std::invalid_argument("dgp." + key + ": not a number '" + s + "'");
    }
    return v;
  };
  auto four = [&](const std::string& key, const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != kNumSymptoms) {
      throw std::invalid_argument("dgp." + key + ": expected 4 values");
    }
    std::array<double, kNumSymptoms> out{};
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      out[j] = real(key, std::string(trim(parts[j])));
    }
    return out;
  };
  auto mode_of = [](const std::string& key, const std::string& s) {
    auto m = parse_collection_mode(s);
    if (!m) throw std::invalid_argument("dgp." + key + ": unknown mode");
    return static_cast<std::size_t>(*m);
  };

  for (const auto& [key, value] : overrides) {
    auto parts = split(key, '.');
    if (parts.size() == 2 && parts[0] == "size") {
      bool found = false;
      for (auto& d : cfg.datasets) {
        if (d.name == parts[1]) {
          const double n = real(key, value);
          if (n < 0 || n != std::floor(n)) {
            throw std::invalid_argument("dgp." + key + ": not a count");
          }
          d.size = static_cast<std::size_t>(n);
          found = true;
        }
      }
      if (!found) throw std::invalid_argument("dgp." + key + ": unknown dataset");
    } else if (parts.size() == 2 && parts[0] == "mix") {
      auto values = split(value, ',');
      if (values.size() != kNumSubgroups) {
        throw std::invalid_argument("dgp." + key + ": expected 10 values");
      }
      DatasetDesign* design = nullptr;
      for (auto& d : cfg.datasets) {
        if (d.name == parts[1]) design = &d;
      }
      if (!design) throw std::invalid_argument("dgp." + key + ": unknown dataset");
      for (std::size_t k = 0; k < kNumSubgroups; ++k) {
        design->subgroup_mix[k] = real(key, std::string(trim(values[k])));
      }
    } else if (parts.size() == 4 && parts[0] == "emission") {
      auto age = parse_age_group(parts[1]);
      auto gender = parse_gender(parts[2]);
      if (!age || !gender || (parts[3] != "0" && parts[3] != "1")) {
        throw std::invalid_argument("dgp." + key + ": unknown cell");
      }
      cfg.emission[SubgroupKey{*age, *gender}.index()][parts[3] == "1"] = four(key, value);
    } else if (parts.size() == 2 && parts[0] == "keep") {
      cfg.distortion[mode_of(key, parts[1])].keep_if_present = four(key, value);
    } else if (parts.size() == 2 && parts[0] == "false_report") {
      cfg.distortion[mode_of(key, parts[1])].report_if_absent = four(key, value);
    } else if (parts.size() == 3 && parts[0] == "prevalence") {
      auto age = parse_age_group(parts[1]);
      auto gender = parse_gender(parts[2]);
      if (!age || !gender) {
        throw std::invalid_argument("dgp." + key + ": unknown subgroup");
      }
      cfg.prevalence[SubgroupKey{*age, *gender}.index()] = real(key, value);
    } else {
      throw std::invalid_argument("dgp." + key + ": unknown key");
    }
  }
  cfg.validate();
}

}  // namespace popda
