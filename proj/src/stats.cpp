#include "popda/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace popda {

double ppv(std::span<const Record> records, std::size_t j, double laplace) {
  if (j >= kNumSymptoms) throw std::out_of_range("symptom index");
  double present = 0.0;
  double positive = 0.0;
  for (const Record& r : records) {
    if (!r.labeled() || r.x[j] == 0) continue;
    present += 1.0;
    if (*r.label) positive += 1.0;
  }
  const double denom = present + 2.0 * laplace;
  if (denom <= 0.0) return 0.5;
  return (positive + laplace) / denom;
}

std::optional<double> p_diff(std::span<const Record> records, std::size_t j,
                             bool y) {
  if (j >= kNumSymptoms) throw std::out_of_range("symptom index");
  std::size_t n = 0;
  std::size_t present = 0;
  for (const Record& r : records) {
    if (!r.labeled() || *r.label != y) continue;
    ++n;
    present += static_cast<std::size_t>(r.x[j]);
  }
  if (n == 0) return std::nullopt;
  const double p1 = static_cast<double>(present) / static_cast<double>(n);
  return std::abs(p1 - (1.0 - p1));
}

std::optional<double> delta(std::span<const Record> records, bool y) {
  double sum = 0.0;
  for (std::size_t j = 0; j < kNumSymptoms; ++j) {
    auto d = p_diff(records, j, y);
    if (!d) return std::nullopt;
    sum += *d;
  }
  return sum / static_cast<double>(kNumSymptoms);
}

std::optional<double> prevalence(std::span<const Record> records) {
  std::size_t n = 0;
  std::size_t pos = 0;
  for (const Record& r : records) {
    if (!r.labeled()) continue;
    ++n;
    pos += *r.label ? 1U : 0U;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(pos) / static_cast<double>(n);
}

SubgroupStats subgroup_stats(const Dataset& target,
                             std::span<const Dataset> all, SubgroupKey key,
                             bool condition_y) {
  auto slice = [&key](const Dataset& d, std::vector<Record>& out) {
    for (const Record& r : d.records) {
      if (r.labeled() && r.key() == key) out.push_back(r);
    }
  };
  std::vector<Record> local;
  slice(target, local);
  std::vector<Record> pooled;
  for (const Dataset& d : all) slice(d, pooled);

  SubgroupStats st;
  st.n_local = local.size();
  st.n_pop = pooled.size();
  st.delta_local = delta(local, condition_y);
  st.prev_local = prevalence(local);
  st.delta_pop = delta(pooled, condition_y);
  st.prev_pop = prevalence(pooled);
  return st;
}

double information(double p) {
  if (!(p > 0.0)) throw std::domain_error("information() needs p > 0");
  return -std::log(p);
}

std::optional<double> auc(std::span<const double> scores,
                          std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("auc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Sum of mid-ranks of positives (ranks are 1-based; ties share the mean).
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t k = i;
    while (k + 1 < n && scores[order[k + 1]] == scores[order[i]]) ++k;
    const double mid = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t t = i; t <= k; ++t) {
      if (labels[order[t]] != 0) {
        rank_sum += mid;
        ++n_pos;
      }
    }
    i = k + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

}  // namespace popda
