#pragma once

// CSV datasets and results, plus the flat `key = value` experiment config.
//
// Dataset files:
//   fever,cough,muscle_pain,sore_throat,age_group,gender,flu
//   1,0,0,1,16-44,F,1
// flu may be empty (unlabeled) in target files only.

#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popda/experiment_types.hpp"
#include "popda/types.hpp"

namespace popda {

/// Malformed input file; the message names file, line and column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output file could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kDatasetHeader =
    "fever,cough,muscle_pain,sore_throat,age_group,gender,flu";
inline constexpr std::string_view kResultsHeader =
    "method,dataset,age_group,gender,label_fraction,seed,auc,theta_choice";

/// Line-oriented LF writer that throws IoError on failure.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void line(std::string_view s);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

/// Shortest decimal that parses back to the same double.
std::string format_real(double v);
/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

Dataset load_dataset(const std::string& path, const std::string& name,
                     CollectionMode mode, Role role);
Dataset parse_dataset(std::string_view text, const std::string& name,
                      CollectionMode mode, Role role,
                      const std::string& source = "<memory>");
void write_dataset(const Dataset& d, const std::string& path);
std::string dataset_to_csv(const Dataset& d);

/// `manifest.csv` in a data directory: `name,mode` rows.
struct ManifestEntry {
  std::string name;
  CollectionMode mode;
};
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path);
std::vector<ManifestEntry> load_manifest(const std::string& path);

ExperimentConfig parse_config(std::string_view text,
                              const std::string& source = "<memory>");
ExperimentConfig load_config(const std::string& path);

/// Throws std::invalid_argument on an empty result set, IoError when the
/// path is not writable.
void write_results(const ExperimentResult& results, const std::string& path);
std::string results_to_csv(const ExperimentResult& results);
ExperimentResult load_results(const std::string& path);
ExperimentResult parse_results(std::string_view text,
                               const std::string& source = "<memory>");

std::string read_file(const std::string& path);

}  // namespace popda
