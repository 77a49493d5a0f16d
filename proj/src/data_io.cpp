#include "popda/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace popda {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line,
                       std::string_view column, const std::string& what) {
  std::ostringstream msg;
  msg << source << ": line " << line;
  if (!column.empty()) msg << ", column '" << column << "'";
  msg << ": " << what;
  throw ParseError(msg.str());
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  // strtod accepts more than from_chars on older toolchains; require full use.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

constexpr std::array<std::string_view, 7> kDatasetColumns{
    "fever", "cough", "muscle_pain", "sore_throat", "age_group", "gender", "flu"};

}  // namespace

CsvWriter::CsvWriter(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
}

void CsvWriter::line(std::string_view s) {
  out_ << s << '\n';
  if (!out_) throw IoError("write to '" + path_ + "' failed");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("closing '" + path_ + "' failed");
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    out.emplace_back(s.substr(start, end == std::string_view::npos
                                         ? std::string_view::npos
                                         : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset parse_dataset(std::string_view text, const std::string& name,
                      CollectionMode mode, Role role,
                      const std::string& source) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kDatasetHeader) {
    fail(source, 1, "", "header must be exactly '" +
                            std::string(kDatasetHeader) + "'");
  }
  Dataset d{name, mode, role, {}};
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    auto cells = split(lines[ln], ',');
    if (cells.size() != kDatasetColumns.size()) {
      fail(source, line_no, "", "expected 7 cells, found " +
                                    std::to_string(cells.size()));
    }
    Record r;
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      if (cells[j] != "0" && cells[j] != "1") {
        fail(source, line_no, kDatasetColumns[j],
             "invalid symptom value '" + cells[j] + "'");
      }
      r.x.set(j, cells[j] == "1");
    }
    auto age = parse_age_group(cells[4]);
    if (!age) fail(source, line_no, "age_group", "invalid value '" + cells[4] + "'");
    r.age = *age;
    auto gender = parse_gender(cells[5]);
    if (!gender) fail(source, line_no, "gender", "invalid value '" + cells[5] + "'");
    r.gender = *gender;
    if (cells[6] == "1" || cells[6] == "0") {
      r.label = cells[6] == "1";
    } else if (cells[6].empty()) {
      if (role == Role::Source) {
        fail(source, line_no, "flu", "source datasets must be fully labeled");
      }
    } else {
      fail(source, line_no, "flu", "invalid label '" + cells[6] + "'");
    }
    d.records.push_back(r);
  }
  return d;
}

Dataset load_dataset(const std::string& path, const std::string& name,
                     CollectionMode mode, Role role) {
  return parse_dataset(read_file(path), name, mode, role, path);
}

std::string dataset_to_csv(const Dataset& d) {
  std::string out(kDatasetHeader);
  out += '\n';
  for (const Record& r : d.records) {
    for (std::size_t j = 0; j < kNumSymptoms; ++j) {
      out += r.x[j] ? '1' : '0';
      out += ',';
    }
    out += to_string(r.age);
    out += ',';
    out += to_string(r.gender);
    out += ',';
    if (r.label) out += *r.label ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_dataset(const Dataset& d, const std::string& path) {
  CsvWriter w(path);
  std::string text = dataset_to_csv(d);
  text.pop_back();  // CsvWriter::line appends the final newline
  w.line(text);
  w.close();
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path) {
  CsvWriter w(path);
  w.line("name,mode");
  for (const auto& e : entries) {
    w.line(e.name + "," + std::string(to_string(e.mode)));
  }
  w.close();
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  const std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "name,mode") {
    fail(path, 1, "", "header must be exactly 'name,mode'");
  }
  std::vector<ManifestEntry> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    auto cells = split(lines[ln], ',');
    if (cells.size() != 2 || cells[0].empty()) {
      fail(path, ln + 1, "", "expected 'name,mode'");
    }
    auto mode = parse_collection_mode(cells[1]);
    if (!mode) fail(path, ln + 1, "mode", "invalid value '" + cells[1] + "'");
    out.push_back({cells[0], *mode});
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text,
                              const std::string& source) {
  ExperimentConfig cfg;
  auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    std::string_view line = lines[ln];
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(source, line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    auto need_real = [&](double& dst) {
      auto v = parse_double(value);
      if (!v) fail(source, line_no, key, "not a number: '" + value + "'");
      dst = *v;
    };
    auto need_int = [&]() {
      auto v = parse_int(value);
      if (!v) fail(source, line_no, key, "not an integer: '" + value + "'");
      return *v;
    };
    auto need_bool = [&](bool& dst) {
      auto v = parse_bool(value);
      if (!v) fail(source, line_no, key, "not a boolean: '" + value + "'");
      dst = *v;
    };
    auto list = [&]() {
      std::vector<std::string> items;
      for (auto& item : split(value, ',')) {
        auto t = trim(item);
        if (t.empty()) fail(source, line_no, key, "empty list item");
        items.emplace_back(t);
      }
      return items;
    };

    if (key == "target") {
      cfg.target = value;
    } else if (key == "sources") {
      cfg.sources = list();
    } else if (key == "label_fraction") {
      need_real(cfg.label_fraction);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& s : list()) {
        auto v = parse_int(s);
        if (!v || *v < 0) fail(source, line_no, key, "invalid seed '" + s + "'");
        cfg.seeds.push_back(static_cast<std::uint64_t>(*v));
      }
    } else if (key == "lambda") {
      need_real(cfg.lambda);
    } else if (key == "beta") {
      need_real(cfg.beta);
    } else if (key == "alpha") {
      need_real(cfg.alpha);
    } else if (key == "tau") {
      need_real(cfg.tau);
    } else if (key == "powell_tol") {
      need_real(cfg.powell_tol);
    } else if (key == "powell_max_iter") {
      cfg.powell_max_iter = static_cast<int>(need_int());
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& s : list()) {
        auto m = parse_method(s);
        if (!m) fail(source, line_no, key, "unknown method '" + s + "'");
        cfg.methods.push_back(*m);
      }
    } else if (key == "min_samples") {
      const auto v = need_int();
      if (v < 1) fail(source, line_no, key, "must be >= 1");
      cfg.min_samples = static_cast<std::size_t>(v);
    } else if (key == "stratify") {
      need_bool(cfg.stratify);
    } else if (key == "delta_condition_y") {
      const auto v = need_int();
      if (v != 0 && v != 1) fail(source, line_no, key, "must be 0 or 1");
      cfg.delta_condition_y = v == 1;
    } else if (key == "feda_domains") {
      if (value == "dataset") {
        cfg.feda_domains = FedaDomains::Dataset;
      } else if (value == "mode") {
        cfg.feda_domains = FedaDomains::CollectionMode;
      } else {
        fail(source, line_no, key, "expected 'dataset' or 'mode'");
      }
    } else if (key == "logreg_l2") {
      need_real(cfg.logreg_l2);
    } else if (key == "logreg_max_epochs") {
      cfg.logreg_max_epochs = static_cast<int>(need_int());
    } else if (key.rfind("dgp.", 0) == 0) {
      cfg.dgp_overrides[key.substr(4)] = value;
    } else {
      fail(source, line_no, key, "unknown key");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path), path);
}

std::string results_to_csv(const ExperimentResult& results) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const ResultRow& r : results.rows) {
    out += r.method + ',' + r.dataset + ',' + r.age_group + ',' + r.gender +
           ',' + format_real(r.label_fraction) + ',' + std::to_string(r.seed) +
           ',' + (r.auc ? format_fixed(*r.auc, 6) : std::string("-")) + ',' +
           r.theta_choice + '\n';
  }
  return out;
}

void write_results(const ExperimentResult& results, const std::string& path) {
  if (results.rows.empty()) {
    throw std::invalid_argument("write_results: no result rows");
  }
  CsvWriter w(path);
  std::string text = results_to_csv(results);
  text.pop_back();
  w.line(text);
  w.close();
}

ExperimentResult parse_results(std::string_view text,
                               const std::string& source) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kResultsHeader) {
    fail(source, 1, "", "header must be exactly '" +
                            std::string(kResultsHeader) + "'");
  }
  ExperimentResult res;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    auto cells = split(lines[ln], ',');
    if (cells.size() != 8) fail(source, line_no, "", "expected 8 cells");
    ResultRow r;
    r.method = cells[0];
    r.dataset = cells[1];
    r.age_group = cells[2];
    r.gender = cells[3];
    auto frac = parse_double(cells[4]);
    if (!frac) fail(source, line_no, "label_fraction", "not a number");
    r.label_fraction = *frac;
    auto seed = parse_int(cells[5]);
    if (!seed || *seed < 0) fail(source, line_no, "seed", "not a seed");
    r.seed = static_cast<std::uint64_t>(*seed);
    if (cells[6] != "-") {
      auto a = parse_double(cells[6]);
      if (!a || *a < 0.0 || *a > 1.0) fail(source, line_no, "auc", "invalid AUC");
      r.auc = *a;
    }
    r.theta_choice = cells[7];
    res.rows.push_back(std::move(r));
  }
  return res;
}

ExperimentResult load_results(const std::string& path) {
  return parse_results(read_file(path), path);
}

}  // namespace popda
