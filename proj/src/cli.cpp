#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <stdexcept>

#include "popda/data_io.hpp"
#include "popda/experiment.hpp"
#include "popda/synth.hpp"

namespace fs = std::filesystem;

namespace popda {

std::vector<Dataset> load_data_dir(const std::string& dir) {
  const fs::path root(dir);
  std::vector<Dataset> out;
  for (const ManifestEntry& e : load_manifest((root / "manifest.csv").string())) {
    out.push_back(load_dataset((root / (e.name + ".csv")).string(), e.name, e.mode,
                               Role::Target));
  }
  if (out.empty()) throw DatasetError("data directory '" + dir + "' lists no datasets");
  return out;
}

namespace {

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
}

void ensure_parent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent);
}

int cmd_generate(const std::string& config, std::uint64_t seed, const std::string& out) {
  const ExperimentConfig cfg = config_or_default(config);
  DgpConfig dgp = default_config();
  dgp.target = cfg.target;
  apply_overrides(dgp, cfg.dgp_overrides);
  const GeneratedBundle bundle = generate(dgp, seed);
  ensure_dir(out);
  std::vector<ManifestEntry> manifest;
  for (const Dataset& d : bundle.datasets) {
    write_dataset(d, (fs::path(out) / (d.name + ".csv")).string());
    manifest.push_back({d.name, d.mode});
    std::cerr << d.name << ": " << d.size() << " records\n";
  }
  write_manifest(manifest, (fs::path(out) / "manifest.csv").string());
  return 0;
}

int cmd_fit(const std::string& config, const std::string& data, const std::string& out) {
  const ExperimentConfig cfg = config_or_default(config);
  const std::vector<Dataset> ds = select_datasets(cfg, load_data_dir(data));
  const Split split = split_labeled(ds.front(), cfg.label_fraction,
                                    split_seed(cfg.seeds.front()), cfg.stratify);
  const TrainingView view = make_training_view(ds, cfg.target, split);
  const HierarchicalModel model =
      train_hierarchical(view.datasets, hierarchical_options(cfg));
  ensure_dir(out);
  write_node_params((fs::path(out) / "nodes.csv").string(), model.spec.graph,
                    model.fit.params);
  write_classifiers((fs::path(out) / "classifiers.csv").string(), model.classifiers);
  std::cerr << "objective " << format_real(model.fit.objective) << " after "
            << model.fit.iterations << " iterations"
            << (model.fit.converged ? "" : " (not converged)") << '\n';
  return 0;
}

int cmd_eval(const std::string& config, const std::string& data, const std::string& out) {
  const ExperimentConfig cfg = config_or_default(config);
  const ExperimentResult r = run_experiment(cfg, load_data_dir(data));
  ensure_parent(out);
  write_results(r, out);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& data,
              const std::vector<double>& fractions, const std::string& out,
              const std::string& raw) {
  const ExperimentConfig cfg = config_or_default(config);
  const SweepResult r = label_fraction_sweep(cfg, load_data_dir(data), fractions);
  ensure_parent(out);
  write_sweep(r.points, out);
  if (!raw.empty()) {
    ensure_parent(raw);
    write_results(r.raw, raw);
  }
  return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
  const std::string md = render_report(load_results(in));
  if (out.empty()) {
    std::cout << md;
    return 0;
  }
  ensure_parent(out);
  CsvWriter w(out);
  w.line(md.substr(0, md.empty() ? 0 : md.size() - 1));
  w.close();
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Population-aware domain adaptation experiments"};
  app.name("popda");
  app.require_subcommand(1);

  std::string config;
  std::string data;
  std::string out;
  std::string in;
  std::string raw;
  std::uint64_t seed = 1;
  std::vector<double> fractions{0.05, 0.1, 0.15, 0.2, 0.25};

  auto* gen = app.add_subcommand("generate", "write the synthetic datasets");
  gen->add_option("--config", config, "experiment config (dgp.* keys)");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out, "output directory")->required();

  auto* fit = app.add_subcommand("fit", "fit the hierarchy and subgroup classifiers");
  fit->add_option("--config", config, "experiment config");
  fit->add_option("--data", data, "data directory")->required();
  fit->add_option("--out", out, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "run the evaluation protocol");
  ev->add_option("--config", config, "experiment config");
  ev->add_option("--data", data, "data directory")->required();
  ev->add_option("--out", out, "results CSV")->required();

  auto* sw = app.add_subcommand("sweep", "evaluate over several label fractions");
  sw->add_option("--config", config, "experiment config");
  sw->add_option("--data", data, "data directory")->required();
  sw->add_option("--fractions", fractions, "label fractions")->delimiter(',');
  sw->add_option("--out", out, "sweep CSV")->required();
  sw->add_option("--raw", raw, "also write the per-seed rows here");

  auto* rep = app.add_subcommand("report", "render results as markdown");
  rep->add_option("--in", in, "results CSV")->required();
  rep->add_option("--out", out, "markdown file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "popda: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(config, seed, out);
    if (fit->parsed()) return cmd_fit(config, data, out);
    if (ev->parsed()) return cmd_eval(config, data, out);
    if (sw->parsed()) return cmd_sweep(config, data, fractions, out, raw);
    if (rep->parsed()) return cmd_report(in, out);
  } catch (const std::exception& e) {
    std::cerr << "popda: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace popda
