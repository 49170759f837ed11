#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qclt/harness/config.hpp"
#include "qclt/harness/experiments.hpp"
#include "qclt/harness/output.hpp"

namespace qclt::harness {

enum ExitCode : int { kOk = 0, kConfigError = 2, kPartial = 3, kIoError = 4 };

/// Raw command-line values; unset options leave the file/default config alone.
struct CliOptions {
  std::string experiment;
  std::string configFile;
  std::vector<std::uint64_t> q;
  std::optional<std::string> family;
  std::optional<double> t;
  std::optional<std::string> method;
  std::optional<std::uint64_t> X;
  std::optional<std::uint64_t> Y;
  std::optional<double> W;
  std::optional<std::uint64_t> k1;
  std::optional<std::uint64_t> k2;
  std::optional<std::uint64_t> truncK1;
  std::optional<std::uint64_t> truncK2;
  std::optional<std::uint64_t> supportCap;
  std::optional<double> floor;
  std::optional<std::string> normalization;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> maxChars;
  std::vector<std::string> formats;
  std::vector<double> sigma;
  std::optional<double> windowT;
  std::optional<double> windowC;
  std::optional<std::uint64_t> nodes;
  bool stub = false;
  std::optional<std::string> cacheDir;
  bool quiet = false;
};

inline void add_options(CLI::App& app, CliOptions& o) {
  app.add_option("experiment", o.experiment, "theorem1|prop1|prop2|prop3|prop4|prop4_smoothed|lemma1")->required();
  app.add_option("--config", o.configFile, "JSON config file; flags override its values");
  app.add_option("--q", o.q, "moduli (comma separated)")->delimiter(',');
  app.add_option("--family", o.family, "primitive|all");
  app.add_option("--t", o.t, "height t");
  app.add_option("--method", o.method, "truncated|smoothed");
  app.add_option("--X", o.X, "prime cutoff X");
  app.add_option("--Y", o.Y, "split point Y");
  app.add_option("--W", o.W, "shift W (sigma0 = 1/2 + W/log q)");
  app.add_option("--k1", o.k1, "cap on prime factors <= Y");
  app.add_option("--k2", o.k2, "cap on prime factors in (Y, X]");
  app.add_option("--trunc-k1", o.truncK1, "series length of the first truncated exponential");
  app.add_option("--trunc-k2", o.truncK2, "series length of the second truncated exponential");
  app.add_option("--support-cap", o.supportCap, "largest n in the mollifier support");
  app.add_option("--floor", o.floor, "|L| below this is flagged");
  app.add_option("--normalization", o.normalization, "paper|empirical");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "subsampling seed");
  app.add_option("--max-chars", o.maxChars, "subsample the family to this many characters");
  app.add_option("--formats", o.formats, "csv,jsonl,svg")->delimiter(',');
  app.add_option("--sigma", o.sigma, "prop1 sigma grid (comma separated)")->delimiter(',');
  app.add_option("--window-T", o.windowT, "prop4_smoothed window scale T");
  app.add_option("--window-c", o.windowC, "prop4_smoothed window support factor c");
  app.add_option("--nodes", o.nodes, "prop4_smoothed minimum quadrature nodes");
  app.add_flag("--stub", o.stub, "replace L and M by 1 (prop4 self-test)");
  app.add_option("--cache-dir", o.cacheDir, "directory for cached L-values");
  app.add_flag("--quiet", o.quiet, "no progress output");
}

/// File values first, then flags on top.
inline ExperimentConfig resolve_config(const CliOptions& o) {
  ExperimentConfig c;
  if (!o.configFile.empty()) {
    std::ifstream in(o.configFile);
    if (!in) throw ConfigError("cannot read config file " + o.configFile);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + o.configFile + ": " + e.what());
    }
    apply_json(j, c);
  }
  c.experiment = parse_experiment(o.experiment);
  if (!o.q.empty()) c.qList = o.q;
  if (o.family) c.family = parse_family(*o.family);
  if (o.t) c.desk.t = o.t;
  if (o.method) c.method = parse_method(*o.method);
  if (o.X) c.desk.X = o.X;
  if (o.Y) c.desk.Y = o.Y;
  if (o.W) c.desk.W = o.W;
  if (o.k1) c.desk.K1 = o.k1;
  if (o.k2) c.desk.K2 = o.k2;
  if (o.truncK1) c.desk.truncK1 = o.truncK1;
  if (o.truncK2) c.desk.truncK2 = o.truncK2;
  if (o.supportCap) c.desk.supportCap = o.supportCap;
  if (o.floor) c.floor = *o.floor;
  if (o.normalization) c.normalization = parse_normalization(*o.normalization);
  if (o.out) c.outDir = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.maxChars) c.maxChars = o.maxChars;
  if (!o.formats.empty()) c.formats = parse_formats(o.formats);
  if (!o.sigma.empty()) c.sigmaGrid = o.sigma;
  if (o.windowT) c.window.T = *o.windowT;
  if (o.windowC) c.window.c = *o.windowC;
  if (o.nodes) c.window.nodes = *o.nodes;
  if (o.stub) c.stub = true;
  if (o.cacheDir) c.cacheDir = *o.cacheDir;
  c.validate();
  return c;
}

/// Full command: parse, run, emit. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cerr) {
  CLI::App app{"Desk-scale experiments on the value distribution of Dirichlet L-functions", "qclt"};
  CliOptions opts;
  add_options(app, opts);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  ExperimentConfig cfg;
  try {
    cfg = resolve_config(opts);
  } catch (const ConfigError& e) {
    log << "qclt: config error: " << e.what() << "\n";
    return kConfigError;
  }
  RunRecord rec;
  try {
    rec = run_experiment(cfg);
  } catch (const ConfigError& e) {
    log << "qclt: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    log << "qclt: I/O error: " << e.what() << "\n";
    return kIoError;
  }
  try {
    const auto paths = emit_outputs(rec, cfg.formats, cfg.outDir);
    if (!opts.quiet) {
      for (const auto& r : rec.results) {
        log << rec.experiment << " q=" << r.q << (r.error ? " FAILED: " + *r.error : " ok") << "\n";
      }
      for (const auto& p : paths) log << "wrote " << p.string() << "\n";
      log << "wall time " << rec.wallSeconds << " s\n";
    }
  } catch (const IoError& e) {
    log << "qclt: I/O error: " << e.what() << "\n";
    return kIoError;
  }
  return rec.any_failed() ? kPartial : kOk;
}

}  // namespace qclt::harness
