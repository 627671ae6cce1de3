// Command line front end: prep / train / verify / spectrum / datagen.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adaptkry/datagen.hpp"
#include "adaptkry/error.hpp"
#include "adaptkry/graph.hpp"
#include "adaptkry/model.hpp"
#include "adaptkry/polybases.hpp"
#include "adaptkry/propagation.hpp"
#include "adaptkry/rng.hpp"
#include "adaptkry/spectral.hpp"
#include "adaptkry/verify.hpp"
#include "manifest.hpp"

namespace {

using namespace adaptkry;
namespace fs = std::filesystem;
using adaptkry::tools::PhaseTimer;
using adaptkry::tools::RunManifest;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitTheorem = 5;

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("malformed config JSON in " + path + ": " + e.what());
  }
}

// Precedence: command line > config file > compiled defaults.
template <typename T>
void config_override(const CLI::App& cmd, const std::string& name, const nlohmann::json& cfg,
                     T& field) {
  if (cmd.count("--" + name) > 0) return;
  if (!cfg.contains(name)) return;
  try {
    field = cfg.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config key \"" + name + "\": " + e.what());
  }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw validation_error(flag + ": cannot parse \"" + token + "\" as a number");
    }
  }
  if (values.empty()) throw validation_error(flag + ": empty list");
  return values;
}

fs::path default_manifest_path(const std::string& explicit_path, const fs::path& primary_output,
                               const std::string& command) {
  if (!explicit_path.empty()) return explicit_path;
  if (!primary_output.empty()) return primary_output.string() + ".manifest.json";
  return command + ".manifest.json";
}

LoadedDataset load_dataset_with_warnings(const std::string& edges, const std::string& features,
                                         const std::string& labels) {
  LoadedDataset data = load_graph(edges, features, labels);
  if (data.graph.dropped_self_loops() > 0) {
    std::cerr << "warning: dropped " << data.graph.dropped_self_loops() << " self-loop(s) from "
              << edges << "\n";
  }
  return data;
}

// ---------------------------------------------------------------- prep ----

struct PrepOptions {
  std::string edges, features, labels, out;
  std::vector<double> taus;
  int hops = 10;
  bool spectral = false;
  double eps = 0.1;
  std::string manifest, config;
};

int run_prep(const PrepOptions& opt) {
  RunManifest manifest("prep", 0);
  manifest.config("edges", opt.edges);
  manifest.config("features", opt.features);
  manifest.config("labels", opt.labels);
  manifest.config("taus", opt.taus);
  manifest.config("hops", opt.hops);
  manifest.config("out", opt.out);
  manifest.config("tau_count", opt.taus.size());
  manifest.input(opt.edges);
  manifest.input(opt.features);
  manifest.input(opt.labels);

  PhaseTimer load_timer;
  const LoadedDataset data = load_dataset_with_warnings(opt.edges, opt.features, opt.labels);
  manifest.timing("load", load_timer.elapsed_ms());
  for (double tau : opt.taus) {
    if (tau > 1.0)
      std::cerr << "warning: tau = " << tau
                << " > 1 reshapes the spectrum beyond [0,2]; bases may diverge with hops\n";
  }

  PhaseTimer build_timer;
  const KrylovBasis basis = build_merged_basis(data.graph, opt.taus, data.features, opt.hops);
  manifest.timing("build", build_timer.elapsed_ms());
  save_basis(basis, opt.out);
  manifest.output(opt.out);

  std::cout << "graph: n=" << data.graph.num_nodes() << " m=" << data.graph.num_edges()
            << " d=" << data.features.cols() << " classes=" << data.graph.num_classes() << "\n";
  std::cout << "basis: hops=" << opt.hops << " taus=" << opt.taus.size()
            << (basis.merged ? " (merged)" : "") << " -> " << opt.out << "\n";

  if (opt.spectral) {
    for (double tau : opt.taus) {
      const SpectrumReport spectrum = eig_oracle(data.graph, tau);
      std::cout << "tau=" << tau << " lambda*=" << spectrum.lambda_star;
      try {
        const MixingBound bound = mixing_bound(data.graph, tau, opt.eps);
        std::cout << " mixing_bound(eps=" << opt.eps << ")=" << bound.hops;
        if (tau != 1.0)
          std::cout << " [tau-adjusted degrees: " << bound.hops_tau_degrees << "]";
      } catch (const numeric_error& e) {
        std::cout << " mixing_bound: " << e.what();
      }
      std::cout << "\n";
    }
  }
  manifest.write(default_manifest_path(opt.manifest, opt.out, "prep"));
  return kExitOk;
}

// --------------------------------------------------------------- train ----

struct TrainOptions {
  std::string basis, labels, out, history;
  std::uint64_t seed = 0;
  int splits = 10;
  double lr = 0.01;
  int hidden = 64;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int patience = 200;
  bool per_column = false;
  std::string manifest, config;
};

int run_train(const TrainOptions& opt) {
  RunManifest manifest("train", opt.seed);
  manifest.config("basis", opt.basis);
  manifest.config("labels", opt.labels);
  manifest.config("splits", opt.splits);
  manifest.config("lr", opt.lr);
  manifest.config("hidden", opt.hidden);
  manifest.config("dropout", opt.dropout);
  manifest.config("weight_decay", opt.weight_decay);
  manifest.config("epochs", opt.epochs);
  manifest.config("patience", opt.patience);
  manifest.config("per_column", opt.per_column);
  manifest.input(opt.basis);
  manifest.input(opt.labels);

  const KrylovBasis basis = load_basis(opt.basis);

  std::vector<int> labels;
  {
    std::ifstream in(opt.labels);
    if (!in) throw io_error("cannot open " + opt.labels);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        labels.push_back(std::stoi(line));
      } catch (const std::exception&) {
        throw validation_error(opt.labels + ":" + std::to_string(lineno) +
                               ": expected an integer label, got \"" + line + "\"");
      }
    }
  }
  if (labels.size() != basis.num_nodes())
    throw validation_error("label count does not match basis node count");
  const int num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
  const Graph label_graph(labels.size(), {}, labels, num_classes);

  TrainConfig cfg;
  cfg.learning_rate = opt.lr;
  cfg.weight_decay = opt.weight_decay;
  cfg.epochs = opt.epochs;
  cfg.patience = opt.patience;
  cfg.hidden = opt.hidden;
  cfg.dropout = opt.dropout;

  const std::vector<SplitSet> splits = make_splits(basis.num_nodes(), opt.seed, opt.splits);
  PhaseTimer train_timer;
  std::vector<double> accuracies;
  TrainResult last;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    TrainConfig split_cfg = cfg;
    split_cfg.seed = Rng::derive(opt.seed, s);
    const FilterModel init(basis.hops, basis.dim(), cfg.hidden, num_classes, split_cfg.seed,
                           opt.per_column);
    last = train(init, basis, label_graph, splits[s], split_cfg);
    accuracies.push_back(last.test_accuracy);
  }
  manifest.timing("train", train_timer.elapsed_ms());

  const double mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
                      static_cast<double>(accuracies.size());
  double var = 0.0;
  for (double a : accuracies) var += (a - mean) * (a - mean);
  var /= static_cast<double>(accuracies.size());
  std::cout.precision(4);
  std::cout << std::fixed << "test accuracy over " << accuracies.size()
            << " split(s): " << 100.0 * mean << " +- " << 100.0 * std::sqrt(var) << "\n";

  save_checkpoint(last.model, cfg, opt.out);
  manifest.output(opt.out);
  if (!opt.history.empty()) {
    save_history_csv(last.history, opt.history);
    manifest.output(opt.history);
  }
  manifest.write(default_manifest_path(opt.manifest, opt.out, "train"));
  return kExitOk;
}

// -------------------------------------------------------------- verify ----

struct VerifyCliOptions {
  std::uint64_t seed = 1;
  int graphs = 50;
  std::size_t max_n = 50;
  std::string theorem = "all";
  std::string tau_grid;
  std::string eps_list;
  int trials = 100;
  int draws = 20;
  int degree = 8;
  int merge_seeds = 10;
  std::string out;
  std::string manifest, config;
};

int run_verify(const VerifyCliOptions& opt) {
  RunManifest manifest("verify", opt.seed);
  manifest.config("graphs", opt.graphs);
  manifest.config("max_n", opt.max_n);
  manifest.config("theorem", opt.theorem);

  VerifyOptions vopt;
  vopt.graphs = opt.graphs;
  vopt.max_nodes = opt.max_n;
  vopt.information_loss_trials = opt.trials;
  vopt.weight_draws = opt.draws;
  vopt.unification_degree = opt.degree;
  vopt.merge_seeds = opt.merge_seeds;
  vopt.seed = opt.seed;
  if (!opt.tau_grid.empty()) vopt.tau_grid = parse_double_list(opt.tau_grid, "--tau-grid");
  if (!opt.eps_list.empty()) vopt.eps_values = parse_double_list(opt.eps_list, "--eps");

  std::vector<TheoremReport> reports;
  const std::string which = opt.theorem;
  auto wants = [&](const char* name) { return which == "all" || which == name; };
  PhaseTimer suite_timer;
  if (wants("spectrum")) reports.push_back(run_monotonicity_suite(vopt));
  if (wants("convergence")) reports.push_back(run_convergence_suite(vopt));
  if (wants("information-loss")) reports.push_back(run_information_loss_suite(vopt));
  if (wants("basis-unification")) reports.push_back(run_basis_unification_suite(vopt));
  if (wants("merge-identity")) reports.push_back(run_merge_identity_suite(vopt));
  if (which == "all") reports.push_back(run_homophily_quotient_probe(vopt));
  if (reports.empty())
    throw validation_error("unknown theorem \"" + which +
                           "\" (spectrum, convergence, information-loss, basis-unification, "
                           "merge-identity, all)");
  manifest.timing("suites", suite_timer.elapsed_ms());

  nlohmann::json all = nlohmann::json::array();
  for (const auto& report : reports) {
    const std::string line = theorem_report_to_json(report);
    std::cout << line << "\n";
    all.push_back(nlohmann::json::parse(line));
  }
  if (!opt.out.empty()) {
    std::ofstream out_file(opt.out);
    if (!out_file) throw io_error("cannot write " + opt.out);
    out_file << all.dump(2) << '\n';
    manifest.output(opt.out);
  }
  manifest.write(default_manifest_path(opt.manifest, opt.out, "verify"));

  for (const auto& report : reports) {
    if (!report.passed) throw theorem_violation("theorem suite failed: " + report.theorem);
  }
  return kExitOk;
}

// --------------------------------------------------------------- sweep ----

struct SweepOptions {
  std::string edges, features, labels, out;
  std::string tau_grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  int hops = 10;
  std::uint64_t seed = 0;
  int splits = 10;
  double lr = 0.01;
  int hidden = 64;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int patience = 200;
  std::string manifest, config;
};

int run_sweep(const SweepOptions& opt) {
  RunManifest manifest("sweep", opt.seed);
  manifest.config("tau_grid", opt.tau_grid);
  manifest.config("hops", opt.hops);
  manifest.config("splits", opt.splits);
  manifest.config("lr", opt.lr);
  manifest.config("hidden", opt.hidden);
  manifest.input(opt.edges);
  manifest.input(opt.features);
  manifest.input(opt.labels);

  const LoadedDataset data = load_dataset_with_warnings(opt.edges, opt.features, opt.labels);
  const std::vector<double> grid = parse_double_list(opt.tau_grid, "--tau-grid");
  TrainConfig cfg;
  cfg.learning_rate = opt.lr;
  cfg.weight_decay = opt.weight_decay;
  cfg.epochs = opt.epochs;
  cfg.patience = opt.patience;
  cfg.hidden = opt.hidden;
  cfg.dropout = opt.dropout;
  cfg.seed = opt.seed;
  const std::vector<SplitSet> splits = make_splits(data.graph, opt.seed, opt.splits);

  PhaseTimer sweep_timer;
  const auto rows = tau_sweep(data.graph, data.features, opt.hops, grid, cfg, splits);
  manifest.timing("sweep", sweep_timer.elapsed_ms());

  std::ostringstream table;
  table.precision(6);
  table << "tau,mean_acc,std_acc\n";
  for (const auto& row : rows)
    table << row.tau << ',' << row.mean_accuracy << ',' << row.std_accuracy << '\n';
  std::cout << table.str();
  if (!opt.out.empty()) {
    std::ofstream out(opt.out);
    if (!out) throw io_error("cannot write " + opt.out);
    out << table.str();
    manifest.output(opt.out);
  }
  manifest.write(default_manifest_path(opt.manifest, opt.out, "sweep"));
  return kExitOk;
}

// ------------------------------------------------------------ spectrum ----

struct SpectrumOptions {
  std::string edges, features, labels;
  std::string eigs_out, tau_grid;
  std::string angles_out;
  double tau = 1.0;
  int hops = 10;
  std::string response_out, weights, basis_kind = "monomial";
  double jacobi_a = 0.0, jacobi_b = 0.0;
  int samples = 200;
  std::string coeffs_out;
  int degree = 10;
  std::string manifest, config;
};

PolyCoeffMatrix make_coeffs(const std::string& kind, int degree, double a, double b) {
  if (kind == "monomial" || kind == "gpr") return gpr_coeffs(degree);
  if (kind == "chebyshev") return chebyshev_coeffs(degree);
  if (kind == "bernstein") return bernstein_coeffs(degree);
  if (kind == "jacobi") return jacobi_coeffs(degree, a, b);
  throw validation_error("unknown basis kind \"" + kind + "\"");
}

int run_spectrum(const SpectrumOptions& opt) {
  RunManifest manifest("spectrum", 0);
  std::optional<LoadedDataset> data;
  if (!opt.edges.empty()) {
    data = load_dataset_with_warnings(opt.edges, opt.features, opt.labels);
    manifest.input(opt.edges);
    manifest.input(opt.features);
    manifest.input(opt.labels);
  }
  fs::path primary;

  if (!opt.eigs_out.empty()) {
    if (!data) throw validation_error("--eigs requires --edges/--features/--labels");
    const std::vector<double> grid =
        opt.tau_grid.empty() ? std::vector<double>{1.0}
                             : parse_double_list(opt.tau_grid, "--tau-grid");
    std::ofstream out(opt.eigs_out);
    if (!out) throw io_error("cannot write " + opt.eigs_out);
    out.precision(12);
    out << "# tau,lambda_1..lambda_n of L_tau\n";
    for (double tau : grid) {
      const SpectrumReport spectrum = eig_oracle(data->graph, tau);
      out << tau;
      for (double v : spectrum.eigenvalues) out << ',' << v;
      out << '\n';
    }
    manifest.output(opt.eigs_out);
    primary = opt.eigs_out;
  }

  if (!opt.angles_out.empty()) {
    if (!data) throw validation_error("--angles requires --edges/--features/--labels");
    const TauPropagator p(data->graph, opt.tau);
    const KrylovBasis basis = build_krylov_basis(p, data->features, opt.hops);
    const BasisAngleReport report = basis_angles(basis);
    std::ofstream out(opt.angles_out);
    if (!out) throw io_error("cannot write " + opt.angles_out);
    out.precision(12);
    out << "hop,mean_angle_degrees,skipped_columns\n";
    for (std::size_t k = 0; k < report.mean_degrees.size(); ++k)
      out << (k + 1) << ',' << report.mean_degrees[k] << ',' << report.skipped[k] << '\n';
    manifest.config("tau", opt.tau);
    manifest.config("hops", opt.hops);
    manifest.output(opt.angles_out);
    primary = opt.angles_out;
  }

  if (!opt.coeffs_out.empty()) {
    const PolyCoeffMatrix coeffs =
        make_coeffs(opt.basis_kind, opt.degree, opt.jacobi_a, opt.jacobi_b);
    std::ofstream out(opt.coeffs_out);
    if (!out) throw io_error("cannot write " + opt.coeffs_out);
    out << coeffs_to_csv(coeffs);
    manifest.config("basis_kind", opt.basis_kind);
    manifest.output(opt.coeffs_out);
    primary = opt.coeffs_out;
  }

  if (!opt.response_out.empty()) {
    if (opt.weights.empty()) throw validation_error("--response requires --weights");
    const std::vector<double> w = parse_double_list(opt.weights, "--weights");
    const int degree = static_cast<int>(w.size()) - 1;
    const PolyCoeffMatrix coeffs =
        make_coeffs(opt.basis_kind, degree, opt.jacobi_a, opt.jacobi_b);
    const auto rows = frequency_response(coeffs, w, opt.samples);
    const auto [lo, hi] = coeffs.natural_domain();
    std::ofstream out(opt.response_out);
    if (!out) throw io_error("cannot write " + opt.response_out);
    out.precision(12);
    out << "# basis=" << poly_basis_name(coeffs.kind) << " natural_domain=[" << lo << ',' << hi
        << "]\nlambda,value\n";
    for (const auto& [lambda, value] : rows) out << lambda << ',' << value << '\n';
    manifest.config("basis_kind", opt.basis_kind);
    manifest.output(opt.response_out);
    primary = opt.response_out;
  }

  if (primary.empty())
    throw validation_error(
        "spectrum: nothing to do (pass --eigs, --angles, --response or --coeffs)");
  manifest.write(default_manifest_path(opt.manifest, primary, "spectrum"));
  return kExitOk;
}

// ------------------------------------------------------------- datagen ----

struct DatagenOptions {
  std::string out_prefix;
  std::size_t nodes = 600;
  int classes = 2;
  double homophily = 0.9;
  double mean_degree = 10.0;
  std::size_t dim = 16;
  double separation = 4.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  std::string manifest, config;
};

int run_datagen(const DatagenOptions& opt) {
  RunManifest manifest("datagen", opt.seed);
  SyntheticSpec spec;
  spec.nodes = opt.nodes;
  spec.num_classes = opt.classes;
  spec.target_homophily = opt.homophily;
  spec.mean_degree = opt.mean_degree;
  spec.feature_dim = opt.dim;
  spec.class_separation = opt.separation;
  spec.noise_scale = opt.noise;
  spec.seed = opt.seed;
  manifest.config("nodes", opt.nodes);
  manifest.config("classes", opt.classes);
  manifest.config("homophily", opt.homophily);
  manifest.config("mean_degree", opt.mean_degree);
  manifest.config("dim", opt.dim);
  manifest.config("separation", opt.separation);
  manifest.config("noise", opt.noise);

  const SyntheticDataset data = generate(spec);
  const fs::path edges = opt.out_prefix + ".edges.tsv";
  const fs::path features = opt.out_prefix + ".features.csv";
  const fs::path labels = opt.out_prefix + ".labels.txt";
  save_dataset(data.graph, data.features, edges, features, labels);
  manifest.output(edges);
  manifest.output(features);
  manifest.output(labels);
  std::cout << "synthetic graph: n=" << data.graph.num_nodes() << " m=" << data.graph.num_edges()
            << " h=" << data.achieved_homophily << " (target " << opt.homophily
            << ", resamples " << data.resamples << ")\n";
  manifest.write(default_manifest_path(opt.manifest, edges, "datagen"));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-Krylov polynomial graph filters"};
  app.require_subcommand(1);

  PrepOptions prep;
  CLI::App* prep_cmd = app.add_subcommand("prep", "Build and persist a Krylov feature basis");
  prep_cmd->add_option("--edges", prep.edges, "TSV edge list")->required();
  prep_cmd->add_option("--features", prep.features, "CSV feature matrix")->required();
  prep_cmd->add_option("--labels", prep.labels, "label file, one class id per line")->required();
  prep_cmd->add_option("--tau", prep.taus, "propagation step size (repeat for a merged basis)");
  prep_cmd->add_option("--hops", prep.hops, "propagation hops K");
  prep_cmd->add_option("--out", prep.out, "output basis file")->required();
  prep_cmd->add_flag("--spectral", prep.spectral, "print lambda* and the mixing bound");
  prep_cmd->add_option("--eps", prep.eps, "epsilon for the mixing bound");
  prep_cmd->add_option("--manifest", prep.manifest, "manifest path");
  prep_cmd->add_option("--config", prep.config, "JSON config file (CLI > file > defaults)");

  TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the decoupled filter on a basis");
  train_cmd->add_option("--basis", train_opt.basis, "basis file from prep")->required();
  train_cmd->add_option("--labels", train_opt.labels, "label file")->required();
  train_cmd->add_option("--out", train_opt.out, "checkpoint path")->required();
  train_cmd->add_option("--history", train_opt.history, "training history CSV");
  train_cmd->add_option("--seed", train_opt.seed, "random seed")->required();
  train_cmd->add_option("--splits", train_opt.splits, "number of random splits");
  train_cmd->add_option("--lr", train_opt.lr, "learning rate");
  train_cmd->add_option("--hidden", train_opt.hidden, "hidden dimension");
  train_cmd->add_option("--dropout", train_opt.dropout, "dropout rate");
  train_cmd->add_option("--weight-decay", train_opt.weight_decay, "L2 weight decay");
  train_cmd->add_option("--epochs", train_opt.epochs, "max epochs");
  train_cmd->add_option("--patience", train_opt.patience, "early-stop patience");
  train_cmd->add_flag("--per-column", train_opt.per_column, "one weight per column, not per hop");
  train_cmd->add_option("--manifest", train_opt.manifest, "manifest path");
  train_cmd->add_option("--config", train_opt.config, "JSON config file");

  VerifyCliOptions verify_opt;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the theorem verification suites");
  verify_cmd->add_option("--seed", verify_opt.seed, "random seed")->required();
  verify_cmd->add_option("--graphs", verify_opt.graphs, "graphs per suite");
  verify_cmd->add_option("--max-n", verify_opt.max_n, "max graph size");
  verify_cmd->add_option("--theorem", verify_opt.theorem,
                         "spectrum|convergence|information-loss|basis-unification|merge-identity|all");
  verify_cmd->add_option("--tau-grid", verify_opt.tau_grid, "comma separated tau grid");
  verify_cmd->add_option("--eps", verify_opt.eps_list, "comma separated epsilons");
  verify_cmd->add_option("--trials", verify_opt.trials, "information-loss trials");
  verify_cmd->add_option("--draws", verify_opt.draws, "weight draws per basis");
  verify_cmd->add_option("--degree", verify_opt.degree, "unification degree");
  verify_cmd->add_option("--merge-seeds", verify_opt.merge_seeds, "merge identity seeds");
  verify_cmd->add_option("--out", verify_opt.out, "aggregated JSON report path");
  verify_cmd->add_option("--manifest", verify_opt.manifest, "manifest path");
  verify_cmd->add_option("--config", verify_opt.config, "JSON config file");

  SweepOptions sweep_opt;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Train across a tau grid and tabulate accuracy per tau");
  sweep_cmd->add_option("--edges", sweep_opt.edges, "TSV edge list")->required();
  sweep_cmd->add_option("--features", sweep_opt.features, "CSV feature matrix")->required();
  sweep_cmd->add_option("--labels", sweep_opt.labels, "label file")->required();
  sweep_cmd->add_option("--out", sweep_opt.out, "CSV output (tau, mean acc, std)");
  sweep_cmd->add_option("--tau-grid", sweep_opt.tau_grid, "comma separated tau grid");
  sweep_cmd->add_option("--hops", sweep_opt.hops, "propagation hops K");
  sweep_cmd->add_option("--seed", sweep_opt.seed, "random seed")->required();
  sweep_cmd->add_option("--splits", sweep_opt.splits, "number of random splits");
  sweep_cmd->add_option("--lr", sweep_opt.lr, "learning rate");
  sweep_cmd->add_option("--hidden", sweep_opt.hidden, "hidden dimension");
  sweep_cmd->add_option("--dropout", sweep_opt.dropout, "dropout rate");
  sweep_cmd->add_option("--weight-decay", sweep_opt.weight_decay, "L2 weight decay");
  sweep_cmd->add_option("--epochs", sweep_opt.epochs, "max epochs");
  sweep_cmd->add_option("--patience", sweep_opt.patience, "early-stop patience");
  sweep_cmd->add_option("--manifest", sweep_opt.manifest, "manifest path");
  sweep_cmd->add_option("--config", sweep_opt.config, "JSON config file");

  SpectrumOptions spectrum_opt;
  CLI::App* spectrum_cmd =
      app.add_subcommand("spectrum", "Export eigenvalues, basis angles or filter responses");
  spectrum_cmd->add_option("--edges", spectrum_opt.edges, "TSV edge list");
  spectrum_cmd->add_option("--features", spectrum_opt.features, "CSV feature matrix");
  spectrum_cmd->add_option("--labels", spectrum_opt.labels, "label file");
  spectrum_cmd->add_option("--eigs", spectrum_opt.eigs_out, "eigenvalue CSV output");
  spectrum_cmd->add_option("--tau-grid", spectrum_opt.tau_grid, "tau grid for --eigs");
  spectrum_cmd->add_option("--angles", spectrum_opt.angles_out, "consecutive-hop angle CSV");
  spectrum_cmd->add_option("--tau", spectrum_opt.tau, "tau for --angles");
  spectrum_cmd->add_option("--hops", spectrum_opt.hops, "hops for --angles");
  spectrum_cmd->add_option("--response", spectrum_opt.response_out, "filter response CSV");
  spectrum_cmd->add_option("--weights", spectrum_opt.weights, "comma separated filter weights");
  spectrum_cmd->add_option("--basis", spectrum_opt.basis_kind,
                           "monomial|chebyshev|bernstein|jacobi");
  spectrum_cmd->add_option("--jacobi-a", spectrum_opt.jacobi_a, "jacobi a parameter");
  spectrum_cmd->add_option("--jacobi-b", spectrum_opt.jacobi_b, "jacobi b parameter");
  spectrum_cmd->add_option("--samples", spectrum_opt.samples, "response sample count");
  spectrum_cmd->add_option("--coeffs", spectrum_opt.coeffs_out, "coefficient matrix CSV");
  spectrum_cmd->add_option("--degree", spectrum_opt.degree, "degree for --coeffs");
  spectrum_cmd->add_option("--manifest", spectrum_opt.manifest, "manifest path");
  spectrum_cmd->add_option("--config", spectrum_opt.config, "JSON config file");

  DatagenOptions datagen_opt;
  CLI::App* datagen_cmd =
      app.add_subcommand("datagen", "Generate a planted-partition dataset on disk");
  datagen_cmd->add_option("--out-prefix", datagen_opt.out_prefix, "output path prefix")
      ->required();
  datagen_cmd->add_option("--nodes", datagen_opt.nodes, "node count");
  datagen_cmd->add_option("--classes", datagen_opt.classes, "class count");
  datagen_cmd->add_option("--homophily", datagen_opt.homophily, "target homophily in (0,1)");
  datagen_cmd->add_option("--mean-degree", datagen_opt.mean_degree, "expected mean degree");
  datagen_cmd->add_option("--dim", datagen_opt.dim, "feature dimension");
  datagen_cmd->add_option("--separation", datagen_opt.separation, "class mean separation");
  datagen_cmd->add_option("--noise", datagen_opt.noise, "feature noise scale");
  datagen_cmd->add_option("--seed", datagen_opt.seed, "random seed")->required();
  datagen_cmd->add_option("--manifest", datagen_opt.manifest, "manifest path");
  datagen_cmd->add_option("--config", datagen_opt.config, "JSON config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prep_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(prep.config);
      config_override(*prep_cmd, "tau", cfg, prep.taus);
      config_override(*prep_cmd, "hops", cfg, prep.hops);
      config_override(*prep_cmd, "eps", cfg, prep.eps);
      if (prep.taus.empty()) throw validation_error("at least one --tau is required");
      return run_prep(prep);
    }
    if (train_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(train_opt.config);
      config_override(*train_cmd, "splits", cfg, train_opt.splits);
      config_override(*train_cmd, "lr", cfg, train_opt.lr);
      config_override(*train_cmd, "hidden", cfg, train_opt.hidden);
      config_override(*train_cmd, "dropout", cfg, train_opt.dropout);
      config_override(*train_cmd, "weight-decay", cfg, train_opt.weight_decay);
      config_override(*train_cmd, "epochs", cfg, train_opt.epochs);
      config_override(*train_cmd, "patience", cfg, train_opt.patience);
      return run_train(train_opt);
    }
    if (verify_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(verify_opt.config);
      config_override(*verify_cmd, "graphs", cfg, verify_opt.graphs);
      config_override(*verify_cmd, "max-n", cfg, verify_opt.max_n);
      config_override(*verify_cmd, "theorem", cfg, verify_opt.theorem);
      config_override(*verify_cmd, "tau-grid", cfg, verify_opt.tau_grid);
      config_override(*verify_cmd, "trials", cfg, verify_opt.trials);
      return run_verify(verify_opt);
    }
    if (sweep_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(sweep_opt.config);
      config_override(*sweep_cmd, "tau-grid", cfg, sweep_opt.tau_grid);
      config_override(*sweep_cmd, "hops", cfg, sweep_opt.hops);
      config_override(*sweep_cmd, "splits", cfg, sweep_opt.splits);
      config_override(*sweep_cmd, "lr", cfg, sweep_opt.lr);
      config_override(*sweep_cmd, "hidden", cfg, sweep_opt.hidden);
      config_override(*sweep_cmd, "dropout", cfg, sweep_opt.dropout);
      config_override(*sweep_cmd, "weight-decay", cfg, sweep_opt.weight_decay);
      config_override(*sweep_cmd, "epochs", cfg, sweep_opt.epochs);
      config_override(*sweep_cmd, "patience", cfg, sweep_opt.patience);
      return run_sweep(sweep_opt);
    }
    if (spectrum_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(spectrum_opt.config);
      config_override(*spectrum_cmd, "tau", cfg, spectrum_opt.tau);
      config_override(*spectrum_cmd, "hops", cfg, spectrum_opt.hops);
      config_override(*spectrum_cmd, "samples", cfg, spectrum_opt.samples);
      config_override(*spectrum_cmd, "degree", cfg, spectrum_opt.degree);
      return run_spectrum(spectrum_opt);
    }
    if (datagen_cmd->parsed()) {
      const nlohmann::json cfg = load_config_file(datagen_opt.config);
      config_override(*datagen_cmd, "nodes", cfg, datagen_opt.nodes);
      config_override(*datagen_cmd, "classes", cfg, datagen_opt.classes);
      config_override(*datagen_cmd, "homophily", cfg, datagen_opt.homophily);
      config_override(*datagen_cmd, "mean-degree", cfg, datagen_opt.mean_degree);
      config_override(*datagen_cmd, "dim", cfg, datagen_opt.dim);
      config_override(*datagen_cmd, "separation", cfg, datagen_opt.separation);
      config_override(*datagen_cmd, "noise", cfg, datagen_opt.noise);
      return run_datagen(datagen_opt);
    }
  } catch (const io_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kExitIo;
  } catch (const validation_error& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  } catch (const numeric_error& e) {
    std::cerr << "error (numeric): " << e.what() << "\n";
    return kExitNumeric;
  } catch (const theorem_violation& e) {
    std::cerr << "error (theorem): " << e.what() << "\n";
    return kExitTheorem;
  }
  return kExitOk;
}
