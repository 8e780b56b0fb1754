#include "modcd/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "modcd/data_io.hpp"
#include "modcd/error.hpp"
#include "modcd/louvain.hpp"
#include "modcd/metrics.hpp"
#include "modcd/training.hpp"

namespace modcd {
namespace fs = std::filesystem;

namespace {

struct TrainFlags {
  TrainConfig cfg;
  std::string activation = "relu";
  std::string sim = "cosine";
  std::string sign = "plus";
  std::string precision = "f64";

  TrainConfig resolve() const {
    TrainConfig out = cfg;
    out.activation = parse_activation(activation);
    out.sim_mode = parse_similarity_mode(sim);
    out.sign = parse_softmax_sign(sign);
    out.precision = parse_precision(precision);
    out.validate();
    return out;
  }
};

// Sweeps register --alpha and --delta themselves as value lists.
void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_alpha_delta = true) {
  if (with_alpha_delta) {
    cmd->add_option("--delta", f.cfg.delta, "Softmax temperature")->capture_default_str();
    cmd->add_option("--alpha", f.cfg.alpha, "Loss scaling factor")->capture_default_str();
  }
  cmd->add_option("--lr", f.cfg.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--weight-decay", f.cfg.weight_decay, "Coupled L2 weight decay")->capture_default_str();
  cmd->add_option("--iters", f.cfg.iters, "Training iterations")->capture_default_str();
  cmd->add_option("--dim", f.cfg.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--eval-interval", f.cfg.eval_interval, "Metric logging interval")->capture_default_str();
  cmd->add_option("--threshold-coef", f.cfg.threshold_coef, "Community size filter coefficient")
      ->capture_default_str();
  cmd->add_option("--activation", f.activation, "relu | tanh | identity")
      ->check(CLI::IsMember({"relu", "tanh", "identity"}))
      ->capture_default_str();
  cmd->add_option("--sim", f.sim, "cosine | dot")->check(CLI::IsMember({"cosine", "dot"}))->capture_default_str();
  cmd->add_option("--sign", f.sign, "plus | minus")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  cmd->add_option("--precision", f.precision, "f32 | f64")->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
}

struct DataFlags {
  std::string edges;
  std::string features;
  std::string labels;
  std::string name;
};

void add_data_flags(CLI::App* cmd, DataFlags& d, bool features_required) {
  cmd->add_option("--edges", d.edges, "Edge list file")->required();
  auto* feat = cmd->add_option("--features", d.features, "Feature matrix file");
  if (features_required) feat->required();
  cmd->add_option("--labels", d.labels, "Ground-truth label file");
  cmd->add_option("--name", d.name, "Dataset name (enables reference shape checks)");
}

DatasetBundle bundle_of(const DataFlags& d) {
  DatasetBundle b{d.edges, d.features, std::nullopt, d.name};
  if (!d.labels.empty()) b.labels = fs::path(d.labels);
  if (b.name.empty()) b.name = fs::path(d.edges).parent_path().filename().string();
  return b;
}

// Loads a graph for structure-only commands: without a feature file every node
// gets a single constant feature.
AttributedGraph load_structure(const DataFlags& d) {
  if (!d.features.empty()) return load_dataset(bundle_of(d));
  const auto edges = read_edges(d.edges);
  NodeId n = 0;
  for (auto [u, v] : edges) n = std::max({n, u + 1, v + 1});
  std::optional<std::vector<int>> labels;
  if (!d.labels.empty()) {
    labels = read_labels(d.labels);
    n = std::max(n, static_cast<NodeId>(labels->size()));
    if (static_cast<NodeId>(labels->size()) != n)
      throw DataError("shape mismatch: " + std::to_string(labels->size()) + " labels for " + std::to_string(n) +
                      " nodes");
  }
  try {
    return build_graph(edges, Matrix<double>::Ones(n, 1), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

std::string format_value(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void print_metric_line(std::ostream& out, const FinalMetrics& f) {
  out << std::setprecision(6) << "Q " << f.q << "  Q' " << f.q_prime;
  auto opt = [&out](const char* name, const std::optional<double>& v) {
    if (v) out << "  " << name << ' ' << *v;
  };
  opt("DBI", f.dbi);
  opt("NMI", f.nmi);
  opt("ACC", f.acc);
  opt("F1", f.f1);
  opt("ARI", f.ari);
  out << '\n';
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_detect(const DataFlags& d, const TrainFlags& tf, const std::string& out_path, bool save_embedding,
               std::ostream& out) {
  const TrainConfig cfg = tf.resolve();
  const DatasetBundle bundle = bundle_of(d);
  const AttributedGraph g = load_dataset(bundle);
  const TrainResult result = train(g, cfg);
  const RunReport report = make_report(result, cfg, bundle.name);
  write_results(report, out_path, save_embedding ? &result.embedding : nullptr, &result.assignment.partition);
  out << "louvain communities " << report.louvain_communities << ", kept k = " << report.k << '\n';
  print_metric_line(out, report.final_metrics);
  out << "results written to " << out_path << '\n';
  return kExitOk;
}

int cmd_louvain(const DataFlags& d, std::uint64_t seed, double coef, const std::string& out_path,
                std::ostream& out) {
  const AttributedGraph g = load_structure(d);
  const LouvainResult lr = louvain_run(g, seed);
  const double q = modularity_hard(g, lr.partition);
  out << std::setprecision(8) << "communities " << lr.partition.num_communities() << "\nQ " << q << '\n';
  try {
    const FilterResult fr = filter_communities(lr.partition, static_cast<std::size_t>(g.num_nodes()), coef);
    out << "threshold " << fr.threshold << "\nkept " << fr.k << '\n';
  } catch (const DataError& e) {
    out << "kept 0 (" << e.what() << ")\n";
  }
  if (const auto truth = g.label_partition()) {
    const MetricSuite m = supervised_metrics(lr.partition, *truth);
    out << "NMI " << m.nmi << "\nACC " << m.acc << "\nF1 " << m.f1 << "\nARI " << m.ari << '\n';
  }
  if (!out_path.empty()) write_labels(out_path, lr.partition.assignment());
  return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, const std::string& embedding_path,
             const std::string& edges_path, std::ostream& out) {
  const Partition pred = Partition::compact(read_labels(pred_path));
  const Partition truth = Partition::compact(read_labels(truth_path));
  if (pred.size() != truth.size())
    throw DataError("shape mismatch: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " labels");
  const MetricSuite m = supervised_metrics(pred, truth);
  out << std::setprecision(8) << "NMI " << m.nmi << "\nACC " << m.acc << "\nF1 " << m.f1 << "\nARI " << m.ari
      << '\n';
  if (!embedding_path.empty()) {
    const Matrix<double> h = read_matrix_csv(embedding_path);
    if (h.rows() != static_cast<Eigen::Index>(pred.size()))
      throw DataError("shape mismatch: embedding has " + std::to_string(h.rows()) + " rows");
    if (pred.num_communities() >= 2)
      out << "DBI " << dbi(h, pred) << '\n';
    else
      out << "DBI undefined (single community)\n";
  }
  if (!edges_path.empty()) {
    DataFlags d;
    d.edges = edges_path;
    const AttributedGraph g = load_structure(d);
    if (g.num_nodes() != static_cast<NodeId>(pred.size()))
      throw DataError("shape mismatch: graph has " + std::to_string(g.num_nodes()) + " nodes");
    out << "Q " << modularity_hard(g, pred) << '\n';
  }
  return kExitOk;
}

int cmd_synth(const SbmSpec& spec, const std::string& out_dir, std::ostream& out) {
  const AttributedGraph g = generate_sbm(spec);
  write_dataset(g, out_dir, "sbm");
  out << "nodes " << g.num_nodes() << "\nedges " << g.num_edges() << "\nwritten to " << fs::path(out_dir).string()
      << '\n';
  return kExitOk;
}

int cmd_sweep(const DataFlags& d, const TrainFlags& tf, const std::vector<double>& alphas,
              const std::vector<double>& deltas, std::vector<std::uint64_t> seeds, const std::string& out_dir,
              std::ostream& out) {
  if (seeds.empty()) seeds.push_back(tf.cfg.seed);
  const DatasetBundle bundle = bundle_of(d);
  const AttributedGraph g = load_dataset(bundle);
  out << std::setprecision(6) << "alpha\tdelta\tmedian_Q\tmedian_NMI\tmedian_ACC\n";
  for (double alpha : alphas) {
    for (double delta : deltas) {
      std::vector<double> qs, nmis, accs;
      for (auto seed : seeds) {
        TrainFlags run = tf;
        run.cfg.alpha = alpha;
        run.cfg.delta = delta;
        run.cfg.seed = seed;
        const TrainConfig cfg = run.resolve();
        const TrainResult result = train(g, cfg);
        const RunReport report = make_report(result, cfg, bundle.name);
        const fs::path file = fs::path(out_dir) / ("alpha_" + format_value(alpha) + "_delta_" +
                                                   format_value(delta) + "_seed_" + std::to_string(seed) + ".json");
        write_results(report, file);
        qs.push_back(report.final_metrics.q);
        if (report.final_metrics.nmi) nmis.push_back(*report.final_metrics.nmi);
        if (report.final_metrics.acc) accs.push_back(*report.final_metrics.acc);
      }
      out << format_value(alpha) << '\t' << format_value(delta) << '\t' << median(qs);
      out << '\t' << (nmis.empty() ? std::string("-") : format_value(median(nmis)));
      out << '\t' << (accs.empty() ? std::string("-") : format_value(median(accs))) << '\n';
    }
  }
  return kExitOk;
}

void configure_threads() {
  if (const char* env = std::getenv("MODCD_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) Eigen::setNbThreads(threads);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attributed-graph community detection by differentiable soft modularity", "modcd"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")->capture_default_str();

  DataFlags data;
  TrainFlags train_flags;
  std::string out_path;
  bool save_embedding = false;

  auto* detect = app.add_subcommand("detect", "Run the full detection pipeline and write a results file");
  add_data_flags(detect, data, true);
  add_train_flags(detect, train_flags);
  detect->add_option("--seed", train_flags.cfg.seed, "Random seed")->capture_default_str();
  detect->add_option("--out", out_path, "Results file (JSON)")->required();
  detect->add_flag("--save-embedding", save_embedding, "Also write <out>.embedding.csv");

  std::uint64_t louvain_seed = 0;
  double louvain_coef = 0.5;
  std::string louvain_out;
  auto* louvain = app.add_subcommand("louvain", "Structural pre-detection only");
  add_data_flags(louvain, data, false);
  louvain->add_option("--seed", louvain_seed, "Random seed")->capture_default_str();
  louvain->add_option("--threshold-coef", louvain_coef, "Community size filter coefficient")->capture_default_str();
  louvain->add_option("--out", louvain_out, "Partition output file");

  std::string pred_path, truth_path, embedding_path, eval_edges;
  auto* eval = app.add_subcommand("eval", "Evaluate a partition against ground truth");
  eval->add_option("--pred", pred_path, "Predicted partition file")->required();
  eval->add_option("--truth", truth_path, "Ground-truth label file")->required();
  eval->add_option("--embedding", embedding_path, "Embedding CSV (enables DBI)");
  eval->add_option("--edges", eval_edges, "Edge list (enables modularity)");

  SbmSpec sbm{{50, 50, 50}};
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate an attributed stochastic block model dataset");
  synth->add_option("--blocks", sbm.blocks, "Block sizes")->delimiter(',')->capture_default_str();
  synth->add_option("--p-in", sbm.p_in, "Intra-block edge probability")->capture_default_str();
  synth->add_option("--p-out", sbm.p_out, "Inter-block edge probability")->capture_default_str();
  synth->add_option("--feature-dim", sbm.feature_dim, "Feature dimension")->capture_default_str();
  synth->add_option("--separation", sbm.center_separation, "Block center separation")->capture_default_str();
  synth->add_option("--sigma", sbm.noise_sigma, "Feature noise standard deviation")->capture_default_str();
  synth->add_option("--seed", sbm.seed, "Random seed")->capture_default_str();
  synth->add_option("--out-dir", synth_out, "Output directory")->required();

  std::vector<double> sweep_alpha{0.001}, sweep_delta{30.0};
  std::vector<std::uint64_t> sweep_seeds;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Repeat detect over every (alpha, delta, seed) combination");
  add_data_flags(sweep, data, true);
  add_train_flags(sweep, train_flags, false);
  sweep->add_option("--seed", train_flags.cfg.seed, "Random seed (when --seeds is absent)")->capture_default_str();
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds")->delimiter(',');
  sweep->add_option("--alpha", sweep_alpha, "Comma-separated alpha values")->delimiter(',')->capture_default_str();
  sweep->add_option("--delta", sweep_delta, "Comma-separated delta values")->delimiter(',')->capture_default_str();
  sweep->add_option("--out-dir", sweep_out, "Directory for one results file per run")->required();

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  configure_threads();

  try {
    if (detect->parsed()) return cmd_detect(data, train_flags, out_path, save_embedding, out);
    if (louvain->parsed()) return cmd_louvain(data, louvain_seed, louvain_coef, louvain_out, out);
    if (eval->parsed()) return cmd_eval(pred_path, truth_path, embedding_path, eval_edges, out);
    if (synth->parsed()) return cmd_synth(sbm, synth_out, out);
    if (sweep->parsed()) return cmd_sweep(data, train_flags, sweep_alpha, sweep_delta, sweep_seeds, sweep_out, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace modcd
