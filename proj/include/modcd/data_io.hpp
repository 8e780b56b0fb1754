#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "modcd/graph.hpp"
#include "modcd/training.hpp"

namespace modcd {

// Text formats:
//   edges    - one "u v" pair per line, 0-based, whitespace separated; '#' starts a comment
//   features - header "n m", then n lines of m decimal reals
//   labels   - n lines with one integer each
struct DatasetBundle {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::optional<std::filesystem::path> labels;
  std::string name;
};

// Reference shapes for the well-known benchmark graphs.
struct KnownDataset {
  std::string_view name;
  int nodes;
  std::int64_t edges;
  int features;
  int classes;
};

const std::vector<KnownDataset>& known_datasets();

std::vector<Edge> read_edges(const std::filesystem::path& path);
SparseMatrix<double> read_features(const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);

void write_edges(const std::filesystem::path& path, const std::vector<Edge>& edges);
void write_features(const std::filesystem::path& path, const SparseMatrix<double>& features);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
void write_matrix_csv(const std::filesystem::path& path, const Matrix<double>& m);
Matrix<double> read_matrix_csv(const std::filesystem::path& path);

// Loads and validates a dataset. Parse errors carry the file and line number
// (DataError). Known dataset names are checked against their reference shape;
// mismatches only warn.
AttributedGraph load_dataset(const DatasetBundle& bundle);

// Writes edges.txt, features.txt and (if present) labels.txt into `dir`.
DatasetBundle write_dataset(const AttributedGraph& g, const std::filesystem::path& dir, std::string name = {});

// Attributed stochastic block model.
struct SbmSpec {
  std::vector<int> blocks;
  double p_in = 0.5;
  double p_out = 0.01;
  int feature_dim = 16;
  double center_separation = 4.0;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

AttributedGraph generate_sbm(const SbmSpec& spec);

struct FinalMetrics {
  double q = 0.0;
  double q_prime = 0.0;
  std::optional<double> dbi;
  std::optional<double> nmi;
  std::optional<double> acc;
  std::optional<double> f1;
  std::optional<double> ari;
};

struct RunReport {
  TrainConfig config;
  std::string dataset;
  int louvain_communities = 0;
  double louvain_q = 0.0;
  int k = 0;
  double threshold = 0.0;
  std::vector<EvalRecord> records;
  FinalMetrics final_metrics;
  Timing timing;
};

RunReport make_report(const TrainResult& result, const TrainConfig& cfg, std::string dataset = {});

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& doc);

// Writes the results document. When `embedding` / `partition` are given, also
// writes <stem>.embedding.csv and <stem>.partition.txt next to it.
void write_results(const RunReport& report, const std::filesystem::path& path,
                   const Matrix<double>* embedding = nullptr, const Partition* partition = nullptr);
RunReport read_results(const std::filesystem::path& path);

}  // namespace modcd
