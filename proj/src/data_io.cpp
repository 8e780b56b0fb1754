#include "modcd/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string_view>

#include <spdlog/spdlog.h>

#include "modcd/error.hpp"

namespace modcd {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void check_written(const std::ofstream& out, const fs::path& path) {
  if (!out) throw DataError("I/O failure while writing '" + path.string() + "'");
}

// Splits a line into whitespace (or comma) separated tokens after stripping
// a '#' comment.
std::vector<std::string_view> tokenize(std::string_view line, bool commas = false) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [commas](char c) { return c == ' ' || c == '\t' || c == '\r' || (commas && c == ','); };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void parse_failure(const fs::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, const fs::path& path, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    parse_failure(path, line, "cannot parse '" + std::string(token) + "' as a number");
  return value;
}

}  // namespace

const std::vector<KnownDataset>& known_datasets() {
  static const std::vector<KnownDataset> table = {
      {"acm", 3025, 13128, 1870, 3},       {"amac", 7650, 245861, 767, 10},  {"amap", 13752, 119081, 745, 8},
      {"citeseer", 3327, 4552, 3703, 6},   {"cocs", 18333, 81894, 6805, 15}, {"cora", 2708, 5278, 1433, 7},
      {"film", 7600, 15009, 932, 5},       {"pubmed", 19717, 44324, 500, 3}, {"uat", 1190, 13599, 239, 4},
  };
  return table;
}

std::vector<Edge> read_edges(const fs::path& path) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) parse_failure(path, line_no, "expected two node ids");
    const auto u = parse_number<NodeId>(tokens[0], path, line_no);
    const auto v = parse_number<NodeId>(tokens[1], path, line_no);
    if (u < 0 || v < 0) parse_failure(path, line_no, "negative node id");
    edges.emplace_back(u, v);
  }
  return edges;
}

SparseMatrix<double> read_features(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  long rows = -1;
  long cols = -1;
  std::vector<Eigen::Triplet<double, int>> entries;
  long row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (rows < 0) {
      if (tokens.size() != 2) parse_failure(path, line_no, "expected header 'n m'");
      rows = parse_number<long>(tokens[0], path, line_no);
      cols = parse_number<long>(tokens[1], path, line_no);
      if (rows < 1 || cols < 1) parse_failure(path, line_no, "header dimensions must be positive");
      continue;
    }
    if (row >= rows) parse_failure(path, line_no, "more feature rows than the header's " + std::to_string(rows));
    if (static_cast<long>(tokens.size()) != cols)
      parse_failure(path, line_no, "expected " + std::to_string(cols) + " values, found " +
                                       std::to_string(tokens.size()));
    for (long c = 0; c < cols; ++c) {
      const double x = parse_number<double>(tokens[c], path, line_no);
      if (!std::isfinite(x)) parse_failure(path, line_no, "non-finite feature value");
      if (x != 0.0) entries.emplace_back(static_cast<int>(row), static_cast<int>(c), x);
    }
    ++row;
  }
  if (rows < 0) throw DataError(path.string() + ": missing header");
  if (row != rows)
    throw DataError(path.string() + ": header declares " + std::to_string(rows) + " rows, found " +
                    std::to_string(row));
  SparseMatrix<double> features(rows, cols);
  features.setFromTriplets(entries.begin(), entries.end());
  features.makeCompressed();
  return features;
}

std::vector<int> read_labels(const fs::path& path) {
  auto in = open_input(path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1) parse_failure(path, line_no, "expected one integer per line");
    const int label = parse_number<int>(tokens[0], path, line_no);
    if (label < 0) parse_failure(path, line_no, "negative label");
    labels.push_back(label);
  }
  return labels;
}

void write_edges(const fs::path& path, const std::vector<Edge>& edges) {
  auto out = open_output(path);
  for (auto [u, v] : edges) out << u << ' ' << v << '\n';
  check_written(out, path);
}

void write_features(const fs::path& path, const SparseMatrix<double>& features) {
  auto out = open_output(path);
  out << features.rows() << ' ' << features.cols() << '\n';
  const Matrix<double> dense(features);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) out << (j ? " " : "") << dense(i, j);
    out << '\n';
  }
  check_written(out, path);
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  auto out = open_output(path);
  for (int l : labels) out << l << '\n';
  check_written(out, path);
}

void write_matrix_csv(const fs::path& path, const Matrix<double>& m) {
  auto out = open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  check_written(out, path);
}

Matrix<double> read_matrix_csv(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line, true);
    if (tokens.empty()) continue;
    std::vector<double> row;
    row.reserve(tokens.size());
    for (auto t : tokens) row.push_back(parse_number<double>(t, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) parse_failure(path, line_no, "ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": empty matrix");
  Matrix<double> m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

AttributedGraph load_dataset(const DatasetBundle& bundle) {
  const auto edges = read_edges(bundle.edges);
  SparseMatrix<double> features = read_features(bundle.features);
  std::optional<std::vector<int>> labels;
  if (bundle.labels) {
    labels = read_labels(*bundle.labels);
    if (static_cast<Eigen::Index>(labels->size()) != features.rows())
      throw DataError("shape mismatch: " + bundle.features.string() + " has " + std::to_string(features.rows()) +
                      " rows but " + bundle.labels->string() + " has " + std::to_string(labels->size()) +
                      " labels");
  }
  const auto n = static_cast<NodeId>(features.rows());
  for (auto [u, v] : edges)
    if (u >= n || v >= n)
      throw DataError("shape mismatch: edge (" + std::to_string(u) + ", " + std::to_string(v) + ") in " +
                      bundle.edges.string() + " exceeds the " + std::to_string(n) + " feature rows");

  AttributedGraph g = [&] {
    try {
      return build_graph(edges, std::move(features), std::move(labels));
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  }();

  std::string lowered = bundle.name;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& ref : known_datasets()) {
    if (ref.name != lowered) continue;
    if (g.num_nodes() != ref.nodes)
      spdlog::warn("{}: {} nodes, reference shape has {}", bundle.name, g.num_nodes(), ref.nodes);
    if (g.feature_dim() != ref.features)
      spdlog::warn("{}: {} features, reference shape has {}", bundle.name, g.feature_dim(), ref.features);
    if (g.num_edges() != ref.edges && 2 * g.num_edges() != ref.edges)
      spdlog::warn("{}: {} undirected edges, reference count is {}", bundle.name, g.num_edges(), ref.edges);
    if (g.labels()) {
      const auto classes = g.label_partition()->num_communities();
      if (classes != ref.classes)
        spdlog::warn("{}: {} label classes, reference has {}", bundle.name, classes, ref.classes);
    }
  }
  return g;
}

DatasetBundle write_dataset(const AttributedGraph& g, const fs::path& dir, std::string name) {
  DatasetBundle bundle{dir / "edges.txt", dir / "features.txt", std::nullopt, std::move(name)};
  write_edges(bundle.edges, g.edge_list());
  write_features(bundle.features, g.features());
  if (g.labels()) {
    bundle.labels = dir / "labels.txt";
    write_labels(*bundle.labels, *g.labels());
  }
  return bundle;
}

AttributedGraph generate_sbm(const SbmSpec& spec) {
  if (spec.blocks.empty()) throw std::invalid_argument("sbm: no blocks");
  for (int b : spec.blocks)
    if (b < 1) throw std::invalid_argument("sbm: block sizes must be >= 1");
  if (!(spec.p_in > 0.0 || spec.p_out > 0.0)) throw std::invalid_argument("sbm: all edge probabilities are zero");
  if (!(spec.p_out >= 0.0 && spec.p_out < spec.p_in && spec.p_in <= 1.0))
    throw std::invalid_argument("sbm: need 0 <= p_out < p_in <= 1");
  if (spec.feature_dim < 1) throw std::invalid_argument("sbm: feature_dim must be >= 1");
  if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("sbm: noise_sigma must be non-negative");

  std::vector<int> labels;
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) labels.insert(labels.end(), spec.blocks[b], static_cast<int>(b));
  const auto n = static_cast<NodeId>(labels.size());
  if (n < 2) throw std::invalid_argument("sbm: needs at least two nodes");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  while (edges.empty()) {
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (coin(rng) < (labels[i] == labels[j] ? spec.p_in : spec.p_out)) edges.emplace_back(i, j);
  }

  const auto blocks = static_cast<int>(spec.blocks.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix<double> centers = Matrix<double>::Zero(blocks, spec.feature_dim);
  for (int b = 0; b < blocks; ++b) {
    if (spec.feature_dim >= blocks) {
      centers(b, b) = spec.center_separation;
    } else {
      for (int c = 0; c < spec.feature_dim; ++c) centers(b, c) = gauss(rng);
      centers.row(b) *= spec.center_separation / centers.row(b).norm();
    }
  }
  Matrix<double> features(n, spec.feature_dim);
  for (NodeId i = 0; i < n; ++i)
    for (int c = 0; c < spec.feature_dim; ++c) features(i, c) = centers(labels[i], c) + spec.noise_sigma * gauss(rng);

  return build_graph(edges, features, std::move(labels));
}

namespace {

json optional_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  if (std::isnan(*v)) return "nan";
  return *v;
}

std::optional<double> read_optional(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  const auto& v = doc.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return v.get<double>();
}

json record_to_json(const EvalRecord& r) {
  return json{{"iteration", r.iteration},     {"loss", r.loss},
              {"q_prime", r.q_prime},         {"q", r.q},
              {"num_communities", r.num_communities},
              {"dbi", optional_number(r.dbi)}, {"nmi", optional_number(r.nmi)},
              {"acc", optional_number(r.acc)}, {"f1", optional_number(r.f1)},
              {"ari", optional_number(r.ari)}, {"wall_ms", r.wall_ms}};
}

EvalRecord record_from_json(const json& j) {
  EvalRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.loss = j.at("loss").get<double>();
  r.q_prime = j.at("q_prime").get<double>();
  r.q = j.at("q").get<double>();
  r.num_communities = j.at("num_communities").get<int>();
  r.dbi = read_optional(j, "dbi");
  r.nmi = read_optional(j, "nmi");
  r.acc = read_optional(j, "acc");
  r.f1 = read_optional(j, "f1");
  r.ari = read_optional(j, "ari");
  r.wall_ms = j.value("wall_ms", 0.0);
  return r;
}

}  // namespace

json config_to_json(const TrainConfig& cfg) {
  return json{{"delta", cfg.delta},
              {"alpha", cfg.alpha},
              {"lr", cfg.lr},
              {"weight_decay", cfg.weight_decay},
              {"iters", cfg.iters},
              {"eval_interval", cfg.eval_interval},
              {"dim", cfg.dim},
              {"seed", cfg.seed},
              {"threshold_coef", cfg.threshold_coef},
              {"activation", std::string(to_string(cfg.activation))},
              {"sim", std::string(to_string(cfg.sim_mode))},
              {"sign", std::string(to_string(cfg.sign))},
              {"precision", std::string(to_string(cfg.precision))}};
}

TrainConfig config_from_json(const json& doc) {
  TrainConfig cfg;
  cfg.delta = doc.at("delta").get<double>();
  cfg.alpha = doc.at("alpha").get<double>();
  cfg.lr = doc.at("lr").get<double>();
  cfg.weight_decay = doc.at("weight_decay").get<double>();
  cfg.iters = doc.at("iters").get<int>();
  cfg.eval_interval = doc.at("eval_interval").get<int>();
  cfg.dim = doc.at("dim").get<int>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.threshold_coef = doc.at("threshold_coef").get<double>();
  cfg.activation = parse_activation(doc.at("activation").get<std::string>());
  cfg.sim_mode = parse_similarity_mode(doc.at("sim").get<std::string>());
  cfg.sign = parse_softmax_sign(doc.at("sign").get<std::string>());
  cfg.precision = parse_precision(doc.at("precision").get<std::string>());
  return cfg;
}

RunReport make_report(const TrainResult& result, const TrainConfig& cfg, std::string dataset) {
  RunReport r;
  r.config = cfg;
  r.dataset = std::move(dataset);
  r.louvain_communities = result.louvain.num_communities();
  r.louvain_q = result.louvain_q;
  r.k = result.filter.k;
  r.threshold = result.filter.threshold;
  r.records = result.history.records;
  const EvalRecord& f = result.final_metrics;
  r.final_metrics = {f.q, f.q_prime, f.dbi, f.nmi, f.acc, f.f1, f.ari};
  r.timing = result.timing;
  return r;
}

json to_json(const RunReport& report) {
  json records = json::array();
  for (const auto& rec : report.records) records.push_back(record_to_json(rec));
  const FinalMetrics& f = report.final_metrics;
  return json{{"config", config_to_json(report.config)},
              {"dataset", report.dataset},
              {"predetection",
               {{"louvain_communities", report.louvain_communities},
                {"louvain_q", report.louvain_q},
                {"k", report.k},
                {"threshold", report.threshold}}},
              {"records", records},
              {"final",
               {{"q", f.q},
                {"q_prime", f.q_prime},
                {"dbi", optional_number(f.dbi)},
                {"nmi", optional_number(f.nmi)},
                {"acc", optional_number(f.acc)},
                {"f1", optional_number(f.f1)},
                {"ari", optional_number(f.ari)}}},
              {"timing",
               {{"louvain_ms", report.timing.louvain_ms},
                {"train_ms", report.timing.train_ms},
                {"total_ms", report.timing.total_ms}}}};
}

RunReport report_from_json(const json& doc) {
  RunReport r;
  r.config = config_from_json(doc.at("config"));
  r.dataset = doc.value("dataset", std::string{});
  if (doc.contains("predetection")) {
    const auto& pre = doc.at("predetection");
    r.louvain_communities = pre.value("louvain_communities", 0);
    r.louvain_q = pre.value("louvain_q", 0.0);
    r.k = pre.value("k", 0);
    r.threshold = pre.value("threshold", 0.0);
  }
  for (const auto& rec : doc.at("records")) r.records.push_back(record_from_json(rec));
  const auto& f = doc.at("final");
  r.final_metrics.q = f.at("q").get<double>();
  r.final_metrics.q_prime = f.at("q_prime").get<double>();
  r.final_metrics.dbi = read_optional(f, "dbi");
  r.final_metrics.nmi = read_optional(f, "nmi");
  r.final_metrics.acc = read_optional(f, "acc");
  r.final_metrics.f1 = read_optional(f, "f1");
  r.final_metrics.ari = read_optional(f, "ari");
  const auto& t = doc.at("timing");
  r.timing = {t.at("louvain_ms").get<double>(), t.at("train_ms").get<double>(), t.at("total_ms").get<double>()};
  return r;
}

void write_results(const RunReport& report, const fs::path& path, const Matrix<double>* embedding,
                   const Partition* partition) {
  {
    auto out = open_output(path);
    out << to_json(report).dump(2) << '\n';
    check_written(out, path);
  }
  const fs::path stem = path.parent_path() / path.stem();
  if (embedding) write_matrix_csv(stem.string() + ".embedding.csv", *embedding);
  if (partition) write_labels(stem.string() + ".partition.txt", partition->assignment());
}

RunReport read_results(const fs::path& path) {
  auto in = open_input(path);
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace modcd
