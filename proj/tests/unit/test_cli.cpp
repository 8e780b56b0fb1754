#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "modcd/cli.hpp"
#include "modcd/data_io.hpp"

using namespace modcd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "modcd");
  args.insert(args.begin() + 1, {"--log-level", "off"});
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("modcd_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  [[nodiscard]] std::string at(const std::string& name) const { return (dir / name).string(); }
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("cli: usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({"detect"}).code == kExitUsage);
  CHECK(cli({"detect", "--edges", "e", "--features", "f", "--out", "o", "--sim", "euclid"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli: missing files are data errors") {
  Workspace ws;
  const auto r = cli({"detect", "--edges", ws.at("nope.txt"), "--features", ws.at("nope2.txt"), "--out",
                      ws.at("r.json")});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("nope.txt") != std::string::npos);
}

TEST_CASE("cli: synth, louvain, detect, eval") {
  Workspace ws;
  REQUIRE(cli({"synth", "--blocks", "30,30,30", "--p-in", "0.3", "--p-out", "0.01", "--feature-dim", "12", "--seed",
               "2", "--out-dir", ws.dir.string()})
              .code == kExitOk);
  CHECK(fs::exists(ws.dir / "edges.txt"));
  CHECK(fs::exists(ws.dir / "features.txt"));
  CHECK(fs::exists(ws.dir / "labels.txt"));

  const auto lv = cli({"louvain", "--edges", ws.at("edges.txt"), "--labels", ws.at("labels.txt"), "--out",
                       ws.at("louvain.txt")});
  CHECK(lv.code == kExitOk);
  CHECK(lv.out.find("NMI") != std::string::npos);

  const std::vector<std::string> detect{"detect",   "--edges", ws.at("edges.txt"), "--features", ws.at("features.txt"),
                                        "--labels", ws.at("labels.txt"), "--dim", "16",  "--iters", "20",
                                        "--out",    ws.at("run.json"), "--save-embedding"};
  const auto d = cli(detect);
  REQUIRE(d.code == kExitOk);
  CHECK(fs::exists(ws.dir / "run.embedding.csv"));
  CHECK(fs::exists(ws.dir / "run.partition.txt"));

  const auto doc = read_json(ws.at("run.json"));
  CHECK(doc["config"]["delta"] == 30.0);
  CHECK(doc["config"]["alpha"] == 0.001);
  CHECK(doc["config"]["lr"] == 0.001);
  CHECK(doc["config"]["weight_decay"] == 0.005);
  CHECK(doc["config"]["dim"] == 16);
  CHECK(doc["records"].size() == 2);

  // Same seed, same numbers; only wall-clock fields may differ.
  REQUIRE(cli(std::vector<std::string>(detect.begin(), detect.end() - 1)).code == kExitOk);
  auto again = read_json(ws.at("run.json"));
  auto strip = [](nlohmann::json j) {
    j.erase("timing");
    for (auto& rec : j["records"]) rec.erase("wall_ms");
    return j;
  };
  CHECK(strip(doc) == strip(again));

  const auto self = cli({"eval", "--pred", ws.at("labels.txt"), "--truth", ws.at("labels.txt")});
  CHECK(self.code == kExitOk);
  CHECK(self.out.find("NMI 1\n") != std::string::npos);
  CHECK(self.out.find("ACC 1\n") != std::string::npos);

  const auto ev = cli({"eval", "--pred", ws.at("run.partition.txt"), "--truth", ws.at("labels.txt"), "--embedding",
                       ws.at("run.embedding.csv"), "--edges", ws.at("edges.txt")});
  CHECK(ev.code == kExitOk);
  CHECK(ev.out.find("Q ") != std::string::npos);

  std::ofstream(ws.at("short.txt")) << "0\n1\n";
  CHECK(cli({"eval", "--pred", ws.at("short.txt"), "--truth", ws.at("labels.txt")}).code == kExitData);
}

TEST_CASE("cli: sweep writes one file per combination") {
  Workspace ws;
  REQUIRE(cli({"synth", "--blocks", "20,20", "--seed", "5", "--out-dir", ws.dir.string()}).code == kExitOk);
  const auto out_dir = ws.dir / "sweep";
  fs::create_directories(out_dir);
  const auto r = cli({"sweep", "--edges", ws.at("edges.txt"), "--features", ws.at("features.txt"), "--labels",
                      ws.at("labels.txt"), "--dim", "8", "--iters", "10", "--alpha", "0.001,0.01", "--delta", "30",
                      "--seeds", "0,1", "--out-dir", out_dir.string()});
  REQUIRE(r.code == kExitOk);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(out_dir)) ++files;
  CHECK(files == 4);
  CHECK(fs::exists(out_dir / "alpha_0.01_delta_30_seed_1.json"));
}

TEST_CASE("cli: invalid numeric settings") {
  Workspace ws;
  REQUIRE(cli({"synth", "--blocks", "10,10", "--out-dir", ws.dir.string()}).code == kExitOk);
  const auto r = cli({"detect", "--edges", ws.at("edges.txt"), "--features", ws.at("features.txt"), "--delta", "-1",
                      "--out", ws.at("x.json")});
  CHECK(r.code == kExitData);
}
