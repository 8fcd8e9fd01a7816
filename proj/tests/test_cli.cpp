#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(LRSPGD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "lrspgd_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<std::string> data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::vector<std::string> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      CHECK(line == "t,eta,objective,rank,grad_sq_norm,dist_to_ref");
      seen_header = true;
      continue;
    }
    rows.push_back(line);
  }
  CHECK(seen_header);
  return rows;
}

std::string minimal_config(const fs::path& out_dir, int seeds = 1) {
  std::ostringstream os;
  os << R"({
  "problem": {"kind": "factored_least_squares", "m": 20, "n": 20,
              "target_rank": 2, "seed": 7},
  "solver": {"lambda": 0.1, "schedule": "inverse_mu_t", "schedule_value": 1.0,
             "T": 100, "k": 5, "rank_budget": 15, "trace_every": 10},
  "sweep": {"seeds": [)";
  for (int i = 0; i < seeds; ++i) os << (i ? "," : "") << i + 1;
  os << R"(]},
  "out_dir": ")" << out_dir.string() << R"("
})";
  return os.str();
}

}  // namespace

TEST_CASE("minimal solve produces the expected CSV shape") {
  fs::path dir = scratch_dir();
  write_file(dir / "config.json", minimal_config(dir / "out"));
  CHECK(run("solve " + (dir / "config.json").string()) == 0);

  fs::path trace = dir / "out" / "trace_s1_lam0.1_T100.csv";
  auto rows = data_rows(trace);
  CHECK(rows.size() == 11);  // 1 + ceil(100 / 10)

  // Config and seed are embedded as a comment header.
  std::ifstream in(trace);
  std::string first;
  std::getline(in, first);
  std::string second;
  std::getline(in, second);
  CHECK(second.find("\"seed\":7") != std::string::npos);

  CHECK(fs::exists(dir / "out" / "summary.json"));
}

TEST_CASE("multi-seed sweeps give distinct deterministic traces") {
  fs::path dir = scratch_dir();
  write_file(dir / "config.json", minimal_config(dir / "out", 5));
  CHECK(run("solve " + (dir / "config.json").string()) == 0);

  std::vector<std::string> contents;
  for (int seed = 1; seed <= 5; ++seed) {
    fs::path trace =
        dir / "out" / ("trace_s" + std::to_string(seed) + "_lam0.1_T100.csv");
    auto rows = data_rows(trace);
    std::string joined;
    for (const auto& r : rows) joined += r + "\n";
    for (const auto& prev : contents) CHECK(joined != prev);
    contents.push_back(joined);
  }

  // Re-running reproduces the first seed's trace exactly.
  fs::path dir2 = dir / "again";
  write_file(dir / "config2.json", minimal_config(dir2 / "out", 5));
  CHECK(run("solve " + (dir / "config2.json").string()) == 0);
  auto rows = data_rows(dir2 / "out" / "trace_s1_lam0.1_T100.csv");
  std::string joined;
  for (const auto& r : rows) joined += r + "\n";
  CHECK(joined == contents[0]);
}

TEST_CASE("malformed configs exit with code 1") {
  fs::path dir = scratch_dir();
  write_file(dir / "bad.json", "{ not json");
  CHECK(run("solve " + (dir / "bad.json").string()) == 1);

  write_file(dir / "missing.json", R"({"problem": {"m": 4, "n": 4}})");
  CHECK(run("solve " + (dir / "missing.json").string()) == 1);

  CHECK(run("solve " + (dir / "does_not_exist.json").string()) == 1);

  std::string bad_enum = minimal_config(dir / "out");
  bad_enum.replace(bad_enum.find("factored_least_squares"), 22, "unknown_problem_kind__");
  write_file(dir / "bad_enum.json", bad_enum);
  CHECK(run("solve " + (dir / "bad_enum.json").string()) == 1);
}

TEST_CASE("numerical aborts exit with code 2") {
  fs::path dir = scratch_dir();
  // lambda = 0 with a tiny rank budget forces a rank-budget abort. The
  // target rank must exceed the budget: the iterate's column space never
  // leaves the target's.
  std::string cfg = minimal_config(dir / "out");
  cfg.replace(cfg.find("\"lambda\": 0.1"), 13, "\"lambda\": 0.0");
  cfg.replace(cfg.find("\"target_rank\": 2"), 16, "\"target_rank\": 8");
  cfg.replace(cfg.find("\"rank_budget\": 15"), 17, "\"rank_budget\": 2");
  write_file(dir / "abort.json", cfg);
  CHECK(run("solve " + (dir / "abort.json").string()) == 2);
}

TEST_CASE("check subcommands") {
  CHECK(run("check isotropy --dist rademacher --n 8 --k 8 --samples 20000") == 0);
  CHECK(run("check kkt --active --trials 50") == 0);
  CHECK(run("check prox-oracle --trials 20") == 0);
  CHECK(run("check incsvd-reconstruction --chains 10 --updates 20") == 0);
  CHECK(run("check no-such-check") == 1);
  CHECK(run("frobnicate") == 1);
}

TEST_CASE("seed and trace-every overrides") {
  fs::path dir = scratch_dir();
  write_file(dir / "config.json", minimal_config(dir / "out", 3));
  CHECK(run("solve " + (dir / "config.json").string() +
            " --seed 9 --trace-every 25 --out-dir " +
            (dir / "override").string()) == 0);
  auto rows = data_rows(dir / "override" / "trace_s9_lam0.1_T100.csv");
  CHECK(rows.size() == 5);  // 1 + ceil(100 / 25)
  // Only the overridden seed ran.
  CHECK(!fs::exists(dir / "override" / "trace_s1_lam0.1_T100.csv"));
}
