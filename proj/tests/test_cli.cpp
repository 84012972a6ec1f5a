#include "ermt/cli.hpp"
#include "ermt/profile.hpp"

#include <catch_amalgamated.hpp>

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;
using namespace ermt;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "ermt_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ermt");
  return cli::run(args);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string lookup(const std::vector<std::vector<std::string>>& rows, const std::string& key, int col) {
  for (const auto& r : rows)
    if (!r.empty() && r[0] == key) return r.at(col);
  return "<missing>";
}

}  // namespace

TEST_CASE("grid parsing", "[cli]") {
  CHECK(cli::parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(cli::parse_grid("0:5:0.1").size() == 51);
  CHECK(cli::parse_grid("1,2.5,3") == std::vector<double>{1, 2.5, 3});
  CHECK(cli::parse_grid("4") == std::vector<double>{4});
  CHECK_THROWS(cli::parse_grid("a"));
  CHECK_THROWS(cli::parse_grid("1:0:1"));
  CHECK_THROWS(cli::parse_grid("0:1"));
}

TEST_CASE("params on a band profile", "[cli]") {
  const auto dir = scratch("params");
  spit(dir / "band.json", profile_to_json(band(12, 2)));
  REQUIRE(run_cli({"params", "--profile", (dir / "band.json").string(), "--out", (dir / "p.csv").string()}) == 0);
  const auto rows = read_csv(dir / "p.csv");
  CHECK(lookup(rows, "sigma1_sq", 2) == "5");
  CHECK(lookup(rows, "sigma2_sq", 2) == "5");
  CHECK(lookup(rows, "sigma_star_sq", 2) == "1");
  CHECK(fs::exists(dir / "p.csv.manifest.json"));
}

TEST_CASE("wishart table", "[cli]") {
  const auto dir = scratch("wishart");
  REQUIRE(run_cli({"wishart", "--n", "2", "--m", "2", "--pmax", "2", "--out", (dir / "w.csv").string()}) == 0);
  const auto rows = read_csv(dir / "w.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][6] == "B_fraction");
  CHECK(rows[3][6] == "5/2");
  CHECK(rows[3][5].rfind("2.5", 0) == 0);
  CHECK(lookup(rows, "0", 8) == "1/2");  // D_0 = 1/n

  CHECK(run_cli({"wishart", "--n", "3", "--m", "2"}) == cli::kValidation);
  CHECK(run_cli({"wishart", "--n", "2", "--m", "2", "--pmax", "501"}) == cli::kValidation);
  REQUIRE(run_cli({"wishart", "--n", "2", "--m", "2", "--pmax", "600", "--float", "--out",
               (dir / "f.csv").string()}) == 0);
  CHECK(read_csv(dir / "f.csv").size() == 602);
}

TEST_CASE("kappa table", "[cli]") {
  const auto dir = scratch("kappa");
  REQUIRE(run_cli({"kappa", "--taxonomy", "sym", "--p", "3", "--out", (dir / "k.csv").string()}) == 0);
  const auto rows = read_csv(dir / "k.csv");
  long mass = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) mass += std::stol(rows[i][2]);
  CHECK(mass == 48);
  const auto man = nlohmann::json::parse(slurp(dir / "k.csv.manifest.json"));
  CHECK(man["mass"] == "48");
}

TEST_CASE("bound curve", "[cli]") {
  const auto dir = scratch("bound");
  spit(dir / "r.json", profile_to_json(iid(Kind::Rectangular, 16, 16)));
  REQUIRE(run_cli({"bound", "--profile", (dir / "r.json").string(), "--model", "rect", "--flavor", "large",
               "--t", "0:2:0.5", "--out", (dir / "c.csv").string()}) == 0);
  const auto rows = read_csv(dir / "c.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"t", "threshold", "prob", "capped"});
  CHECK(std::stod(rows[3][1]) == Catch::Approx(2 * 4 + 1 + 1.0));

  REQUIRE(run_cli({"bound", "--profile", (dir / "r.json").string(), "--flavor", "small", "--t", "1",
               "--out", (dir / "s.csv").string()}) == 0);
  const auto man = nlohmann::json::parse(slurp(dir / "s.csv.manifest.json"));
  CHECK(man["constants"]["c_exp"] == 1.0 / 64.0);
  CHECK(man["outputs"][0] == "s.csv");
  CHECK_FALSE(man.contains("wall_time_seconds"));

  CHECK(run_cli({"bound", "--profile", (dir / "r.json").string(), "--model", "herm"}) == cli::kValidation);
  CHECK(run_cli({"bound", "--profile", (dir / "r.json").string(), "--flavor", "prop", "--t", "2"}) ==
        cli::kValidation);
  CHECK(run_cli({"bound", "--profile", (dir / "r.json").string(), "--t", "x"}) == cli::kUsage);
}

TEST_CASE("moments need exact entries", "[cli]") {
  const auto dir = scratch("moments");
  spit(dir / "exact.json", R"({"kind":"symmetric","n":2,"b":["1","1/2","1/2","1"]})");
  spit(dir / "float.json", R"({"kind":"symmetric","n":2,"b":[1,0.5,0.5,1]})");
  REQUIRE(run_cli({"moments", "--profile", (dir / "exact.json").string(), "--p", "3", "--out",
               (dir / "m.csv").string()}) == 0);
  const auto rows = read_csv(dir / "m.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][2] == "9/4");  // E tr X^2 = (2 + 1/4 + 1/4 + 2) / 2, diagonal variance 2b^2
  CHECK(run_cli({"moments", "--profile", (dir / "float.json").string()}) == cli::kValidation);
}

TEST_CASE("simulate is reproducible", "[cli]") {
  const auto dir = scratch("simulate");
  spit(dir / "h.json", profile_to_json(iid(Kind::Hermitian, 6, 6)));
  for (const char* threads : {"1", "3"}) {
    REQUIRE(run_cli({"simulate", "--profile", (dir / "h.json").string(), "--samples", "50", "--seed", "42",
                 "--threads", threads, "--summary", "--moments", "1,2", "--out",
                 (dir / (std::string("s") + threads + ".csv")).string()}) == 0);
  }
  CHECK(slurp(dir / "s1.csv") == slurp(dir / "s3.csv"));
  CHECK(slurp(dir / "s1.csv.summary.csv") == slurp(dir / "s3.csv.summary.csv"));
  CHECK(slurp(dir / "s1.csv.manifest.json") != slurp(dir / "s3.csv.manifest.json"));  // names differ
  const auto man = nlohmann::json::parse(slurp(dir / "s1.csv.manifest.json"));
  const auto man3 = nlohmann::json::parse(slurp(dir / "s3.csv.manifest.json"));
  CHECK(man["config_hash"] == man3["config_hash"]);
  CHECK(man["seed"] == 42);
  CHECK(read_csv(dir / "s1.csv").size() == 51);
  CHECK(run_cli({"simulate", "--profile", (dir / "h.json").string(), "--samples", "0"}) == cli::kValidation);
  CHECK(run_cli({"simulate", "--profile", (dir / "h.json").string(), "--dist", "cauchy"}) == cli::kValidation);
}

TEST_CASE("usage errors", "[cli]") {
  CHECK(run_cli({}) == cli::kUsage);
  CHECK(run_cli({"frobnicate"}) == cli::kUsage);
  CHECK(run_cli({"params"}) == cli::kUsage);
  CHECK(run_cli({"wishart", "--n", "two", "--m", "2"}) == cli::kUsage);
  CHECK(run_cli({"verify", "--suite", "nonsense"}) == cli::kUsage);
  CHECK(run_cli({"params", "--profile", "/nonexistent/profile.json"}) == cli::kValidation);
}

TEST_CASE("verify exact suite", "[cli][slow]") {
  const auto dir = scratch("verify");
  CHECK(run_cli({"verify", "--suite", "exact", "--out", (dir / "out").string(), "--wall-time"}) == 0);
  CHECK(fs::exists(dir / "out" / "criterion_01.csv"));
  const auto man = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(man["results"]["1"]["pass"] == true);
  CHECK(man.contains("wall_time_seconds"));
  CHECK(man["outputs"].size() == 7);
}

TEST_CASE("executable exit codes", "[cli]") {
  const std::string exe = ERMT_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system(("\"" + exe + "\" " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("--version") == 0);
  CHECK(status("wishart --n 1 --m 1 --pmax 1") == 0);
  CHECK(status("wishart --n 2 --m 1") == 2);
  CHECK(status("nothing") == 1);
}
