#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "dynmix/io.hpp"
#include "dynmix/synthdata.hpp"

namespace fs = std::filesystem;

namespace {

int g_dir_counter = 0;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dynmix_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(g_dir_counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(DYNMIX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

long count_lines(const std::string& text) {
  long n = 0;
  for (const char c : text) {
    if (c == '\n') n += 1;
  }
  return n;
}

}  // namespace

TEST_CASE("version flag exits cleanly") {
  CHECK(run_cli("--version") == 0);
}

TEST_CASE("simulate writes the requested rows deterministically") {
  TempDir dir;
  const std::string a = dir.file("a.csv");
  const std::string b = dir.file("b.csv");
  const std::string c = dir.file("c.csv");
  REQUIRE(run_cli("simulate --design mixture --curve steps --length 50 "
                  "--seed 7 --out " + a) == 0);
  REQUIRE(run_cli("simulate --design mixture --curve steps --length 50 "
                  "--seed 7 --out " + b) == 0);
  REQUIRE(run_cli("simulate --design mixture --curve steps --length 50 "
                  "--seed 8 --out " + c) == 0);

  const std::string ta = dynmix::read_file(a);
  CHECK(ta == dynmix::read_file(b));
  CHECK(ta != dynmix::read_file(c));
  CHECK(count_lines(ta) == 51);

  const dynmix::CsvTable t = dynmix::parse_csv(ta, "a");
  CHECK(t.rows == 50);
  const std::vector<double> grid =
      dynmix::weight_grid(dynmix::WeightCurveKind::steps, 50);
  CHECK(t.column("alpha") == grid);
  for (const double z : t.column("z")) {
    CHECK((z == 0.0 || z == 1.0));
  }
}

TEST_CASE("simulate validates its arguments") {
  TempDir dir;
  CHECK(run_cli("simulate --length 0 --out " + dir.file("x.csv")) == 2);
  CHECK(run_cli("simulate --design waffles --out " + dir.file("x.csv")) == 2);
  CHECK(run_cli("simulate --curve sawtooth --out " + dir.file("x.csv")) == 2);
  CHECK(run_cli("simulate --length notanumber --out " + dir.file("x.csv")) ==
        2);
}

TEST_CASE("binomial simulate includes count and trials columns") {
  TempDir dir;
  const std::string path = dir.file("bin.csv");
  REQUIRE(run_cli("simulate --design binomial --curve linear --length 30 "
                  "--trials 12 --seed 3 --out " + path) == 0);
  const dynmix::CsvTable t =
      dynmix::parse_csv(dynmix::read_file(path), "bin");
  CHECK(t.rows == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(t.column("trials")[i] == 12.0);
    CHECK(t.column("count")[i] >= 0.0);
    CHECK(t.column("count")[i] <= 12.0);
  }
}

TEST_CASE("fit produces chain, weight, summary, and manifest files") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design binomial --curve linear --length 20 "
                  "--trials 1 --seed 5 --out " + data) == 0);
  REQUIRE(run_cli("fit --data " + data +
                  " --mode binomial --iterations 400 --burn-in 100 --thin 10 "
                  "--seed 11 --out-dir " + dir.path.string()) == 0);

  CHECK(fs::exists(dir.file("chain.csv")));
  CHECK(fs::exists(dir.file("alpha.csv")));
  CHECK(fs::exists(dir.file("summary.csv")));
  CHECK(fs::exists(dir.file("manifest.json")));

  const dynmix::CsvTable chain =
      dynmix::parse_csv(dynmix::read_file(dir.file("chain.csv")), "chain");
  CHECK(chain.rows == 30);
  CHECK(chain.column_index("theta0_1") >= 0);
  CHECK(chain.column_index("theta0_2") >= 0);
  CHECK(chain.column_index("w_1") >= 0);
  CHECK(chain.column_index("w_2") >= 0);
  CHECK(chain.column_index("v") == -1);

  const dynmix::CsvTable alpha =
      dynmix::parse_csv(dynmix::read_file(dir.file("alpha.csv")), "alpha");
  CHECK(alpha.rows == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(alpha.column("median")[i] > 0.0);
    CHECK(alpha.column("median")[i] < 1.0);
    CHECK(alpha.column("lower")[i] <= alpha.column("median")[i]);
    CHECK(alpha.column("upper")[i] >= alpha.column("median")[i]);
  }

  const std::string manifest = dynmix::read_file(dir.file("manifest.json"));
  for (const char* key :
       {"\"version\"", "\"mode\"", "\"link\"", "\"kept\"", "\"seed\"",
        "\"chain_seeds\"", "\"data_checksum_fnv1a64\"", "\"outputs\"",
        "\"duration_seconds\""}) {
    CHECK(manifest.find(key) != std::string::npos);
  }
  CHECK(manifest.find("\"kept\": 30") != std::string::npos);
  CHECK(manifest.find("\"mode\": \"bernoulli\"") != std::string::npos);
}

TEST_CASE("fit rejects config and data problems with distinct exit codes") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design binomial --curve linear --length 10 "
                  "--trials 15 --seed 5 --out " + data) == 0);

  CHECK(run_cli("fit --data " + data +
                " --mode binomial --trials 15 --link probit "
                "--iterations 200 --burn-in 50 --thin 5 --out-dir " +
                dir.path.string()) == 2);
  CHECK(run_cli("fit --data " + data +
                " --mode binomial --trials 15 --iterations 100 "
                "--burn-in 100 --thin 5 --out-dir " + dir.path.string()) == 2);
  CHECK(run_cli("fit --data " + dir.file("missing.csv") +
                " --mode binomial --iterations 200 --burn-in 50 --thin 5") ==
        3);

  dynmix::write_file_atomic(dir.file("bad.csv"), "y\n1.5\noops\n");
  CHECK(run_cli("fit --data " + dir.file("bad.csv") +
                " --mode gaussian --iterations 200 --burn-in 50 --thin 5 "
                "--out-dir " + dir.path.string()) == 3);

  dynmix::write_file_atomic(dir.file("frac.csv"), "count\n0\n0.5\n");
  CHECK(run_cli("fit --data " + dir.file("frac.csv") +
                " --mode binomial --iterations 200 --burn-in 50 --thin 5 "
                "--out-dir " + dir.path.string()) == 3);

  CHECK(run_cli("fit") == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("summarize reproduces the fit summary byte for byte") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design gaussian --curve parabolic --length 15 "
                  "--seed 9 --out " + data) == 0);
  REQUIRE(run_cli("fit --data " + data +
                  " --mode gaussian --iterations 500 --burn-in 100 --thin 4 "
                  "--seed 13 --mass 0.9 --out-dir " + dir.path.string()) == 0);

  const std::string out = dir.file("resummary.csv");
  REQUIRE(run_cli("summarize --chain " + dir.file("chain.csv") +
                  " --mass 0.9 --out " + out) == 0);
  CHECK(dynmix::read_file(out) == dynmix::read_file(dir.file("summary.csv")));

  const dynmix::CsvTable chain =
      dynmix::parse_csv(dynmix::read_file(dir.file("chain.csv")), "chain");
  CHECK(chain.column_index("v") >= 0);
}

TEST_CASE("full draws can be re-summarized to the default weight summary") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design binomial --curve steps --length 12 "
                  "--trials 1 --seed 21 --out " + data) == 0);

  const std::string full_dir = dir.file("full");
  const std::string summ_dir = dir.file("summ");
  const std::string common = " --data " + data +
                             " --mode binomial --iterations 300 --burn-in 60 "
                             "--thin 6 --seed 17 --mass 0.9 --out-dir ";
  REQUIRE(run_cli("fit" + common + full_dir + " --full-draws") == 0);
  REQUIRE(run_cli("fit" + common + summ_dir) == 0);

  const dynmix::CsvTable draws = dynmix::parse_csv(
      dynmix::read_file(full_dir + "/alpha.csv"), "draws");
  CHECK(draws.rows == 40);
  CHECK(draws.column_index("alpha_1") >= 0);
  CHECK(draws.column_index("alpha_12") >= 0);

  const std::string redone = dir.file("alpha_redone.csv");
  REQUIRE(run_cli("summarize --chain " + full_dir +
                  "/chain.csv --alpha-draws " + full_dir +
                  "/alpha.csv --mass 0.9 --alpha-out " + redone +
                  " --out " + dir.file("ignored.csv")) == 0);
  CHECK(dynmix::read_file(redone) ==
        dynmix::read_file(summ_dir + "/alpha.csv"));
}

TEST_CASE("repeated fits with one seed are byte-identical") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design mixture --curve linear --length 25 "
                  "--seed 2 --out " + data) == 0);
  const std::string d1 = dir.file("r1");
  const std::string d2 = dir.file("r2");
  const std::string common = " --data " + data +
                             " --mode mixture --iterations 400 --burn-in 100 "
                             "--thin 10 --seed 19 --out-dir ";
  REQUIRE(run_cli("fit" + common + d1) == 0);
  REQUIRE(run_cli("fit" + common + d2) == 0);
  for (const char* name : {"/chain.csv", "/alpha.csv", "/summary.csv"}) {
    CHECK(dynmix::read_file(d1 + name) == dynmix::read_file(d2 + name));
  }
  const dynmix::CsvTable chain =
      dynmix::parse_csv(dynmix::read_file(d1 + "/chain.csv"), "chain");
  for (const char* col : {"mu1", "phi1", "mu2", "phi2"}) {
    CHECK(chain.column_index(col) >= 0);
  }
}

TEST_CASE("multiple chains write suffixed files with distinct draws") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design binomial --curve linear --length 10 "
                  "--trials 1 --seed 4 --out " + data) == 0);
  REQUIRE(run_cli("fit --data " + data +
                  " --mode binomial --iterations 300 --burn-in 60 --thin 6 "
                  "--seed 23 --chains 2 --out-dir " + dir.path.string()) == 0);
  for (const char* name :
       {"chain_1.csv", "chain_2.csv", "alpha_1.csv", "alpha_2.csv",
        "summary_1.csv", "summary_2.csv", "manifest.json"}) {
    CHECK(fs::exists(dir.file(name)));
  }
  CHECK(dynmix::read_file(dir.file("chain_1.csv")) !=
        dynmix::read_file(dir.file("chain_2.csv")));
}

TEST_CASE("priors file changes the fit and bad keys are rejected") {
  TempDir dir;
  const std::string data = dir.file("data.csv");
  REQUIRE(run_cli("simulate --design binomial --curve linear --length 10 "
                  "--trials 1 --seed 6 --out " + data) == 0);
  dynmix::write_file_atomic(dir.file("priors.txt"),
                            "theta0_mean_1 0.5\nw_rate_2 = 0.1\n");
  const std::string base = dir.file("base");
  const std::string alt = dir.file("alt");
  const std::string common = " --data " + data +
                             " --mode binomial --iterations 300 --burn-in 60 "
                             "--thin 6 --seed 29 --out-dir ";
  REQUIRE(run_cli("fit" + common + base) == 0);
  REQUIRE(run_cli("fit" + common + alt + " --priors " +
                  dir.file("priors.txt")) == 0);
  CHECK(dynmix::read_file(base + "/chain.csv") !=
        dynmix::read_file(alt + "/chain.csv"));

  dynmix::write_file_atomic(dir.file("badpriors.txt"), "nonsense_key 1.0\n");
  CHECK(run_cli("fit" + common + alt + " --priors " +
                dir.file("badpriors.txt")) == 3);
  dynmix::write_file_atomic(dir.file("oob.txt"), "w_shape_3 1.0\n");
  CHECK(run_cli("fit" + common + alt + " --priors " + dir.file("oob.txt")) ==
        3);
}
