// End-to-end tests of the command-line tool: each case runs the installed
// binary in a scratch directory and checks exit codes, stdout payloads and
// produced files against the documented contract.
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const char* cli_path() { return FRAMEDUAL_CLI_PATH; }

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("framedual_cli_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static int& counter() {
    static int value = 0;
    return value;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunResult run_cli(const Scratch& scratch, const std::string& args,
                  const std::string& env = "") {
  const std::string out_path = scratch.path("stdout.txt");
  const std::string err_path = scratch.path("stderr.txt");
  std::string cmd = env + " " + std::string(cli_path()) + " " + args + " >" +
                    out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

// Small fixtures in FRM1 syntax.
const char* kSmallFrame = "FRM1 real 2 3\n1 1 0\n0 0 1\n";
const char* kSmallCanonicalDual = "FRM1 real 2 3\n0.5 0.5 0\n0 0 1\n";
const char* kCounterFrame =
    "FRM1 real 3 5\n1 1 1 0 0\n0 0 0 1 0\n0 0 0 0 1\n";
const char* kCounterDual =
    "FRM1 real 3 5\n1 -0.5 0.5 0 0\n0 0 0 1 0\n0 0 0 0 1\n";
const char* kBasisFrame = "FRM1 real 2 2\n1 0\n0 1\n";
const char* kSignal34 = "FRM1 real 2 1\n3\n4\n";

}  // namespace

TEST_CASE("gen writes a frame that info can read back") {
  Scratch scratch;
  auto gen = run_cli(scratch, "--seed 5 gen --n 3 --r 2 --out " +
                                  scratch.path("f.frm"));
  REQUIRE(gen.exit_code == 0);
  json summary = json::parse(gen.out);
  CHECK(summary["rows"] == 2);
  CHECK(summary["cols"] == 3);

  auto info = run_cli(scratch, "info --in " + scratch.path("f.frm"));
  REQUIRE(info.exit_code == 0);
  json j = json::parse(info.out);
  CHECK(j["rows"] == 2);
  CHECK(j["cols"] == 3);
  CHECK(j["is_frame"] == true);
  CHECK(j["rank"] == 2);
  CHECK(j["lower_bound"].get<double>() > 0.0);
}

TEST_CASE("gen validates its arguments") {
  Scratch scratch;
  auto bad = run_cli(scratch, "gen --n 3 --r 0 --out " + scratch.path("x.frm"));
  CHECK(bad.exit_code == 2);
  auto swapped = run_cli(scratch, "gen --n 2 --r 5 --out " + scratch.path("x.frm"));
  CHECK(swapped.exit_code == 2);
}

TEST_CASE("gen --dual canonical produces a verifiable dual") {
  Scratch scratch;
  auto gen = run_cli(scratch, "--seed 9 gen --n 6 --r 4 --out " +
                                  scratch.path("f.frm") + " --dual canonical");
  REQUIRE(gen.exit_code == 0);
  json summary = json::parse(gen.out);
  CHECK(summary["duality_error"].get<double>() <= 1e-9);
  const std::string dual_path = summary["dual"].get<std::string>();
  CHECK(fs::exists(dual_path));

  auto verify = run_cli(scratch, "verify --frame " + scratch.path("f.frm") +
                                     " --dual " + dual_path);
  REQUIRE(verify.exit_code == 0);
  json v = json::parse(verify.out);
  CHECK(v["is_dual"] == true);
  CHECK(v["is_canonical"] == true);
  CHECK(v["duality_error"].get<double>() <= 1e-9);
}

TEST_CASE("verify rejects a non-dual with exit 5") {
  Scratch scratch;
  write_file(scratch.path("f.frm"), kSmallFrame);
  write_file(scratch.path("junk.frm"), "FRM1 real 2 3\n1 1 1\n1 1 1\n");
  auto verify = run_cli(scratch, "verify --frame " + scratch.path("f.frm") +
                                     " --dual " + scratch.path("junk.frm"));
  CHECK(verify.exit_code == 5);
  json v = json::parse(verify.out);
  CHECK(v["is_dual"] == false);
}

TEST_CASE("reduce writes the reduced dual and a sidecar") {
  Scratch scratch;
  write_file(scratch.path("f.frm"), kSmallFrame);
  write_file(scratch.path("d.frm"), kSmallCanonicalDual);
  auto reduce = run_cli(scratch, "reduce --frame " + scratch.path("f.frm") +
                                     " --dual " + scratch.path("d.frm") +
                                     " --erase 1 --method gram --out " +
                                     scratch.path("v.frm"));
  REQUIRE(reduce.exit_code == 0);
  CHECK(slurp(scratch.path("v.frm")) == "FRM1 real 2 2\n1 0\n0 1\n");
  json sidecar = json::parse(slurp(scratch.path("v.frm.json")));
  CHECK(sidecar["method"] == "gram");
  CHECK(sidecar["erased_indices"] == json::array({1}));
  CHECK(sidecar["duality_residual"].get<double>() <= 1e-12);
}

TEST_CASE("reduce exits 5 when the iterative denominator vanishes") {
  Scratch scratch;
  write_file(scratch.path("x.frm"), kCounterFrame);
  write_file(scratch.path("z.frm"), kCounterDual);
  auto reduce = run_cli(scratch, "reduce --frame " + scratch.path("x.frm") +
                                     " --dual " + scratch.path("z.frm") +
                                     " --erase 1 --method iter --out " +
                                     scratch.path("v.frm"));
  CHECK(reduce.exit_code == 5);
  CHECK(reduce.err.find("denominator") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch.path("v.frm")));
}

TEST_CASE("reduce exits 4 on MRC violations and 2 on bad indices") {
  Scratch scratch;
  write_file(scratch.path("b.frm"), kBasisFrame);
  auto mrc = run_cli(scratch, "reduce --frame " + scratch.path("b.frm") +
                                  " --dual " + scratch.path("b.frm") +
                                  " --erase 1 --method gram --out " +
                                  scratch.path("v.frm"));
  CHECK(mrc.exit_code == 4);
  CHECK(mrc.err.find("minimal redundancy") != std::string::npos);

  write_file(scratch.path("f.frm"), kSmallFrame);
  write_file(scratch.path("d.frm"), kSmallCanonicalDual);
  auto bad = run_cli(scratch, "reduce --frame " + scratch.path("f.frm") +
                                  " --dual " + scratch.path("d.frm") +
                                  " --erase 7 --method gram --out " +
                                  scratch.path("v.frm"));
  CHECK(bad.exit_code == 2);
}

TEST_CASE("reduce --method all emits the equivalence report") {
  Scratch scratch;
  write_file(scratch.path("x.frm"), kCounterFrame);
  write_file(scratch.path("z.frm"), kCounterDual);
  auto all = run_cli(scratch, "reduce --frame " + scratch.path("x.frm") +
                                  " --dual " + scratch.path("z.frm") +
                                  " --erase 1 --method all --out " +
                                  scratch.path("report.json"));
  REQUIRE(all.exit_code == 0);
  json report = json::parse(all.out);
  CHECK(report["methods"]["iterative"]["status"] == "denominator_vanishes");
  CHECK(report["methods"]["gram"]["status"] == "singular_gram");
  CHECK(report["methods"]["operator"]["status"] == "singular_operator");
  CHECK(json::parse(slurp(scratch.path("report.json"))) == report);
}

TEST_CASE("transmit recovers the documented example") {
  Scratch scratch;
  write_file(scratch.path("f.frm"), kSmallFrame);
  write_file(scratch.path("d.frm"), kSmallCanonicalDual);
  write_file(scratch.path("s.frm"), kSignal34);
  auto tr = run_cli(scratch, "transmit --frame " + scratch.path("f.frm") +
                                 " --dual " + scratch.path("d.frm") +
                                 " --erase 1 --method iter --signal " +
                                 scratch.path("s.frm"));
  REQUIRE(tr.exit_code == 0);
  json report = json::parse(tr.out);
  CHECK(report["status"] == "recovered");
  CHECK(report["recon_error_rel"].get<double>() <= 1e-9);
  CHECK(report["signal_norm"].get<double>() == doctest::Approx(5.0));
}

TEST_CASE("transmit exits 4 for basis erasures and 3 for bad signal files") {
  Scratch scratch;
  write_file(scratch.path("b.frm"), kBasisFrame);
  write_file(scratch.path("s.frm"), kSignal34);
  auto mrc = run_cli(scratch, "transmit --frame " + scratch.path("b.frm") +
                                  " --dual " + scratch.path("b.frm") +
                                  " --erase 1 --method gram --signal " +
                                  scratch.path("s.frm"));
  CHECK(mrc.exit_code == 4);
  json report = json::parse(mrc.out);
  CHECK(report["status"] == "mrc_violated");

  write_file(scratch.path("garbage.frm"), "not a matrix\n");
  write_file(scratch.path("f.frm"), kSmallFrame);
  write_file(scratch.path("d.frm"), kSmallCanonicalDual);
  auto bad = run_cli(scratch, "transmit --frame " + scratch.path("f.frm") +
                                  " --dual " + scratch.path("d.frm") +
                                  " --erase 1 --method gram --signal " +
                                  scratch.path("garbage.frm"));
  CHECK(bad.exit_code == 3);
}

TEST_CASE("transmit batch mode emits one JSON object per line") {
  Scratch scratch;
  auto gen = run_cli(scratch, "--seed 12 gen --n 9 --r 5 --out " +
                                  scratch.path("f.frm") + " --dual random");
  REQUIRE(gen.exit_code == 0);
  auto tr = run_cli(scratch, "--seed 3 transmit --frame " + scratch.path("f.frm") +
                                 " --dual " + scratch.path("f.dual.frm") +
                                 " --random-erase 2 --method op "
                                 "--random-signal --trials 4");
  REQUIRE(tr.exit_code == 0);
  std::istringstream lines(tr.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    json row = json::parse(line);
    CHECK(row["status"] == "recovered");
    CHECK(row["recon_error_rel"].get<double>() <= 1e-9);
    ++count;
  }
  CHECK(count == 4);
}

TEST_CASE("bench emits the exact CSV schema and deterministic error columns") {
  Scratch scratch;
  const std::string args = "bench --n 40 --r 25 --k 3 --reps 1 --warmup 0 "
                           "--seed 77 --out ";
  auto first = run_cli(scratch, args + scratch.path("a.csv"));
  REQUIRE(first.exit_code == 0);
  auto second = run_cli(scratch, args + scratch.path("b.csv"));
  REQUIRE(second.exit_code == 0);

  std::string a = slurp(scratch.path("a.csv"));
  REQUIRE(a.rfind("test_id,N,r,k,seed,reps,threads,t1,t2,t3,t4_z1,t5_z1,t4_z2,"
                  "t5_z2,e1,e2,e3,e4_z1,e5_z1,e4_z2,e5_z2,status\n",
                  0) == 0);

  auto columns = [](const std::string& csv) {
    std::vector<std::string> cells;
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);  // header
    std::getline(rows, line);
    std::istringstream cols(line);
    std::string cell;
    while (std::getline(cols, cell, ',')) cells.push_back(cell);
    return cells;
  };
  auto ca = columns(a);
  auto cb = columns(slurp(scratch.path("b.csv")));
  REQUIRE(ca.size() == 22);
  REQUIRE(cb.size() == 22);
  for (size_t i = 0; i < ca.size(); ++i) {
    if (i >= 7 && i <= 13) continue;  // timing columns may differ
    CHECK(ca[i] == cb[i]);
  }
}

TEST_CASE("bench reads JSON config files and streams CSV to stdout") {
  Scratch scratch;
  write_file(scratch.path("cfg.json"),
             R"([{"n": 30, "r": 20, "k": 2, "reps": 1, "warmup": 0},
                 {"n": 20, "r": 20, "k": 1, "reps": 1, "warmup": 0}])");
  auto bench = run_cli(scratch, "bench --config " + scratch.path("cfg.json") +
                                    " --out -");
  REQUIRE(bench.exit_code == 0);
  std::istringstream rows(bench.out);
  std::string header, row1, row2;
  REQUIRE(std::getline(rows, header));
  REQUIRE(std::getline(rows, row1));
  REQUIRE(std::getline(rows, row2));
  CHECK(row2.find("mrc_retry_exhausted") != std::string::npos);

  auto missing = run_cli(scratch, "bench --config missing.json --out -");
  CHECK(missing.exit_code == 3);
}

TEST_CASE("the seed falls back to FRAME_ERASURE_SEED") {
  Scratch scratch;
  auto a = run_cli(scratch, "gen --n 5 --r 3 --out " + scratch.path("a.frm"),
                   "FRAME_ERASURE_SEED=321");
  REQUIRE(a.exit_code == 0);
  auto b = run_cli(scratch, "--seed 321 gen --n 5 --r 3 --out " +
                                scratch.path("b.frm"));
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(scratch.path("a.frm")) == slurp(scratch.path("b.frm")));

  auto c = run_cli(scratch, "gen --n 5 --r 3 --out " + scratch.path("c.frm"),
                   "FRAME_ERASURE_SEED=999");
  CHECK(slurp(scratch.path("a.frm")) != slurp(scratch.path("c.frm")));
}

TEST_CASE("unknown flags exit with the usage code") {
  Scratch scratch;
  auto r = run_cli(scratch, "reduce --bogus 1");
  CHECK(r.exit_code == 2);
  auto sub = run_cli(scratch, "no_such_command");
  CHECK(sub.exit_code == 2);
}
