#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

// Runs the CLI with stderr captured to a file; stdout is discarded.
Run cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(IDPDB_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("idpdb_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// synth + train on a tiny dataset; shared by the cases below.
fs::path trained_run(const std::string& name) {
  const fs::path d = fresh_dir(name);
  const std::string s = d.string();
  REQUIRE(cli("--seed 3 synth -n 8 -o " + s + "/data.csv", d).code == 0);
  const Run t = cli("--seed 3 train --data " + s + "/data.csv --arch 2,4,2 --epochs 20 --batch-size 4 --lr 0.5 --family " +
                        s + "/family",
                    d);
  REQUIRE(t.code == 0);
  CHECK(t.err.find("training accuracy") != std::string::npos);
  return d;
}

}  // namespace

TEST_CASE("synth, train, bound, eval and grid run end to end") {
  const fs::path d = trained_run("e2e");
  const std::string s = d.string();
  CHECK(fs::exists(d / "family"));

  const Run b = cli("bound --family " + s + "/family --tau 0 --workers 2 -o " + s + "/bounds.json", d);
  REQUIRE(b.code == 0);
  CHECK(b.err.find("pop") != std::string::npos);
  CHECK(b.err.find("class 1: beta=") != std::string::npos);

  REQUIRE(cli("eval --family " + s + "/family --bounds " + s + "/bounds.json --inputs " + s + "/data.csv -o " + s +
                  "/eval.csv",
              d)
              .code == 0);
  const auto rows = csv_rows(d / "eval.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"index", "predicted", "label", "path"});

  REQUIRE(cli("grid --family " + s + "/family --bounds " + s + "/bounds.json --resolution 7 -o " + s + "/grid.csv", d)
              .code == 0);
  CHECK(csv_rows(d / "grid.csv").size() == 50);

  for (const char* mode : {"noise", "idp"}) {
    REQUIRE(cli(std::string("baseline --mode ") + mode + " --family " + s + "/family --inputs " + s + "/data.csv -o " +
                    s + "/base.csv",
                d)
                .code == 0);
    CHECK(csv_rows(d / "base.csv").size() == 9);
  }

  // A second bound run keeps the finished classes.
  const Run again = cli("bound --family " + s + "/family --tau 0 -o " + s + "/bounds.json", d);
  CHECK(again.code == 0);
  CHECK(again.err.find("kept bound") != std::string::npos);
}

TEST_CASE("deterministic bound output is byte-identical") {
  const fs::path d = trained_run("det");
  const std::string s = d.string();
  REQUIRE(cli("bound --family " + s + "/family --tau 0 --workers 1 -o " + s + "/a.json", d).code == 0);
  REQUIRE(cli("bound --family " + s + "/family --tau 0 --workers 3 -o " + s + "/b.json", d).code == 0);
  CHECK(slurp(d / "a.json") == slurp(d / "b.json"));
}

TEST_CASE("epsilon only changes noised answers") {
  const fs::path d = trained_run("eps");
  const std::string s = d.string();
  REQUIRE(cli("bound --family " + s + "/family --tau 0 -o " + s + "/bounds.json", d).code == 0);
  REQUIRE(cli("synth -n 200 --seed 11 -o " + s + "/queries.csv", d).code == 0);
  const std::string common = "eval --family " + s + "/family --bounds " + s + "/bounds.json --inputs " + s +
                             "/queries.csv";
  REQUIRE(cli(common + " --epsilon 0 -o " + s + "/e0.csv", d).code == 0);
  REQUIRE(cli(common + " --epsilon 1 -o " + s + "/e1.csv", d).code == 0);
  const auto a = csv_rows(d / "e0.csv"), b = csv_rows(d / "e1.csv");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a[i][3] == b[i][3]);
    if (a[i][3] == "deterministic") CHECK(a[i] == b[i]);
  }
}

TEST_CASE("exit codes") {
  const fs::path d = fresh_dir("codes");
  const std::string s = d.string();

  const Run missing = cli("bound --family " + s + "/nothing", d);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("train") != std::string::npos);

  CHECK(cli("frobnicate", d).code == 2);
  CHECK(cli("synth", d).code == 2);
  CHECK(cli("synth -n 1 -o " + s + "/x.csv", d).code == 2);
  CHECK(cli("baseline --mode sideways --inputs x.csv", d).code == 2);

  std::ofstream(d / "bad.csv") << "x1,x2,label\n0.5,1.5,0\n0.2,0.2,1\n";
  CHECK(cli("train --data " + s + "/bad.csv --family " + s + "/f", d).code == 2);

  const fs::path t = trained_run("codes_t");
  const std::string ts = t.string();
  CHECK(cli("bound --family " + ts + "/family --backend cplex-nope -o " + ts + "/b.json", t).code == 2);
  CHECK(cli("bound --family " + ts + "/family --class 5 -o " + ts + "/b.json", t).code == 2);

  const Run noBounds = cli("eval --family " + ts + "/family --bounds " + ts + "/none.json --inputs " + ts + "/data.csv", t);
  CHECK(noBounds.code == 2);
  CHECK(noBounds.err.find("bound") != std::string::npos);

  const Run timeout = cli("bound --family " + ts + "/family --tau 0 --total-time-limit 1e-9 -o " + ts + "/t.json", t);
  CHECK(timeout.code == 4);
  CHECK(fs::exists(t / "t.json"));
}
