#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef KCM_CLI_PATH
#error "KCM_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = std::string(std::tmpnam(nullptr)) + ".out";
  const std::string cmd =
      std::string(KCM_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  std::remove(out_path.c_str());
  return r;
}

std::string write_csv(const std::string& contents) {
  const std::string path = std::string(std::tmpnam(nullptr)) + ".csv";
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("bogus-subcommand").exit_code == 1);
  CHECK(run_cli("simulate").exit_code == 1);  // missing required flags
  const auto r = run_cli("simulate --dgp dgp1 --stat nope --reps 1");
  CHECK(r.exit_code == 1);
}

TEST_CASE("data errors exit with code 2") {
  const auto missing = run_cli("test /no/such/file.csv --stat basic");
  CHECK(missing.exit_code == 2);

  const auto bad_path = write_csv("y,x1\n1,2\n3,oops\n");
  const auto bad = run_cli("test " + bad_path + " --stat basic");
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("row 3") != std::string::npos);
  std::remove(bad_path.c_str());

  // n = q + 1: pipeline precondition failure.
  const auto tiny_path = write_csv("y,x1,x2\n1,2,3\n2,3,4\n3,4,5\n");
  const auto tiny = run_cli("test " + tiny_path + " --stat basic");
  CHECK(tiny.exit_code == 2);
  std::remove(tiny_path.c_str());
}

TEST_CASE("simulate emits the aggregate table") {
  const auto r = run_cli(
      "simulate --dgp dgp1 --n 80 --q 3 --reps 2 --boot 15 --stat basic "
      "--stat gp --seed 5 --threads 2");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("statistic,N,q,dgp,", 0) == 0);
  // header + 2 kinds
  int lines = 0;
  for (char c : r.output) lines += (c == '\n') ? 1 : 0;
  CHECK(lines == 3);

  const auto multi = run_cli(
      "simulate --dgp dgp1 --dgp dgp4 --n 80 --q 3 --reps 2 --boot 15 "
      "--stat basic --seed 5");
  REQUIRE(multi.exit_code == 0);
  lines = 0;
  for (char c : multi.output) lines += (c == '\n') ? 1 : 0;
  CHECK(lines == 3);  // shared header, one row per dgp
}

TEST_CASE("test subcommand emits outcome JSON") {
  std::ostringstream csv;
  csv << "y,x1,x2,x3\n";
  // Deterministic synthetic rows; the response is nonlinear in x1.
  for (int i = 0; i < 50; ++i) {
    const double x1 = 0.1 * i;
    const double x2 = std::sin(0.37 * i);
    const double x3 = (i % 7) * 0.25;
    const double y = 1.0 + 0.5 * x1 + 0.2 * x2 - 0.1 * x3 + 0.3 * x1 * x1;
    csv << y << ',' << x1 << ',' << x2 << ',' << x3 << '\n';
  }
  const auto path = write_csv(csv.str());
  const auto r = run_cli("test " + path +
                         " --stat basic --stat icm --boot 20 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"results\"") != std::string::npos);
  CHECK(r.output.find("\"statistic\": \"basic\"") != std::string::npos);
  CHECK(r.output.find("\"p_value\"") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("sweep emits the wide power table") {
  const auto r = run_cli(
      "sweep --dgp dgp4 --n 60 --q 3 --reps 2 --boot 10 --stat basic "
      "--J-values 2,5 --seed 9");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("J,basic", 0) == 0);
  int lines = 0;
  for (char c : r.output) lines += (c == '\n') ? 1 : 0;
  CHECK(lines == 3);
}

TEST_CASE("--out writes to a file") {
  const std::string out_path = std::string(std::tmpnam(nullptr)) + ".csv";
  const auto r = run_cli(
      "simulate --dgp dgp1 --n 60 --q 3 --reps 1 --boot 10 --stat basic "
      "--out " + out_path);
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out_path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("statistic,", 0) == 0);
  std::remove(out_path.c_str());
}
