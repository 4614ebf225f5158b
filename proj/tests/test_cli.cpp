#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("wcslab_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  fs::path out = scratch_dir() / "stdout.txt";
  fs::path err = scratch_dir() / "stderr.txt";
  std::string cmd = std::string(WCSLAB_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int rc = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WEXITSTATUS(rc);
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("solve: defaults, JSON schema and residual") {
  fs::path pi_csv = scratch_dir() / "pi.csv";
  CliResult r = run_cli("solve --out " + pi_csv.string());
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.contains("P_on"));
  REQUIRE(j.contains("Lambda"));
  REQUIRE(j.contains("residual"));
  CHECK(j["residual"].get<double>() < 1e-10);
  CHECK(j["P_on"].get<double>() > 0.0);
  CHECK(j["P_on"].get<double>() < 1.0);
  // default scenario: L = 10 levels, M = 1 -> 11 rows, 2 columns
  std::string csv = slurp(pi_csv);
  CHECK(count_lines(csv) == 11);
  CHECK(csv.find(',') != std::string::npos);
}

TEST_CASE("solve: malformed configs exit 2 and name the field") {
  fs::path bad = scratch_dir() / "bad.conf";
  std::ofstream(bad) << "n = 10\nq = 1.5\n";
  CliResult r = run_cli("solve --config " + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("'q'") != std::string::npos);

  std::ofstream(bad) << "frobnicate = 3\n";
  r = run_cli("solve --config " + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("frobnicate") != std::string::npos);

  r = run_cli("solve --set radii=oops");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("radii") != std::string::npos);
}

TEST_CASE("solve: no stations means no throughput") {
  CliResult r = run_cli("solve --set m=0");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["Lambda"].get<double>() == 0.0);
  CHECK(j["P_on"].get<double>() == 0.0);
}

TEST_CASE("overrides change the analytic answer, seeds do not") {
  CliResult a = run_cli("solve");
  CliResult b = run_cli("solve --set q=0.3");
  CHECK(a.out != b.out);
  CliResult s1 = run_cli("solve --seed 1");
  CliResult s2 = run_cli("solve --seed 2");
  CHECK(s1.out == s2.out);
}

TEST_CASE("config file round trip") {
  fs::path conf = scratch_dir() / "scenario.conf";
  std::ofstream(conf) << "# test scenario\nn = 12\nm = 2\nS = 25\nv = 0.8\n"
                      << "q = 0.4\nu = 1\nL = 6\nE = 2\nradii = 0.6, 0.3\n"
                      << "seed = 42\n";
  CliResult r = run_cli("solve --config " + conf.string());
  REQUIRE(r.exit_code == 0);
  CliResult r2 = run_cli(
      "solve --set n=12 --set m=2 --set S=25 --set v=0.8 --set q=0.4 "
      "--set u=1 --set L=6 --set E=2 --set radii=0.6,0.3 --set seed=42");
  CHECK(r.out == r2.out);
}

TEST_CASE("kernel: stochastic CSV dump") {
  fs::path csv_path = scratch_dir() / "kernel.csv";
  CliResult r = run_cli("kernel --out " + csv_path.string());
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["M"].get<int>() == 1);
  CHECK(j["beta"].size() == 3);
  std::string csv = slurp(csv_path);
  REQUIRE(count_lines(csv) == 2);
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    std::stringstream row(line);
    std::string cell;
    double sum = 0.0;
    while (std::getline(row, cell, ',')) sum += std::stod(cell);
    CHECK(sum == Catch::Approx(1.0).margin(1e-10));
  }
  // 17 significant digits survive the round trip
  CHECK(csv.find('.') != std::string::npos);
  CHECK(csv.substr(0, csv.find(',')).size() >= 17);
}

TEST_CASE("intermeeting: table schema") {
  fs::path csv_path = scratch_dir() / "ccdf.csv";
  CliResult r = run_cli("intermeeting --tmax 40 --out " + csv_path.string());
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["spectral_radius"].get<double>() > 0.9);
  std::string csv = slurp(csv_path);
  CHECK(csv.rfind("t,exact,spectral,one_term\n", 0) == 0);
  CHECK(count_lines(csv) == 41);
}

TEST_CASE("limits and bounds emit JSON") {
  CliResult r = run_cli("limits");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["Lambda_infinite"].get<double>() > 0.0);

  r = run_cli("bounds");
  REQUIRE(r.exit_code == 0);
  j = json::parse(r.out);
  CHECK(j["lower"].get<double>() <= j["upper"].get<double>());
}

TEST_CASE("simulate: reproducible outputs and sample dump") {
  fs::path series = scratch_dir() / "series.csv";
  fs::path samples = scratch_dir() / "ti.txt";
  std::string args = "simulate --slots 6000 --warmup 500 --seed 7 --out " +
                     series.string() + " --samples-out " + samples.string();
  CliResult r1 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  std::string series1 = slurp(series), samples1 = slurp(samples);
  CliResult r2 = run_cli(args);
  CHECK(r1.out == r2.out);
  CHECK(slurp(series) == series1);
  CHECK(slurp(samples) == samples1);

  CHECK(series1.rfind("t,active_fraction\n", 0) == 0);
  CHECK(count_lines(series1) == 5501);
  CHECK(count_lines(samples1) > 10);

  json j = json::parse(r1.out);
  CHECK(j["slots"].get<long>() == 6000);
  CHECK(j["min_energy"].get<int>() >= 0);
  CHECK(j["max_energy"].get<int>() <= 10);

  CliResult r3 = run_cli("simulate --slots 6000 --warmup 500 --seed 8");
  json j3 = json::parse(r3.out);
  CHECK(j3["P_on_hat"].get<double>() != j["P_on_hat"].get<double>());
}

TEST_CASE("sweep: ordered CSV with an error column") {
  fs::path csv_path = scratch_dir() / "sweep.csv";
  CliResult r = run_cli("sweep --param v --grid -1,0.5,1.0,1.5 --out " +
                        csv_path.string());
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["points"].get<int>() == 4);
  CHECK(j["failures"].get<int>() == 1);
  std::string csv = slurp(csv_path);
  CHECK(csv.rfind("param,value,M,p_t,p_c,lambda1,P_on,Lambda,Lambda_iid,"
                  "Lambda_inf,Lambda_lower,Lambda_upper,sim_P_on,sim_Lambda,"
                  "error\n",
                  0) == 0);
  REQUIRE(count_lines(csv) == 5);
  // the bad grid point carries a diagnostic, later rows still computed
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  std::getline(ss, line);
  CHECK(line.find("must be >= 0") != std::string::npos);
  std::getline(ss, line);
  CHECK(line.find("0.5") != std::string::npos);

  CliResult missing = run_cli("sweep --param v --grid 0.5,1.0");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("sweep: parallel workers agree with a single worker") {
  fs::path a = scratch_dir() / "sweep1.csv";
  fs::path b = scratch_dir() / "sweep4.csv";
  CliResult r1 = run_cli("sweep --param L --grid 1,2,4,8,16 --out " + a.string());
  CliResult r4 = run_cli("sweep --param L --grid 1,2,4,8,16 --jobs 4 --out " +
                         b.string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r4.exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("validate: smoke run with relaxed tolerances") {
  CliResult r = run_cli("validate --slots 60000 --warmup 2000 --tolerance 4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
  CHECK(r.out.find("analytic P_on") != std::string::npos);
}
