#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using collab::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) v.push_back(cell);
  if (!line.empty() && line.back() == ',') v.emplace_back();
  return v;
}

// Every row has as many cells as the header.
void check_rectangular(const std::string& csv) {
  const auto rows = lines(csv);
  REQUIRE(!rows.empty());
  const auto width = split(rows[0]).size();
  for (const auto& r : rows) CHECK(split(r).size() == width);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> first_row(const std::string& csv) {
  const auto rows = lines(csv);
  const auto head = split(rows.at(0));
  const auto cells = split(rows.at(1));
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < head.size(); ++i) m[head[i]] = cells.at(i);
  return m;
}

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / ("collab-cli-test-" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("plan: decentralized T1 worked example") {
  const auto r = invoke({"plan", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2", "--rho",
                         "0.5"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "task,setting,target,alpha,e1,e2,rho,p_x,p_y,p_xy,objective,method,tie");
  const auto row = first_row(r.out);
  CHECK(row.at("p_y") == "0.5");
  CHECK(row.at("p_xy") == "0.5");
  CHECK(row.at("objective") == "0.857142857");
}

TEST_CASE("plan: centralized T3 is interior and grid-refined") {
  const auto r = invoke({"plan", "--task", "t3", "--setting", "centralized", "--alpha", "2", "--rho", "0.8", "--e1",
                         "2", "--e2", "2"});
  REQUIRE(r.code == 0);
  const auto row = first_row(r.out);
  CHECK(std::stod(row.at("p_x")) > 0);
  CHECK(std::stod(row.at("p_y")) > 0);
  CHECK(std::stod(row.at("p_xy")) > 0);
  CHECK(row.at("method") == "GridRefine");
}

TEST_CASE("plan: jsonl output") {
  const auto r = invoke({"plan", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "inf",
                         "--rho", "0.5", "--format", "jsonl"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(lines(r.out).at(0));
  CHECK(j.at("p_xy").get<double>() == 1.0);
}

TEST_CASE("exit codes") {
  auto r = invoke({"plan", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--rho") != std::string::npos);

  r = invoke({"plan", "--task", "t3", "--setting", "decentralized", "--alpha", "2", "--e1", "0", "--rho", "0.5"});
  CHECK(r.code == 3);

  CHECK(invoke({"plan", "--task", "t9", "--setting", "decentralized", "--alpha", "2", "--e1", "2", "--rho", "0.5"})
            .code == 2);
  CHECK(invoke({"plan", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2", "--rho", "1.5"})
            .code == 2);
  CHECK(invoke({"plan", "--task", "t1", "--setting", "centralized", "--alpha", "2", "--e1", "2", "--rho", "0.5"})
            .code == 2);
  CHECK(invoke({"plan", "--bogus"}).code == 2);
  CHECK(invoke({"sweep", "fig9"}).code == 2);
  CHECK(invoke({"bounds", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2", "--rho", "0.5",
                "--sweep", "p_y", "--range", "0:1"})
            .code == 2);
}

TEST_CASE("bounds: profile minima move with the budget") {
  auto argmin = [](const std::string& e1) {
    const auto r = invoke({"bounds", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", e1,
                           "--rho", "0.5", "--sweep", "p_y", "--range", "0:1:0.01"});
    REQUIRE(r.code == 0);
    check_rectangular(r.out);
    const auto rows = lines(r.out);
    CHECK(rows[0] == "sweep_var,value,crb,feasible");
    double best = 1e300, at = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto c = split(rows[i]);
      if (c[3] != "1") continue;
      const double crb = std::stod(c[2]);
      if (crb < best) best = crb, at = std::stod(c[1]);
    }
    return at;
  };
  CHECK(argmin("inf") == doctest::Approx(0.0));
  CHECK(argmin("2") == doctest::Approx(0.5));
  CHECK(argmin("0.8") == doctest::Approx(0.8));
}

TEST_CASE("simulate: columns, ratio and seed reporting") {
  const std::vector<std::string> base{"simulate", "--task", "t1", "--setting", "decentralized", "--alpha", "2",
                                      "--e1", "2", "--rho", "0.5", "--p-y", "0.5", "--p-xy", "0.5", "--slots",
                                      "500", "--reps", "1000"};
  auto args = base;
  args.insert(args.end(), {"--seed", "7", "--estimator", "delta1"});
  const auto r = invoke(args);
  REQUIRE(r.code == 0);
  check_rectangular(r.out);
  const auto rows = lines(r.out);
  CHECK(rows[0] ==
        "task,setting,target,estimator,p_x,p_y,p_xy,slots,replications,seed,generator,true_value,mean_estimate,"
        "estimate_std_error,empirical_variance_per_slot,variance_std_error,analytic_crb,"
        "analytic_estimator_variance,ratio_to_crb,ratio_to_estimator_variance,replications_excluded,cost_sx,"
        "cost_sy,cost_dc,slack_sx,slack_sy,slack_dc,audit_pass");
  const auto row = first_row(r.out);
  CHECK(std::stod(row.at("ratio_to_crb")) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(row.at("audit_pass") == "1");
  CHECK(row.at("seed") == "7");

  const auto unseeded = invoke(base);
  REQUIRE(unseeded.code == 0);
  CHECK(unseeded.err.find("seed: ") != std::string::npos);
}

TEST_CASE("simulate: planned policy passes the audit") {
  for (const char* rho : {"0.5", "0.9"}) {
    const auto r = invoke({"simulate", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2",
                           "--rho", rho, "--slots", "200", "--reps", "200", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(first_row(r.out).at("audit_pass") == "1");
  }
}

TEST_CASE("config file merges with flags, flags win") {
  const auto dir = temp_dir();
  const auto cfg = dir / "scenario.cfg";
  std::ofstream(cfg) << "task = t1\nsetting = decentralized\nalpha = 2\ne1 = 2\nrho = 0.9\n";
  auto r = invoke({"plan", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(std::stod(first_row(r.out).at("p_xy")) == doctest::Approx(2.0 / 3.0));
  r = invoke({"plan", "--config", cfg.string(), "--rho", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(first_row(r.out).at("p_xy") == "0.5");
  CHECK(invoke({"plan", "--config", (dir / "missing.cfg").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("every figure sweep runs and is rectangular") {
  for (const auto& id : collab::cli::figure_ids()) {
    CAPTURE(id);
    const auto r = invoke({"sweep", id});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() > 2);
    check_rectangular(r.out);
  }
}

TEST_CASE("fig1c breakpoints") {
  const auto r = invoke({"sweep", "fig1c"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "rho,e1,p_y,p_xy,crb,tie");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split(rows[i]);
    const double rho = std::stod(c[0]), e1 = std::stod(c[1]), pxy = std::stod(c[3]);
    if (rho == 0.5) {
      if (e1 < 1) CHECK(pxy == 0.0);
      else if (e1 < 3) CHECK(pxy == doctest::Approx((e1 - 1) / 2).epsilon(1e-9));
      else CHECK(pxy == 1.0);
    }
  }
}

TEST_CASE("outputs are byte-identical across repeats") {
  const auto dir = temp_dir();
  auto twice = [&](std::vector<std::string> args) {
    auto a = args, b = args;
    a.insert(a.end(), {"--out", (dir / "a.csv").string()});
    b.insert(b.end(), {"--out", (dir / "b.csv").string()});
    REQUIRE(invoke(a).code == 0);
    REQUIRE(invoke(b).code == 0);
    const auto sa = slurp(dir / "a.csv");
    CHECK(!sa.empty());
    CHECK(sa == slurp(dir / "b.csv"));
  };
  twice({"simulate", "--task", "t1", "--setting", "decentralized", "--alpha", "2", "--e1", "2", "--rho", "0.5",
         "--slots", "100", "--reps", "100", "--seed", "42"});
  twice({"simulate", "--task", "t3", "--setting", "centralized", "--alpha", "2", "--e1", "2", "--e2", "2", "--rho",
         "0.8", "--slots", "100", "--reps", "100", "--seed", "42", "--workers", "3"});
  twice({"sweep", "fig4b"});
  twice({"sweep", "fig1b", "--format", "jsonl"});
  fs::remove_all(dir);
}

TEST_CASE("the executable forwards to the same entry point") {
  const std::string cmd = std::string(COLLAB_CLI_PATH) +
                          " plan --task t1 --setting decentralized --alpha 2 --e1 2 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
