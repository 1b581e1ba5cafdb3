#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "qtwist/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run qtwist_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qtwist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = qtwist::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

json error_record(const std::string& err) {
  const auto all = lines(err);
  REQUIRE(!all.empty());
  return json::parse(all.back());
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qtwist_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("discriminants lists F(N) one per line") {
  auto r = qtwist_run({"discriminants", "--N", "10", "--quiet"});
  CHECK(r.code == 0);
  CHECK(lines(r.out) == std::vector<std::string>{"-8", "-7", "-4", "-3", "1", "5", "8"});

  r = qtwist_run({"discriminants", "--N", "1", "--quiet"});
  CHECK(r.out == "1\n");
}

TEST_CASE("discriminants summary goes to stderr for stdout output") {
  const auto r = qtwist_run({"discriminants", "--N", "100"});
  CHECK(r.code == 0);
  CHECK(r.err.find("count=62") != std::string::npos);
}

TEST_CASE("sweep csv for a tiny family") {
  const auto r = qtwist_run({"sweep", "--N", "10", "--Y", "3", "--quiet"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].rfind("# config ", 0) == 0);
  const auto config = json::parse(rows[0].substr(9));
  CHECK(config["N"] == 10);
  CHECK(config["Y"] == 3.0);
  CHECK(rows[1] == "D,re,im");
  const auto d5 = split(rows[7]);
  CHECK(d5[0] == "5");
  CHECK(std::stod(d5[1]) == doctest::Approx(-0.712778).epsilon(1e-5));
  CHECK(std::stod(d5[2]) == 0.0);
}

TEST_CASE("sweep with Y = 0 gives zeros") {
  const auto r = qtwist_run({"sweep", "--N", "30", "--Y", "0", "--quiet", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["values"].size() == 20);
  for (const auto& v : doc["values"]) {
    CHECK(v["re"] == 0.0);
    CHECK(v["im"] == 0.0);
  }
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  const std::vector<std::string> base{"sweep", "--N", "3000", "--t", "0.7", "--quiet"};
  auto with = [&](const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads});
    return qtwist_run(args).out;
  };
  const auto one = with("1");
  CHECK(one == with("1"));
  CHECK(one == with("3"));
  qtwist::set_thread_count(0);
}

TEST_CASE("csv numbers round-trip") {
  const auto r = qtwist_run({"sweep", "--N", "200", "--t", "0.3", "--quiet"});
  const auto j = json::parse(qtwist_run({"sweep", "--N", "200", "--t", "0.3", "--quiet", "--format", "json"}).out);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == j["values"].size() + 2);
  for (std::size_t i = 0; i < j["values"].size(); ++i) {
    const auto cells = split(rows[i + 2]);
    CHECK(std::stod(cells[1]) == j["values"][i]["re"].get<double>());
    CHECK(std::stod(cells[2]) == j["values"][i]["im"].get<double>());
  }
}

TEST_CASE("moments against the exact model moments") {
  const auto r = qtwist_run({"moments", "--N", "10000", "--Y", "4", "--pairs", "1,0;1,1", "--quiet"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc["moments"].size() == 2);
  const auto& first = doc["moments"][0];
  CHECK(first["j"] == 1);
  CHECK(first["l"] == 0);
  CHECK(first["exact_method"] == "enumeration");
  CHECK(first["exact_re"].get<double>() == doctest::Approx(0.115525).epsilon(1e-5));
  CHECK(first["abs_diff"].get<double>() < 1e-3);
  CHECK(doc["config"]["pairs"] == "1,0;1,1");
}

TEST_CASE("moments fall back to Monte Carlo beyond the budget") {
  const auto r = qtwist_run({"moments", "--N", "1000", "--Y", "50", "--pairs", "2,2", "--budget", "100",
                             "--samples", "2000", "--quiet"});
  REQUIRE(r.code == 0);
  const auto rec = json::parse(r.out)["moments"][0];
  CHECK(rec["exact_method"] == "monte-carlo");
  CHECK(rec["stderr"].get<double>() > 0.0);
}

TEST_CASE("moment order (0,0) is a usage error") {
  const auto r = qtwist_run({"moments", "--N", "100", "--pairs", "0,0", "--quiet"});
  CHECK(r.code == qtwist::cli::kUsageError);
  CHECK(error_record(r.err)["error"] == "usage");
  CHECK(r.out.empty());
}

TEST_CASE("charfn equals 1 at the origin") {
  const auto r = qtwist_run({"charfn", "--N", "500", "--P", "2000", "--grid", "5", "--quiet"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2 + 25);
  CHECK(rows[1] == "u,v,emp_re,emp_im,model_re,model_im");
  CHECK(rows[2 + 12] == "0,0,1,0,1,0");
}

TEST_CASE("density of the real model passes its checks") {
  const auto path = scratch("density.csv");
  fs::remove(path);
  const auto r = qtwist_run({"density", "--P", "20000", "--out", path.string(), "--quiet"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mass") != std::string::npos);
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  const auto rows = lines(body.str());
  CHECK(rows.size() == 2 + 401);
  CHECK(rows[1] == "x,y,density");
  fs::remove(path);
}

TEST_CASE("density that has not decayed is rejected") {
  const auto r = qtwist_run({"density", "--P", "2000", "--U", "1", "--grid", "11", "--quiet"});
  CHECK(r.code == qtwist::cli::kRuntimeError);
  CHECK(error_record(r.err)["error"] == "truncation");
}

TEST_CASE("discrepancy report") {
  const auto r = qtwist_run({"discrepancy", "--N", "2000", "--samples", "2000", "--model-Y", "1000", "--quiet"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["dimension"] == 1);
  CHECK(doc["sup_cdf_diff"].get<double>() > 0.0);
  CHECK(doc["sup_cdf_diff"].get<double>() < 1.0);
  CHECK(doc["rect_bound"].get<double>() == 4.0 * doc["sup_cdf_diff"].get<double>());
  CHECK(doc["used_model"] == 2000);
}

TEST_CASE("minvalues schema") {
  const auto r = qtwist_run({"minvalues", "--N", "5000", "--format", "csv", "--quiet"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == "N,m_N,psi,eta,share");
  const auto cells = split(rows[2]);
  CHECK(cells[0] == "5000");
  CHECK(std::stod(cells[1]) >= 0.0);
  CHECK(std::stoul(cells[2]) >= 1);

  const auto explicit_eta = json::parse(qtwist_run({"minvalues", "--N", "5000", "--eta", "1e-9", "--quiet"}).out);
  CHECK(explicit_eta["eta"] == 1e-9);
  CHECK(explicit_eta["psi"] == 0);
}

TEST_CASE("diagnostics") {
  const auto r = qtwist_run({"diagnostics", "--X", "1000", "--P", "1000000", "--quiet"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["abs_sum"].get<double>() == doctest::Approx(doc["abs_comparator"].get<double>()).epsilon(0.25));
  CHECK(doc["hypothesis_h"].size() == 3);

  const auto bad = qtwist_run({"diagnostics", "--X", "1000", "--P", "100", "--quiet"});
  CHECK(bad.code == qtwist::cli::kRuntimeError);
  CHECK(error_record(bad.err)["error"] == "domain");
}

TEST_CASE("usage errors") {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {"sweep", "--N", "0"},
           {"sweep", "--N", "ten"},
           {"sweep", "--format", "xml"},
           {"frobnicate"},
           {},
       }) {
    const auto r = qtwist_run(args);
    CHECK(r.code == qtwist::cli::kUsageError);
    CHECK(error_record(r.err)["error"] == "usage");
  }
}

TEST_CASE("help exits successfully") {
  const auto r = qtwist_run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("discriminants") != std::string::npos);
}

TEST_CASE("missing Satake data is reported") {
  const auto path = scratch("short.satake");
  std::ofstream(path) << "#degree 1 theta 0\n2 1 0\n3 1 0\n";
  const auto r = qtwist_run({"sweep", "--N", "100", "--Y", "30", "--provider", path.string(), "--quiet"});
  CHECK(r.code == qtwist::cli::kRuntimeError);
  const auto record = error_record(r.err);
  CHECK(record["error"] == "missing-data");
  CHECK(record["command"] == "sweep");
  CHECK(r.out.empty());
}

TEST_CASE("an unwritable output leaves nothing behind") {
  const auto dir = scratch("no_such_dir");
  fs::remove_all(dir);
  const auto target = dir / "out.csv";
  const auto r = qtwist_run({"sweep", "--N", "10", "--out", target.string(), "--quiet"});
  CHECK(r.code == qtwist::cli::kRuntimeError);
  CHECK(error_record(r.err)["error"] == "io");
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("output files are complete and replace earlier ones") {
  const auto target = scratch("sweep.csv");
  std::ofstream(target) << "stale\n";
  const auto r = qtwist_run({"sweep", "--N", "10", "--Y", "3", "--out", target.string(), "--quiet"});
  REQUIRE(r.code == 0);
  std::ifstream in(target);
  std::stringstream body;
  body << in.rdbuf();
  CHECK(body.str() == qtwist_run({"sweep", "--N", "10", "--Y", "3", "--quiet"}).out);
  fs::path partial = target;
  partial += ".partial";
  CHECK_FALSE(fs::exists(partial));
  fs::remove(target);
}

TEST_CASE("config file values are overridden by flags") {
  const auto path = scratch("run.ini");
  std::ofstream(path) << "N = 500\nY = 7\nt = 0.3\n";
  const auto r = qtwist_run({"sweep", "--config", path.string(), "--N", "20", "--quiet", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto config = json::parse(r.out)["config"];
  CHECK(config["N"] == 20);
  CHECK(config["Y"] == 7.0);
  CHECK(config["t"] == 0.3);
  CHECK(config["provider"] == "trivial");
}

#ifdef QTWIST_EXE
TEST_CASE("the installed executable reports exit codes") {
  const auto out = scratch("exe.txt");
  const std::string exe = QTWIST_EXE;
  CHECK(std::system((exe + " discriminants --N 10 --quiet > " + out.string()).c_str()) == 0);
  std::ifstream in(out);
  std::stringstream body;
  body << in.rdbuf();
  CHECK(lines(body.str()).size() == 7);
  const int status = std::system((exe + " sweep --N 0 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(status) == qtwist::cli::kUsageError);
  fs::remove(out);
}
#endif
