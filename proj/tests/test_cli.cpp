#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "xxz/cli.hpp"
#include "xxz/errors.hpp"
#include "xxz/json_writer.hpp"

using namespace xxz;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json parse(const std::string& s) { return Json::parse(s); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("xxz_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("gap command reproduces the spin-1/2 closed form") {
  const auto r = call({"gap", "--two-j", "1", "--length", "10", "--delta", "2", "--two-m", "0"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["metadata"]["command"] == "gap");
  const auto& cols = j["payload"]["columns"];
  const auto& row = j["payload"]["rows"][0];
  int gap_col = -1;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == "gap") gap_col = static_cast<int>(i);
  REQUIRE(gap_col >= 0);
  const double gap = row[gap_col].get<double>();
  CHECK(gap == doctest::Approx(1.0 - 0.5 * std::cos(M_PI / 10)).epsilon(1e-12));
  CHECK(std::abs(gap - 0.524472) < 1e-6);
  CHECK(j["diagnostics"]["sectors"][0].contains("zero_threshold"));
  CHECK(j["metadata"]["parameters"]["tol"].get<double>() == 1e-10);
}

TEST_CASE("spin flag and two-j flag are equivalent, and exclusive") {
  const auto a = call({"gap", "--spin", "3/2", "--length", "4", "--delta-inv", "0.5", "--two-m", "2"});
  const auto b = call({"gap", "--two-j", "3", "--length", "4", "--delta-inv", "0.5", "--two-m", "2"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(call({"gap", "--spin", "3/2", "--two-j", "3", "--length", "4", "--delta", "2", "--two-m", "2"}).code == 2);
  CHECK(cli::parse_spin("1/2") == 1);
  CHECK(cli::parse_spin("2") == 4);
  CHECK(cli::parse_spin("4/2") == 4);
  CHECK_THROWS_AS(cli::parse_spin("1/3"), DomainError);
  CHECK_THROWS_AS(cli::parse_spin("x"), DomainError);
  CHECK_THROWS_AS(cli::parse_spin("0"), DomainError);
}

TEST_CASE("usage and domain errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"nonsense"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--delta-inv", "0.5", "--two-m", "0"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "0", "--all-sectors"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "0.5", "--two-m", "0"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "1"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "0", "--format", "xml"}).code == 2);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "0", "--tol", "0.1"}).code == 2);
  CHECK(call({"jacobi", "--delta-inv", "0.5", "--mu", "0", "--r", "0.5"}).code == 2);
  CHECK(call({"figures", "--which", "9"}).code == 2);
  CHECK(call({"gap", "--help"}).code == 0);
}

TEST_CASE("numerical failure exits with 1 and a diagnostic payload") {
  const auto r = call({"jacobi", "--mu", "0", "--delta-inv", "0.95", "--truncation", "10"});
  CHECK(r.code == 1);
  const auto j = parse(r.out);
  CHECK(j["error"]["kind"] == "numerical");
  CHECK(j["metadata"]["command"] == "jacobi");
  CHECK(!r.err.empty());
}

TEST_CASE("curvature table CSV carries the exact rationals") {
  const auto r = call({"curvature", "--table", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(!rows.empty());
  CHECK(rows[0][0] == "two_j");
  const std::map<std::pair<std::string, std::string>, std::string> expect = {
      {{"3", "0"}, "11/12"}, {{"2", "0"}, "-1/3"},  {{"4", "0"}, "7/3"},   {{"4", "1"}, "-1/4"},
      {{"4", "2"}, "-46/5"}, {{"5", "0"}, "97/24"}, {{"5", "1"}, "4/3"},   {{"5", "2"}, "-39/20"},
      {{"6", "0"}, "91/15"}, {{"6", "1"}, "3"},     {{"6", "2"}, "0"},     {{"6", "3"}, "-26/3"},
      {{"3", "1"}, "-9/4"}};
  std::size_t found = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto it = expect.find({rows[i][0], rows[i][2]});
    if (it == expect.end()) {
      CHECK(rows[i][3] == "inf");
      continue;
    }
    CHECK(rows[i][3] == it->second);
    ++found;
  }
  CHECK(found == expect.size());
}

TEST_CASE("single curvature entry with a finite-difference check") {
  const auto r = call({"curvature", "--spin", "3/2", "--n", "0", "--length", "6", "--h", "0.02"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  const auto& row = j["payload"]["rows"][0];
  CHECK(row[3] == "11/12");
  const double richardson = row[9].get<double>();
  CHECK(std::abs(richardson - 11.0 / 12.0) < 0.05);
  CHECK(call({"curvature", "--two-j", "1", "--n", "0"}).code == 0);
  CHECK(call({"curvature", "--two-j", "3"}).code == 2);
}

TEST_CASE("optimal-delta reproduces the interior maximum") {
  const auto r = call({"optimal-delta", "--truncation", "500"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(std::abs(j["diagnostics"]["delta_inv"].get<double>() - 0.49585399) < 1e-3);
  CHECK(j["metadata"]["parameters"]["truncation"] == 500);
}

TEST_CASE("reruns are byte-identical and timing is opt-in") {
  const std::vector<std::string> args = {"gap", "--two-j", "2", "--length", "8", "--delta", "2", "--all-sectors"};
  const auto a = call(args);
  const auto b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("wall_time") == std::string::npos);
  auto timed = args;
  timed.push_back("--timing");
  CHECK(call(timed).out.find("wall_time") != std::string::npos);
}

TEST_CASE("threads do not change the output") {
  const auto one = call({"spectrum", "--two-j", "2", "--length", "9", "--delta", "3", "--two-m", "0", "--k", "3",
                         "--threads", "1"});
  const auto two = call({"spectrum", "--two-j", "2", "--length", "9", "--delta", "3", "--two-m", "0", "--k", "3",
                         "--threads", "2"});
  REQUIRE(one.code == 0);
  auto strip = [](std::string s) {
    const auto p = s.find("\"threads\"");
    return s.erase(p, s.find('\n', p) - p);
  };
  CHECK(strip(one.out) == strip(two.out));
}

TEST_CASE("thread count falls back to the environment") {
  setenv("XXZ_GAP_THREADS", "3", 1);
  const auto r = call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "0"});
  REQUIRE(r.code == 0);
  CHECK(parse(r.out)["metadata"]["parameters"]["threads"] == 3);
  setenv("XXZ_GAP_THREADS", "lots", 1);
  CHECK(call({"gap", "--two-j", "1", "--length", "4", "--delta", "2", "--two-m", "0"}).code == 2);
  unsetenv("XXZ_GAP_THREADS");
}

TEST_CASE("dense and sector guardrails") {
  const std::vector<std::string> big = {"spectrum", "--two-j", "2", "--length", "10", "--delta", "2", "--two-m", "0",
                                        "--k", "0"};
  const auto r = call(big);
  CHECK(r.code == 2);
  CHECK(r.err.find("--force") != std::string::npos);
  CHECK(call({"gap", "--two-j", "4", "--length", "12", "--delta", "2", "--two-m", "0"}).code == 2);
}

TEST_CASE("spectrum in full mode matches lowest-k mode") {
  const auto full = parse(call({"spectrum", "--two-j", "2", "--length", "6", "--delta", "2", "--two-m", "0", "--k", "0"}).out);
  const auto low = parse(call({"spectrum", "--two-j", "2", "--length", "6", "--delta", "2", "--two-m", "0", "--k", "3"}).out);
  const auto& fr = full["payload"]["rows"];
  const auto& lr = low["payload"]["rows"];
  REQUIRE(lr.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(fr[i][2].get<double>() == doctest::Approx(lr[i][2].get<double>()).epsilon(1e-10));
}

TEST_CASE("sos-bound accepts the sector as N or as two_m") {
  const auto a = call({"sos-bound", "--two-j", "2", "--length", "4", "--n-down", "4", "--delta-inv", "0.5"});
  const auto b = call({"sos-bound", "--two-j", "2", "--length", "4", "--two-m", "0", "--delta-inv", "0.5"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto scan = parse(call({"sos-bound", "--two-j", "2", "--length", "4", "--n-down", "4", "--grid", "4"}).out);
  CHECK(scan["payload"]["rows"].size() == 4);
  CHECK(call({"sos-bound", "--two-j", "2", "--length", "4", "--n-down", "4", "--two-m", "0"}).code == 2);
}

TEST_CASE("jacobi at the symmetric phase has a zero mode") {
  const auto r = call({"jacobi", "--r", "0.5", "--delta-inv", "0.5"});
  REQUIRE(r.code == 0);
  const auto row = parse(r.out)["payload"]["rows"][0];
  CHECK(std::abs(row[4].get<double>()) < 1e-10);
  CHECK(row[5].get<double>() > 0.1);
  const auto m = parse(call({"jacobi", "--mu", "0", "--delta-inv", "0.5"}).out)["payload"]["rows"][0];
  CHECK(m[1].get<double>() == doctest::Approx(0.5));
  CHECK(m[5].get<double>() == doctest::Approx(row[5].get<double>()).epsilon(1e-9));
}

TEST_CASE("output file and CSV format") {
  const auto dir = scratch("out");
  std::filesystem::create_directories(dir);
  const auto file = (dir / "gap.csv").string();
  const auto r = call({"gap", "--two-j", "1", "--length", "6", "--delta", "2", "--all-sectors", "--format", "csv",
                       "--output", file});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream is(file);
  std::stringstream buf;
  buf << is.rdbuf();
  const auto rows = csv_rows(buf.str());
  CHECK(rows[0][0] == "two_m");
  CHECK(rows.size() == 1 + 5);
  CHECK(buf.str().find("# tol=") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("figures write a CSV and a sidecar per figure") {
  const auto dir = scratch("figs");
  const auto r = call({"figures", "--which", "5", "--out-dir", dir.string(), "--grid", "5"});
  REQUIRE(r.code == 0);
  std::ifstream side(dir / "figure5.json");
  const auto meta = Json::parse(side);
  CHECK(meta["parameters"]["sites"] == 50);
  std::ifstream csv(dir / "figure5.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  const auto rows = csv_rows(buf.str());
  CHECK(rows.size() == 1 + meta["rows"].get<std::size_t>());
  CHECK(rows.size() == 1 + 4 * 50);
  // Lowest coupling-matrix eigenvalue is the zero mode.
  CHECK(std::abs(std::stod(rows[1][3])) < 1e-10);
  std::filesystem::remove_all(dir);
}
