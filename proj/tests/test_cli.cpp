#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "superbroadcast/cli.hpp"

namespace cli = superbroadcast::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

using Row = std::vector<std::string>;

std::vector<Row> csv(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    Row row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

// count of significant digits in a plain or exponent decimal
int significant_digits(const std::string& s) {
  std::string mant = s.substr(0, s.find_first_of("eE"));
  std::string digits;
  for (char ch : mant)
    if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
  const auto first = digits.find_first_not_of('0');
  return first == std::string::npos ? 0 : static_cast<int>(digits.size() - first);
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("superbroadcast_test_" + name);
}

}  // namespace

TEST_CASE("range parsing") {
  CHECK(cli::parse_range("5..9").values() == std::vector<int>{5, 6, 7, 8, 9});
  CHECK(cli::parse_range("10..100:30").values() == std::vector<int>{10, 40, 70, 100});
  CHECK(cli::parse_range("7..7").values() == std::vector<int>{7});
  CHECK_THROWS_AS(cli::parse_range("9..5"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_range("1..5:0"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_range("a..5"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_range("5"), std::invalid_argument);
}

TEST_CASE("number formatting") {
  CHECK(cli::format_number(0.786796092987234) == "0.786796092987");
  CHECK(cli::format_number(1.0) == "1");
  CHECK(significant_digits(cli::format_number(2.0 / 3.0)) == 12);
  CHECK(significant_digits(cli::format_number(1.0 / 3.0 * 1e-7)) == 12);
}

TEST_CASE("scaling") {
  const auto r = run({"scaling", "--n", "5", "--m", "9", "--r-min", "0.01", "--r-max", "0.2", "--steps", "5"});
  REQUIRE(r.code == cli::kSuccess);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == Row{"n", "m", "r", "r_prime", "p"});
  CHECK(rows[1][2] == "0.01");
  CHECK(rows[5][2] == "0.2");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    CHECK(std::stod(rows[i][4]) > 1.0);
    CHECK(significant_digits(rows[i][4]) <= 12);
    CHECK(std::abs(std::stod(rows[i][3]) / std::stod(rows[i][2]) - std::stod(rows[i][4])) < 1e-10);
  }
}

TEST_CASE("scaling over an output range is ordered in M") {
  const auto r = run({"scaling", "--n", "5", "--m-range", "5..9", "--steps", "11"});
  REQUIRE(r.code == cli::kSuccess);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 1 + 5 * 11);
  std::map<std::string, std::map<int, double>> by_r;
  for (std::size_t i = 1; i < rows.size(); ++i) by_r[rows[i][2]][std::stoi(rows[i][1])] = std::stod(rows[i][4]);
  for (const auto& [rv, ps] : by_r) {
    if (rv == "0") continue;
    for (int m = 6; m <= 9; ++m) CHECK(ps.at(m) < ps.at(m - 1));
  }
}

TEST_CASE("figure2 panels") {
  const auto r = run({"figure2", "--steps", "6"});
  REQUIRE(r.code == cli::kSuccess);
  const auto rows = csv(r.out);
  CHECK(rows[0] == Row{"panel", "n", "m", "r", "p"});
  std::map<std::string, std::map<int, double>> adjacent, fixed;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][3] == "0") continue;
    if (rows[i][0] == "adjacent") {
      CHECK(std::stoi(rows[i][2]) == std::stoi(rows[i][1]) + 1);
      adjacent[rows[i][3]][std::stoi(rows[i][1])] = std::stod(rows[i][4]);
    } else {
      REQUIRE(rows[i][0] == "fixed_n");
      CHECK(rows[i][1] == "5");
      fixed[rows[i][3]][std::stoi(rows[i][2])] = std::stod(rows[i][4]);
    }
  }
  REQUIRE(adjacent.size() == 5);
  for (const auto& [rv, ps] : adjacent) {
    REQUIRE(ps.size() == 10);
    double prev = 0.0;
    for (const auto& [n, p] : ps) {
      CHECK(p > prev);
      prev = p;
    }
  }
  REQUIRE(fixed.size() == 5);
  for (const auto& [rv, ps] : fixed) {
    double prev = 2.0;
    for (const auto& [m, p] : ps) {
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("threshold examples") {
  auto a = run({"threshold", "--n", "4", "--m", "5"});
  REQUIRE(a.code == cli::kSuccess);
  auto rows = csv(a.out);
  CHECK(rows[0] == Row{"n", "m", "r_star"});
  CHECK(std::abs(std::stod(rows[1][2]) - 0.787) < 1e-3);

  CHECK(csv(run({"threshold", "--n", "2", "--m", "3"}).out)[1][2] == "none");
  CHECK(csv(run({"threshold", "--n", "5", "--m", "22"}).out)[1][2] == "none");

  const auto range = csv(run({"threshold", "--n", "4", "--m-range", "5..8"}).out);
  REQUIRE(range.size() == 5);
  CHECK(range[3][2] != "none");
  CHECK(range[4][2] == "none");
}

TEST_CASE("mstar examples") {
  CHECK(csv(run({"mstar", "--n", "4"}).out)[1] == Row{"4", "7"});
  CHECK(csv(run({"mstar", "--n", "5"}).out)[1] == Row{"5", "21"});
  CHECK(csv(run({"mstar", "--n", "6", "--cap", "200"}).out)[1] == Row{"6", "≥200"});
  CHECK(csv(run({"mstar", "--n", "3"}).out)[1] == Row{"3", "none"});
}

TEST_CASE("figure3 rows") {
  const auto r = run({"figure3", "--n-range", "4..6"});
  REQUIRE(r.code == cli::kSuccess);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == Row{"n", "gap_adjacent", "gap_maximal", "m_star"});
  CHECK(std::abs(std::stod(rows[1][1]) - 0.213) < 1e-3);
  CHECK(rows[1][3] == "7");
  CHECK(rows[2][3] == "21");
  CHECK(rows[3][3] == "≥200");
}

TEST_CASE("optimal-map") {
  const auto r = run({"optimal-map", "--n", "3", "--m", "4", "--r", "0.5"});
  REQUIRE(r.code == cli::kSuccess);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][3] == "1/2");
  CHECK(rows[1][4] == "2");
  CHECK(rows[1][5] == "3/2");
  CHECK(rows[2][5] == "1/2");
  CHECK(rows[1].back() == "yes");
}

TEST_CASE("verify") {
  const auto ok = run({"verify", "--n", "2", "--m", "3"});
  CHECK(ok.code == cli::kSuccess);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("all checks passed") != std::string::npos);

  const auto bad = run({"verify", "--n", "2", "--m", "3", "--inject-fault"});
  CHECK(bad.code == cli::kVerificationFailed);
  CHECK(bad.out.find("FAIL trace-preservation") != std::string::npos);

  const auto one = run({"verify", "--n", "1", "--m", "2"});
  CHECK(one.code == cli::kSuccess);
  CHECK(one.out.find("no-broadcasting confirmed") != std::string::npos);
}

TEST_CASE("invalid arguments exit with 2") {
  const std::vector<std::vector<std::string>> bad{
      {},
      {"bogus"},
      {"threshold", "--n", "4", "--m", "4"},
      {"threshold", "--n", "4"},
      {"threshold", "--n", "4", "--m", "5", "--tol", "0"},
      {"scaling", "--n", "4", "--m", "5", "--r-min", "0.5", "--r-max", "0.2"},
      {"scaling", "--n", "4", "--m", "5", "--steps", "1"},
      {"scaling", "--n", "0", "--m", "5"},
      {"scaling", "--n", "4", "--m-range", "9..5"},
      {"mstar", "--n", "4", "--cap", "3"},
      {"verify", "--n", "0", "--m", "3"},
      {"verify", "--n", "2"},
      {"scaling", "--n", "4", "--m", "5", "--unknown"},
  };
  for (const auto& args : bad) {
    const auto r = run(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    INFO(joined);
    CHECK(r.code == cli::kInvalidArguments);
    CHECK(r.out.empty());
  }
}

TEST_CASE("--out writes atomically and only on success") {
  const auto good = temp_path("good.csv");
  const auto bad = temp_path("bad.csv");
  fs::remove(good);
  fs::remove(bad);

  auto r = run({"threshold", "--n", "4", "--m", "5", "--out", good.string()});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(r.out.empty());
  std::ifstream in(good);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == run({"threshold", "--n", "4", "--m", "5"}).out);

  r = run({"threshold", "--n", "4", "--m", "3", "--out", bad.string()});
  CHECK(r.code == cli::kInvalidArguments);
  CHECK_FALSE(fs::exists(bad));

  // a failing run leaves an earlier file untouched
  r = run({"threshold", "--n", "4", "--m", "3", "--out", good.string()});
  CHECK(r.code == cli::kInvalidArguments);
  std::ifstream again(good);
  std::stringstream kept;
  kept << again.rdbuf();
  CHECK(kept.str() == text.str());

  for (const auto& entry : fs::directory_iterator(fs::temp_directory_path()))
    CHECK(entry.path().filename().string().find("superbroadcast_test_bad") == std::string::npos);
  fs::remove(good);
}

TEST_CASE("reruns are byte-identical") {
  const std::vector<std::vector<std::string>> cmds{
      {"scaling", "--n", "6", "--m-range", "7..9", "--steps", "21"},
      {"figure3", "--n-range", "4..12"},
      {"verify", "--n", "3", "--m", "4", "--seed", "42"},
      {"optimal-map", "--n", "4", "--m", "6"},
  };
  for (const auto& args : cmds) {
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == cli::kSuccess);
    CHECK(a.out == b.out);
  }
}
