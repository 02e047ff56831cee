#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "nsfe/error.hpp"
#include "nsfe/io.hpp"
#include "nsfe/random.hpp"

using namespace nsfe;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("nsfe_test_io_" + name)).string();
}

}  // namespace

TEST_CASE("parse_theta reads one value per line") {
  const auto t = parse_theta("1.5\n-2\n0\n3e-4\n");
  REQUIRE(t.size() == 4);
  CHECK(t[0] == 1.5);
  CHECK(t[1] == -2.0);
  CHECK(t[2] == 0.0);
  CHECK(t[3] == 3e-4);
  CHECK(parse_theta("7\n8").size() == 2);
  CHECK(parse_theta("").size() == 0);
}

TEST_CASE("parse_theta reports the 1-based line of a bad entry") {
  try {
    parse_theta("1\n2\nabc\n4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_theta("1\n\n3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_theta("1.0x\n"), ParseError);
  CHECK_THROWS_AS(parse_theta("inf\n"), ParseError);
}

TEST_CASE("format_theta round-trips bit-exactly") {
  const NormalStream s(5);
  std::vector<double> v(500);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.normal(i) * std::pow(10.0, double(i % 40) - 20);
  v.push_back(0.0);
  v.push_back(-0.0);
  v.push_back(5e-324);
  const ThetaVector t(v);
  const std::string text = format_theta(t);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
  const ThetaVector back = parse_theta(text);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
}

TEST_CASE("theta files") {
  const std::string path = temp_path("theta.txt");
  write_theta_file(path, ThetaVector({1.0, 0.25, -3.0}));
  CHECK(read_text_file(path) == "1\n0.25\n-3\n");
  CHECK(read_theta_file(path).size() == 3);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_theta_file(temp_path("missing/none.txt")), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x/y.txt", "a"), IoError);
}

TEST_CASE("parse_config accepts key=value text") {
  const auto cfg = parse_config("# comment\nd=100\ns = 5\neps=0.5\ngamma=1.5\n");
  CHECK(cfg == ProblemConfig(100, 5, 0.5, 1.5));
  CHECK(cfg.c() == ProblemConfig::kDefaultC);
  CHECK(parse_config("d=4\ns=4\neps=1\ngamma=2\nc=0.005\n").c() == 0.005);
  CHECK(parse_config(config_to_key_value(cfg)) == cfg);
}

TEST_CASE("parse_config accepts JSON") {
  const auto cfg = parse_config(R"({"d": 64, "s": 64, "eps": 1, "gamma": 2, "c": 0.01})");
  CHECK(cfg == ProblemConfig(64, 64, 1.0, 2.0, 0.01));
  CHECK(parse_config(config_to_json(cfg)) == cfg);
  CHECK(config_to_json(cfg) == R"({"d":64,"s":64,"eps":1.0,"gamma":2.0,"c":0.01})");
}

TEST_CASE("parse_config errors") {
  CHECK_THROWS_AS(parse_config("d=10\ns=2\neps=1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("d=10\ns=2\neps=1\ngamma=1\nfoo=3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("d=ten\ns=2\neps=1\ngamma=1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("d 10\n"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"d": 10, "s": 2})"), ParseError);
  CHECK_THROWS_AS(parse_config("{not json"), ParseError);
  CHECK_THROWS_AS(parse_config("d=10\ns=20\neps=1\ngamma=1\n"), InvalidParameter);
}

TEST_CASE("format_double is the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(40.23594781085251) == "40.23594781085251");
  for (double v : {1.0 / 3, 2.0 / 7, 1e22, 123456.789}) CHECK(std::stod(format_double(v)) == v);
}
