#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cuspidal_cli.hpp"

using namespace cuspidal;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cuspidal_test_" + name)).string();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST(Cli, CuspZeroDTwo) {
  const auto r = run({"cusp", "zero", "--d", "2", "--case", "split", "--mode", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["zero_dim"]["formula"], 1);
  EXPECT_EQ(j["zero_dim"]["enumerated"], 1);
  EXPECT_EQ(j["case"]["embedding"], "split");
}

TEST(Cli, VerifyTable1Markdown) {
  const auto r = run({"verify", "table1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines_starting(r.out, "| ") - 1, 13u);  // header row excluded
  for (const auto& c : table1_fixture()) EXPECT_NE(r.out.find("| " + c.roots + " | " + c.niemeier + " |"), std::string::npos);
  EXPECT_EQ(r.out.find("REJECTED"), std::string::npos);
}

TEST(Cli, VerifyTable1Json) {
  const auto r = run({"verify", "table1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["all_ok"].get<bool>());
  ASSERT_EQ(j["rows"].size(), 13u);
  for (const auto& row : j["rows"]) {
    EXPECT_TRUE(row["genus_ok"].get<bool>());
    EXPECT_TRUE(row["roots_ok"].get<bool>());
    EXPECT_TRUE(row["conditional"].get<bool>());
  }
}

TEST(Cli, NonsplitFiveIsUsageError) {
  const auto r = run({"cusp", "zero", "--d", "5", "--case", "nonsplit"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, SweepSplitOneToFifty) {
  const auto r = run({"cusp", "sweep", "--d", "1..50", "--case", "split"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 50u);
  EXPECT_TRUE(j["all_match"].get<bool>());
}

TEST(Cli, SweepNonsplitSingle) {
  const auto r = run({"cusp", "sweep", "--d", "3..3", "--case", "nonsplit"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["formula"], 1);
  EXPECT_EQ(j["rows"][0]["enumerated"], 1);
}

TEST(Cli, SweepEmptyIntervalIsUsageError) {
  EXPECT_EQ(run({"cusp", "sweep", "--d", "5..1"}).code, 2);
  EXPECT_EQ(run({"cusp", "sweep", "--d", "a..b"}).code, 2);
  EXPECT_EQ(run({"cusp", "sweep", "--d", "4..6", "--case", "nonsplit"}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"cusp"}).code, 2);
  EXPECT_EQ(run({"cusp", "zero", "--d", "2", "--colour", "red"}).code, 2);
  EXPECT_EQ(run({"cusp", "zero", "--d", "2", "--mode", "guess"}).code, 2);
  EXPECT_EQ(run({"cusp", "zero", "--d", "2", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"cusp", "zero"}).code, 2);
  EXPECT_EQ(run({"cusp", "one", "--d", "12"}).code, 2);
  EXPECT_EQ(run({"cusp", "one", "--d", "2"}).code, 2);
  EXPECT_EQ(run({"lat", "info", "F4"}).code, 2);
  EXPECT_EQ(run({"glue", "roots", "U"}).code, 2);
  EXPECT_EQ(run({"cusp", "zero", "--d", "60", "--bound", "10"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, LatInfoAndDisc) {
  auto r = run({"lat", "info", "U+U+U+E8+E8+<-2>"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["rank"], 23);
  EXPECT_EQ(j["det"], 2);
  EXPECT_EQ(j["signature"], Json::parse("[3,20]"));
  r = run({"lat", "disc", "B3"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out);
  EXPECT_EQ(j["orders"], Json::parse("[3]"));
  EXPECT_EQ(j["q"], Json::parse(R"(["-2/3"])"));
  EXPECT_EQ(j["size"], 3);
}

TEST(Cli, LatticeFileInput) {
  const std::string path = temp_path("b3.json");
  write(path, R"({"rank": 2, "gram": [[-2, 1], [1, -2]], "labels": ["b1", "b2"]})");
  const auto r = run({"lat", "disc", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["orders"], Json::parse("[3]"));
  write(path, R"({"rank": 3, "gram": [[-2, 1], [1, -2]]})");
  EXPECT_EQ(run({"lat", "disc", path}).code, 2);
  write(path, "{not json");
  EXPECT_EQ(run({"lat", "disc", path}).code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, GlueEnumAndRoots) {
  auto r = run({"glue", "enum", "A15+A3", "--order", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_FALSE(j["subgroups"].empty());
  bool found = false;
  for (const auto& s : j["subgroups"]) {
    EXPECT_EQ(s["order"], 4);
    EXPECT_EQ(s["det"], 4);
    EXPECT_TRUE(s["brieskorn_ok"].get<bool>());
    if (s["roots"] == "A15+A3") found = true;
  }
  EXPECT_TRUE(found);
  r = run({"glue", "roots", "2E8+2A1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["roots"], "2E8+2A1");
  EXPECT_EQ(Json::parse(r.out)["count"], 484);
}

TEST(Cli, CuspOneTable1) {
  const auto r = run({"cusp", "one", "--d", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j["one_dim"]["candidates"].size(), 13u);
  std::size_t total = 0;
  for (const auto& c : j["one_dim"]["candidates"]) {
    EXPECT_TRUE(c["genus_ok"].get<bool>());
    EXPECT_TRUE(c["conditional"].get<bool>());
    total += c["classes"].get<std::size_t>();
  }
  EXPECT_EQ(j["one_dim"]["total"], total);
}

TEST(Cli, CandidatesFile) {
  const std::string path = temp_path("cands.json");
  write(path, R"({"candidates": [{"roots": "D18", "niemeier": "D24"}, {"roots": "2E8+A2"}]})");
  auto r = run({"verify", "table1", "--candidates", path, "--format", "json"});
  EXPECT_EQ(r.code, 1);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["rows"][0]["genus_ok"].get<bool>());
  EXPECT_FALSE(j["rows"][1]["genus_ok"].get<bool>());
  EXPECT_TRUE(j["rows"][1].contains("error"));
  write(path, R"([{"roots": "X9"}])");
  EXPECT_EQ(run({"verify", "table1", "--candidates", path}).code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, ExampleC12) {
  const auto r = run({"verify", "example-c12", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["all_ok"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 15u);
}

TEST(Cli, OutFile) {
  const std::string path = temp_path("out.json");
  const auto r = run({"cusp", "zero", "--d", "3", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(Json::parse(ss.str())["zero_dim"]["formula"], 2);
  std::filesystem::remove(path);
}

TEST(Cli, JsonRoundTripIsByteIdentical) {
  const std::vector<std::vector<std::string>> commands{
      {"cusp", "zero", "--d", "12"},
      {"cusp", "sweep", "--d", "1..30"},
      {"lat", "disc", "A2+D5+<-10>"},
      {"lat", "info", "U(2)+E8"},
      {"glue", "enum", "A1+A1+A1+A1"},
      {"verify", "example-c12", "--format", "json"},
      {"cusp", "one", "--d", "1"},
  };
  for (const auto& c : commands) {
    const auto r = run(c);
    ASSERT_EQ(r.code, 0) << c[0] << " " << c[1] << ": " << r.err;
    EXPECT_EQ(Json::parse(r.out).dump() + "\n", r.out) << c[0] << " " << c[1];
  }
}

TEST(Cli, FormJsonRoundTrip) {
  const auto r = run({"lat", "disc", "A3+D5+<-12>"});
  ASSERT_EQ(r.code, 0);
  Json j = Json::parse(r.out);
  j.erase("size");
  const auto form = form_from_json(j);
  EXPECT_EQ(to_json(form).dump(), j.dump());
  EXPECT_TRUE(are_isometric(form, discriminant_form(parse_lattice_spec("A3+D5+<-12>"))).has_value());
}

TEST(Cli, DeterministicAcrossThreadCounts) {
  const std::vector<std::vector<std::string>> commands{
      {"cusp", "sweep", "--d", "1..60"},
      {"cusp", "sweep", "--d", "3..99", "--case", "nonsplit", "--format", "md"},
      {"verify", "table1", "--format", "json"},
  };
  for (const auto& c : commands) {
    std::vector<std::string> outs;
    for (const char* t : {"1", "3", "8"}) {
      setenv("CUSPIDAL_THREADS", t, 1);
      outs.push_back(run(c).out);
    }
    unsetenv("CUSPIDAL_THREADS");
    EXPECT_EQ(outs[0], outs[1]) << c[1];
    EXPECT_EQ(outs[0], outs[2]) << c[1];
    EXPECT_EQ(outs[0], run(c).out) << c[1];
  }
}
