#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ddtest/cli.hpp"
#include "support/fixtures.hpp"

using namespace ddtest;

namespace {

const std::string kSkulls = std::string(DDTEST_DATA_DIR) + "/skulls.csv";

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ddtest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("ddtest_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST(Csv, BundledSkulls) {
  const auto ds = load_csv(kSkulls, "epoch");
  EXPECT_EQ(ds.groups.size(), 5u);
  EXPECT_EQ(ds.variable_names, (std::vector<std::string>{"mb", "bh", "bl", "nh"}));
  for (const auto& [label, s] : ds.groups) {
    EXPECT_EQ(s.size(), 30u) << label;
    EXPECT_EQ(s.dim(), 4u);
  }
  EXPECT_EQ(ds.labels().front(), "c1850BC");
  EXPECT_EQ(ds.group("c4000BC").row(0)(0), 131.0);
}

TEST(Csv, GroupColumnByIndexAndRowOrder) {
  std::istringstream in("1.5,a,2\n3,b,4\n5,a,6\n");
  const auto ds = load_csv(in, "1", false);
  ASSERT_EQ(ds.groups.size(), 2u);
  EXPECT_EQ(ds.group("a").matrix()(0, 0), 1.5);
  EXPECT_EQ(ds.group("a").matrix()(1, 1), 6.0);
}

TEST(Csv, Errors) {
  auto code_of = [](const std::string& text, const std::string& column) {
    std::istringstream in(text);
    try {
      load_csv(in, column);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  EXPECT_EQ(code_of("", "g"), ErrorCode::parse_error);
  EXPECT_EQ(code_of("x,g\n1,a\n2\n", "g"), ErrorCode::parse_error);
  EXPECT_EQ(code_of("x,g\n1,a\n", "group"), ErrorCode::missing_group_column);
  EXPECT_EQ(code_of("x,g\n1,a\nabc,b\n", "g"), ErrorCode::non_numeric_cell);
  std::istringstream in("x,g\n1,a\nabc,b\n");
  try {
    load_csv(in, "g");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, RoundTrip) {
  std::mt19937_64 gen(60);
  LabeledDataset ds;
  ds.variable_names = {"u", "v", "w"};
  ds.groups.emplace("alpha", fixture::gaussian(gen, 7, 3));
  ds.groups.emplace("beta", fixture::gaussian(gen, 4, 3, 1e6, 1e-3));
  std::stringstream buffer;
  write_csv(ds, buffer, "grp");
  const auto back = load_csv(buffer, "grp");
  EXPECT_EQ(back.variable_names, ds.variable_names);
  ASSERT_EQ(back.groups.size(), 2u);
  EXPECT_EQ(back.group("alpha"), ds.group("alpha"));
  EXPECT_EQ(back.group("beta"), ds.group("beta"));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).status, 2);
  EXPECT_EQ(cli({"two-sample"}).status, 2);
  EXPECT_EQ(cli({"k-sample", "--input", kSkulls, "--group", "epoch", "--stats", "median"}).status, 2);
  EXPECT_EQ(cli({"k-sample", "--input", kSkulls, "--depth", "tukey"}).status, 2);
  EXPECT_EQ(cli({"power", "--scenario", "bogus"}).status, 2);
  EXPECT_EQ(cli({"--help"}).status, 0);
}

TEST(Cli, DataErrorsExitOne) {
  const auto empty = temp_file("empty.csv", "");
  const auto r = cli({"k-sample", "--input", empty.string()});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"two-sample", "--input", kSkulls, "--group", "epoch", "--perms", "0"}).status, 1);
  EXPECT_EQ(cli({"k-sample", "--input", kSkulls, "--group", "epoch", "--levels", "c4000BC,nope"}).status, 1);
}

TEST(Cli, IdenticalCopiesDoNotReject) {
  std::mt19937_64 gen(61);
  LabeledDataset ds;
  ds.variable_names = {"a", "b"};
  const auto s = fixture::gaussian(gen, 25, 2);
  ds.groups.emplace("left", s);
  ds.groups.emplace("right", s);
  std::ostringstream text;
  write_csv(ds, text, "group");
  const auto path = temp_file("copies.csv", text.str());
  const auto r = cli({"two-sample", "--input", path.string(), "--stats", "max,min,product,sum,dbr,bdbr,energy", "--perms", "199",
                      "--seed", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  ASSERT_EQ(report["results"].size(), 7u);
  for (const auto& row : report["results"]) {
    for (const char* key : {"statistic_name", "statistic", "p_value", "method", "depth", "sizes", "seed"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
    EXPECT_GE(row["p_value"].get<double>(), 0.05) << row["statistic_name"];
  }
  EXPECT_EQ(report["results"][6]["statistic"].get<double>(), 0.0);
  EXPECT_TRUE(report["results"][6]["depth"].is_null());
  EXPECT_EQ(report["quality"].size(), 2u);
  EXPECT_TRUE(report["fixture_hashes"].contains(path.string()));
}

TEST(Cli, SameSeedByteIdenticalAndThreadIndependent) {
  const std::vector<std::string> base = {"k-sample", "--input", kSkulls, "--group", "epoch", "--levels", "c3300BC,c200BC,cAD150",
                                         "--perms", "300", "--seed", "5", "--depth", "projection", "--directions", "50"};
  auto with_threads = [&](const char* t) {
    auto args = base;
    args.insert(args.end(), {"--threads", t});
    return cli(args);
  };
  const auto a = with_threads("1");
  const auto b = with_threads("1");
  const auto c = with_threads("3");
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  auto other = base;
  other[10] = "6";
  EXPECT_NE(cli(other).out, a.out);
}

TEST(Cli, CsvOutputAndAsymptoticRows) {
  const auto r = cli({"k-sample", "--input", kSkulls, "--group", "epoch", "--levels", "c3300BC,c200BC,cAD150", "--perms", "99",
                      "--stats", "min,product", "--format", "csv", "--asymptotic", "--asymptotic-draws", "20000"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "statistic_name,statistic,p_value,method,depth,sizes,seed");
  int rows = 0;
  bool monte_carlo = false;
  while (std::getline(lines, line)) {
    ++rows;
    monte_carlo |= line.find(",monte_carlo,") != std::string::npos;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(monte_carlo);
}

TEST(Cli, ManovaUsesFDistribution) {
  const auto r = cli({"two-sample", "--input", kSkulls, "--group", "epoch", "--levels", "c4000BC,cAD150", "--stats",
                      "wilks,hotelling,pillai", "--perms", "0"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  for (const auto& row : report["results"]) {
    EXPECT_EQ(row["method"], "asymptotic");
    EXPECT_TRUE(row["depth"].is_null());
    EXPECT_LT(row["p_value"].get<double>(), 0.01);
  }
}

TEST(Cli, SimulationAndScaleCurveCommands) {
  const auto t = cli({"type1", "--m-grid", "20,40", "--reps", "30", "--seed", "1", "--format", "csv"});
  ASSERT_EQ(t.status, 0) << t.err;
  EXPECT_EQ(t.out.substr(0, t.out.find('\n')), "statistic,m,n,depth,value");
  const auto p = cli({"power", "--scenario", "mean_shift", "--m-grid", "20", "--reps", "20", "--size-rule", "half"});
  ASSERT_EQ(p.status, 0) << p.err;
  const auto pj = nlohmann::json::parse(p.out);
  EXPECT_EQ(pj["results"][0]["n"], 10);
  const auto out = std::filesystem::temp_directory_path() / "ddtest_curve.csv";
  const auto s = cli({"scale-curve", "--input", kSkulls, "--group", "epoch", "--levels", "c4000BC", "--alphas", "0.1,0.5,0.9",
                      "--hull-draws", "20000", "--format", "csv", "--output", out.string()});
  ASSERT_EQ(s.status, 0) << s.err;
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "group,alpha,volume");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 3);
}
