#include <pivotbench/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pivotbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = pivotbench::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("pivotbench_cli_" + name); }

}  // namespace

TEST(Cli, BoundsVc) {
  const auto r = run({"bounds", "vc", "--space", "l2", "--d", "20", "--k", "50"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "space,d,k,value");
  const auto row = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(row.substr(0, 9), "l2,20,50,");
  EXPECT_NEAR(std::stod(row.substr(9)), 49052.529282, 1e-5);
}

TEST(Cli, OtherBounds) {
  auto r = run({"bounds", "hoeffding", "--n", "200", "--eps", "0.1"});
  ASSERT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("0.0366312777"), std::string::npos) << r.out;
  r = run({"bounds", "levy", "--C", "3", "--c", "0.7", "--d", "40", "--eps", "0"});
  ASSERT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find(",3,0.5"), std::string::npos) << r.out;
  r = run({"bounds", "sample-size", "--delta", "1", "--eps", "0.5", "--eta", "0.5"});
  ASSERT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("3153.348"), std::string::npos) << r.out;
}

TEST(Cli, GenIsDeterministic) {
  const auto a = scratch("gen_a.txt"), b = scratch("gen_b.txt");
  ASSERT_EQ(run({"gen", "cube", "--d", "8", "--n", "1000", "--seed", "7", "--out", a.string()}).rc, 0);
  ASSERT_EQ(run({"gen", "cube", "--d", "8", "--n", "1000", "--seed", "7", "--out", b.string()}).rc, 0);
  const auto text = slurp(a);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(text, slurp(b));
  ASSERT_EQ(run({"gen", "cube", "--d", "8", "--n", "1000", "--seed", "8", "--out", b.string()}).rc, 0);
  EXPECT_NE(text, slurp(b));

  const auto r = run({"dim", "--data", a.string(), "--pairs", "2000"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "label,n,d,metric,pairs,mean,variance,dtilde");
  fs::remove(a);
  fs::remove(b);
}

TEST(Cli, ErrorExitCodes) {
  auto r = run({"dim", "--data", "/nonexistent/pivotbench.txt"});
  EXPECT_EQ(r.rc, 1);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
  r = run({"frobnicate"});
  EXPECT_EQ(r.rc, 2);
  r = run({"bounds", "vc", "--space", "l7"});
  EXPECT_EQ(r.rc, 2);
  r = run({"sweep", "--gen", "cube", "--d", "4", "--n", "100", "--k", "0"});
  EXPECT_EQ(r.rc, 1);
  EXPECT_TRUE(r.out.empty());
  r = run({"--help"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST(Cli, MalformedFileNamesLine) {
  const auto p = scratch("bad.txt");
  std::ofstream(p) << "2 2\n0.1 0.2\n0.3 oops\n";
  const auto r = run({"dim", "--data", p.string()});
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.err.find("3"), std::string::npos) << r.err;
  fs::remove(p);
}

TEST(Cli, SweepIsByteIdenticalAcrossThreadCounts) {
  const std::vector<std::string> args{"sweep", "--gen", "cube", "--d", "5", "--n", "1200", "--k", "2,4",
                                      "--modes", "random,incremental,smart", "-A", "300", "-N", "8",
                                      "--queries", "120", "--probes", "40", "--target", "0.01", "--seed", "3"};
  setenv("PIVOTBENCH_THREADS", "1", 1);
  const auto one = run(args);
  setenv("PIVOTBENCH_THREADS", "4", 1);
  const auto four = run(args);
  unsetenv("PIVOTBENCH_THREADS");
  ASSERT_EQ(one.rc, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.out.rfind("# centers=generator\n", 0), 0u);
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 2 + 6);
}

TEST(Cli, BuildWritesLoadableIndex) {
  const auto idx = scratch("index.txt");
  const auto r = run({"build", "--gen", "hamming", "--d", "32", "--n", "300", "--k", "5", "--select", "incremental",
                      "-A", "200", "-N", "6", "--index", idx.string()});
  ASSERT_EQ(r.rc, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "n,d,k,selection_mode,build_cost");
  EXPECT_EQ(row.rfind("300,32,5,incremental,", 0), 0u) << row;
  EXPECT_EQ(slurp(idx).rfind("5 300\n", 0), 0u);
  fs::remove(idx);
}

TEST(Cli, OrchardBench) {
  const auto r = run({"orchard-bench", "--gen", "cube", "--d", "4", "--n", "300", "--queries", "50"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "d,n,queries,build_cost,avg_cost,max_cost,mismatches");
  EXPECT_NE(r.out.find(",0\n"), std::string::npos) << r.out;
  const auto capped = run({"orchard-bench", "--gen", "cube", "--d", "4", "--n", "300", "--max-points", "100"});
  EXPECT_EQ(capped.rc, 1);
}

TEST(Cli, ProjectAndConcentration) {
  auto r = run({"project", "--gen", "cube", "--d", "2", "--n", "5", "--i", "0", "--j", "1"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  r = run({"conc-sphere", "--d", "3,10", "--steps", "4"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "d,eps,alpha,sphere_bound");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 2 * 5);
}
