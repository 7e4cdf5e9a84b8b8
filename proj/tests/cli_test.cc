#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int status;
  std::string output;
};

Run run(const std::string& args) {
  const std::string command = std::string(PARTEST_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  std::string output;
  char buffer[4096];
  while (std::size_t got = fread(buffer, 1, sizeof buffer, pipe)) output.append(buffer, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, output};
}

Run shell(const std::string& command) {
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  std::string output;
  char buffer[4096];
  while (std::size_t got = fread(buffer, 1, sizeof buffer, pipe)) output.append(buffer, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, output};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("partest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }
  std::filesystem::path dir_;
};

TEST_F(Cli, HelpAndUsage) {
  const auto help = run("--help");
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.output.find("json-lines"), std::string::npos);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("nulltable --groups 2,2").status, 1);
  EXPECT_EQ(run("test --table x.pnt").status, 1);
  EXPECT_EQ(run("nulltable --groups a,b --out " + path("t.pnt")).status, 1);
}

TEST_F(Cli, ExactModeTable) {
  const auto r = run("nulltable --problem ksample --groups 2,2 --m-max 3 --B 500 --out " +
                     path("t.pnt"));
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string text = slurp(path("t.pnt"));
  EXPECT_NE(text.find("#B=6\n"), std::string::npos);
  EXPECT_NE(text.find("#exact=1\n"), std::string::npos);
}

TEST_F(Cli, TableFileMatchesRequestAndIsReproducible) {
  const std::string args = "nulltable --problem ksample --groups 10,10 --family sum --score lr "
                           "--m-max 5 --B 150 --seed 7 --out ";
  ASSERT_EQ(run(args + path("a.pnt")).status, 0);
  ASSERT_EQ(run("--threads 3 " + args + path("b.pnt")).status, 0);
  const std::string a = slurp(path("a.pnt"));
  EXPECT_EQ(a, slurp(path("b.pnt")));
  std::istringstream lines(a);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 150);
}

TEST_F(Cli, TestMatchesEnumeration) {
  ASSERT_EQ(run("nulltable --groups 2,2 --m-max 3 --out " + path("t.pnt")).status, 0);
  // Perfect separation: the largest statistic for both m, shared with its
  // mirror arrangement, so p = 2/6.
  write("d.tsv", "# label\tvalue\n1\t0.1\n1\t0.2\n2\t0.8\n2\t0.9\n");
  const auto r = run("--format tsv test --table " + path("t.pnt") + " --input " + path("d.tsv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("m\tstatistic\tp_value\n"), std::string::npos);
  EXPECT_NE(r.output.find("minp\t0.3333333333\t0.3333333333"), std::string::npos) << r.output;
}

TEST_F(Cli, JsonLinesRecord) {
  ASSERT_EQ(run("nulltable --problem independence --n 12 --family ddp --m-max 3 --B 120 --out " +
                path("t.pnt")).status, 0);
  std::string data;
  for (int i = 0; i < 12; ++i) data += std::to_string(i) + "\t" + std::to_string((i * 7) % 12) + "\n";
  write("d.tsv", data);
  const auto r = run("--format json-lines test --table " + path("t.pnt") + " --input " +
                     path("d.tsv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(r.output.front(), '{');
  EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 1);
  EXPECT_NE(r.output.find("\"p_value\":"), std::string::npos);
  EXPECT_NE(r.output.find("\"family\":\"ddp\""), std::string::npos);
}

TEST_F(Cli, IncompatibleTable) {
  ASSERT_EQ(run("nulltable --groups 2,2 --out " + path("t.pnt")).status, 0);
  write("d.tsv", "1\t0.1\n2\t0.2\n1\t0.3\n2\t0.4\n1\t0.5\n");
  const auto r = run("test --table " + path("t.pnt") + " --input " + path("d.tsv"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("table incompatible"), std::string::npos);
  write("e.tsv", "1\t0.1\n2\t0.2\n1\t0.3\n2\t0.4\n");
  EXPECT_EQ(run("test --family max --table " + path("t.pnt") + " --input " + path("e.tsv")).status,
            2);
}

TEST_F(Cli, MalformedInputAndMissingFiles) {
  ASSERT_EQ(run("nulltable --groups 2,2 --out " + path("t.pnt")).status, 0);
  write("d.tsv", "1\t0.1\n2\tnope\n");
  const auto r = run("test --table " + path("t.pnt") + " --input " + path("d.tsv"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.output.find("line 2"), std::string::npos);
  EXPECT_EQ(run("test --table " + path("missing.pnt") + " --input " + path("d.tsv")).status, 3);
  EXPECT_EQ(run("nulltable --groups 2,2 --out /nonexistent/dir/t.pnt").status, 3);
  EXPECT_FALSE(std::filesystem::exists("/nonexistent/dir/t.pnt.partial"));
}

TEST_F(Cli, MiValues) {
  const auto r = shell(std::string(PARTEST_CLI_PATH) +
                       " simulate --scenario appendixD-mixture --n 120 --emit | " +
                       PARTEST_CLI_PATH + " --format tsv mi --input - --m 6 --miller-madow");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("adp\t6\t120\t"), std::string::npos);
  write("d.tsv", "1\t2\n2\t1\n3\t3\n");
  const auto too_big = run("mi --input " + path("d.tsv") + " --m 4");
  EXPECT_EQ(too_big.status, 4);
  for (const char* estimator : {"ddp", "histogram"}) {
    EXPECT_EQ(run(std::string("mi --estimator ") + estimator + " --input " + path("d.tsv") +
                  " --m 2").status,
              0);
  }
}

TEST_F(Cli, SimulatePerMAndErrors) {
  ASSERT_EQ(run("nulltable --groups 10,10 --m-max 6 --B 200 --out " + path("t.pnt")).status, 0);
  const auto r = run("simulate --scenario gauss-shift --n 20 --replicates 20 --table " +
                     path("t.pnt") + " --per-m " + path("per_m.tsv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("rejection rate"), std::string::npos);
  std::istringstream per_m(slurp(path("per_m.tsv")));
  std::string line;
  int rows = -1;
  while (std::getline(per_m, line)) ++rows;
  EXPECT_EQ(rows, 5);
  const auto unknown = run("simulate --scenario zigzag --table " + path("t.pnt"));
  EXPECT_EQ(unknown.status, 1);
  EXPECT_NE(unknown.output.find("null-equal"), std::string::npos);
  EXPECT_EQ(run("simulate --scenario gauss-shift --n 30 --table " + path("t.pnt")).status, 2);
}

TEST_F(Cli, SimulateSeedChangesDataOnly) {
  const auto a = run("simulate --scenario gauss-shift --n 10 --emit --seed 1");
  const auto b = run("simulate --scenario gauss-shift --n 10 --emit --seed 2");
  const auto c = run("simulate --scenario gauss-shift --n 10 --emit --seed 1");
  EXPECT_NE(a.output, b.output);
  EXPECT_EQ(a.output, c.output);
}

}  // namespace
