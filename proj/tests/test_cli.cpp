#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "higgsmorse/io.hpp"

namespace fs = std::filesystem;
using namespace higgsmorse;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Arguments are single-quoted for the shell.
  Result run(const std::vector<std::string> &args) {
    std::string cmd = "'" HM_BINARY "'";
    for (const auto &a : args) cmd += " '" + a + "'";
    cmd += " > '" + (dir_ / "stdout").string() + "' 2> '" + (dir_ / "stderr").string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir_ / "stdout");
    r.err = slurp(dir_ / "stderr");
    return r;
  }

  void expect_error(const Result &r, int code, const std::string &kind) {
    EXPECT_EQ(r.code, code) << r.err;
    const auto ls = lines_of(r.err);
    ASSERT_EQ(ls.size(), 1u) << r.err;
    EXPECT_EQ(ls[0].rfind("error=" + kind + " exit=" + std::to_string(code) + " message=", 0), 0u) << ls[0];
  }

  fs::path dir_;
};

long count_prefix(const std::string &text, const std::string &prefix) {
  long n = 0;
  for (const auto &l : lines_of(text))
    if (l.rfind(prefix, 0) == 0) ++n;
  return n;
}

} // namespace

TEST_F(Cli, CensusMaximal) {
  const auto r = run({"census", "--group", "sp(2n,R)", "--n", "3", "--genus", "2", "--toledo", "max"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines_of(r.out);
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], kCensusCsvHeader);
  EXPECT_EQ(ls[3], "\"Sp(6,R)\",2,3,total,48,sum of breakdown");
}

TEST_F(Cli, CensusSp4AndUnknown) {
  auto r = run({"census", "--group", "sp(4,R)", "--genus", "3", "--toledo", "max", "--format", "records"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("total 194\n"), std::string::npos);
  EXPECT_EQ(count_prefix(r.out, "component "), 3);
  r = run({"census", "--group", "sp(2n,R)", "--n", "3", "--genus", "2", "--toledo", "1", "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines_of(r.out);
  EXPECT_EQ(nlohmann::json::parse(ls.back())["count"], "UNKNOWN");
  expect_error(run({"census", "--group", "sp(2n,R)", "--n", "3", "--genus", "2", "--toledo", "4"}), 2, "validation");
}

TEST_F(Cli, EnumerateGl2) {
  const auto r = run({"enumerate", "--group", "gl(2)", "--genus", "2", "--degree", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_prefix(r.out, "stratum "), 2);
  EXPECT_EQ(count_prefix(r.out, "end"), 2);
  EXPECT_EQ(count_prefix(r.out, "index "), 0);
  expect_error(run({"enumerate", "--group", "gl(2)", "--genus", "2", "--degree", "2"}), 2, "validation");
}

TEST_F(Cli, EnumerateGl3JsonLines) {
  const auto r = run({"enumerate", "--group", "gl(n)", "--n", "3", "--genus", "2", "--degree", "1", "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  int strata = 0, notes = 0;
  for (const auto &l : lines_of(r.out)) {
    const auto j = nlohmann::json::parse(l);
    if (j["kind"] == "stratum") ++strata;
    if (j["kind"] == "note") ++notes;
  }
  EXPECT_GT(strata, 3);
  EXPECT_EQ(notes, 1);
}

TEST_F(Cli, IndexCsv) {
  const auto r = run({"index", "--group", "sp(2n,R)", "--n", "3", "--genus", "2", "--degree", "-3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines_of(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], std::string("kind,") + kStrataCsvHeader + ",local_minimum");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    EXPECT_EQ(ls[i].rfind("stratum,", 0), 0u);
    EXPECT_EQ(ls[i].substr(ls[i].size() - 2), ",1");
  }
  const auto g = run({"index", "--group", "gl(2)", "--genus", "2", "--degree", "1"});
  EXPECT_NE(g.out.find("index 4\n"), std::string::npos);
  EXPECT_NE(g.out.find("local_minimum 0\n"), std::string::npos);
}

TEST_F(Cli, Assemble) {
  auto r = run({"assemble", "--group", "gl(2)", "--genus", "2", "--degree", "1", "--n0", "1 + 1*t^2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("total 1 + 1*t^2 + 1*t^4 + 4*t^5 + 1*t^6\n"), std::string::npos);
  expect_error(run({"assemble", "--group", "gl(2)", "--genus", "2", "--degree", "1"}), 2, "validation");
  expect_error(run({"assemble", "--group", "gl(2)", "--genus", "2", "--degree", "1", "--n0", "1 + t^"}), 2, "validation");
}

TEST_F(Cli, Dwww) {
  const auto r = run({"dwww", "--genus", "2", "--ell", "1", "--degree", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines_of(r.out);
  ASSERT_EQ(ls.size(), 22u);
  EXPECT_EQ(ls[0], "k,first,second,difference");
  EXPECT_EQ(ls[3].rfind("2,1,", 0), 0u);
  EXPECT_EQ(ls[4].rfind("3,8,", 0), 0u);
  EXPECT_EQ(ls[5].rfind("4,30,", 0), 0u);
  expect_error(run({"dwww", "--genus", "2", "--ell", "0", "--degree", "3"}), 2, "validation");
}

TEST_F(Cli, Check) {
  auto r = run({"check", "--n", "2", "--genus", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "check,value\nh0(K^2),3\nh0(K^4),7\nhitchin_base_dim,10\nmilnor_wood,-2..2\n");
  expect_error(run({"check", "--n", "2", "--genus", "2", "--exponents", "1,2"}), 4, "consistency");
}

TEST_F(Cli, FlowTraceAndDeterminism) {
  const auto out1 = (dir_ / "a.csv").string(), out2 = (dir_ / "b.csv").string(), st = (dir_ / "state.txt").string();
  auto r = run({"flow", "--rank", "2", "--size", "16", "--seed", "7", "--tol", "1e-6", "--out", out1, "--state-out", st});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.rfind("flow converged=1 ", 0), 0u) << r.err;
  const auto ls = lines_of(slurp(out1));
  ASSERT_GT(ls.size(), 2u);
  EXPECT_EQ(ls[0], kTraceCsvHeader);
  double prev = std::numeric_limits<double>::infinity(), last_energy = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string t, e, gnorm, step;
    std::getline(ss, t, ',');
    std::getline(ss, e, ',');
    std::getline(ss, gnorm, ',');
    std::getline(ss, step, ',');
    const double energy = std::stod(e);
    EXPECT_LE(energy, prev);
    prev = last_energy = energy;
    if (i + 1 == ls.size()) EXPECT_LT(std::stod(gnorm), 1e-6);
  }
  std::ifstream in(st);
  const auto s = read_state(in);
  EXPECT_EQ(s.geometry.size, 16);
  EXPECT_EQ(ymh_energy(s), last_energy);

  r = run({"flow", "--rank", "2", "--size", "16", "--seed", "7", "--tol", "1e-6", "--out", out2});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(out1), slurp(out2));
}

TEST_F(Cli, FlowNumericalFailure) {
  const auto out = (dir_ / "f.csv").string();
  const auto r = run({"flow", "--size", "6", "--seed", "1", "--dt", "100", "--underflow", "60", "--out", out});
  expect_error(r, 3, "numerical");
  EXPECT_TRUE(fs::exists(out + ".dump"));
  std::ifstream in(out + ".dump");
  EXPECT_EQ(read_state(in).geometry.size, 6);
}

TEST_F(Cli, Validation) {
  expect_error(run({"frobnicate"}), 2, "validation");
  expect_error(run({}), 2, "validation");
  expect_error(run({"census", "--group", "sp(2n,R)", "--n", "3", "--genus", "two", "--toledo", "max"}), 2, "validation");
  expect_error(run({"census", "--bogus", "1"}), 2, "validation");
  expect_error(run({"enumerate", "--group", "so(3)", "--genus", "2", "--degree", "1"}), 2, "validation");
  expect_error(run({"flow", "--group", "sl2r", "--rank", "3"}), 2, "validation");
  expect_error(run({"census", "--group", "sp(2n,R)", "--n", "3", "--genus", "2", "--toledo", "max", "--format", "xml"}), 2,
               "validation");
}

TEST_F(Cli, ConfigFileWithOverride) {
  const auto cfg = (dir_ / "run.cfg").string();
  {
    std::ofstream f(cfg);
    f << "# census run\ncommand = census\n[census]\ngroup = sp(2n,R)\nn = 3\ngenus = 2\ntoledo = max\n";
  }
  auto r = run({"--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(",total,48,"), std::string::npos);
  r = run({"--config", cfg, "--genus", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(",total,192,"), std::string::npos);
  {
    std::ofstream f(cfg, std::ios::app);
    f << "colour = blue\n";
  }
  expect_error(run({"--config", cfg}), 2, "validation");
  expect_error(run({"--config", (dir_ / "missing.cfg").string()}), 2, "validation");
}
