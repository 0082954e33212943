#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "gridlayers/document.hpp"

namespace cli = gridlayers::cli;
namespace fs = std::filesystem;

namespace {

fs::path fixtures() { return GRIDLAYERS_FIXTURES_DIR; }

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "gridlayers");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir()
      : path_(fs::temp_directory_path() /
              ("gridlayers_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string with_sum() {
  gridlayers::Workbook wb = gridlayers::load_document_file(fixtures() / "fixture.glw").workbook;
  wb.set_cell_text({0, 3, 0}, "=SUM(A1,B1:B3)");
  wb.set_cell_text({0, 9, 0}, "=A10+1");
  return gridlayers::save_document(wb);
}

}  // namespace

TEST(CliEval, PrintsTheValue) {
  TempDir dir;
  const auto book = dir.write("book.glw", with_sum());
  auto r = run({"eval", book.string(), "A4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "10\n");
  r = run({"--format", "machine", "eval", book.string(), "A4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "cell=Sheet1!A4 value=10\n");
}

TEST(CliEval, ErrorValuesArePrinted) {
  TempDir dir;
  const auto book = dir.write("book.glw", with_sum());
  const auto r = run({"eval", book.string(), "A10"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "#CYCLE!\n");
}

TEST(CliEval, FailuresExitNonZero) {
  TempDir dir;
  const auto book = dir.write("book.glw", with_sum());
  EXPECT_EQ(run({"eval", (dir.path() / "missing.glw").string(), "A1"}).code, 1);
  EXPECT_EQ(run({"eval", book.string(), "not-a-cell"}).code, 1);
  EXPECT_EQ(run({"eval"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliDeps, ListsEdgesByLevel) {
  TempDir dir;
  const auto book = dir.write("book.glw", with_sum());
  auto r = run({"deps", book.string(), "A4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_NE(r.out.find("1 A4 -> A1"), std::string::npos);
  r = run({"deps", book.string(), "A1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(run({"deps", book.string(), "A4", "--depth", "0"}).code, 2);
  r = run({"deps", book.string(), "A4", "--format", "machine"});
  EXPECT_NE(r.out.find("level=1 from="), std::string::npos);
}

TEST(CliReplay, TaskScriptsPass) {
  for (const char* name : {"CF", "AIC", "AR", "RC", "RE", "AC", "AT", "AIS"}) {
    const auto report = cli::replay_script(fixtures() / "tasks" / (std::string(name) + ".json"));
    EXPECT_TRUE(report.passed()) << name << ": " << (report.problems.empty() ? "" : report.problems[0]);
    EXPECT_GT(report.events, 0u);
  }
  const auto r = run({"replay", (fixtures() / "tasks" / "CF.json").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("CF pass", 0), 0u);
}

TEST(CliReplay, TamperedExpectationFails) {
  TempDir dir;
  for (const auto& entry : fs::directory_iterator(fixtures() / "tasks"))
    if (entry.path().filename().string().rfind("CF.", 0) == 0) fs::copy(entry.path(), dir.path());
  std::string expected;
  {
    std::ifstream in(dir.path() / "CF.expected.glw");
    std::stringstream buf;
    buf << in.rdbuf();
    expected = buf.str();
  }
  const auto pos = expected.find("SUM(");
  ASSERT_NE(pos, std::string::npos);
  expected.replace(pos, 4, "MAX(");
  std::ofstream(dir.path() / "CF.expected.glw") << expected;
  const auto r = run({"replay", (dir.path() / "CF.json").string(), "--format", "machine"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("status=fail"), std::string::npos);
  EXPECT_NE(r.out.find("diff="), std::string::npos);
}

TEST(CliReplay, SaveWritesTheFinalDocument) {
  TempDir dir;
  const auto target = dir.path() / "final.glw";
  EXPECT_EQ(run({"replay", (fixtures() / "tasks" / "RC.json").string(), "--save", target.string()}).code, 0);
  const auto saved = gridlayers::load_document_file(target);
  EXPECT_EQ(saved.workbook.input_text({0, 3, 0}), "=SUM(A1,B1,B3)");
}

TEST(CliServe, StdioAnswersEachLine) {
  const auto r = run({"serve", "--stdio"}, "{\"type\":\"command\",\"id\":1,\"cmd\":\"save\"}\nnope\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"type\":\"ack\""), std::string::npos);
  EXPECT_NE(r.out.find("\"type\":\"error\""), std::string::npos);
}

TEST(CliServe, MissingWorkbookFails) {
  EXPECT_EQ(run({"serve", "--stdio", "--workbook", "/nonexistent/x.glw"}).code, 1);
}
