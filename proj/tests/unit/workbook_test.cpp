#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "gridlayers/error.hpp"
#include "gridlayers/workbook.hpp"
#include "oracles.hpp"

namespace gl = gridlayers;
using gl::CellAddress;
using gl::CellRange;
using gl::ErrorCode;
using gl::RefSpec;

namespace {

CellAddress at(const char* a1) { return *gl::parse_a1(a1); }
CellRange range(const char* a, const char* b) { return CellRange::normalized(at(a), at(b)); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const gl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::Format;
}

double num(const gl::Workbook& wb, const char* cell) {
  const auto v = wb.get_value(at(cell));
  EXPECT_TRUE(gl::is_number(v)) << cell << " = " << gl::value_text(v);
  return gl::is_number(v) ? std::get<double>(v) : 0.0;
}

class SheetFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    wb.set_cell(at("A1"), 1.0);
    wb.set_cell(at("B1"), 2.0);
    wb.set_cell(at("B2"), 3.0);
    wb.set_cell(at("B3"), 4.0);
    wb.set_cell_text(at("A4"), "=SUM(A1,B1:B3)");
  }
  gl::Workbook wb;
};

}  // namespace

TEST_F(SheetFixture, SumOfFixture) { EXPECT_EQ(num(wb, "A4"), 10); }

TEST_F(SheetFixture, EditReportsChangedDependents) {
  const auto result = wb.set_cell(at("B2"), 30.0);
  ASSERT_EQ(result.changed.size(), 1u);
  EXPECT_EQ(result.changed[0].first, at("A4"));
  EXPECT_EQ(result.changed[0].second, gl::Value(37.0));
}

TEST_F(SheetFixture, RevisionIncrementsOnEveryMutation) {
  const auto before = wb.revision();
  wb.set_cell(at("C1"), 1.0);
  EXPECT_EQ(wb.revision(), before + 1);
  wb.add_source(at("A4"), {at("C1")});
  EXPECT_EQ(wb.revision(), before + 2);
}

TEST(Workbook, SelfReferenceIsCycle) {
  gl::Workbook wb;
  wb.set_cell_text(at("A1"), "=A1");
  EXPECT_EQ(wb.get_value(at("A1")), gl::Value(gl::ErrorValue{gl::ErrorKind::Cycle}));
}

TEST(Workbook, CycleMembersAndDownstreamAreCycle) {
  gl::Workbook wb;
  wb.set_cell_text(at("A1"), "=B1+1");
  wb.set_cell_text(at("B1"), "=A1+1");
  wb.set_cell_text(at("C1"), "=SUM(A1)*2");
  wb.set_cell_text(at("D1"), "=5");
  const gl::Value cycle = gl::ErrorValue{gl::ErrorKind::Cycle};
  EXPECT_EQ(wb.get_value(at("A1")), cycle);
  EXPECT_EQ(wb.get_value(at("B1")), cycle);
  EXPECT_EQ(wb.get_value(at("C1")), cycle);
  EXPECT_EQ(num(wb, "D1"), 5);
  wb.set_cell(at("B1"), 4.0);
  EXPECT_EQ(num(wb, "A1"), 5);
  EXPECT_EQ(num(wb, "C1"), 10);
}

TEST(Workbook, GetValueKinds) {
  gl::Workbook wb;
  EXPECT_TRUE(gl::is_empty(wb.get_value(at("C9"))));
  wb.set_cell_text(at("A1"), "hi");
  EXPECT_EQ(wb.get_value(at("A1")), gl::Value(std::string("hi")));
  wb.set_cell_text(at("A2"), "2.5");
  EXPECT_EQ(wb.get_value(at("A2")), gl::Value(2.5));
}

TEST(Workbook, EvaluationSemantics) {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 3.0);
  wb.set_cell_text(at("A2"), "x");
  wb.set_cell_text(at("B1"), "=A1+C1");
  EXPECT_EQ(num(wb, "B1"), 3);
  wb.set_cell_text(at("B2"), "=A1+A2");
  EXPECT_EQ(wb.get_value(at("B2")), gl::Value(gl::ErrorValue{gl::ErrorKind::Value}));
  wb.set_cell_text(at("B3"), "=COUNT(A1:A3)");
  EXPECT_EQ(num(wb, "B3"), 1);
  wb.set_cell_text(at("B4"), "=AVERAGE(C1:C3)");
  EXPECT_EQ(wb.get_value(at("B4")), gl::Value(gl::ErrorValue{gl::ErrorKind::Div0}));
  wb.set_cell_text(at("B5"), "=SUM(A1,A1)");
  EXPECT_EQ(num(wb, "B5"), 6);
  wb.set_cell_text(at("B6"), "=1/0");
  EXPECT_EQ(wb.get_value(at("B6")), gl::Value(gl::ErrorValue{gl::ErrorKind::Div0}));
  wb.set_cell_text(at("B7"), "=B6+1");
  EXPECT_EQ(wb.get_value(at("B7")), gl::Value(gl::ErrorValue{gl::ErrorKind::Div0}));
  wb.set_cell_text(at("B8"), "=ROUND(2.345,2)");
  EXPECT_EQ(num(wb, "B8"), 2.35);
  wb.set_cell_text(at("B9"), "=SUM(@nothing)");
  EXPECT_EQ(wb.get_value(at("B9")), gl::Value(gl::ErrorValue{gl::ErrorKind::Name}));
}

TEST(Workbook, RecalcOrderIsTopological) {
  gl::Workbook wb;
  wb.set_cell_text(at("C1"), "=B1*2");
  wb.set_cell_text(at("B1"), "=A1+1");
  wb.set_cell_text(at("A2"), "=C1+B1");
  const auto result = wb.set_cell(at("A1"), 1.0);
  auto pos = [&](const char* c) {
    return std::find(result.evaluated.begin(), result.evaluated.end(), at(c)) - result.evaluated.begin();
  };
  EXPECT_LT(pos("B1"), pos("C1"));
  EXPECT_LT(pos("C1"), pos("A2"));
  EXPECT_EQ(num(wb, "A2"), 6);
}

TEST(Workbook, SheetNames) {
  gl::Workbook wb;
  EXPECT_EQ(wb.sheet_name(0), "Sheet1");
  EXPECT_EQ(wb.add_sheet("Data"), 1);
  EXPECT_EQ(wb.find_sheet("Data"), 1);
  EXPECT_ANY_THROW(wb.add_sheet("Data"));
  wb.set_cell({1, 0, 0}, 7.0);
  wb.set_cell_text(at("A1"), "=Data!A1*2");
  EXPECT_EQ(num(wb, "A1"), 14);
  EXPECT_EQ(wb.input_text(at("A1")), "=Data!A1*2");
}

class ClusterFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    wb.set_cell(at("A1"), 1.0);
    wb.set_cell(at("B1"), 2.0);
    wb.set_cell(at("B2"), 30.0);
    wb.set_cell(at("B3"), 4.0);
    costs = wb.define_cluster("costs", at("D1"), 1, {range("B1", "B3")}).id;
    wb.set_cell_text(at("E1"), "=SUM(@costs)");
  }
  gl::Workbook wb;
  int costs = 0;
};

TEST_F(ClusterFixture, SumOverCluster) { EXPECT_EQ(num(wb, "E1"), 36); }

TEST_F(ClusterFixture, HigherLevelCluster) {
  wb.define_cluster("all", at("D2"), 2, {gl::ClusterName{"costs"}, at("A1")});
  wb.set_cell_text(at("E2"), "=SUM(@all)");
  EXPECT_EQ(num(wb, "E2"), 37);
}

TEST_F(ClusterFixture, DefinitionErrors) {
  EXPECT_EQ(code_of([&] { wb.define_cluster("x", at("D3"), 1, {gl::ClusterName{"x"}}); }), ErrorCode::LevelViolation);
  EXPECT_EQ(code_of([&] { wb.define_cluster("y", at("D3"), 1, {gl::ClusterName{"costs"}}); }),
            ErrorCode::LevelViolation);
  EXPECT_EQ(code_of([&] { wb.define_cluster("costs", at("D3"), 1, {at("A1")}); }), ErrorCode::DuplicateLabel);
  EXPECT_EQ(code_of([&] { wb.define_cluster("z", at("E1"), 1, {at("A1")}); }), ErrorCode::BadAnchor);
  EXPECT_EQ(code_of([&] { wb.define_cluster("w", at("D1"), 1, {at("A1")}); }), ErrorCode::BadAnchor);
  EXPECT_EQ(code_of([&] { wb.define_cluster("bad label", at("D4"), 1, {at("A1")}); }), ErrorCode::BadAddress);
}

TEST_F(ClusterFixture, RemoveMemberSplitsRange) {
  wb.modify_cluster(costs, {}, {at("B2")});
  EXPECT_EQ(wb.find_cluster(costs)->members, (std::vector<RefSpec>{at("B1"), at("B3")}));
  EXPECT_EQ(num(wb, "E1"), 6);
}

TEST_F(ClusterFixture, AddMember) {
  wb.modify_cluster(costs, {at("A1")}, {});
  EXPECT_EQ(num(wb, "E1"), 37);
}

TEST_F(ClusterFixture, RemoveNonMember) {
  EXPECT_EQ(code_of([&] { wb.modify_cluster(costs, {}, {at("C7")}); }), ErrorCode::NotAMember);
}

TEST_F(ClusterFixture, AnchorIsNotWritable) {
  EXPECT_EQ(code_of([&] { wb.set_cell(at("D1"), 1.0); }), ErrorCode::BadAnchor);
  wb.delete_cluster(costs);
  EXPECT_NO_THROW(wb.set_cell(at("D1"), 1.0));
  EXPECT_EQ(wb.get_value(at("E1")), gl::Value(gl::ErrorValue{gl::ErrorKind::Name}));
}

TEST_F(ClusterFixture, AnchorAddressResolvesToCluster) {
  wb.set_cell_text(at("E2"), "=SUM(D1)");
  EXPECT_EQ(num(wb, "E2"), 36);
  EXPECT_EQ(wb.get_value(at("D1")), gl::Value(std::string("@costs")));
}

TEST_F(ClusterFixture, RenameRewritesReferences) {
  wb.rename_cluster(costs, "spend");
  EXPECT_EQ(wb.input_text(at("E1")), "=SUM(@spend)");
  EXPECT_EQ(num(wb, "E1"), 36);
}

TEST_F(ClusterFixture, MemberEditsPropagate) {
  wb.set_cell(at("B3"), 10.0);
  EXPECT_EQ(num(wb, "E1"), 42);
}

TEST_F(ClusterFixture, DeletingUsedLowerClusterIsRefused) {
  wb.define_cluster("all", at("D2"), 2, {gl::ClusterName{"costs"}});
  EXPECT_EQ(code_of([&] { wb.delete_cluster(costs); }), ErrorCode::ClusterInUse);
}

TEST(AddSource, AppendsTrailingArguments) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1)");
  wb.add_source(at("A4"), {range("B1", "B3")});
  EXPECT_EQ(wb.input_text(at("A4")), "=SUM(A1,B1:B3)");
}

TEST(AddSource, EmptyListChangesNothing) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1)");
  const auto result = wb.add_source(at("A4"), {});
  EXPECT_TRUE(result.changed.empty());
  EXPECT_EQ(wb.input_text(at("A4")), "=SUM(A1)");
}

TEST(AddSource, RequiresFunctionRoot) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=5");
  EXPECT_EQ(code_of([&] { wb.add_source(at("A4"), {at("A1")}); }), ErrorCode::NotAFunction);
  wb.set_cell_text(at("A5"), "=ABS(A1)");
  EXPECT_EQ(code_of([&] { wb.add_source(at("A5"), {at("A2")}); }), ErrorCode::BadArity);
}

TEST(RemoveSource, SplitsRange) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1,B1:B3)");
  wb.remove_source(at("A4"), at("B2"));
  EXPECT_EQ(wb.input_text(at("A4")), "=SUM(A1,B1,B3)");
}

TEST(RemoveSource, DropsCellArgument) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1,B1)");
  wb.remove_source(at("A4"), at("A1"));
  EXPECT_EQ(wb.input_text(at("A4")), "=SUM(B1)");
}

TEST(RemoveSource, UncoveredVictim) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1,B1:B3)");
  EXPECT_EQ(code_of([&] { wb.remove_source(at("A4"), at("C9")); }), ErrorCode::NotASource);
}

TEST(SplitRange, MaximalRectanglesRowsFirst) {
  const auto pieces = gl::split_range(range("A1", "C3"), at("B2"));
  EXPECT_EQ(pieces, (std::vector<RefSpec>{range("A1", "C1"), at("A2"), at("C2"), range("A3", "C3")}));
  EXPECT_EQ(gl::split_range(range("A1", "A1"), at("A1")), std::vector<RefSpec>{});
  EXPECT_EQ(gl::split_range(range("A1", "D1"), at("A1")), (std::vector<RefSpec>{range("B1", "D1")}));
}

TEST(RemoveSourceProperty, SmallRangesExhaustive) {
  for (int rows = 1; rows <= 3; ++rows)
    for (int cols = 1; cols <= 3; ++cols) {
      const CellRange r{{0, 2, 2}, {0, 2 + rows - 1, 2 + cols - 1}};
      for (int dr = 0; dr < rows; ++dr)
        for (int dc = 0; dc < cols; ++dc) {
          gl::Workbook wb;
          const CellAddress victim{0, 2 + dr, 2 + dc};
          wb.set_cell(at("A1"), gl::FormulaCell{gl::call("SUM", {gl::ref(at("A1")), gl::ref(r)}), {}});
          auto before = gl::testing::as_multiset(gl::testing::expanded_refs(
              wb, std::get<gl::FormulaCell>(wb.content(at("A1"))).ast));
          wb.remove_source(at("A1"), victim);
          const auto after = gl::testing::as_multiset(gl::testing::expanded_refs(
              wb, std::get<gl::FormulaCell>(wb.content(at("A1"))).ast));
          before.erase(before.find(victim));
          EXPECT_EQ(after, before);
        }
    }
}

TEST(PrecedentsClosure, TwoLevels) {
  gl::Workbook wb;
  wb.set_cell_text(at("A4"), "=SUM(A1,B1:B3)");
  wb.set_cell_text(at("B2"), "=A1*2");
  const auto levels = wb.precedents_closure(at("A4"), 2);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_EQ(levels[0], (std::set<gl::DependencyEdge>{
                           {at("A4"), at("A1")}, {at("A4"), at("B1")}, {at("A4"), at("B2")}, {at("A4"), at("B3")}}));
  EXPECT_EQ(levels[1], (std::set<gl::DependencyEdge>{{at("B2"), at("A1")}}));
  EXPECT_EQ(wb.precedents_closure(at("A4"), 1).at(0).size(), 4u);
}

TEST(PrecedentsClosure, LiteralHasNoEdges) {
  gl::Workbook wb;
  wb.set_cell(at("A1"), 1.0);
  for (const auto& level : wb.precedents_closure(at("A1"), 3)) EXPECT_TRUE(level.empty());
}

TEST(WorkbookProperty, IncrementalMatchesFullEvaluation) {
  gl::testing::Rng rng(11);
  gl::testing::AstOptions opts;
  opts.rows = opts.cols = 8;
  opts.max_depth = 4;
  opts.fractions = false;
  for (int seq = 0; seq < 60; ++seq) {
    gl::Workbook wb;
    for (int i = 0; i < 25; ++i) {
      const auto edit = gl::testing::random_edit(rng, opts);
      wb.set_cell_text(edit.cell, edit.text);
      const auto bad = gl::testing::incremental_mismatches(wb);
      ASSERT_TRUE(bad.empty()) << "after " << gl::a1(edit.cell) << " := " << edit.text << ": " << bad.front();
      ASSERT_TRUE(wb.graph().consistent());
    }
  }
}

TEST(WorkbookProperty, ClosureMatchesBruteForce) {
  gl::testing::Rng rng(5);
  gl::testing::AstOptions opts;
  opts.rows = opts.cols = 6;
  opts.max_depth = 3;
  for (int n = 0; n < 40; ++n) {
    const gl::Workbook wb = gl::testing::random_workbook(rng, opts, 20);
    for (const auto& cell : wb.used_cells(0))
      for (int depth = 1; depth <= 4; ++depth)
        ASSERT_EQ(wb.precedents_closure(cell, depth), gl::testing::brute_force_closure(wb, cell, depth));
  }
}
