#include <gtest/gtest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "gridlayers/document.hpp"
#include "gridlayers/session.hpp"
#include "gridlayers/wire.hpp"

namespace gl = gridlayers;
using nlohmann::json;

namespace {

std::filesystem::path fixtures() { return GRIDLAYERS_FIXTURES_DIR; }

gl::Document base_document() { return gl::load_document_file(fixtures() / "fixture.glw"); }

json parse(const std::string& line) { return json::parse(line); }

std::string event(const gl::InputEvent& e, double t) { return gl::encode_event_line(e, t); }

std::string command(const json& j) {
  json c = j;
  c["type"] = "command";
  return c.dump();
}

}  // namespace

TEST(Session, EveryLineGetsOneReplyBeforeItsFrame) {
  gl::Session s(base_document());
  const auto out = s.handle_line(event(gl::PenDown{0.05, 0.35}, 100));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(parse(out[0])["type"], "ack");
  EXPECT_EQ(parse(out[0])["id"], 1);
  EXPECT_EQ(parse(out[1])["type"], "frame");
  EXPECT_EQ(parse(out[1])["full"], true);
}

TEST(Session, GarbageIsAParseError) {
  gl::Session s;
  for (const char* line : {"{", "[]", R"({"type":"nope"})", R"({"type":"event","event":{"kind":"warp"}})"}) {
    const auto out = s.handle_line(line);
    ASSERT_EQ(out.size(), 1u) << line;
    EXPECT_EQ(out[0].rfind("{\"type\":\"error\"", 0), 0u);
    EXPECT_EQ(parse(out[0])["code"], "PARSE");
  }
}

TEST(Session, UnknownCommandAndBadArgs) {
  gl::Session s;
  auto out = s.handle_line(command({{"id", "x"}, {"cmd", "fly"}}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(parse(out[0])["id"], "x");
  EXPECT_EQ(parse(out[0])["code"], "PARSE");
  out = s.handle_line(command({{"id", 2}, {"cmd", "setToggle"}, {"name", "depth"}, {"value", 9}}));
  EXPECT_EQ(parse(out[0])["code"], "ENGINE");
  out = s.handle_line(command({{"id", 3}, {"cmd", "load"}, {"path", "/nonexistent/book.glw"}}));
  EXPECT_EQ(parse(out[0])["code"], "IO");
}

TEST(Session, SaveAndLoadRoundTrip) {
  gl::Session s(base_document());
  const auto saved = parse(s.handle_line(command({{"id", 1}, {"cmd", "save"}}))[0]);
  ASSERT_TRUE(saved.contains("document"));
  EXPECT_EQ(saved["document"], s.save());

  gl::Session other;
  const auto out = other.handle_line(command({{"id", 1}, {"cmd", "load"}, {"document", saved["document"]}}));
  EXPECT_EQ(parse(out[0])["type"], "ack");
  EXPECT_EQ(other.save(), s.save());

  const auto dir = std::filesystem::temp_directory_path() / "gridlayers_session_test";
  std::filesystem::create_directories(dir);
  gl::SessionOptions opts;
  opts.base_dir = dir;
  gl::Session filed(base_document(), opts);
  EXPECT_EQ(parse(filed.handle_line(command({{"id", 1}, {"cmd", "save"}, {"path", "out.glw"}}))[0])["type"], "ack");
  EXPECT_EQ(gl::save_document(gl::load_document_file(dir / "out.glw").workbook), filed.save());
  std::filesystem::remove_all(dir);
}

TEST(Session, FrameRevisionsIncrease) {
  gl::Session s(base_document());
  std::uint64_t last = 0;
  for (int i = 0; i < 20; ++i) {
    for (const auto& line : s.handle_line(event(gl::PenHover{0.05 * i, 0.5, 0}, 100.0 * (i + 1)))) {
      const auto j = parse(line);
      if (j["type"] == "frame") {
        EXPECT_GT(j["revision"].get<std::uint64_t>(), last);
        last = j["revision"];
      }
    }
  }
  EXPECT_EQ(last, s.frame_revision());
}

TEST(Session, FramesCoalesceOnTheEventClock) {
  gl::Session s(base_document());
  int frames = 0;
  for (int i = 0; i < 50; ++i) {
    const double y = 0.05 + 0.1 * (i % 5);
    const gl::InputEvent e = i % 2 == 0 ? gl::InputEvent(gl::PenDown{0.05, y}) : gl::InputEvent(gl::PenUp{0.05, y});
    for (const auto& line : s.handle_line(event(e, i))) frames += parse(line)["type"] == "frame";
  }
  EXPECT_LE(frames, 50 / 16 + 2);
  const auto tail = s.flush();
  ASSERT_EQ(tail.size(), 1u);
  EXPECT_EQ(parse(tail[0])["type"], "frame");
  EXPECT_TRUE(s.flush().empty());
}

TEST(Session, EventAckCarriesMutations) {
  gl::SessionOptions opts;
  opts.emit_frames = false;
  gl::Session s(base_document(), opts);
  s.handle_line(event(gl::PenDown{0.05, 0.35}, 1));
  s.handle_line(event(gl::PenUp{0.05, 0.35}, 2));
  s.handle_line(event(gl::PenButton{gl::PenButtonId::Secondary, true}, 3));
  const auto out = s.handle_line(event(gl::PenButton{gl::PenButtonId::Secondary, false}, 4));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(parse(out[0])["type"], "ack");
  EXPECT_EQ(s.state().mode, gl::Mode::TextEntry);
  EXPECT_EQ(s.events(), 4u);
}

TEST(Session, RunScriptReplaysATask) {
  gl::SessionOptions opts;
  opts.base_dir = fixtures() / "tasks";
  gl::Session s(gl::load_document_file(fixtures() / "tasks" / "CF.initial.glw"), opts);
  const auto out = s.handle_line(command({{"id", 7}, {"cmd", "runScript"}, {"path", "CF.glev"}}));
  ASSERT_GE(out.size(), 1u);
  const auto ack = parse(out[0]);
  EXPECT_EQ(ack["type"], "ack");
  EXPECT_EQ(ack["errors"], 0);
  EXPECT_EQ(ack["mutations"], 1);
  EXPECT_GT(ack["events"].get<int>(), 0);
  EXPECT_TRUE(gl::diff_workbooks(gl::load_document_file(fixtures() / "tasks" / "CF.expected.glw").workbook,
                                 s.workbook())
                  .empty());
}

TEST(Session, SetLabelRenamesThePendingCluster) {
  gl::SessionOptions opts;
  opts.emit_frames = false;
  gl::Session s(base_document(), opts);
  s.handle_line(event(gl::PenDown{0.15, 0.05}, 1));
  s.handle_line(event(gl::PenMove{0.15, 0.25}, 2));
  s.handle_line(event(gl::PenUp{0.15, 0.25}, 3));
  s.handle_line(event(gl::PenHover{0.35, 0.05, gl::kLayerSpacing}, 4));
  s.handle_line(event(gl::PenButton{gl::PenButtonId::Secondary, true}, 5));
  const auto created = parse(s.handle_line(event(gl::PenButton{gl::PenButtonId::Secondary, false}, 6))[0]);
  ASSERT_TRUE(created.contains("labelPrompt"));
  const auto out = parse(s.handle_line(command({{"id", 1}, {"cmd", "setLabel"}, {"label", "costs"}}))[0]);
  EXPECT_EQ(out["type"], "ack");
  EXPECT_NE(s.workbook().find_cluster("costs"), nullptr);
  EXPECT_FALSE(s.state().pending_label);
  const auto again = parse(s.handle_line(command({{"id", 2}, {"cmd", "setLabel"}, {"label", "x"}}))[0]);
  EXPECT_EQ(again["type"], "error");
}

TEST(Session, TogglesAndViewportMode) {
  gl::Session s(base_document());
  EXPECT_EQ(parse(s.handle_line(command({{"id", 1}, {"cmd", "setToggle"}, {"name", "D"}, {"value", true}}))[0])["type"],
            "ack");
  EXPECT_TRUE(s.state().toggles.dependencies);
  s.handle_line(command({{"id", 2}, {"cmd", "setViewportMode"}, {"mode", "fixed"}}));
  EXPECT_EQ(s.state().viewport.mode, gl::ViewportMode::Fixed);
  const auto pick = parse(s.handle_line(command({{"id", 3}, {"cmd", "overviewPick"}, {"x", 0.0}, {"y", 0.0}}))[0]);
  EXPECT_EQ(pick["type"], "ack");
  EXPECT_TRUE(pick.contains("cell"));
}
