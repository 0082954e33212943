#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridlayers/document.hpp"
#include "gridlayers/interaction.hpp"
#include "gridlayers/scene.hpp"
#include "gridlayers/wire.hpp"

namespace gridlayers {

struct SessionOptions {
  bool emit_frames = true;
  /// Minimum spacing of frames on the event clock.
  double frame_interval_ms = 16.0;
  /// Base for relative paths in save/load/runScript commands.
  std::filesystem::path base_dir = ".";
  /// Screen extent in cells.
  int viewport_cols = 10;
  int viewport_rows = 10;
};

/// One client's engine: workbook, interaction state and frame stream. Every
/// inbound line yields exactly one ack or error, and any frame it causes is
/// returned after that reply.
class Session {
 public:
  explicit Session(Document doc = {}, SessionOptions options = {});

  /// Processes one NDJSON message; returns outbound lines in order.
  std::vector<std::string> handle_line(std::string_view line);
  /// Emits the frame held back by coalescing, if any.
  std::vector<std::string> flush();

  const Workbook& workbook() const { return wb_; }
  const InteractionState& state() const { return machine_.state(); }
  /// Saved form of the current workbook and toggles.
  std::string save() const;
  SceneFrame frame() const;

  std::uint64_t events() const { return events_; }
  std::uint64_t mutations() const { return mutations_; }
  std::uint64_t frame_revision() const { return frame_revision_; }

 private:
  nlohmann::json reply_id(const nlohmann::json& id) const;
  nlohmann::json run_event(const EventMessage& m);
  nlohmann::json run_command(const CommandMessage& m);
  void reset(Document doc);
  void mark_dirty() { dirty_ = true; }
  void maybe_frame(std::vector<std::string>& out, bool force);

  SessionOptions options_;
  Workbook wb_;
  Machine machine_;
  std::uint64_t inbound_ = 0;
  std::uint64_t events_ = 0;
  std::uint64_t mutations_ = 0;
  std::uint64_t frame_revision_ = 0;
  bool dirty_ = true;
  std::optional<double> last_t_;
  std::optional<double> last_frame_t_;
  int script_depth_ = 0;
};

std::string error_line(const nlohmann::json& id, std::string_view code, std::string_view detail);

}  // namespace gridlayers
