#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridlayers/interaction.hpp"
#include "gridlayers/scene.hpp"

namespace gridlayers {

/// First line of every event log file.
inline constexpr std::string_view kEventLogHeader = "#gridlayers-events v1";

struct EventMessage {
  double t = 0;  // milliseconds
  InputEvent event;
};

struct CommandMessage {
  nlohmann::json id;  // string or number chosen by the client
  std::string cmd;
  nlohmann::json args;  // the whole message object
};

using InboundMessage = std::variant<EventMessage, CommandMessage>;

/// Parses one NDJSON line. Throws Error(Format) on anything malformed.
InboundMessage decode_inbound(std::string_view line);

nlohmann::json event_to_json(const InputEvent& e);
InputEvent event_from_json(const nlohmann::json& j);
/// {"type":"event","t":...,"event":{...}} on one line.
std::string encode_event_line(const InputEvent& e, double t);

nlohmann::json frame_to_json(const SceneFrame& frame);
nlohmann::json viewport_command_to_json(const ViewportCommand& c, const SheetNames& names);

std::string_view viewport_mode_name(ViewportMode m);
ViewportMode parse_viewport_mode(std::string_view s);

/// Splits an event log into message lines, dropping the header, blank lines
/// and '#' comments. Throws Error(Format) when the header is missing.
std::vector<std::string> read_event_log(std::string_view text);

}  // namespace gridlayers
