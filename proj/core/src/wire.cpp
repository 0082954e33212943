#include "gridlayers/wire.hpp"

#include <sstream>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error(ErrorCode::Format, std::string("event field '") + key + "' must be a number");
  return j[key].get<double>();
}

nlohmann::json rect_json(const Rect& r) { return {r.x0, r.y0, r.x1, r.y1}; }
nlohmann::json point_json(const Point3& p) { return {p.x, p.y, p.z}; }

}  // namespace

std::string_view viewport_mode_name(ViewportMode m) {
  switch (m) {
    case ViewportMode::Aligned: return "aligned";
    case ViewportMode::Fixed: return "fixed";
    case ViewportMode::Vertical: return "vertical";
  }
  return "aligned";
}

ViewportMode parse_viewport_mode(std::string_view s) {
  if (s == "aligned") return ViewportMode::Aligned;
  if (s == "fixed") return ViewportMode::Fixed;
  if (s == "vertical") return ViewportMode::Vertical;
  throw Error(ErrorCode::Format, "unknown viewport mode '" + std::string(s) + "'");
}

nlohmann::json event_to_json(const InputEvent& e) {
  return std::visit(
      overloaded{
          [](const PenDown& v) { return nlohmann::json{{"kind", "penDown"}, {"x", v.x}, {"y", v.y}}; },
          [](const PenMove& v) { return nlohmann::json{{"kind", "penMove"}, {"x", v.x}, {"y", v.y}}; },
          [](const PenUp& v) { return nlohmann::json{{"kind", "penUp"}, {"x", v.x}, {"y", v.y}}; },
          [](const PenHover& v) { return nlohmann::json{{"kind", "penHover"}, {"x", v.x}, {"y", v.y}, {"h", v.h}}; },
          [](const PenButton& v) {
            return nlohmann::json{{"kind", "penButton"},
                                  {"button", v.button == PenButtonId::Primary ? "primary" : "secondary"},
                                  {"pressed", v.pressed}};
          },
          [](const BezelTap&) { return nlohmann::json{{"kind", "bezelTap"}}; },
          [](const GazeAt& v) {
            nlohmann::json j{{"kind", "gazeAt"}};
            j["tab"] = v.tab ? nlohmann::json(*v.tab) : nlohmann::json(nullptr);
            return j;
          },
          [](const Tick& v) { return nlohmann::json{{"kind", "tick"}, {"dt", v.dt_ms}}; },
      },
      e);
}

InputEvent event_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorCode::Format, "event needs a string 'kind'");
  const std::string kind = j["kind"];
  if (kind == "penDown") return PenDown{num(j, "x"), num(j, "y")};
  if (kind == "penMove") return PenMove{num(j, "x"), num(j, "y")};
  if (kind == "penUp") return PenUp{num(j, "x"), num(j, "y")};
  if (kind == "penHover") {
    const double h = num(j, "h");
    if (h < 0) throw Error(ErrorCode::Format, "hover height must be >= 0");
    return PenHover{num(j, "x"), num(j, "y"), h};
  }
  if (kind == "penButton") {
    const std::string button = j.value("button", "");
    if (button != "primary" && button != "secondary")
      throw Error(ErrorCode::Format, "button must be 'primary' or 'secondary'");
    if (!j.contains("pressed") || !j["pressed"].is_boolean())
      throw Error(ErrorCode::Format, "penButton needs a boolean 'pressed'");
    return PenButton{button == "primary" ? PenButtonId::Primary : PenButtonId::Secondary, j["pressed"].get<bool>()};
  }
  if (kind == "bezelTap") return BezelTap{};
  if (kind == "gazeAt") {
    if (!j.contains("tab") || j["tab"].is_null()) return GazeAt{std::nullopt};
    if (!j["tab"].is_number_integer()) throw Error(ErrorCode::Format, "gazeAt tab must be an integer or null");
    return GazeAt{j["tab"].get<int>()};
  }
  if (kind == "tick") return Tick{num(j, "dt")};
  throw Error(ErrorCode::Format, "unknown event kind '" + kind + "'");
}

InboundMessage decode_inbound(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorCode::Format, "line is not valid JSON");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw Error(ErrorCode::Format, "message needs a string 'type'");
  const std::string type = j["type"];
  if (type == "event") {
    EventMessage m;
    if (j.contains("t")) {
      if (!j["t"].is_number()) throw Error(ErrorCode::Format, "'t' must be a number");
      m.t = j["t"].get<double>();
    }
    if (!j.contains("event")) throw Error(ErrorCode::Format, "event message needs 'event'");
    m.event = event_from_json(j["event"]);
    return m;
  }
  if (type == "command") {
    if (!j.contains("cmd") || !j["cmd"].is_string()) throw Error(ErrorCode::Format, "command needs a string 'cmd'");
    CommandMessage m;
    m.id = j.contains("id") ? j["id"] : nlohmann::json(nullptr);
    m.cmd = j["cmd"];
    m.args = j;
    return m;
  }
  throw Error(ErrorCode::Format, "unknown message type '" + type + "'");
}

std::string encode_event_line(const InputEvent& e, double t) {
  nlohmann::ordered_json j;
  j["type"] = "event";
  j["t"] = t;
  j["event"] = event_to_json(e);
  return j.dump();
}

nlohmann::json viewport_command_to_json(const ViewportCommand& c, const SheetNames& names) {
  static constexpr const char* kKinds[] = {"switchSheet", "slide", "setMode"};
  return {{"kind", kKinds[static_cast<int>(c.kind)]},
          {"sheet", c.sheet},
          {"mode", viewport_mode_name(c.mode)},
          {"durationMs", c.animation.duration_ms},
          {"from", address_text(c.animation.from, -1, names)},
          {"to", address_text(c.animation.to, -1, names)}};
}

nlohmann::json frame_to_json(const SceneFrame& f) {
  nlohmann::json j;
  j["revision"] = f.revision;
  j["viewport"] = {{"sheet", f.viewport.sheet},
                   {"origin", a1(f.viewport.origin)},
                   {"cols", f.viewport.cols},
                   {"rows", f.viewport.rows},
                   {"mode", viewport_mode_name(f.viewport.mode)},
                   {"extendedMargin", f.viewport.extended_margin}};
  j["placement"] = {{"mode", viewport_mode_name(f.placement.mode)}, {"tiltDeg", f.placement.tilt_deg}};
  j["mode"] = f.mode;
  j["selection"] = f.selection;
  auto& grid = j["gridCells"] = nlohmann::json::array();
  for (const auto& g : f.grid_cells)
    grid.push_back({{"cell", a1(g.cell)},
                    {"text", g.text},
                    {"rect", rect_json(g.rect)},
                    {"masked", g.masked},
                    {"highlighted", g.highlighted},
                    {"clusterAnchor", g.cluster_anchor}});
  auto& tabs = j["tabs"] = nlohmann::json::array();
  for (const auto& t : f.tabs)
    tabs.push_back({{"sheet", t.sheet}, {"name", t.name}, {"offset", t.offset}, {"highlighted", t.highlighted}});
  auto& layers = j["layers"] = nlohmann::json::array();
  for (const auto& l : f.layers) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : l.cells)
      cells.push_back(
          {{"anchor", a1(c.anchor)}, {"label", c.label}, {"value", c.value_text}, {"transparent", c.transparent}});
    layers.push_back({{"level", l.level}, {"height", l.height}, {"cells", std::move(cells)}});
  }
  auto& stacks = j["stacks"] = nlohmann::json::array();
  for (const auto& s : f.stacks) {
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& l : s.layers)
      ls.push_back({{"function", l.function}, {"value", value_text(l.value)}, {"height", l.height}});
    stacks.push_back({{"cell", a1(s.cell)}, {"layers", std::move(ls)}});
  }
  auto& links = j["links"] = nlohmann::json::array();
  for (const auto& l : f.links) links.push_back({{"from", point_json(l.from)}, {"to", point_json(l.to)}, {"tag", l.tag}});
  auto& charts = j["charts"] = nlohmann::json::array();
  for (const auto& c : f.charts) {
    nlohmann::json bars = nlohmann::json::array();
    for (const auto& b : c.bars) bars.push_back({{"value", b.value}, {"rect", {b.x0, b.y0, b.x1, b.y1}}});
    nlohmann::json trend = nullptr;
    if (c.trend)
      trend = {{"kind", c.trend->kind == TrendKind::Linear ? "linear" : "poly2"}, {"coeffs", c.trend->coeffs}};
    charts.push_back({{"id", c.id}, {"rect", rect_json(c.rect)}, {"bars", std::move(bars)}, {"trend", trend}});
  }
  if (f.overview) {
    j["overview"] = {{"bounds", rect_json(f.overview->bounds)},
                     {"scale", f.overview->scale},
                     {"usedRegion", a1(f.overview->used_region.start) + ":" + a1(f.overview->used_region.end)},
                     {"viewportIndicator", rect_json(f.overview->viewport_indicator)},
                     {"distance", f.overview->distance}};
  } else {
    j["overview"] = nullptr;
  }
  if (f.menu) {
    nlohmann::json rings = nlohmann::json::array();
    for (const auto& r : f.menu->rings) {
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& e : r.entries)
        entries.push_back({{"id", e.id},
                           {"label", e.label},
                           {"startDeg", e.start_deg},
                           {"endDeg", e.end_deg},
                           {"onPath", e.on_path}});
      rings.push_back({{"level", r.level}, {"height", r.height}, {"entries", std::move(entries)}});
    }
    j["menu"] = {{"center", {f.menu->cx, f.menu->cy}},
                 {"innerRadius", f.menu->inner_radius},
                 {"outerRadius", f.menu->outer_radius},
                 {"path", f.menu->path},
                 {"rings", std::move(rings)}};
  } else {
    j["menu"] = nullptr;
  }
  if (f.text_entry) {
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& k : f.text_entry->keys) keys.push_back({{"label", k.label}, {"rect", rect_json(k.rect)}});
    j["textEntry"] = {{"target", a1(f.text_entry->target)},
                      {"text", f.text_entry->text},
                      {"cursor", f.text_entry->cursor},
                      {"keys", std::move(keys)}};
  } else {
    j["textEntry"] = nullptr;
  }
  if (f.slide)
    j["slide"] = {{"durationMs", f.slide->duration_ms}, {"from", a1(f.slide->from)}, {"to", a1(f.slide->to)}};
  else
    j["slide"] = nullptr;
  j["widgets"]["trash"] = rect_json(f.trash);
  auto& arc = j["widgets"]["arcMenu"] = nlohmann::json::array();
  for (const auto& a : f.arc_menu)
    arc.push_back({{"key", std::string(1, a.key)}, {"on", a.on}, {"startDeg", a.start_deg}, {"endDeg", a.end_deg}});
  return j;
}

std::vector<std::string> read_event_log(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != kEventLogHeader) throw Error(ErrorCode::Format, "event log must start with '#gridlayers-events v1'");
      header = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  if (!header) throw Error(ErrorCode::Format, "event log must start with '#gridlayers-events v1'");
  return lines;
}

}  // namespace gridlayers
