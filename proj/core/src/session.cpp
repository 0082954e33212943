#include "gridlayers/session.hpp"

#include <fstream>
#include <sstream>

#include "gridlayers/error.hpp"
#include "gridlayers/project.hpp"

namespace gridlayers {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::Format: return "PARSE";
    case ErrorCode::Io: return "IO";
    default: return "ENGINE";
  }
}

}  // namespace

std::string error_line(const nlohmann::json& id, std::string_view code, std::string_view detail) {
  nlohmann::ordered_json j;
  j["type"] = "error";
  j["id"] = id;
  j["code"] = code;
  j["detail"] = detail;
  return j.dump();
}

Session::Session(Document doc, SessionOptions options) : options_(std::move(options)) { reset(std::move(doc)); }

void Session::reset(Document doc) {
  wb_ = std::move(doc.workbook);
  InteractionState state;
  state.viewport = Viewport::make(0, {0, 0, 0}, options_.viewport_cols, options_.viewport_rows);
  state.toggles = doc.toggles;
  machine_ = Machine(std::move(state));
  dirty_ = true;
}

std::string Session::save() const { return save_document(wb_, machine_.state().toggles); }

SceneFrame Session::frame() const {
  SceneFrame f = project(wb_, machine_.state());
  f.revision = frame_revision_;
  return f;
}

nlohmann::json Session::reply_id(const nlohmann::json& id) const {
  return id.is_null() ? nlohmann::json(inbound_) : id;
}

std::vector<std::string> Session::handle_line(std::string_view line) {
  ++inbound_;
  std::vector<std::string> out;
  InboundMessage msg;
  try {
    msg = decode_inbound(line);
  } catch (const Error& e) {
    out.push_back(error_line(inbound_, "PARSE", e.what()));
    return out;
  }

  if (const auto* ev = std::get_if<EventMessage>(&msg)) {
    nlohmann::ordered_json ack;
    ack["type"] = "ack";
    ack["id"] = inbound_;
    const nlohmann::json result = run_event(*ev);
    for (const auto& [k, v] : result.items()) ack[k] = v;
    out.push_back(ack.dump());
    maybe_frame(out, false);
    return out;
  }

  const auto& cmd = std::get<CommandMessage>(msg);
  const nlohmann::json id = reply_id(cmd.id);
  try {
    nlohmann::json result = run_command(cmd);
    nlohmann::ordered_json ack;
    ack["type"] = "ack";
    ack["id"] = id;
    ack["cmd"] = cmd.cmd;
    for (auto& [k, v] : result.items()) ack[k] = v;
    out.push_back(ack.dump());
  } catch (const Error& e) {
    out.push_back(error_line(id, error_category(e.code()), e.what()));
    return out;
  } catch (const nlohmann::json::exception& e) {
    out.push_back(error_line(id, "PARSE", e.what()));
    return out;
  }
  maybe_frame(out, true);
  return out;
}

nlohmann::json Session::run_event(const EventMessage& m) {
  ++events_;
  nlohmann::json result = nlohmann::json::object();
  std::vector<Effect> effects;
  auto step = [&](const InputEvent& e) {
    auto r = machine_.step(e, wb_);
    mutations_ += static_cast<std::uint64_t>(r.mutations);
    effects.insert(effects.end(), r.effects.begin(), r.effects.end());
  };
  if (last_t_ && m.t > *last_t_ && machine_.state().slide_remaining_ms > 0) step(Tick{m.t - *last_t_});
  if (!last_t_ || m.t > *last_t_) last_t_ = m.t;
  step(m.event);

  const SheetNames names = wb_.names();
  nlohmann::json mutations = nlohmann::json::array(), diagnostics = nlohmann::json::array(),
                 viewport = nlohmann::json::array();
  for (const auto& e : effects) {
    if (const auto* mut = std::get_if<EngineMutation>(&e)) mutations.push_back(describe(*mut, names));
    else if (const auto* d = std::get_if<Diagnostic>(&e)) diagnostics.push_back(d->message);
    else if (const auto* v = std::get_if<ViewportCommand>(&e)) viewport.push_back(viewport_command_to_json(*v, names));
    else if (const auto* p = std::get_if<LabelPrompt>(&e))
      result["labelPrompt"] = {{"label", p->label}, {"anchor", address_text(p->anchor, -1, names)}};
    mark_dirty();
  }
  if (!mutations.empty()) result["mutations"] = std::move(mutations);
  if (!diagnostics.empty()) result["diagnostics"] = std::move(diagnostics);
  if (!viewport.empty()) result["viewport"] = std::move(viewport);
  return result;
}

nlohmann::json Session::run_command(const CommandMessage& m) {
  const auto& a = m.args;
  auto path_arg = [&]() -> std::optional<std::filesystem::path> {
    if (!a.contains("path")) return std::nullopt;
    std::filesystem::path p = a.at("path").get<std::string>();
    return p.is_absolute() ? p : options_.base_dir / p;
  };

  if (m.cmd == "save") {
    const std::string text = save();
    if (auto p = path_arg()) {
      std::ofstream out(*p, std::ios::binary | std::ios::trunc);
      if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write '" + p->string() + "'");
      return {{"path", p->string()}};
    }
    return {{"document", text}};
  }
  if (m.cmd == "load") {
    std::string text;
    if (auto p = path_arg()) text = read_text(*p);
    else if (a.contains("document")) text = a.at("document").get<std::string>();
    else throw Error(ErrorCode::Format, "load needs 'path' or 'document'");
    reset(load_document(text));
    return nlohmann::json::object();
  }
  if (m.cmd == "setLabel") {
    const std::string label = a.at("label").get<std::string>();
    std::string from;
    if (a.contains("from")) from = a.at("from").get<std::string>();
    else if (machine_.state().pending_label) from = *machine_.state().pending_label;
    else throw Error(ErrorCode::UnknownCluster, "no cluster is waiting for a label");
    apply_mutation(wb_, RenameClusterCmd{from, label});
    ++mutations_;
    if (machine_.state().pending_label == from) machine_.state().pending_label.reset();
    mark_dirty();
    return {{"mutations", {describe(RenameClusterCmd{from, label}, wb_.names())}}};
  }
  if (m.cmd == "setToggle") {
    const std::string name = a.at("name").get<std::string>();
    ArcToggles& t = machine_.state().toggles;
    if (name == "depth") {
      const int depth = a.at("value").get<int>();
      if (depth < 1 || depth > kMaxLevels) throw Error(ErrorCode::BadAddress, "depth must be within 1..4");
      t.dependency_depth = depth;
    } else if (name == "mask") {
      t.mask = a.at("value").get<bool>();
    } else if (name == "links") {
      const CellAddress cell = parse_address_text(a.at("cell").get<std::string>(), machine_.state().viewport.sheet,
                                                  wb_.names());
      if (a.at("value").get<bool>()) t.hidden_links.erase(cell);
      else t.hidden_links.insert(cell);
    } else if (name.size() == 1 && std::string_view("ODFCS").find(name[0]) != std::string_view::npos) {
      set_arc_toggle(t, name[0], a.at("value").get<bool>());
    } else {
      throw Error(ErrorCode::Format, "unknown toggle '" + name + "'");
    }
    mark_dirty();
    return nlohmann::json::object();
  }
  if (m.cmd == "setViewportMode") {
    machine_.state().viewport.mode = parse_viewport_mode(a.at("mode").get<std::string>());
    mark_dirty();
    return nlohmann::json::object();
  }
  if (m.cmd == "overviewPick") {
    const Viewport& vp = machine_.state().viewport;
    auto ov = overview_scene(wb_, vp);
    if (!ov) throw Error(ErrorCode::BadAddress, "the sheet is empty");
    const CellAddress cell = overview_pick(*ov, a.at("x").get<double>(), a.at("y").get<double>());
    SlideResult slid = slide_to_align(vp, cell);
    auto& st = machine_.state();
    st.viewport = slid.viewport;
    if (slid.animation.duration_ms > 0) {
      st.slide = slid.animation;
      st.slide_remaining_ms = slid.animation.duration_ms;
    }
    mark_dirty();
    return {{"cell", address_text(cell, -1, wb_.names())}};
  }
  if (m.cmd == "runScript") {
    auto p = path_arg();
    if (!p) throw Error(ErrorCode::Format, "runScript needs 'path'");
    if (script_depth_ > 4) throw Error(ErrorCode::Format, "runScript nested too deeply");
    const auto lines = read_event_log(read_text(*p));
    const std::uint64_t before_events = events_, before_mutations = mutations_;
    std::uint64_t errors = 0;
    ++script_depth_;
    for (const auto& line : lines) {
      for (const auto& reply : handle_line(line))
        if (reply.rfind("{\"type\":\"error\"", 0) == 0) ++errors;
    }
    --script_depth_;
    return {{"events", events_ - before_events}, {"mutations", mutations_ - before_mutations}, {"errors", errors}};
  }
  throw Error(ErrorCode::Format, "unknown command '" + m.cmd + "'");
}

void Session::maybe_frame(std::vector<std::string>& out, bool force) {
  if (!options_.emit_frames || !dirty_ || script_depth_ > 0) return;
  if (!force && last_frame_t_ && last_t_ && *last_t_ - *last_frame_t_ < options_.frame_interval_ms) return;
  ++frame_revision_;
  dirty_ = false;
  last_frame_t_ = last_t_.value_or(0.0);
  nlohmann::ordered_json j;
  j["type"] = "frame";
  j["revision"] = frame_revision_;
  j["full"] = true;
  j["scene"] = frame_to_json(frame());
  out.push_back(j.dump());
}

std::vector<std::string> Session::flush() {
  std::vector<std::string> out;
  if (last_frame_t_ && last_t_) last_frame_t_ = *last_t_ - options_.frame_interval_ms;
  maybe_frame(out, true);
  return out;
}

}  // namespace gridlayers
