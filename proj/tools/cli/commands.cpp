#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridlayers/document.hpp"
#include "gridlayers/error.hpp"
#include "gridlayers/serve.hpp"
#include "gridlayers/session.hpp"
#include "gridlayers/wire.hpp"

namespace gridlayers::cli {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path relative_to(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string expected_text(const nlohmann::json& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  throw Error(ErrorCode::Format, "expected values must be numbers, strings or null");
}

}  // namespace

int cmd_eval(const std::filesystem::path& workbook, const std::string& cell, Format format, std::ostream& out,
             std::ostream& err) {
  try {
    Document doc = load_document_file(workbook);
    const CellAddress addr = parse_address_text(cell, 0, doc.workbook.names());
    const std::string text = value_text(doc.workbook.get_value(addr));
    if (format == Format::Machine) out << "cell=" << address_text(addr, -1, doc.workbook.names()) << " value=" << text << "\n";
    else out << text << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "gridlayers eval: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_deps(const std::filesystem::path& workbook, const std::string& cell, int depth, Format format,
             std::ostream& out, std::ostream& err) {
  if (depth < 1) {
    err << "gridlayers deps: --depth must be at least 1\n";
    return kExitUsage;
  }
  try {
    Document doc = load_document_file(workbook);
    const SheetNames names = doc.workbook.names();
    const CellAddress addr = parse_address_text(cell, 0, names);
    const EdgeLevels levels = doc.workbook.precedents_closure(addr, depth);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (const auto& [from, to] : levels[i]) {
        const std::string f = address_text(from, addr.sheet, names), t = address_text(to, addr.sheet, names);
        if (format == Format::Machine) out << "level=" << i + 1 << " from=" << f << " to=" << t << "\n";
        else out << i + 1 << " " << f << " -> " << t << "\n";
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "gridlayers deps: " << e.what() << "\n";
    return kExitFailure;
  }
}

ReplayReport replay_script(const std::filesystem::path& manifest_path) {
  const std::filesystem::path base = manifest_path.parent_path();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Format, std::string("manifest is not JSON: ") + e.what());
  }
  auto path_field = [&](const char* key) {
    if (!manifest.contains(key) || !manifest[key].is_string())
      throw Error(ErrorCode::Format, std::string("manifest needs a string '") + key + "'");
    return relative_to(base, manifest[key].get<std::string>());
  };

  ReplayReport report;
  report.name = manifest.value("name", manifest_path.stem().string());
  SessionOptions options;
  options.emit_frames = false;
  options.base_dir = base;
  Session session(load_document_file(path_field("initial")), options);
  const auto lines = read_event_log(read_file(path_field("events")));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const auto& reply : session.handle_line(lines[i])) {
      const auto j = nlohmann::json::parse(reply);
      if (j.value("type", "") == "error")
        report.problems.push_back("line " + std::to_string(i + 2) + ": " + j.value("code", "") + " " +
                                  j.value("detail", ""));
    }
  }
  report.events = session.events();
  report.mutations = session.mutations();
  report.saved = session.save();

  const Document expected = load_document_file(path_field("expected"));
  for (auto& d : diff_workbooks(expected.workbook, session.workbook())) report.problems.push_back(std::move(d));
  if (manifest.contains("expectedValues")) {
    const SheetNames names = session.workbook().names();
    for (const auto& ev : manifest["expectedValues"]) {
      const std::string cell = ev.at("cell").get<std::string>();
      const CellAddress addr = parse_address_text(cell, 0, names);
      const std::string want = expected_text(ev.at("value"));
      const std::string got = value_text(session.workbook().get_value(addr));
      if (want != got) report.problems.push_back("value " + cell + ": expected " + want + " got " + got);
    }
  }
  return report;
}

int cmd_replay(const std::filesystem::path& manifest, Format format, const std::optional<std::filesystem::path>& save_to,
               std::ostream& out, std::ostream& err) {
  ReplayReport report;
  try {
    report = replay_script(manifest);
    if (save_to) {
      std::ofstream f(*save_to, std::ios::binary | std::ios::trunc);
      if (!f || !(f << report.saved)) throw Error(ErrorCode::Io, "cannot write '" + save_to->string() + "'");
    }
  } catch (const Error& e) {
    err << "gridlayers replay: " << e.what() << "\n";
    return kExitFailure;
  }
  const char* status = report.passed() ? "pass" : "fail";
  if (format == Format::Machine) {
    out << "name=" << report.name << " status=" << status << " events=" << report.events
        << " mutations=" << report.mutations << "\n";
    for (const auto& p : report.problems) out << "diff=" << nlohmann::json(p).dump() << "\n";
  } else {
    out << report.name << " " << status << " events=" << report.events << " mutations=" << report.mutations << "\n";
    for (const auto& p : report.problems) out << "  " << p << "\n";
  }
  return report.passed() ? kExitOk : kExitFailure;
}

int cmd_serve(const ServeArgs& args, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    std::string initial_text;
    if (args.workbook) {
      const Document doc = load_document_file(*args.workbook);
      initial_text = save_document(doc.workbook, doc.toggles);
    }
    auto make_session = [&]() {
      SessionOptions options;
      if (args.workbook) options.base_dir = args.workbook->parent_path();
      return Session(initial_text.empty() ? Document{} : load_document(initial_text), options);
    };
    if (args.stdio || !args.port) {
      Session session = make_session();
      serve_stream(session, in, out);
      return kExitOk;
    }
    ServeOptions options;
    options.host = args.host;
    options.port = *args.port;
    options.max_clients = args.max_clients;
    options.on_listening = [&](int port) { out << "listening port=" << port << std::endl; };
    serve_tcp(make_session, options);
    return kExitOk;
  } catch (const Error& e) {
    err << "gridlayers serve: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spreadsheet engine with layered pen interaction"};
  app.require_subcommand(1);
  std::string format_name = "text";
  app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"text", "machine"}));

  std::filesystem::path workbook;
  std::string cell;
  auto* eval = app.add_subcommand("eval", "Print the value of one cell");
  eval->add_option("workbook", workbook, "Workbook file (.glw)")->required();
  eval->add_option("cell", cell, "Cell reference, e.g. A4 or Sheet2!B1")->required();

  int depth = kDefaultDependencyDepth;
  auto* deps = app.add_subcommand("deps", "Print layered precedent edges of a cell");
  deps->add_option("workbook", workbook, "Workbook file (.glw)")->required();
  deps->add_option("cell", cell, "Cell reference")->required();
  deps->add_option("--depth", depth, "Number of dependency levels");

  std::filesystem::path manifest;
  std::optional<std::filesystem::path> save_to;
  auto* replay = app.add_subcommand("replay", "Replay a task script and check its end state");
  replay->add_option("script", manifest, "Task manifest (.json)")->required();
  replay->add_option("--save", save_to, "Write the final workbook here");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the session service");
  auto* stdio_flag = serve->add_flag("--stdio", serve_args.stdio, "Serve NDJSON over stdin/stdout");
  serve->add_option("--port", serve_args.port, "TCP port (0 picks a free one)")->excludes(stdio_flag);
  serve->add_option("--host", serve_args.host, "Listen address");
  serve->add_option("--workbook", serve_args.workbook, "Initial workbook for every session");
  serve->add_option("--max-clients", serve_args.max_clients, "Exit after this many clients (0 = never)");

  for (auto* sub : {eval, deps, replay, serve}) sub->add_option("--format", format_name)->check(CLI::IsMember({"text", "machine"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  const Format format = format_name == "machine" ? Format::Machine : Format::Text;
  if (*eval) return cmd_eval(workbook, cell, format, out, err);
  if (*deps) return cmd_deps(workbook, cell, depth, format, out, err);
  if (*replay) return cmd_replay(manifest, format, save_to, out, err);
  return cmd_serve(serve_args, in, out, err);
}

}  // namespace gridlayers::cli
