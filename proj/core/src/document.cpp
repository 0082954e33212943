#include "gridlayers/document.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trend_name(TrendKind k) { return k == TrendKind::Linear ? "linear" : "poly2"; }

TrendKind parse_trend(const std::string& s) {
  if (s == "linear") return TrendKind::Linear;
  if (s == "poly2") return TrendKind::Poly2;
  throw Error(ErrorCode::Format, "unknown trend kind '" + s + "'");
}

ordered_json number_json(double v) {
  if (std::trunc(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

ordered_json toggles_json(const ArcToggles& t) {
  ordered_json j;
  for (char k : kArcKeys) j[std::string(1, k)] = arc_toggle(t, k);
  j["mask"] = t.mask;
  j["depth"] = t.dependency_depth;
  return j;
}

ArcToggles parse_toggles(const nlohmann::json& j) {
  ArcToggles t;
  if (j.is_null()) return t;
  if (!j.is_object()) throw Error(ErrorCode::Format, "toggles must be an object");
  for (char k : kArcKeys) set_arc_toggle(t, k, j.value(std::string(1, k), false));
  t.mask = j.value("mask", true);
  t.dependency_depth = j.value("depth", kDefaultDependencyDepth);
  if (t.dependency_depth < 1 || t.dependency_depth > kMaxLevels)
    throw Error(ErrorCode::Format, "toggles.depth must be within 1..4");
  return t;
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::Format, std::string("missing field '") + name + "'");
  return j.at(name);
}

template <class T>
T get_as(const nlohmann::json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Format, std::string("field '") + name + "' has the wrong type");
  }
}

std::string cell_text(const Workbook& wb, const CellAddress& c) {
  const CellContent& content = wb.content(c);
  if (std::holds_alternative<std::string>(content)) return "\"" + std::get<std::string>(content) + "\"";
  if (wb.cluster_at(c)) return "@" + wb.cluster_at(c)->label;
  const std::string t = wb.input_text(c);
  return t.empty() ? "(empty)" : t;
}

std::string members_text(const Workbook& wb, const ClusterCell& c) {
  std::string out;
  for (const auto& m : c.members) out += (out.empty() ? "" : ",") + ref_text(m, -1, wb.names());
  return out;
}

}  // namespace

std::string save_document(const Workbook& wb, const ArcToggles& toggles) {
  const SheetNames names = wb.names();
  ordered_json doc;
  doc["version"] = kDocumentVersion;
  doc["sheets"] = ordered_json::array();
  for (int s = 0; s < wb.sheet_count(); ++s) {
    ordered_json cells = ordered_json::object();
    for (auto it = wb.cells().lower_bound({s, 0, 0}); it != wb.cells().end() && it->first.sheet == s; ++it) {
      const CellContent& c = it->second;
      ordered_json entry;
      if (const auto* d = std::get_if<double>(&c)) entry["v"] = number_json(*d);
      else if (const auto* t = std::get_if<std::string>(&c)) entry["v"] = *t;
      else if (std::holds_alternative<FormulaCell>(c)) entry["f"] = wb.input_text(it->first);
      else continue;
      cells[a1(it->first)] = std::move(entry);
    }
    doc["sheets"].push_back(ordered_json{{"name", wb.sheet_name(s)}, {"cells", std::move(cells)}});
  }

  std::vector<const ClusterCell*> clusters;
  for (const auto& [id, c] : wb.clusters()) clusters.push_back(&c);
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const ClusterCell* a, const ClusterCell* b) { return a->level < b->level; });
  doc["clusters"] = ordered_json::array();
  for (const auto* c : clusters) {
    ordered_json members = ordered_json::array();
    for (const auto& m : c->members) members.push_back(ref_text(m, -1, names));
    doc["clusters"].push_back(ordered_json{{"label", c->label},
                                           {"anchor", address_text(c->anchor, -1, names)},
                                           {"level", c->level},
                                           {"members", std::move(members)}});
  }

  doc["charts"] = ordered_json::array();
  for (const auto& ch : wb.charts()) {
    ordered_json j{{"id", ch.id},
                   {"anchor", address_text(ch.anchor, -1, names)},
                   {"width", ch.width_cells},
                   {"height", ch.height_cells},
                   {"kind", "bar"},
                   {"series", ref_text(ch.series, -1, names)}};
    if (ch.trend_request) {
      ordered_json coeffs = ordered_json::array();
      if (ch.trend)
        for (double c : ch.trend->coeffs) coeffs.push_back(c);
      j["trend"] = ordered_json{{"kind", trend_name(*ch.trend_request)}, {"coeffs", std::move(coeffs)}};
    } else {
      j["trend"] = nullptr;
    }
    doc["charts"].push_back(std::move(j));
  }
  doc["toggles"] = toggles_json(toggles);
  return doc.dump(2) + "\n";
}

Document load_document(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Format, std::string("not a JSON document: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Format, "document must be a JSON object");
  const int version = get_as<int>(doc, "version");
  if (version != kDocumentVersion) throw Error(ErrorCode::Format, "unsupported version " + std::to_string(version));

  Document out;
  Workbook& wb = out.workbook;
  const auto& sheets = field(doc, "sheets");
  if (!sheets.is_array() || sheets.empty()) throw Error(ErrorCode::Format, "sheets must be a non-empty array");
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    const std::string name = get_as<std::string>(sheets[i], "name");
    if (i == 0) {
      if (name != wb.sheet_name(0)) wb = Workbook(name);
    } else {
      wb.add_sheet(name);
    }
  }
  const SheetNames names = wb.names();

  try {
    for (std::size_t i = 0; i < sheets.size(); ++i) {
      const int sheet = static_cast<int>(i);
      const auto& cells = sheets[i].contains("cells") ? sheets[i]["cells"] : nlohmann::json::object();
      if (!cells.is_object()) throw Error(ErrorCode::Format, "cells must be an object");
      for (const auto& [key, entry] : cells.items()) {
        auto addr = parse_a1(key, sheet);
        if (!addr) throw Error(ErrorCode::Format, "bad cell address '" + key + "'");
        if (entry.contains("f")) {
          wb.set_cell(*addr, FormulaCell{parse_formula(get_as<std::string>(entry, "f"), wb.context(sheet)), {}});
        } else {
          const auto& v = field(entry, "v");
          if (v.is_number()) wb.set_cell(*addr, v.get<double>());
          else if (v.is_string()) wb.set_cell(*addr, v.get<std::string>());
          else throw Error(ErrorCode::Format, "cell '" + key + "' has an unsupported literal");
        }
      }
    }

    if (doc.contains("clusters")) {
      for (const auto& c : doc["clusters"]) {
        std::vector<RefSpec> members;
        for (const auto& m : field(c, "members")) members.push_back(parse_ref_text(m.get<std::string>(), 0, names));
        wb.define_cluster(get_as<std::string>(c, "label"),
                          parse_address_text(get_as<std::string>(c, "anchor"), 0, names), get_as<int>(c, "level"),
                          std::move(members));
      }
    }

    if (doc.contains("charts")) {
      for (const auto& c : doc["charts"]) {
        if (c.value("kind", "bar") != "bar") throw Error(ErrorCode::Format, "unknown chart kind");
        ChartSpec spec;
        spec.id = get_as<int>(c, "id");
        spec.anchor = parse_address_text(get_as<std::string>(c, "anchor"), 0, names);
        spec.width_cells = get_as<int>(c, "width");
        spec.height_cells = get_as<int>(c, "height");
        spec.series = parse_ref_text(get_as<std::string>(c, "series"), 0, names);
        wb.add_chart(spec);
        if (c.contains("trend") && !c["trend"].is_null())
          wb.set_chart_trend(spec.id, parse_trend(get_as<std::string>(c["trend"], "kind")));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Format, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Format) throw;
    throw Error(ErrorCode::Format, std::string(error_code_name(e.code())) + ": " + e.what());
  }
  out.toggles = parse_toggles(doc.contains("toggles") ? doc["toggles"] : nlohmann::json());
  wb.recalculate_all();
  return out;
}

Document load_document_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_document(buf.str());
}

void save_document_file(const std::filesystem::path& path, const Workbook& wb, const ArcToggles& toggles) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << save_document(wb, toggles);
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

std::vector<std::string> diff_workbooks(const Workbook& expected, const Workbook& actual) {
  std::vector<std::string> out;
  const int sheets = std::max(expected.sheet_count(), actual.sheet_count());
  for (int s = 0; s < sheets; ++s) {
    if (s >= expected.sheet_count()) {
      out.push_back("sheet " + actual.sheet_name(s) + ": unexpected");
      continue;
    }
    if (s >= actual.sheet_count()) {
      out.push_back("sheet " + expected.sheet_name(s) + ": missing");
      continue;
    }
    if (expected.sheet_name(s) != actual.sheet_name(s))
      out.push_back("sheet " + std::to_string(s + 1) + ": expected name " + expected.sheet_name(s) + " got " +
                    actual.sheet_name(s));
    std::set<CellAddress> cells;
    for (const auto& c : expected.used_cells(s)) cells.insert(c);
    for (const auto& c : actual.used_cells(s)) cells.insert(c);
    for (const auto& c : cells) {
      const std::string e = cell_text(expected, c), a = cell_text(actual, c);
      if (e != a) out.push_back(expected.sheet_name(s) + "!" + a1(c) + ": expected " + e + " got " + a);
    }
  }

  std::set<std::string> labels;
  for (const auto& [id, c] : expected.clusters()) labels.insert(c.label);
  for (const auto& [id, c] : actual.clusters()) labels.insert(c.label);
  for (const auto& label : labels) {
    const ClusterCell* e = expected.find_cluster(label);
    const ClusterCell* a = actual.find_cluster(label);
    if (!e) {
      out.push_back("cluster @" + label + ": unexpected");
    } else if (!a) {
      out.push_back("cluster @" + label + ": missing");
    } else {
      if (e->anchor != a->anchor || e->level != a->level)
        out.push_back("cluster @" + label + ": expected anchor " + address_text(e->anchor, -1, expected.names()) +
                      " level " + std::to_string(e->level) + " got " + address_text(a->anchor, -1, actual.names()) +
                      " level " + std::to_string(a->level));
      if (members_text(expected, *e) != members_text(actual, *a))
        out.push_back("cluster @" + label + ": expected members [" + members_text(expected, *e) + "] got [" +
                      members_text(actual, *a) + "]");
    }
  }

  auto chart_text = [](const Workbook& wb, const ChartSpec& c) {
    std::string t = address_text(c.anchor, -1, wb.names()) + " " + std::to_string(c.width_cells) + "x" +
                    std::to_string(c.height_cells) + " " + ref_text(c.series, -1, wb.names());
    if (c.trend_request) t += std::string(" trend ") + std::string(trend_name(*c.trend_request));
    return t;
  };
  std::map<int, std::pair<const ChartSpec*, const ChartSpec*>> charts;
  for (const auto& c : expected.charts()) charts[c.id].first = &c;
  for (const auto& c : actual.charts()) charts[c.id].second = &c;
  for (const auto& [id, pair] : charts) {
    const std::string name = "chart #" + std::to_string(id);
    if (!pair.first) out.push_back(name + ": unexpected");
    else if (!pair.second) out.push_back(name + ": missing");
    else if (chart_text(expected, *pair.first) != chart_text(actual, *pair.second))
      out.push_back(name + ": expected " + chart_text(expected, *pair.first) + " got " +
                    chart_text(actual, *pair.second));
  }
  return out;
}

bool structurally_equal(const Workbook& a, const Workbook& b) { return diff_workbooks(a, b).empty(); }

}  // namespace gridlayers
