#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gridlayers/scene.hpp"
#include "gridlayers/workbook.hpp"

namespace gridlayers {

inline constexpr int kDocumentVersion = 1;

/// A workbook file (.glw): the workbook plus the display toggles it was
/// saved with.
struct Document {
  Workbook workbook;
  ArcToggles toggles;
};

/// Canonical JSON text: sheets in order with cells in reading order,
/// clusters by level, charts by id, formulas in print form and every ref
/// fully sheet-qualified. Ends with a newline.
std::string save_document(const Workbook& wb, const ArcToggles& toggles = {});
/// Throws Error(Format) on malformed documents or unknown versions.
Document load_document(std::string_view text);

Document load_document_file(const std::filesystem::path& path);
void save_document_file(const std::filesystem::path& path, const Workbook& wb, const ArcToggles& toggles = {});

/// Differences between two workbooks as readable lines ("Sheet1!A4:
/// expected =SUM(A1) got =SUM(A1,B1)"); empty when structurally equal.
/// Formulas compare in canonical print form, clusters by label, charts by id.
std::vector<std::string> diff_workbooks(const Workbook& expected, const Workbook& actual);
bool structurally_equal(const Workbook& a, const Workbook& b);

}  // namespace gridlayers
