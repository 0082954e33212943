#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridlayers::cli {

enum class Format { Text, Machine };

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int cmd_eval(const std::filesystem::path& workbook, const std::string& cell, Format format, std::ostream& out,
             std::ostream& err);

int cmd_deps(const std::filesystem::path& workbook, const std::string& cell, int depth, Format format,
             std::ostream& out, std::ostream& err);

struct ReplayReport {
  std::string name;
  std::uint64_t events = 0;
  std::uint64_t mutations = 0;
  /// Workbook differences, value mismatches and rejected script lines.
  std::vector<std::string> problems;
  std::string saved;  // final document text
  bool passed() const { return problems.empty(); }
};

/// Replays a task manifest {name, initial, events, expected, expectedValues}
/// through a fresh session. Paths inside the manifest are relative to it.
/// Throws gridlayers::Error when a referenced file cannot be read.
ReplayReport replay_script(const std::filesystem::path& manifest);

int cmd_replay(const std::filesystem::path& manifest, Format format, const std::optional<std::filesystem::path>& save_to,
               std::ostream& out, std::ostream& err);

struct ServeArgs {
  bool stdio = false;
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::optional<std::filesystem::path> workbook;
  int max_clients = 0;
};

int cmd_serve(const ServeArgs& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Full command line front end; argv[0] is the program name.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace gridlayers::cli
