#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bearraid/detector.hpp"
#include "bearraid/market_data.hpp"
#include "bearraid/synthetic.hpp"

namespace bearraid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

/// Everything a command needs: one input mode (CSV files or a synthetic
/// spec), detector settings and the output directory.
struct RunConfig {
  std::optional<std::filesystem::path> price;
  std::optional<std::filesystem::path> shorts;
  std::optional<SynthSpec> synth;
  std::filesystem::path out = "out";
  std::string ticker = "TICKER";
  DetectorConfig detector;
  std::optional<std::pair<Date, Date>> ban_window;
  int format_version = 1;

  /// Throws InputError unless exactly one input mode is configured.
  void validate() const;
};

/// Reads a run config JSON. Relative paths resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);

struct LoadedInputs {
  BuildResult built;
  std::vector<PlantedRaid> truth;
};

LoadedInputs load_inputs(const RunConfig& config);

void cmd_fit(const RunConfig& config);
void cmd_scan(const RunConfig& config);
void cmd_screen_ban(const RunConfig& config, Date ban_start, Date ban_end);
void cmd_synth(const SynthSpec& spec, const std::filesystem::path& out);

/// Writes through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bearraid::cli
