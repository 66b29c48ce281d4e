#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace clocknet {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersionString = "clocknet 1.0.0";

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "CLOCKNET_OUT";

class scenario_parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class scenario_validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioMode { squeeze, cavity, chain, sequence, epr, protocol };

std::string to_string(ScenarioMode mode);

struct SweepSpec {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

enum class OutputFormat { csv, json, both };

struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::squeeze;
  std::uint64_t seed = 1;
  std::optional<SweepSpec> sweep;
  nlohmann::json params;  // validated, defaults applied
  std::filesystem::path out_dir;
  std::string base_name = "scenario";
  OutputFormat format = OutputFormat::both;
};

struct OutputValue {
  double value = 0.0;
  std::string unit = "dimensionless";
};

struct ResultRecord {
  int schema_version = kSchemaVersion;
  std::string version = kVersionString;
  std::string scenario_hash;
  std::string timestamp;
  std::string mode;
  std::map<std::string, OutputValue> scalars;
  std::vector<std::string> series_columns;
  std::vector<std::vector<double>> series_rows;
  std::vector<nlohmann::json> transcript;  // protocol mode: one entry per round
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
};

/// Parse and strictly validate a scenario file (unknown keys are fatal).
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Parse a scenario from an in-memory JSON document (used for presets).
ScenarioConfig parse_scenario_json(const nlohmann::json& doc, const std::string& name);

/// Built-in scenarios: paper-chain-4, paper-chain-8, paper-cavity-sr, ...
std::vector<std::string> preset_names();
nlohmann::json preset_scenario(const std::string& name);

/// Execute the scenario and persist results (CSV series + JSON summary,
/// written atomically). Deterministic for a fixed seed.
ResultRecord run(const ScenarioConfig& cfg);

/// Locale-independent shortest-round-trip formatting of a double.
std::string format_double(double v);

}  // namespace clocknet
