#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "clocknet/scenario.hpp"

namespace {

// Exit codes: 0 success, 2 parse error, 3 validation error, 4 runtime error.
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

clocknet::ScenarioConfig load(const std::string& source) {
  for (const auto& name : clocknet::preset_names()) {
    if (name == source) {
      return clocknet::parse_scenario_json(clocknet::preset_scenario(name), name);
    }
  }
  return clocknet::parse_scenario(source);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clocknet: entangled optical clock network simulator"};
  app.set_version_flag("--version", clocknet::kVersionString);
  app.require_subcommand(1);

  std::string source;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  std::string format;

  auto* run_cmd = app.add_subcommand("run", "execute a scenario file or preset");
  run_cmd->add_option("scenario", source, "scenario file or preset name")->required();
  run_cmd->add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--format", format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  auto* validate_cmd =
      app.add_subcommand("validate", "parse and validate without running");
  validate_cmd->add_option("scenario", source, "scenario file or preset name")
      ->required();

  auto* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets_cmd->parsed()) {
      for (const auto& name : clocknet::preset_names()) {
        std::printf("%s\n", name.c_str());
      }
      return 0;
    }

    clocknet::ScenarioConfig cfg = load(source);
    if (validate_cmd->parsed()) {
      std::printf("ok: mode=%s seed=%llu\n", clocknet::to_string(cfg.mode).c_str(),
                  static_cast<unsigned long long>(cfg.seed));
      return 0;
    }

    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (format == "csv") cfg.format = clocknet::OutputFormat::csv;
    if (format == "json") cfg.format = clocknet::OutputFormat::json;
    if (format == "both") cfg.format = clocknet::OutputFormat::both;

    const clocknet::ResultRecord rec = clocknet::run(cfg);
    std::printf("mode=%s hash=%s\n", rec.mode.c_str(), rec.scenario_hash.c_str());
    for (const auto& [name, out] : rec.scalars) {
      std::printf("%s = %s [%s]\n", name.c_str(),
                  clocknet::format_double(out.value).c_str(), out.unit.c_str());
    }
    if (!rec.csv_path.empty()) {
      std::printf("series: %s\n", rec.csv_path.string().c_str());
    }
    if (!rec.json_path.empty()) {
      std::printf("summary: %s\n", rec.json_path.string().c_str());
    }
    return 0;
  } catch (const clocknet::scenario_parse_error& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const clocknet::scenario_validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
