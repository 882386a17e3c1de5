#pragma once
// CLI harness: experiment specs, deterministic table/record emission, exit
// code policy. All numeric output is formatted to 12 significant digits so
// identical specs and seeds produce byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace seqmet {

enum class Command {
  qfi_curve,
  fringe_scan,
  adaptive_sim,
  precision_study,
  landscape,
  shot_noise,
  protocol,
  bounds,
  figure,
};

// automatic resolves to csv for tables and json for records
enum class OutputFormat { automatic, csv, json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_io = 3;

struct ExperimentSpec {
  Command command = Command::qfi_curve;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output_path;  // empty writes to stdout
  std::string runs_path;    // per-run CSV, study commands only
  OutputFormat format = OutputFormat::automatic;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Emission {
  bool tabular = false;
  Table table;
  nlohmann::json record;
  std::string runs_csv;  // filled only when runs_path is set
};

const char* command_name(Command cmd);

// Fills defaults, overlays the config record, then the explicit overrides.
// Rejects unknown keys and type mismatches; "seed" is accepted in the config
// but routed through ExperimentSpec, not the returned record.
nlohmann::json merge_params(Command cmd, const nlohmann::json& config,
                            const nlohmann::json& overrides);

std::string format_number(double v);
std::string render_csv(const Table& t);
std::string render_json(const Table& t);

// computes the payload for a validated spec
Emission compute(const ExperimentSpec& spec);

// merge + compute + scan for NaN + write; returns an exit code
int run(const ExperimentSpec& spec);

// argv front end; returns an exit code
int run_cli(int argc, char** argv);

}  // namespace seqmet
