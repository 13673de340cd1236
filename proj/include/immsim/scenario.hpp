#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "immsim/crossbar.hpp"
#include "immsim/metering.hpp"
#include "immsim/ops.hpp"
#include "immsim/scheduler.hpp"

namespace immsim {

enum class ProgramType : std::uint8_t { MicroOps, Lim };
enum class StrategyChoice : std::uint8_t { Imm, ReadWriteBack, Both };

// A checked-in experiment: crossbar geometry and devices, a program (micro-op
// script or copy/logic program), and the outputs to emit.
struct ScenarioConfig {
  std::string name = "scenario";
  std::size_t rows = 1;
  std::size_t cols = 1;
  Orientation orientation = Orientation::Vertical;
  std::uint64_t seed = 1;
  MemristorParams memristor{};
  TransistorParams transistor{};
  OpVoltages voltages{};
  SolverOptions solver{};
  bool calibrated_width = false;  // when set, pulse_width is recomputed
  double pulse_width = 40e-9;     // s
  std::vector<CellAddress> init_lrs;
  ProgramType program_type = ProgramType::MicroOps;
  std::string program_text;
  StrategyChoice strategy = StrategyChoice::Imm;  // copy programs only
  double logic_op_energy_j = 20.17e-12;
  std::string waveform_csv = "waveform.csv";  // micro-op scenarios; "" disables
  std::string report_json = "report.json";

  static ScenarioConfig from_json_string(const std::string& text);  // throws ConfigError
  static ScenarioConfig load(const std::string& path);  // throws ConfigError / IoError
};

struct ScenarioResult {
  std::string report_json;
  std::optional<std::string> waveform_csv;
};

// Runs the scenario to completion in memory. Nothing is written, so a failure
// here leaves no partial outputs behind.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Writes the declared outputs under out_dir (created if missing); returns the
// written paths. Throws IoError.
std::vector<std::string> write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result,
                                       const std::string& out_dir);

}  // namespace immsim
