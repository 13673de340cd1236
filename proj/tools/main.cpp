// immsim: behavioral 1T1R crossbar simulator with in-array cloning.
//
//   immsim run <scenario.json> [--out DIR]
//   immsim compare <program.txt> [--m --n --seed --orientation --lrs r,c --json]
//   immsim sweep <property> [--trials --seed --v-clone --v-gate --max-rows --max-cols]
//
// Global: --pulse-width <ns> | --calibrate. Exit codes: 0 ok, 1 sweep
// failures, 2 config/parse error, 3 simulation error, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "immsim/errors.hpp"
#include "immsim/scenario.hpp"
#include "immsim/sweeps.hpp"

namespace {

using namespace immsim;

struct WidthOptions {
  double pulse_width_ns = 0.0;  // 0 = not set
  bool calibrate = false;
};

double resolve_width(const WidthOptions& w, double fallback) {
  if (w.calibrate) return calibrate_pulse_width();
  if (w.pulse_width_ns > 0.0) return w.pulse_width_ns * 1e-9;
  return fallback;
}

CellAddress parse_cell_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw ConfigError("expected 'row,col' but got '" + text + "'");
  try {
    const unsigned long r = std::stoul(text.substr(0, comma));
    const unsigned long c = std::stoul(text.substr(comma + 1));
    return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
  } catch (const std::exception&) {
    throw ConfigError("expected 'row,col' but got '" + text + "'");
  }
}

int cmd_run(const std::string& file, const std::string& out_dir, const WidthOptions& w) {
  ScenarioConfig cfg = ScenarioConfig::load(file);
  if (w.calibrate) {
    cfg.calibrated_width = true;
  } else if (w.pulse_width_ns > 0.0) {
    cfg.calibrated_width = false;
    cfg.pulse_width = w.pulse_width_ns * 1e-9;
  }
  const ScenarioResult result = run_scenario(cfg);
  for (const std::string& path : write_outputs(cfg, result, out_dir))
    std::cerr << "wrote " << path << "\n";
  return 0;
}

int cmd_compare(const std::string& file, std::size_t m, std::size_t n, std::uint64_t seed,
                const std::string& orientation, const std::vector<std::string>& lrs_cells,
                bool as_json, const WidthOptions& w) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open program file '" + file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  LimProgram prog;
  try {
    prog = LimProgram::parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file + ": " + e.what());
  }

  CrossbarState initial(m, n, orientation_from_string(orientation), MemristorParams{},
                        TransistorParams{}, seed);
  for (const std::string& text : lrs_cells) {
    const CellAddress a = parse_cell_pair(text);
    initial.set_state(a, LogicState::LRS);  // throws ConfigError when out of range
  }

  SchedulerConfig sched;
  sched.pulse_width = resolve_width(w, sched.pulse_width);

  CrossbarState cb_imm = initial;
  CrossbarState cb_rwb = initial;
  const ScheduleReport imm = run(prog, CopyStrategy::IMM, cb_imm, sched);
  const ScheduleReport rwb = run(prog, CopyStrategy::ReadWriteBack, cb_rwb, sched);
  if (imm.final_states != rwb.final_states)
    throw SimulationError("copy strategies disagreed on the final memory state");

  const double cycle_ratio =
      static_cast<double>(rwb.total_cycles) / static_cast<double>(imm.total_cycles);
  const double energy_ratio = rwb.total_energy_j / imm.total_energy_j;
  if (as_json) {
    nlohmann::json out;
    out["imm"] = nlohmann::json::parse(imm.to_json_string());
    out["read_write_back"] = nlohmann::json::parse(rwb.to_json_string());
    out["cycle_ratio"] = cycle_ratio;
    out["energy_ratio"] = energy_ratio;
    std::cout << out.dump(2) << "\n";
  } else {
    char line[160];
    std::printf("%-18s %8s %14s\n", "strategy", "cycles", "energy_pJ");
    std::snprintf(line, sizeof line, "%-18s %8zu %14.4f", "imm", imm.total_cycles,
                  imm.total_energy_j * 1e12);
    std::printf("%s\n", line);
    std::snprintf(line, sizeof line, "%-18s %8zu %14.4f", "read_write_back", rwb.total_cycles,
                  rwb.total_energy_j * 1e12);
    std::printf("%s\n", line);
    std::printf("cycle ratio (read_write_back / imm):  %.4f\n", cycle_ratio);
    std::printf("energy ratio (read_write_back / imm): %.4f\n", energy_ratio);
  }
  return 0;
}

int cmd_sweep(const std::string& property, const SweepOptions& opts) {
  const SweepResult res = run_named_sweep(property, opts);
  std::cout << res.property << ": " << res.trials << " trials, " << res.failures.size()
            << " failures\n";
  std::size_t shown = 0;
  for (const SweepFailure& f : res.failures) {
    if (++shown > 20) {
      std::cout << "  ... and " << res.failures.size() - 20 << " more\n";
      break;
    }
    std::cout << "  seed=" << f.seed << "  " << f.message << "\n";
  }
  return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral 1T1R crossbar simulator with in-array cloning"};
  app.require_subcommand(1);

  WidthOptions width;
  app.add_option("--pulse-width", width.pulse_width_ns, "pulse width in ns")
      ->check(CLI::PositiveNumber);
  app.add_flag("--calibrate", width.calibrate,
               "use the calibrated pulse width instead of the configured one");

  auto* run_cmd = app.add_subcommand("run", "run a scenario file and write its outputs");
  std::string scenario_file;
  std::string out_dir = "out";
  run_cmd->add_option("scenario", scenario_file, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default: out)");

  auto* compare_cmd =
      app.add_subcommand("compare", "run a copy/logic program under both copy strategies");
  std::string program_file;
  std::size_t m = 8, n = 8;
  std::uint64_t seed = 1;
  std::string orientation = "vertical";
  std::vector<std::string> lrs_cells;
  bool as_json = false;
  compare_cmd->add_option("program", program_file, "program file (COPY/LOGIC lines)")->required();
  compare_cmd->add_option("--m", m, "crossbar rows")->check(CLI::Range(std::size_t(1), kMaxDimension));
  compare_cmd->add_option("--n", n, "crossbar cols")->check(CLI::Range(std::size_t(1), kMaxDimension));
  compare_cmd->add_option("--seed", seed, "device sampling seed");
  compare_cmd->add_option("--orientation", orientation, "vertical | horizontal")
      ->check(CLI::IsMember({"vertical", "horizontal"}));
  compare_cmd->add_option("--lrs", lrs_cells, "cell 'row,col' to initialize to logic 1")
      ->take_all();
  compare_cmd->add_flag("--json", as_json, "emit a JSON report instead of the table");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a randomized property sweep");
  std::string property;
  SweepOptions sweep_opts;
  sweep_cmd
      ->add_option("property", property,
                   "clone-truth-table | half-select | word-parallelism | strategy-equivalence")
      ->required();
  sweep_cmd->add_option("--trials", sweep_opts.trials, "trial count");
  sweep_cmd->add_option("--seed", sweep_opts.seed, "sweep seed");
  sweep_cmd->add_option("--v-clone", sweep_opts.voltages.v_clone, "cloning supply in V");
  sweep_cmd->add_option("--v-gate", sweep_opts.voltages.v_gate, "gate drive in V");
  sweep_cmd->add_option("--max-rows", sweep_opts.max_rows, "max sampled rows")
      ->check(CLI::Range(std::size_t(2), kMaxDimension));
  sweep_cmd->add_option("--max-cols", sweep_opts.max_cols, "max sampled cols")
      ->check(CLI::Range(std::size_t(2), kMaxDimension));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version keep 0; argument errors are config errors
  }

  try {
    if (*run_cmd) return cmd_run(scenario_file, out_dir, width);
    if (*compare_cmd)
      return cmd_compare(program_file, m, n, seed, orientation, lrs_cells, as_json, width);
    sweep_opts.pulse_width = resolve_width(width, sweep_opts.pulse_width);
    return cmd_sweep(property, sweep_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
