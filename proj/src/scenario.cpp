#include "immsim/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "immsim/errors.hpp"
#include "immsim/serialization.hpp"

namespace immsim {

namespace {

void check_voltage_bounds(const ScenarioConfig& cfg) {
  const auto bound = [](double v, const char* what) {
    if (!(v > 0.0) || !(v < 10.0))
      throw ConfigError(std::string(what) + " must lie in (0, 10) V");
  };
  bound(cfg.voltages.v_set_drive, "voltages.v_set_drive");
  bound(cfg.voltages.v_reset_drive, "voltages.v_reset_drive");
  bound(cfg.voltages.v_read, "voltages.v_read");
  bound(cfg.voltages.v_clone, "voltages.v_clone");
  bound(cfg.voltages.v_gate, "voltages.v_gate");
}

std::string join_script(const nlohmann::json& src, const std::string& context) {
  if (src.is_string()) return src.get<std::string>();
  if (src.is_array()) {
    std::string out;
    for (const auto& line : src) {
      if (!line.is_string()) throw ConfigError(context + ": script lines must be strings");
      out += line.get<std::string>();
      out += '\n';
    }
    return out;
  }
  throw ConfigError(context + ": script must be a string or an array of lines");
}

std::vector<std::string> final_state_rows(const CrossbarState& cb) {
  std::vector<std::string> rows;
  rows.reserve(cb.rows());
  for (std::size_t r = 0; r < cb.rows(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cb.cols(); ++c)
      line += cb.read_state({r, c}) == LogicState::LRS ? '1' : '0';
    rows.push_back(std::move(line));
  }
  return rows;
}

const char* cycle_label(MicroOpKind k) {
  switch (k) {
    case MicroOpKind::Set: return "Set";
    case MicroOpKind::Reset: return "Reset";
    case MicroOpKind::Read: return "Read";
    default: return "Mov";
  }
}

nlohmann::json run_microops(const ScenarioConfig& cfg, CrossbarState& cb, double width,
                            WaveformTrace& trace) {
  const std::vector<MicroOp> ops = parse_script(cfg.program_text);
  nlohmann::json cycles = nlohmann::json::array();
  double total_energy = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const MicroOp& op = ops[i];
    nlohmann::json entry;
    entry["index"] = i;
    entry["op"] = op.to_string();
    entry["label"] = cycle_label(op.kind);
    PulseResult pr;
    if (op.kind == MicroOpKind::Read) {
      ReadResult rr = read_electrical(op.target, cb, cfg.voltages, cfg.solver);
      pr = std::move(rr.pulse);
      entry["read"] = {{"cell", to_string(op.target)},
                       {"current_A", rr.current},
                       {"value", rr.value == LogicState::LRS ? "1" : "0"}};
    } else {
      pr = execute(op, cb, cfg.voltages, cfg.solver);
    }
    const EnergyRecord energy = integrate_energy(pr, width, to_string(op.kind));
    entry["energy_J"] = energy.pulse_total;
    nlohmann::json switched = nlohmann::json::array();
    for (const SwitchingEvent& ev : pr.switching_events) switched.push_back(to_string(ev.cell));
    entry["switched"] = switched;
    total_energy += energy.pulse_total;
    trace.add_cycle(entry["label"].get<std::string>(), pr, width);
    cycles.push_back(std::move(entry));
  }
  nlohmann::json report;
  report["cycles"] = std::move(cycles);
  report["energy_J"] = total_energy;
  report["final_state"] = final_state_rows(cb);
  return report;
}

nlohmann::json run_lim(const ScenarioConfig& cfg, const CrossbarState& initial, double width) {
  const LimProgram prog = LimProgram::parse(cfg.program_text);
  SchedulerConfig sched;
  sched.pulse_width = width;
  sched.logic_op_energy_j = cfg.logic_op_energy_j;
  sched.voltages = cfg.voltages;
  sched.solver = cfg.solver;

  const auto run_one = [&](CopyStrategy s) {
    CrossbarState cb = initial;
    const ScheduleReport rep = run(prog, s, cb, sched);
    return std::pair<nlohmann::json, ScheduleReport>(nlohmann::json::parse(rep.to_json_string()),
                                                     rep);
  };

  nlohmann::json report;
  if (cfg.strategy == StrategyChoice::Both) {
    auto [imm_json, imm] = run_one(CopyStrategy::IMM);
    auto [rwb_json, rwb] = run_one(CopyStrategy::ReadWriteBack);
    if (imm.final_states != rwb.final_states)
      throw SimulationError("copy strategies disagreed on the final memory state");
    report["strategies"] = {{"imm", std::move(imm_json)},
                            {"read_write_back", std::move(rwb_json)}};
    report["cycle_ratio"] =
        static_cast<double>(rwb.total_cycles) / static_cast<double>(imm.total_cycles);
    report["energy_ratio"] = rwb.total_energy_j / imm.total_energy_j;
    CrossbarState cb = initial;
    for (std::size_t r = 0; r < cb.rows(); ++r)
      for (std::size_t c = 0; c < cb.cols(); ++c)
        cb.set_state({r, c}, imm.final_states[r * cb.cols() + c]);
    report["final_state"] = final_state_rows(cb);
  } else {
    const CopyStrategy s =
        cfg.strategy == StrategyChoice::Imm ? CopyStrategy::IMM : CopyStrategy::ReadWriteBack;
    auto [rep_json, rep] = run_one(s);
    report["schedule"] = std::move(rep_json);
    report["energy_J"] = rep.total_energy_j;
    CrossbarState cb = initial;
    for (std::size_t r = 0; r < cb.rows(); ++r)
      for (std::size_t c = 0; c < cb.cols(); ++c)
        cb.set_state({r, c}, rep.final_states[r * cb.cols() + c]);
    report["final_state"] = final_state_rows(cb);
  }
  return report;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  validate_keys(j,
                {"schema_version", "name", "crossbar", "memristor", "transistor", "voltages",
                 "pulse_width_ns", "init_lrs", "program", "strategy", "logic_op_energy_pJ",
                 "outputs"},
                "scenario");
  ScenarioConfig cfg;
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
      throw ConfigError("scenario: unsupported schema_version");
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();

    const nlohmann::json& cbj = j.at("crossbar");
    validate_keys(cbj, {"rows", "cols", "orientation", "seed"}, "scenario.crossbar");
    cfg.rows = cbj.at("rows").get<std::size_t>();
    cfg.cols = cbj.at("cols").get<std::size_t>();
    if (cbj.contains("orientation"))
      cfg.orientation = orientation_from_string(cbj.at("orientation").get<std::string>());
    if (cbj.contains("seed")) cfg.seed = cbj.at("seed").get<std::uint64_t>();

    if (j.contains("memristor")) cfg.memristor = j.at("memristor").get<MemristorParams>();
    if (j.contains("transistor")) cfg.transistor = j.at("transistor").get<TransistorParams>();

    if (j.contains("voltages")) {
      const nlohmann::json& vj = j.at("voltages");
      validate_keys(vj, {"v_set_drive", "v_reset_drive", "v_read", "v_clone", "v_gate"},
                    "scenario.voltages");
      if (vj.contains("v_set_drive")) cfg.voltages.v_set_drive = vj.at("v_set_drive");
      if (vj.contains("v_reset_drive")) cfg.voltages.v_reset_drive = vj.at("v_reset_drive");
      if (vj.contains("v_read")) cfg.voltages.v_read = vj.at("v_read");
      if (vj.contains("v_clone")) cfg.voltages.v_clone = vj.at("v_clone");
      if (vj.contains("v_gate")) cfg.voltages.v_gate = vj.at("v_gate");
    }

    if (j.contains("pulse_width_ns")) {
      const nlohmann::json& w = j.at("pulse_width_ns");
      if (w.is_string()) {
        if (w.get<std::string>() != "calibrated")
          throw ConfigError("scenario: pulse_width_ns must be a number or \"calibrated\"");
        cfg.calibrated_width = true;
      } else if (w.is_number()) {
        cfg.pulse_width = w.get<double>() * 1e-9;
        if (!(cfg.pulse_width > 0)) throw ConfigError("scenario: pulse_width_ns must be > 0");
      } else {
        throw ConfigError("scenario: pulse_width_ns must be a number or \"calibrated\"");
      }
    }

    if (j.contains("init_lrs")) {
      for (const auto& pair : j.at("init_lrs")) {
        if (!pair.is_array() || pair.size() != 2)
          throw ConfigError("scenario: init_lrs entries must be [row, col] pairs");
        cfg.init_lrs.push_back({pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>()});
      }
    }

    const nlohmann::json& pj = j.at("program");
    validate_keys(pj, {"type", "script"}, "scenario.program");
    const std::string type = pj.at("type").get<std::string>();
    if (type == "microops")
      cfg.program_type = ProgramType::MicroOps;
    else if (type == "lim")
      cfg.program_type = ProgramType::Lim;
    else
      throw ConfigError("scenario.program: type must be 'microops' or 'lim'");
    cfg.program_text = join_script(pj.at("script"), "scenario.program");

    if (j.contains("strategy")) {
      if (cfg.program_type != ProgramType::Lim)
        throw ConfigError("scenario: strategy applies only to 'lim' programs");
      const std::string s = j.at("strategy").get<std::string>();
      if (s == "imm")
        cfg.strategy = StrategyChoice::Imm;
      else if (s == "read_write_back")
        cfg.strategy = StrategyChoice::ReadWriteBack;
      else if (s == "both")
        cfg.strategy = StrategyChoice::Both;
      else
        throw ConfigError("scenario: strategy must be 'imm', 'read_write_back', or 'both'");
    }

    if (j.contains("logic_op_energy_pJ")) {
      cfg.logic_op_energy_j = j.at("logic_op_energy_pJ").get<double>() * 1e-12;
      if (cfg.logic_op_energy_j < 0)
        throw ConfigError("scenario: logic_op_energy_pJ must be >= 0");
    }

    if (cfg.program_type == ProgramType::Lim) cfg.waveform_csv.clear();
    if (j.contains("outputs")) {
      const nlohmann::json& oj = j.at("outputs");
      validate_keys(oj, {"waveform_csv", "report_json"}, "scenario.outputs");
      if (oj.contains("waveform_csv")) {
        if (cfg.program_type == ProgramType::Lim)
          throw ConfigError("scenario: waveform output is only available for micro-op programs");
        cfg.waveform_csv = oj.at("waveform_csv").get<std::string>();
      }
      if (oj.contains("report_json")) cfg.report_json = oj.at("report_json").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }

  if (cfg.rows == 0 || cfg.cols == 0 || cfg.rows > kMaxDimension || cfg.cols > kMaxDimension)
    throw ConfigError("scenario: crossbar dimensions must lie in 1.." +
                      std::to_string(kMaxDimension));
  cfg.memristor.validate();
  cfg.transistor.validate();
  check_voltage_bounds(cfg);
  for (const CellAddress& a : cfg.init_lrs)
    if (a.row >= cfg.rows || a.col >= cfg.cols)
      throw ConfigError("scenario: init_lrs cell (" + to_string(a) + ") is out of range");
  if (cfg.report_json.empty()) throw ConfigError("scenario: report_json must name a file");
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read scenario file '" + path + "'");
  try {
    return from_json_string(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const double width = cfg.calibrated_width
                           ? calibrate_pulse_width(cfg.memristor, cfg.transistor, cfg.voltages,
                                                   CalibrationTargets{}, cfg.solver)
                           : cfg.pulse_width;

  CrossbarState cb(cfg.rows, cfg.cols, cfg.orientation, cfg.memristor, cfg.transistor, cfg.seed);
  for (const CellAddress& a : cfg.init_lrs) cb.set_state(a, LogicState::LRS);

  nlohmann::json report;
  report["schema_version"] = 1;
  report["name"] = cfg.name;
  report["pulse_width_ns"] = width * 1e9;
  report["crossbar"] = {{"rows", cfg.rows},
                        {"cols", cfg.cols},
                        {"orientation", to_string(cfg.orientation)},
                        {"seed", cfg.seed}};

  ScenarioResult result;
  if (cfg.program_type == ProgramType::MicroOps) {
    report["program_type"] = "microops";
    WaveformTrace trace;
    report.update(run_microops(cfg, cb, width, trace));
    if (!cfg.waveform_csv.empty()) result.waveform_csv = trace.to_csv();
  } else {
    report["program_type"] = "lim";
    report.update(run_lim(cfg, cb, width));
  }
  result.report_json = report.dump(2) + "\n";
  return result;
}

std::vector<std::string> write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  const auto emit = [&](const std::string& name, const std::string& text) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    return path.string();
  };

  std::vector<std::string> written;
  written.push_back(emit(cfg.report_json, result.report_json));
  if (result.waveform_csv && !cfg.waveform_csv.empty())
    written.push_back(emit(cfg.waveform_csv, *result.waveform_csv));
  return written;
}

}  // namespace immsim
