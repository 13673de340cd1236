#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "immsim/crossbar.hpp"
#include "immsim/solver.hpp"

namespace immsim {

enum class MicroOpKind : std::uint8_t { Set, Reset, Read, CloneBitRow, CloneBitCol, CloneWord };

const char* to_string(MicroOpKind k);

// One single-pulse array operation.
//
//   Set/Reset/Read    operate on `target`.
//   CloneBitRow       within row `line`, from column `src` to column `dst`.
//   CloneBitCol       within column `line`, from row `src` to row `dst`.
//   CloneWord         between two whole source lines: rows on a vertical
//                     crossbar, columns on a horizontal one.
struct MicroOp {
  MicroOpKind kind = MicroOpKind::Read;
  CellAddress target{};
  std::size_t line = 0;
  std::size_t src = 0;
  std::size_t dst = 0;

  static MicroOp set(CellAddress a) { return {MicroOpKind::Set, a, 0, 0, 0}; }
  static MicroOp reset(CellAddress a) { return {MicroOpKind::Reset, a, 0, 0, 0}; }
  static MicroOp read(CellAddress a) { return {MicroOpKind::Read, a, 0, 0, 0}; }
  static MicroOp clone_bit_row(std::size_t row, std::size_t src_col, std::size_t dst_col) {
    return {MicroOpKind::CloneBitRow, {}, row, src_col, dst_col};
  }
  static MicroOp clone_bit_col(std::size_t col, std::size_t src_row, std::size_t dst_row) {
    return {MicroOpKind::CloneBitCol, {}, col, src_row, dst_row};
  }
  static MicroOp clone_word(std::size_t src_line, std::size_t dst_line) {
    return {MicroOpKind::CloneWord, {}, 0, src_line, dst_line};
  }

  bool is_clone() const {
    return kind == MicroOpKind::CloneBitRow || kind == MicroOpKind::CloneBitCol ||
           kind == MicroOpKind::CloneWord;
  }
  std::string to_string() const;  // script form, e.g. "CLONE_BIT_ROW 0 0 1"
};

// Drive voltages shared by every operation.
struct OpVoltages {
  double v_set_drive = 1.5;    // V at the electrode line for Set
  double v_reset_drive = 2.25; // V at the source line for Reset (electrode grounded)
  double v_read = 0.5;         // V
  double v_clone = 1.5;        // V, the cloning supply
  double v_gate = 2.5;         // V on selected gate lines
  double v_half() const { return 0.5 * v_clone; }
};

// Margin diagnostics (empty = all margins hold). Deliberately advisory so
// that property sweeps can exercise mis-configured voltages.
std::vector<std::string> check_voltage_margins(const OpVoltages& v, const MemristorParams& m);

// Cells addressed by the operation; energy metering counts only these.
std::vector<CellAddress> participant_cells(const MicroOp& op, const CrossbarState& cb);
std::vector<CellAddress> clone_sources(const MicroOp& op, const CrossbarState& cb);
std::vector<CellAddress> clone_destinations(const MicroOp& op, const CrossbarState& cb);

// Lowers an operation to line drives. Clones bias unselected source lines at
// v_clone/2 and leave electrode-side non-driven lines floating; single-cell
// operations open one gate line and float every unselected line.
DriveConfig compile(const MicroOp& op, const CrossbarState& cb, const OpVoltages& volts);

// compile + run_pulse, with clone preconditions enforced: every destination
// cell must be HRS (DestinationNotInitialized otherwise). Narrows the pulse's
// participant set to the operation's cells.
PulseResult execute(const MicroOp& op, CrossbarState& cb, const OpVoltages& volts,
                    const SolverOptions& solver = {});

struct ReadResult {
  LogicState value = LogicState::HRS;
  double current = 0.0;  // A, magnitude through the target memristor
  PulseResult pulse;
};

// Read current threshold: the geometric mean of the nominal on/off currents.
double read_current_threshold(const OpVoltages& volts, const MemristorParams& m);

// Non-destructive electrical read of one cell.
ReadResult read_electrical(CellAddress a, CrossbarState& cb, const OpVoltages& volts,
                           const SolverOptions& solver = {});

// Micro-op script: one op per line ("SET 0 0", "CLONE_WORD 0 2", ...), '#'
// starts a comment. Throws ConfigError with the offending line number.
std::vector<MicroOp> parse_script(const std::string& text);

}  // namespace immsim
