#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "immsim/metering.hpp"
#include "immsim/ops.hpp"

namespace immsim {

// Copy statement of a data-movement program; src and dst must share a row or
// a column (clones cannot move diagonally).
struct CopyStmt {
  CellAddress src{};
  CellAddress dst{};
};

// Abstract in-array logic gate: evaluated symbolically on the stored bits and
// charged a fixed cycle/energy cost rather than being electrically simulated.
struct LogicStmt {
  std::string op;  // OR, AND, XOR, NOR, NAND, XNOR, NOT
  std::vector<CellAddress> inputs;
  CellAddress output{};
};

struct Statement {
  std::variant<CopyStmt, LogicStmt> stmt;
  std::string text;  // source form, kept for reports
};

// Text form, one statement per line:
//   COPY 0 0 -> 0 1
//   LOGIC OR (0 0, 1 0) -> 2 0
struct LimProgram {
  std::vector<Statement> statements;
  static LimProgram parse(const std::string& text);  // throws ConfigError
};

bool eval_logic(const std::string& op, const std::vector<bool>& inputs);

enum class CopyStrategy : std::uint8_t { IMM, ReadWriteBack };

const char* to_string(CopyStrategy s);

// One scheduled cycle. Micro carries an electrically simulated pulse;
// AbstractLogic charges the configured logic cost; IdleWrite is the
// write-back cycle of a copy whose destination already holds the value.
struct LoweredStep {
  enum class Kind : std::uint8_t { Micro, AbstractLogic, IdleWrite };
  std::size_t statement = 0;
  Kind kind = Kind::Micro;
  MicroOp op{};
  std::string note;
};

// Lowers against a shadow of the crossbar's logic states. Mirror copies take
// one clone cycle plus a Reset pre-cycle when the destination currently holds
// a '1'; read-write-back copies always take a read cycle plus a write cycle
// (set, reset, or idle as the value requires).
std::vector<LoweredStep> lower(const LimProgram& prog, CopyStrategy strategy,
                               const CrossbarState& cb);

struct SchedulerConfig {
  double pulse_width = 40e-9;           // s
  double logic_op_energy_j = 20.17e-12; // abstract cost per logic cycle
  // One complement operation; only the abstract two-complement copy entry
  // below uses it.
  double complement_op_energy_j = 20.17e-12;
  OpVoltages voltages{};
  SolverOptions solver{};
};

// Cost entry for the alternative copy method that chains two complement
// operations. Priced abstractly for comparison tables; never lowered,
// scheduled, or electrically simulated.
struct ComplementCopyCost {
  std::size_t cycles = 2;
  double energy_j = 0.0;
};
ComplementCopyCost complement_copy_cost(const SchedulerConfig& cfg = {});

struct StatementCost {
  std::size_t statement = 0;
  std::string text;
  std::size_t cycles = 0;
  double energy_j = 0.0;
  std::vector<std::string> ops;  // executed cycles in script form
};

struct ScheduleReport {
  CopyStrategy strategy = CopyStrategy::IMM;
  std::size_t total_cycles = 0;
  double total_energy_j = 0.0;
  std::vector<StatementCost> per_statement;
  std::vector<LogicState> final_states;  // row-major
  std::string to_json_string() const;    // keys: strategy, cycles, energy_J, per_statement
};

// Lowers and executes the program, mutating cb. Copies run through the full
// electrical simulation; logic statements write their symbolic result.
ScheduleReport run(const LimProgram& prog, CopyStrategy strategy, CrossbarState& cb,
                   const SchedulerConfig& cfg = {});

}  // namespace immsim
