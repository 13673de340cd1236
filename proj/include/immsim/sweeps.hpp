#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "immsim/scheduler.hpp"

namespace immsim {

struct SweepOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  MemristorParams memristor{};
  TransistorParams transistor{};
  OpVoltages voltages{};
  SolverOptions solver{};
  double pulse_width = 40e-9;
  std::size_t max_rows = 16;
  std::size_t max_cols = 16;
};

struct SweepFailure {
  std::uint64_t seed = 0;  // reproduction seed of the failing trial
  std::string message;
};

struct SweepResult {
  std::string property;
  std::size_t trials = 0;
  std::vector<SweepFailure> failures;
  bool ok() const { return failures.empty(); }
};

enum class CloneKind : std::uint8_t { Row, Col, Word };

// One randomized clone setup. Cells outside the operation's active lines are
// fully random; cells that share the active line set (and therefore conduct
// through the open gate lines) start HRS, matching the usage model in which
// a compiler keeps working columns initialized. The destination starts HRS.
struct CloneTrial {
  CrossbarState cb;
  MicroOp op;
};
CloneTrial make_clone_trial(CloneKind kind, std::uint64_t trial_seed, const SweepOptions& opts);

// dst = src, src unchanged, every bystander unchanged.
SweepResult sweep_clone_truth_table(const SweepOptions& opts,
                                    std::optional<CloneKind> only = std::nullopt);

// During clone pulses every non-participant memristor sees at most
// v_clone/2 + 1e-6 V (and stays below v_set), never switches, and the clone
// source never leaves its retention window.
SweepResult sweep_half_select(const SweepOptions& opts,
                              std::optional<CloneKind> only = std::nullopt);

// A word clone is one pulse, bit-exact against per-bit clones, and its
// energy matches the per-bit sum within 1%.
SweepResult sweep_word_parallelism(const SweepOptions& opts);

// Random programs end in identical memory states under both copy strategies,
// and the mirror strategy never uses more cycles.
SweepResult sweep_strategy_equivalence(const SweepOptions& opts);

// A generated program together with the crossbar state it was generated for.
struct ProgramTrial {
  CrossbarState cb;
  LimProgram prog;
};
ProgramTrial make_program_trial(std::uint64_t trial_seed, const SweepOptions& opts,
                                std::size_t max_statements = 32);

// CLI entry: clone-truth-table | half-select | word-parallelism |
// strategy-equivalence. Throws ConfigError on unknown names.
SweepResult run_named_sweep(const std::string& name, const SweepOptions& opts);

}  // namespace immsim
