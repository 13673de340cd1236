#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include "immsim/errors.hpp"
#include "immsim/scheduler.hpp"
#include "immsim/sweeps.hpp"

using namespace immsim;

namespace {

CrossbarState make(std::size_t m, std::size_t n, std::uint64_t seed = 1) {
  return CrossbarState(m, n, Orientation::Vertical, MemristorParams{}, TransistorParams{}, seed);
}

// Two operands converge on one column, then a logic step combines them.
const char* kDemoProgram =
    "COPY 0 0 -> 0 2\n"
    "COPY 1 1 -> 1 2\n"
    "LOGIC OR (0 2, 1 2) -> 2 2\n";

CrossbarState demo_crossbar() {
  CrossbarState cb = make(3, 3, 7);
  cb.set_state({0, 0}, LogicState::LRS);
  cb.set_state({1, 1}, LogicState::LRS);
  return cb;
}

}  // namespace

TEST_CASE("program parsing normalizes statements") {
  const LimProgram prog = LimProgram::parse(
      "# comment\n"
      "COPY 0 0 -> 0 2   # move\n"
      "\n"
      "LOGIC OR (0 2,1 2)->2 2\n"
      "LOGIC NOT ( 1 1 ) -> 0 1\n");
  REQUIRE(prog.statements.size() == 3);
  CHECK(prog.statements[0].text == "COPY 0 0 -> 0 2");
  CHECK(prog.statements[1].text == "LOGIC OR (0 2, 1 2) -> 2 2");
  CHECK(prog.statements[2].text == "LOGIC NOT (1 1) -> 0 1");

  const auto& cp = std::get<CopyStmt>(prog.statements[0].stmt);
  CHECK(cp.src == CellAddress{0, 0});
  CHECK(cp.dst == CellAddress{0, 2});
  const auto& lg = std::get<LogicStmt>(prog.statements[1].stmt);
  CHECK(lg.op == "OR");
  REQUIRE(lg.inputs.size() == 2);
  CHECK(lg.output == CellAddress{2, 2});
}

TEST_CASE("program parsing rejects malformed statements") {
  CHECK_THROWS_AS(LimProgram::parse("COPY 0 0 -> 1 1\n"), ConfigError);  // diagonal
  CHECK_THROWS_AS(LimProgram::parse("COPY 0 0 -> 0 0\n"), ConfigError);  // self copy
  CHECK_THROWS_AS(LimProgram::parse("COPY 0 0 0 1\n"), ConfigError);     // missing arrow
  CHECK_THROWS_AS(LimProgram::parse("LOGIC FOO (0 0, 0 1) -> 0 2\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("LOGIC NOT (0 0, 0 1) -> 0 2\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("LOGIC AND (0 0) -> 0 2\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("LOGIC OR (0 0, 0 1) -> 0 1\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("LOGIC OR (0 0, 0 1 -> 0 2\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("MOVE 0 0 -> 0 1\n"), ConfigError);
  CHECK_THROWS_AS(LimProgram::parse("COPY 0 0 -> 0 1 junk\n"), ConfigError);
  try {
    LimProgram::parse("COPY 0 0 -> 0 1\nLOGIC Q (0 0) -> 1 0\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("logic evaluation truth table") {
  CHECK(eval_logic("OR", {false, false}) == false);
  CHECK(eval_logic("OR", {true, false}) == true);
  CHECK(eval_logic("AND", {true, true}) == true);
  CHECK(eval_logic("AND", {true, false}) == false);
  CHECK(eval_logic("XOR", {true, true}) == false);
  CHECK(eval_logic("XOR", {true, false}) == true);
  CHECK(eval_logic("NOR", {false, false}) == true);
  CHECK(eval_logic("NAND", {true, true}) == false);
  CHECK(eval_logic("XNOR", {true, true}) == true);
  CHECK(eval_logic("NOT", {true}) == false);
  CHECK(eval_logic("NOT", {false}) == true);
  CHECK(eval_logic("AND", {true, true, false}) == false);
  CHECK(eval_logic("XOR", {true, true, true}) == true);
  CHECK_THROWS_AS(eval_logic("FOO", {true}), ConfigError);
}

TEST_CASE("mirror lowering: one clone cycle onto a fresh destination") {
  CrossbarState cb = make(3, 3);
  cb.set_state({0, 0}, LogicState::LRS);
  const LimProgram prog = LimProgram::parse("COPY 0 0 -> 0 2\n");
  const std::vector<LoweredStep> steps = lower(prog, CopyStrategy::IMM, cb);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].kind == LoweredStep::Kind::Micro);
  CHECK(steps[0].op.to_string() == "CLONE_BIT_ROW 0 0 2");

  // Column-aligned copies lower to column clones.
  const LimProgram col = LimProgram::parse("COPY 0 0 -> 2 0\n");
  const std::vector<LoweredStep> col_steps = lower(col, CopyStrategy::IMM, cb);
  REQUIRE(col_steps.size() == 1);
  CHECK(col_steps[0].op.to_string() == "CLONE_BIT_COL 0 0 2");
}

TEST_CASE("mirror lowering: a used destination gets a reset pre-cycle") {
  CrossbarState cb = make(3, 3);
  cb.set_state({0, 0}, LogicState::LRS);
  cb.set_state({0, 2}, LogicState::LRS);  // destination holds stale data
  const LimProgram prog = LimProgram::parse("COPY 0 0 -> 0 2\n");
  const std::vector<LoweredStep> steps = lower(prog, CopyStrategy::IMM, cb);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].op.to_string() == "RESET 0 2");
  CHECK(steps[1].op.to_string() == "CLONE_BIT_ROW 0 0 2");
}

TEST_CASE("read-write-back lowering always takes two cycles") {
  CrossbarState cb = make(3, 3);
  cb.set_state({0, 0}, LogicState::LRS);

  // '1' onto a fresh cell: read then set.
  auto steps = lower(LimProgram::parse("COPY 0 0 -> 0 2\n"), CopyStrategy::ReadWriteBack, cb);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].op.to_string() == "READ 0 0");
  CHECK(steps[1].op.to_string() == "SET 0 2");

  // '0' onto a fresh cell: read then an idle write cycle.
  steps = lower(LimProgram::parse("COPY 1 0 -> 1 2\n"), CopyStrategy::ReadWriteBack, cb);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].op.to_string() == "READ 1 0");
  CHECK(steps[1].kind == LoweredStep::Kind::IdleWrite);

  // '0' onto a cell holding stale '1': read then reset.
  cb.set_state({1, 2}, LogicState::LRS);
  steps = lower(LimProgram::parse("COPY 1 0 -> 1 2\n"), CopyStrategy::ReadWriteBack, cb);
  REQUIRE(steps.size() == 2);
  CHECK(steps[1].op.to_string() == "RESET 1 2");
}

TEST_CASE("lowering rejects statements outside the crossbar") {
  const CrossbarState cb = make(3, 3);
  CHECK_THROWS_AS(lower(LimProgram::parse("COPY 0 0 -> 0 9\n"), CopyStrategy::IMM, cb),
                  ConfigError);
  CHECK_THROWS_AS(lower(LimProgram::parse("LOGIC OR (0 0, 9 0) -> 1 1\n"), CopyStrategy::IMM, cb),
                  ConfigError);
}

TEST_CASE("dependency demo: 3 mirror cycles versus 5 read-write-back cycles") {
  const LimProgram prog = LimProgram::parse(kDemoProgram);

  CrossbarState imm_cb = demo_crossbar();
  const ScheduleReport imm = run(prog, CopyStrategy::IMM, imm_cb, SchedulerConfig{});
  CrossbarState rwb_cb = demo_crossbar();
  const ScheduleReport rwb = run(prog, CopyStrategy::ReadWriteBack, rwb_cb, SchedulerConfig{});

  CHECK(imm.total_cycles == 3);
  CHECK(rwb.total_cycles == 5);
  REQUIRE(imm.per_statement.size() == 3);
  CHECK(imm.per_statement[0].cycles == 1);
  CHECK(imm.per_statement[1].cycles == 1);
  CHECK(imm.per_statement[2].cycles == 1);
  CHECK(rwb.per_statement[0].cycles == 2);
  CHECK(rwb.per_statement[1].cycles == 2);
  CHECK(rwb.per_statement[2].cycles == 1);

  // Both strategies leave identical memory, with the OR result written.
  CHECK(imm.final_states == rwb.final_states);
  CHECK(imm_cb.read_state({2, 2}) == LogicState::LRS);
  CHECK(imm_cb.read_state({0, 2}) == LogicState::LRS);
  CHECK(imm_cb.read_state({1, 2}) == LogicState::LRS);

  // Moving data by mirroring is cheaper than reading it out and rewriting it.
  CHECK(imm.total_energy_j < rwb.total_energy_j);
}

TEST_CASE("copy-only programs onto fresh cells halve the cycle count") {
  std::string text;
  CrossbarState cb = make(4, 4, 11);
  for (std::size_t r = 0; r < 4; ++r) {
    if (r % 2 == 0) cb.set_state({r, 0}, LogicState::LRS);
    text += "COPY " + std::to_string(r) + " 0 -> " + std::to_string(r) + " 2\n";
    text += "COPY " + std::to_string(r) + " 0 -> " + std::to_string(r) + " 3\n";
  }
  const LimProgram prog = LimProgram::parse(text);

  CrossbarState imm_cb = cb;
  const ScheduleReport imm = run(prog, CopyStrategy::IMM, imm_cb, SchedulerConfig{});
  CrossbarState rwb_cb = cb;
  const ScheduleReport rwb = run(prog, CopyStrategy::ReadWriteBack, rwb_cb, SchedulerConfig{});

  CHECK(imm.total_cycles == 8);
  CHECK(rwb.total_cycles == 16);
  CHECK(imm.final_states == rwb.final_states);
  CHECK(imm.total_energy_j < rwb.total_energy_j);
}

TEST_CASE("reusing a destination costs a reset pre-cycle and drops the ratio below 2") {
  CrossbarState cb = make(2, 3, 5);
  cb.set_state({0, 0}, LogicState::LRS);
  const LimProgram prog = LimProgram::parse(
      "COPY 0 0 -> 0 2\n"
      "COPY 0 1 -> 0 2\n");  // overwrites the '1' just cloned

  CrossbarState imm_cb = cb;
  const ScheduleReport imm = run(prog, CopyStrategy::IMM, imm_cb, SchedulerConfig{});
  CrossbarState rwb_cb = cb;
  const ScheduleReport rwb = run(prog, CopyStrategy::ReadWriteBack, rwb_cb, SchedulerConfig{});

  CHECK(imm.total_cycles == 3);  // clone, then reset + clone
  CHECK(imm.per_statement[1].ops ==
        std::vector<std::string>{"RESET 0 2", "CLONE_BIT_ROW 0 1 2"});
  CHECK(rwb.total_cycles == 4);
  CHECK(imm.final_states == rwb.final_states);
  CHECK(imm_cb.read_state({0, 2}) == LogicState::HRS);
  const double ratio =
      static_cast<double>(rwb.total_cycles) / static_cast<double>(imm.total_cycles);
  CHECK(ratio < 2.0);
  CHECK(ratio > 1.0);
}

TEST_CASE("abstract logic cycles charge the configured energy") {
  CrossbarState cb = make(2, 2, 3);
  cb.set_state({0, 0}, LogicState::LRS);
  const LimProgram prog = LimProgram::parse("LOGIC NOT (0 0) -> 1 1\n");

  SchedulerConfig cfg;
  cfg.logic_op_energy_j = 5e-12;
  const ScheduleReport rep = run(prog, CopyStrategy::IMM, cb, cfg);
  CHECK(rep.total_cycles == 1);
  CHECK(rep.total_energy_j == doctest::Approx(5e-12).epsilon(1e-12));
  CHECK(rep.per_statement[0].ops == std::vector<std::string>{"LOGIC NOT"});
  CHECK(cb.read_state({1, 1}) == LogicState::HRS);  // NOT '1' -> '0'
}

TEST_CASE("empty programs cost nothing under either strategy") {
  const LimProgram prog = LimProgram::parse("# nothing but comments\n\n");
  CHECK(prog.statements.empty());
  for (const CopyStrategy s : {CopyStrategy::IMM, CopyStrategy::ReadWriteBack}) {
    CrossbarState cb = make(2, 2, 3);
    const ScheduleReport rep = run(prog, s, cb);
    CHECK(rep.total_cycles == 0);
    CHECK(rep.total_energy_j == 0.0);
    CHECK(rep.per_statement.empty());
  }
}

TEST_CASE("the two-complement copy alternative is priced but never scheduled") {
  SchedulerConfig cfg;
  cfg.complement_op_energy_j = 3e-12;
  const ComplementCopyCost cost = complement_copy_cost(cfg);
  CHECK(cost.cycles == 2);
  CHECK(cost.energy_j == doctest::Approx(6e-12).epsilon(1e-12));

  // No lowering path ever emits it: a copy lowers purely to clone/reset or
  // read/write cycles.
  const LimProgram prog = LimProgram::parse("COPY 0 0 -> 0 1\n");
  for (const CopyStrategy s : {CopyStrategy::IMM, CopyStrategy::ReadWriteBack}) {
    for (const LoweredStep& step : lower(prog, s, make(2, 2, 3)))
      CHECK(step.kind != LoweredStep::Kind::AbstractLogic);
  }
}

TEST_CASE("schedule report serializes cycles, energy, and per-statement costs") {
  const LimProgram prog = LimProgram::parse(kDemoProgram);
  CrossbarState cb = demo_crossbar();
  const ScheduleReport rep = run(prog, CopyStrategy::IMM, cb, SchedulerConfig{});

  const nlohmann::json j = nlohmann::json::parse(rep.to_json_string());
  CHECK(j.at("strategy") == "imm");
  CHECK(j.at("cycles") == 3);
  CHECK(j.at("energy_J").get<double>() > 0.0);
  REQUIRE(j.at("per_statement").size() == 3);
  CHECK(j.at("per_statement")[0].at("text") == "COPY 0 0 -> 0 2");
  CHECK(j.at("per_statement")[0].at("ops")[0] == "CLONE_BIT_ROW 0 0 2");
}

TEST_CASE("random programs end identically under both strategies") {
  SweepOptions opts;
  opts.trials = 60;
  opts.seed = 31;
  const SweepResult res = sweep_strategy_equivalence(opts);
  if (!res.ok())
    for (const auto& f : res.failures) MESSAGE("seed ", f.seed, ": ", f.message);
  CHECK(res.ok());
}

TEST_CASE("program trial generation is deterministic per seed") {
  SweepOptions opts;
  const ProgramTrial a = make_program_trial(9, opts);
  const ProgramTrial b = make_program_trial(9, opts);
  REQUIRE(a.prog.statements.size() == b.prog.statements.size());
  for (std::size_t i = 0; i < a.prog.statements.size(); ++i)
    CHECK(a.prog.statements[i].text == b.prog.statements[i].text);
  CHECK(a.cb.to_json_string() == b.cb.to_json_string());
}
