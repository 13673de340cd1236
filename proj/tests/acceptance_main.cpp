// Release acceptance gate. Each criterion prints exactly one verdict line:
//
//   [N] <name>: PASS (<summary>)   or   [N] <name>: FAIL (<what broke>)
//
// The process exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "immsim/metering.hpp"
#include "immsim/ops.hpp"
#include "immsim/scheduler.hpp"
#include "immsim/solver.hpp"
#include "immsim/sweeps.hpp"
#include "test_support.hpp"

using namespace immsim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string info;      // shown on PASS
  std::string problems;  // shown on FAIL

  const std::string& detail() const { return pass ? info : problems; }
};

void expect(Outcome& o, bool cond, const std::string& problem) {
  if (cond) return;
  o.pass = false;
  if (!o.problems.empty()) o.problems += "; ";
  o.problems += problem;
}

void note(Outcome& o, const std::string& info) {
  if (!o.info.empty()) o.info += ", ";
  o.info += info;
}

void expect_sweep_clean(Outcome& o, const SweepResult& r, const std::string& label) {
  if (r.ok()) return;
  const SweepFailure& first = r.failures.front();
  expect(o, false,
         fmt("%s: %zu/%zu trials failed (first: seed=%llu %s)", label.c_str(),
             r.failures.size(), r.trials, static_cast<unsigned long long>(first.seed),
             first.message.c_str()));
}

// --- [1] single-cell voltage divider fidelity ----------------------------

Outcome divider_fidelity() {
  Outcome o;
  const double closed = 1.5 * 4.0e3 / (4.0e3 + 67.5e3);

  // Hand-built series pair: 1.5 V -- 67.5k -- node -- 4k -- ground.
  Network net;
  net.node_count = 2;
  net.boundary = {1.5, std::nullopt};
  net.leak = {0.0, 0.0};
  net.branches.push_back({0, 1, 1.0 / 67.5e3, {}, BranchKind::Other});
  net.branches.push_back({1, kGroundNode, 1.0 / 4.0e3, {}, BranchKind::Other});
  const double v_hand = solve_dc(net)[1];
  expect(o, std::abs(v_hand - closed) <= 1e-6 * closed,
         fmt("hand-built network solved %.9f V, closed form %.9f V", v_hand, closed));

  // Same divider assembled through the full 1T1R network path: LRS source at
  // 0 V, HRS destination electrode at 1.5 V, the shared source line floating.
  // The on-state access transistors (100 ohm each) join the closed form.
  MemristorParams mp;
  mp.r_on_min = mp.r_on_max = 4.0e3;
  mp.r_off_min = mp.r_off_max = 67.5e3;
  CrossbarState cb(1, 2, Orientation::Vertical, mp, TransistorParams{}, 1);
  cb.set_state({0, 0}, LogicState::LRS);
  DriveConfig d;
  d.row_drives = {Drive::floating()};
  d.col_drives = {Drive::driven(0.0), Drive::driven(1.5)};
  d.gate_voltages = {2.5, 2.5};
  const double v_cb = solve_dc(build_network(cb, d))[NodeLayout{1, 2}.row_node(0)];
  const double closed_fet = 1.5 * (4.0e3 + 100.0) / (4.0e3 + 67.5e3 + 200.0);
  expect(o, std::abs(v_cb - closed_fet) <= 1e-6 * closed_fet,
         fmt("1T1R network solved %.9f V, closed form %.9f V", v_cb, closed_fet));

  // The ideal closed form agrees with the recorded reference value.
  expect(o, std::abs(closed - 0.08392) <= 5e-6,
         fmt("closed form %.9f V does not round to 0.08392 V", closed));

  note(o, fmt("ideal divider %.7f V (rel err %.1e), 1T1R divider %.7f V (rel err %.1e)", v_hand,
              std::abs(v_hand - closed) / closed, v_cb,
              std::abs(v_cb - closed_fet) / closed_fet));
  return o;
}

// --- [2] randomized clone truth table ------------------------------------

Outcome clone_truth_table() {
  Outcome o;
  const std::vector<std::pair<CloneKind, std::uint64_t>> kinds = {
      {CloneKind::Row, 101}, {CloneKind::Col, 202}, {CloneKind::Word, 303}};
  const auto t0 = Clock::now();
  std::size_t total = 0;
  for (const auto& [kind, seed] : kinds) {
    SweepOptions opts;
    opts.trials = 1000;
    opts.seed = seed;
    const SweepResult r = sweep_clone_truth_table(opts, kind);
    total += r.trials;
    expect_sweep_clean(o, r, fmt("kind %d", static_cast<int>(kind)));
  }
  const double secs = seconds_since(t0);
  expect(o, secs < 30.0, fmt("suite took %.1f s, budget 30 s", secs));
  note(o, fmt("%zu randomized clones correct in %.2f s", total, secs));
  return o;
}

// --- [3] half-select safety ----------------------------------------------

Outcome half_select_safety() {
  Outcome o;
  const std::vector<std::pair<CloneKind, std::uint64_t>> kinds = {
      {CloneKind::Row, 111}, {CloneKind::Col, 222}, {CloneKind::Word, 333}};
  std::size_t total = 0;
  for (const auto& [kind, seed] : kinds) {
    SweepOptions opts;
    opts.trials = 1000;
    opts.seed = seed;
    const SweepResult r = sweep_half_select(opts, kind);
    total += r.trials;
    expect_sweep_clean(o, r, fmt("kind %d", static_cast<int>(kind)));
  }
  note(o, fmt("%zu randomized clones: bystanders capped at half the supply, sources retained",
              total));
  return o;
}

// --- [4] word clone single-pulse parallelism -----------------------------

Outcome word_parallelism() {
  Outcome o;
  const OpVoltages volts{};
  const double width = 40e-9;
  double worst_rel = 0.0;
  for (const std::size_t n : std::vector<std::size_t>{2, 4, 8, 16, 32, 64}) {
    const std::uint64_t seed = 1000 + n;
    const auto build = [&] {
      CrossbarState cb(2, n, Orientation::Vertical, MemristorParams{}, TransistorParams{}, seed);
      Rng rng(derive_seed(seed, 77));
      for (std::size_t c = 0; c < n; ++c)
        if (rng.chance(0.5)) cb.set_state({0, c}, LogicState::LRS);
      return cb;
    };

    CrossbarState word_cb = build();
    const PulseResult pr = execute(MicroOp::clone_word(0, 1), word_cb, volts);
    const double e_word = integrate_energy(pr, width).pulse_total;
    for (std::size_t c = 0; c < n; ++c)
      expect(o, word_cb.read_state({1, c}) == word_cb.read_state({0, c}),
             fmt("width %zu: bit %zu wrong after the single word pulse", n, c));

    CrossbarState bit_cb = build();
    double e_bits = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      e_bits +=
          integrate_energy(execute(MicroOp::clone_bit_col(c, 0, 1), bit_cb, volts), width)
              .pulse_total;

    expect(o, word_cb.logic_grid() == bit_cb.logic_grid(),
           fmt("width %zu: word clone and per-bit clones end in different states", n));
    const double rel = std::abs(e_word - e_bits) / e_word;
    worst_rel = std::max(worst_rel, rel);
    expect(o, rel <= 0.01,
           fmt("width %zu: word energy %.4g J vs per-bit sum %.4g J (%.2f%%)", n, e_word,
               e_bits, 100.0 * rel));
  }
  note(o, fmt("widths 2-64 bit-exact in one pulse, worst energy deviation %.3f%%",
              100.0 * worst_rel));
  return o;
}

// --- [5] operation energy ordering at the calibrated width ---------------

Outcome energy_ordering() {
  Outcome o;
  const OpVoltages volts{};
  const double w = calibrate_pulse_width();
  expect(o, w > 10e-9 && w < 200e-9,
         fmt("calibrated width %.2f ns outside (10, 200) ns", w * 1e9));

  const MemristorParams nominal = MemristorParams{}.nominal();
  const auto nominal_cb = [&](std::size_t m, std::size_t n) {
    return CrossbarState(m, n, Orientation::Vertical, nominal, TransistorParams{}, 1);
  };
  const auto op_energy = [&](CrossbarState cb, const MicroOp& op) {
    return integrate_energy(execute(op, cb, volts), w).pulse_total;
  };

  const double e_set = op_energy(nominal_cb(1, 1), MicroOp::set({0, 0}));
  CrossbarState reset_cb = nominal_cb(1, 1);
  reset_cb.set_state({0, 0}, LogicState::LRS);
  const double e_reset = op_energy(reset_cb, MicroOp::reset({0, 0}));
  CrossbarState one_cb = nominal_cb(1, 2);
  one_cb.set_state({0, 0}, LogicState::LRS);
  const double e_bit1 = op_energy(one_cb, MicroOp::clone_bit_row(0, 0, 1));
  const double e_bit0 = op_energy(nominal_cb(1, 2), MicroOp::clone_bit_row(0, 0, 1));

  expect(o, 5.0 * e_bit0 <= e_bit1,
         fmt("'0' clone %.3g J not far below '1' clone %.3g J", e_bit0, e_bit1));
  expect(o, e_bit1 < e_reset, fmt("'1' clone %.3g J not below reset %.3g J", e_bit1, e_reset));
  expect(o, e_reset < e_set, fmt("reset %.3g J not below set %.3g J", e_reset, e_set));
  const double ratio = e_bit1 / e_bit0;
  expect(o, ratio >= 5.0 && ratio <= 30.0, fmt("bit1/bit0 ratio %.2f outside [5, 30]", ratio));

  // Word patterns cost what their bits cost.
  CrossbarState w11 = nominal_cb(2, 2);
  w11.set_state({0, 0}, LogicState::LRS);
  w11.set_state({0, 1}, LogicState::LRS);
  const double e_w11 = op_energy(w11, MicroOp::clone_word(0, 1));
  const double e_w00 = op_energy(nominal_cb(2, 2), MicroOp::clone_word(0, 1));
  expect(o, std::abs(e_w11 - 2.0 * e_bit1) <= 0.05 * 2.0 * e_bit1,
         fmt("word \"11\" %.4g J vs 2x bit1 %.4g J beyond 5%%", e_w11, 2.0 * e_bit1));
  expect(o, std::abs(e_w00 - 2.0 * e_bit0) <= 0.05 * 2.0 * e_bit0,
         fmt("word \"00\" %.4g J vs 2x bit0 %.4g J beyond 5%%", e_w00, 2.0 * e_bit0));

  note(o, fmt("w*=%.2f ns; set %.2f, reset %.2f, bit1 %.2f, bit0 %.3f pJ; bit1/bit0=%.1f",
              w * 1e9, e_set * 1e12, e_reset * 1e12, e_bit1 * 1e12, e_bit0 * 1e12, ratio));
  return o;
}

// --- [6] scheduler cycle ratios ------------------------------------------

Outcome scheduler_cycle_ratios() {
  Outcome o;

  // Copy-only program onto fresh destinations: mirroring needs exactly half
  // the cycles of read-plus-write-back.
  CrossbarState base(4, 4, Orientation::Vertical, MemristorParams{}, TransistorParams{}, 11);
  base.set_state({0, 0}, LogicState::LRS);
  base.set_state({2, 0}, LogicState::LRS);
  std::string text;
  for (std::size_t r = 0; r < 4; ++r) {
    text += fmt("COPY %zu 0 -> %zu 2\n", r, r);
    text += fmt("COPY %zu 0 -> %zu 3\n", r, r);
  }
  const LimProgram prog = LimProgram::parse(text);
  CrossbarState imm_cb = base;
  CrossbarState rwb_cb = base;
  const ScheduleReport imm = run(prog, CopyStrategy::IMM, imm_cb);
  const ScheduleReport rwb = run(prog, CopyStrategy::ReadWriteBack, rwb_cb);
  expect(o, imm.total_cycles == 8 && rwb.total_cycles == 16,
         fmt("copy-only cycles %zu vs %zu, expected 8 vs 16", imm.total_cycles,
             rwb.total_cycles));
  expect(o, static_cast<double>(imm.total_cycles) / static_cast<double>(rwb.total_cycles) == 0.5,
         "copy-only cycle ratio is not exactly 0.5");
  expect(o, imm_cb.logic_grid() == rwb_cb.logic_grid(),
         "copy-only program: strategies end in different states");

  // Two copies feeding one logic statement.
  CrossbarState demo_base(3, 3, Orientation::Vertical, MemristorParams{}, TransistorParams{}, 7);
  demo_base.set_state({0, 0}, LogicState::LRS);
  demo_base.set_state({1, 1}, LogicState::LRS);
  const LimProgram demo = LimProgram::parse(
      "COPY 0 0 -> 0 2\nCOPY 1 1 -> 1 2\nLOGIC OR (0 2, 1 2) -> 2 2\n");
  CrossbarState demo_imm = demo_base;
  CrossbarState demo_rwb = demo_base;
  const ScheduleReport di = run(demo, CopyStrategy::IMM, demo_imm);
  const ScheduleReport dr = run(demo, CopyStrategy::ReadWriteBack, demo_rwb);
  expect(o, di.total_cycles == 3 && dr.total_cycles == 5,
         fmt("dependent chain cycles %zu vs %zu, expected 3 vs 5", di.total_cycles,
             dr.total_cycles));
  expect(o, demo_imm.logic_grid() == demo_rwb.logic_grid(),
         "dependent chain: strategies end in different states");

  note(o, "copy-only 8 vs 16 cycles (exactly 0.5), dependent chain 3 vs 5");
  return o;
}

// --- [7] strategy equivalence over random programs -----------------------

Outcome strategy_equivalence() {
  Outcome o;
  SweepOptions opts;
  opts.trials = 500;
  opts.seed = 404;
  const auto t0 = Clock::now();
  const SweepResult r = sweep_strategy_equivalence(opts);
  const double secs = seconds_since(t0);
  expect_sweep_clean(o, r, "random programs");
  expect(o, secs < 60.0, fmt("suite took %.1f s, budget 60 s", secs));
  note(o, fmt("%zu random programs end in identical states in %.2f s", r.trials, secs));
  return o;
}

// --- [8] byte-identical scenario reruns ----------------------------------

Outcome deterministic_reruns() {
  Outcome o;
  std::size_t files = 0;
  for (const std::string name :
       {"row_clone", "col_clone", "word_clone_10", "dependency_compare", "energy_table"}) {
    testsup::TempDir dir;
    const std::string scenario = std::string(IMMSIM_SCENARIO_DIR) + "/" + name + ".json";
    const testsup::CliResult a = testsup::run_cli("run " + scenario + " --out " + dir.file("a"));
    const testsup::CliResult b = testsup::run_cli("run " + scenario + " --out " + dir.file("b"));
    expect(o, a.code == 0 && b.code == 0,
           fmt("%s: run exited %d then %d", name.c_str(), a.code, b.code));
    if (a.code != 0 || b.code != 0) continue;

    std::vector<std::string> names_a;
    for (const auto& entry : std::filesystem::directory_iterator(dir.file("a")))
      names_a.push_back(entry.path().filename().string());
    std::sort(names_a.begin(), names_a.end());
    expect(o, !names_a.empty(), fmt("%s: no outputs written", name.c_str()));
    for (const std::string& fname : names_a) {
      ++files;
      expect(o,
             testsup::read_file(dir.file("a") + "/" + fname) ==
                 testsup::read_file(dir.file("b") + "/" + fname),
             fmt("%s: %s differs between reruns", name.c_str(), fname.c_str()));
    }
  }
  note(o, fmt("5 scenarios, %zu output files byte-identical across process reruns", files));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*body)();
  };
  const std::vector<Criterion> criteria = {
      {"single-cell voltage divider fidelity", divider_fidelity},
      {"randomized clone truth table", clone_truth_table},
      {"half-select safety", half_select_safety},
      {"word clone single-pulse parallelism", word_parallelism},
      {"operation energy ordering at the calibrated width", energy_ordering},
      {"scheduler cycle ratios", scheduler_cycle_ratios},
      {"strategy equivalence over random programs", strategy_equivalence},
      {"byte-identical scenario reruns", deterministic_reruns},
  };

  std::size_t passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.problems = std::string("unhandled exception: ") + e.what();
    }
    if (o.pass) ++passed;
    std::printf("[%zu] %s: %s (%s)\n", i + 1, criteria[i].name, o.pass ? "PASS" : "FAIL",
                o.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu acceptance criteria passed\n", passed, criteria.size());
  return passed == criteria.size() ? 0 : 1;
}
