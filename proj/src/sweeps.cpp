#include "immsim/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "immsim/errors.hpp"
#include "immsim/metering.hpp"
#include "immsim/ops.hpp"
#include "immsim/rng.hpp"

namespace immsim {

namespace {

std::size_t pick_dim(Rng& rng, std::size_t max_dim) {
  return 2 + rng.below(std::max<std::size_t>(max_dim, 2) - 1);
}

void random_fill(CrossbarState& cb, Rng& rng, double p_lrs) {
  for (std::size_t r = 0; r < cb.rows(); ++r)
    for (std::size_t c = 0; c < cb.cols(); ++c)
      cb.set_state({r, c}, rng.chance(p_lrs) ? LogicState::LRS : LogicState::HRS);
}

// Two distinct indices below n.
std::pair<std::size_t, std::size_t> pick_two(Rng& rng, std::size_t n) {
  const std::size_t a = rng.below(n);
  std::size_t b = rng.below(n - 1);
  if (b >= a) ++b;
  return {a, b};
}

// The divider-form clones float the shared electrode line while its gate line
// is open, so every cell on that line conducts; the trial generator therefore
// leaves those cells HRS (the compiler-managed initialization of the usage
// model) and randomizes everything the drive isolates.
bool divider_form(CloneKind kind, Orientation o) {
  if (kind == CloneKind::Word) return true;
  const bool within_row = kind == CloneKind::Row;
  return within_row == (o == Orientation::Horizontal);
}

}  // namespace

CloneTrial make_clone_trial(CloneKind kind, std::uint64_t trial_seed, const SweepOptions& opts) {
  Rng rng(mix_seed(trial_seed));
  const std::size_t m = pick_dim(rng, opts.max_rows);
  const std::size_t n = pick_dim(rng, opts.max_cols);
  const Orientation o = rng.chance(0.5) ? Orientation::Vertical : Orientation::Horizontal;
  CrossbarState cb(m, n, o, opts.memristor, opts.transistor, trial_seed);
  random_fill(cb, rng, 0.5);

  MicroOp op;
  switch (kind) {
    case CloneKind::Row: {
      const std::size_t r = rng.below(m);
      const auto [s, d] = pick_two(rng, n);
      op = MicroOp::clone_bit_row(r, s, d);
      if (divider_form(kind, o))
        for (std::size_t c = 0; c < n; ++c)
          if (c != s) cb.set_state({r, c}, LogicState::HRS);
      cb.set_state({r, d}, LogicState::HRS);
      break;
    }
    case CloneKind::Col: {
      const std::size_t c = rng.below(n);
      const auto [s, d] = pick_two(rng, m);
      op = MicroOp::clone_bit_col(c, s, d);
      if (divider_form(kind, o))
        for (std::size_t r = 0; r < m; ++r)
          if (r != s) cb.set_state({r, c}, LogicState::HRS);
      cb.set_state({d, c}, LogicState::HRS);
      break;
    }
    case CloneKind::Word: {
      const std::size_t lines = o == Orientation::Vertical ? m : n;
      const auto [s, d] = pick_two(rng, lines);
      op = MicroOp::clone_word(s, d);
      // Everything off the source line starts HRS: the destination line by
      // precondition, the rest because every gate line is open.
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const std::size_t line = o == Orientation::Vertical ? r : c;
          if (line != s) cb.set_state({r, c}, LogicState::HRS);
        }
      break;
    }
  }
  return {std::move(cb), op};
}

namespace {

template <typename Fn>
SweepResult run_trials(const std::string& property, const SweepOptions& opts, Fn&& trial_fn) {
  SweepResult result;
  result.property = property;
  result.trials = opts.trials;
  for (std::size_t t = 0; t < opts.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(opts.seed, t);
    try {
      const std::string msg = trial_fn(trial_seed);
      if (!msg.empty()) result.failures.push_back({trial_seed, msg});
    } catch (const std::exception& e) {
      result.failures.push_back({trial_seed, std::string("exception: ") + e.what()});
    }
  }
  return result;
}

CloneKind kind_for_trial(std::optional<CloneKind> only, std::uint64_t trial_seed) {
  if (only) return *only;
  switch (mix_seed(trial_seed ^ 0x5eedu) % 3) {
    case 0: return CloneKind::Row;
    case 1: return CloneKind::Col;
    default: return CloneKind::Word;
  }
}

std::string grid_diff(const std::vector<LogicState>& a, const std::vector<LogicState>& b,
                      std::size_t cols, const std::string& what) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      return what + " mismatch at (" + std::to_string(i / cols) + "," + std::to_string(i % cols) +
             ")";
  return {};
}

}  // namespace

SweepResult sweep_clone_truth_table(const SweepOptions& opts, std::optional<CloneKind> only) {
  return run_trials("clone-truth-table", opts, [&](std::uint64_t trial_seed) -> std::string {
    CloneTrial trial = make_clone_trial(kind_for_trial(only, trial_seed), trial_seed, opts);
    const std::vector<LogicState> pre = trial.cb.logic_grid();
    const std::vector<CellAddress> srcs = clone_sources(trial.op, trial.cb);
    const std::vector<CellAddress> dsts = clone_destinations(trial.op, trial.cb);
    execute(trial.op, trial.cb, opts.voltages, opts.solver);
    const std::vector<LogicState> post = trial.cb.logic_grid();
    const std::size_t cols = trial.cb.cols();
    auto at = [&](const std::vector<LogicState>& g, CellAddress a) {
      return g[a.row * cols + a.col];
    };

    for (std::size_t i = 0; i < dsts.size(); ++i)
      if (at(post, dsts[i]) != at(pre, srcs[i]))
        return "destination (" + to_string(dsts[i]) + ") did not take the source value";
    for (const CellAddress& a : srcs)
      if (at(post, a) != at(pre, a)) return "source (" + to_string(a) + ") changed";
    std::vector<bool> active(pre.size(), false);
    for (const CellAddress& a : srcs) active[a.row * cols + a.col] = true;
    for (const CellAddress& a : dsts) active[a.row * cols + a.col] = true;
    for (std::size_t i = 0; i < pre.size(); ++i)
      if (!active[i] && pre[i] != post[i])
        return "bystander (" + std::to_string(i / cols) + "," + std::to_string(i % cols) +
               ") changed";
    return {};
  });
}

SweepResult sweep_half_select(const SweepOptions& opts, std::optional<CloneKind> only) {
  return run_trials("half-select", opts, [&](std::uint64_t trial_seed) -> std::string {
    CloneTrial trial = make_clone_trial(kind_for_trial(only, trial_seed), trial_seed, opts);
    const std::vector<CellAddress> srcs = clone_sources(trial.op, trial.cb);
    const std::size_t cols = trial.cb.cols();
    const MemristorParams& mp = trial.cb.memristor_params();
    const double bound = opts.voltages.v_half() + 1e-6;

    const PulseResult pr = execute(trial.op, trial.cb, opts.voltages, opts.solver);
    std::vector<bool> is_src(pr.participants.size(), false);
    for (const CellAddress& a : srcs) is_src[a.row * cols + a.col] = true;

    for (const PulseInterval& iv : pr.intervals) {
      for (std::size_t i = 0; i < pr.participants.size(); ++i) {
        const double v = std::abs(iv.devices[i].v_memristor);
        if (!pr.participants[i]) {
          if (v > bound)
            return "half-selected (" + std::to_string(i / cols) + "," + std::to_string(i % cols) +
                   ") sees " + std::to_string(v) + " V";
          if (v >= mp.v_set)
            return "half-selected (" + std::to_string(i / cols) + "," + std::to_string(i % cols) +
                   ") reaches the set threshold";
        } else if (is_src[i] && v >= mp.v_reset) {
          return "clone source (" + std::to_string(i / cols) + "," + std::to_string(i % cols) +
                 ") leaves its retention window";
        }
      }
    }
    for (const SwitchingEvent& ev : pr.switching_events)
      if (!pr.participants[ev.cell.row * cols + ev.cell.col])
        return "non-participant (" + to_string(ev.cell) + ") switched";
    return {};
  });
}

SweepResult sweep_word_parallelism(const SweepOptions& opts) {
  return run_trials("word-parallelism", opts, [&](std::uint64_t trial_seed) -> std::string {
    CloneTrial trial = make_clone_trial(CloneKind::Word, trial_seed, opts);
    const std::vector<CellAddress> srcs = clone_sources(trial.op, trial.cb);
    const std::vector<CellAddress> dsts = clone_destinations(trial.op, trial.cb);
    const std::vector<LogicState> pre = trial.cb.logic_grid();
    const std::size_t cols = trial.cb.cols();
    auto at = [&](const std::vector<LogicState>& g, CellAddress a) {
      return g[a.row * cols + a.col];
    };

    // One pulse must complete the whole word.
    const PulseResult pr = execute(trial.op, trial.cb, opts.voltages, opts.solver);
    const double e_word = integrate_energy(pr, opts.pulse_width).pulse_total;
    const std::vector<LogicState> post_word = trial.cb.logic_grid();
    for (std::size_t i = 0; i < dsts.size(); ++i)
      if (at(post_word, dsts[i]) != at(pre, srcs[i]))
        return "word clone missed bit " + std::to_string(i);

    // Per-bit composition on an identically sampled crossbar.
    CloneTrial ref = make_clone_trial(CloneKind::Word, trial_seed, opts);
    const bool vertical = ref.cb.orientation() == Orientation::Vertical;
    double e_bits = 0.0;
    const std::size_t width = vertical ? ref.cb.cols() : ref.cb.rows();
    for (std::size_t i = 0; i < width; ++i) {
      const MicroOp bit = vertical ? MicroOp::clone_bit_col(i, trial.op.src, trial.op.dst)
                                   : MicroOp::clone_bit_row(i, trial.op.src, trial.op.dst);
      const PulseResult bit_pr = execute(bit, ref.cb, opts.voltages, opts.solver);
      e_bits += integrate_energy(bit_pr, opts.pulse_width).pulse_total;
    }
    const std::string diff = grid_diff(post_word, ref.cb.logic_grid(), cols, "word vs per-bit");
    if (!diff.empty()) return diff;
    if (std::abs(e_word - e_bits) > 0.01 * e_word)
      return "word energy " + std::to_string(e_word * 1e12) + " pJ differs from per-bit sum " +
             std::to_string(e_bits * 1e12) + " pJ by more than 1%";
    return {};
  });
}

ProgramTrial make_program_trial(std::uint64_t trial_seed, const SweepOptions& opts,
                                std::size_t max_statements) {
  Rng rng(mix_seed(trial_seed ^ 0x9e0a11u));
  const std::size_t m = pick_dim(rng, opts.max_rows);
  const std::size_t n = pick_dim(rng, opts.max_cols);
  const Orientation o = rng.chance(0.5) ? Orientation::Vertical : Orientation::Horizontal;
  CrossbarState cb(m, n, o, opts.memristor, opts.transistor, trial_seed);
  random_fill(cb, rng, 0.25);

  std::vector<LogicState> shadow = cb.logic_grid();
  auto sh = [&](CellAddress a) -> LogicState& { return shadow[a.row * n + a.col]; };

  std::ostringstream text;
  const std::size_t count = 1 + rng.below(max_statements);
  for (std::size_t i = 0; i < count; ++i) {
    const bool want_copy = rng.chance(0.7);
    bool emitted = false;
    if (want_copy) {
      for (std::size_t attempt = 0; attempt < 20 && !emitted; ++attempt) {
        const CellAddress src{rng.below(m), rng.below(n)};
        const bool within_row = rng.chance(0.5);
        CellAddress dst = src;
        if (within_row) {
          if (n < 2) continue;
          dst.col = rng.below(n - 1);
          if (dst.col >= src.col) ++dst.col;
        } else {
          if (m < 2) continue;
          dst.row = rng.below(m - 1);
          if (dst.row >= src.row) ++dst.row;
        }
        // Divider-form clones need the cells sharing the open gate line to be
        // initialized; skip candidates whose shared line is in use.
        const bool divider = within_row == (o == Orientation::Horizontal);
        if (divider) {
          bool clean = true;
          if (within_row) {
            for (std::size_t c = 0; c < n && clean; ++c)
              if (c != src.col && c != dst.col && sh({src.row, c}) != LogicState::HRS)
                clean = false;
          } else {
            for (std::size_t r = 0; r < m && clean; ++r)
              if (r != src.row && r != dst.row && sh({r, src.col}) != LogicState::HRS)
                clean = false;
          }
          if (!clean) continue;
        }
        text << "COPY " << src.row << ' ' << src.col << " -> " << dst.row << ' ' << dst.col
             << '\n';
        sh(dst) = sh(src);
        emitted = true;
      }
    }
    if (!emitted) {
      static const char* tags[] = {"OR", "AND", "XOR", "NOR", "NAND", "NOT"};
      const std::string tag = tags[rng.below(6)];
      const std::size_t arity = tag == "NOT" ? 1 : 2;
      std::vector<CellAddress> cells;  // inputs then output, pairwise distinct
      while (cells.size() < arity + 1) {
        const CellAddress a{rng.below(m), rng.below(n)};
        if (std::find(cells.begin(), cells.end(), a) == cells.end()) cells.push_back(a);
      }
      text << "LOGIC " << tag << " (";
      std::vector<bool> bits;
      for (std::size_t k = 0; k < arity; ++k) {
        if (k) text << ", ";
        text << cells[k].row << ' ' << cells[k].col;
        bits.push_back(sh(cells[k]) == LogicState::LRS);
      }
      text << ") -> " << cells[arity].row << ' ' << cells[arity].col << '\n';
      sh(cells[arity]) = eval_logic(tag, bits) ? LogicState::LRS : LogicState::HRS;
    }
  }
  return {std::move(cb), LimProgram::parse(text.str())};
}

SweepResult sweep_strategy_equivalence(const SweepOptions& opts) {
  return run_trials("strategy-equivalence", opts, [&](std::uint64_t trial_seed) -> std::string {
    ProgramTrial trial = make_program_trial(trial_seed, opts);
    SchedulerConfig cfg;
    cfg.pulse_width = opts.pulse_width;
    cfg.voltages = opts.voltages;
    cfg.solver = opts.solver;

    CrossbarState cb_imm = trial.cb;
    CrossbarState cb_rwb = trial.cb;
    const ScheduleReport imm = run(trial.prog, CopyStrategy::IMM, cb_imm, cfg);
    const ScheduleReport rwb = run(trial.prog, CopyStrategy::ReadWriteBack, cb_rwb, cfg);
    const std::string diff =
        grid_diff(imm.final_states, rwb.final_states, trial.cb.cols(), "strategy");
    if (!diff.empty()) return diff;
    if (imm.total_cycles > rwb.total_cycles)
      return "mirror strategy used more cycles (" + std::to_string(imm.total_cycles) + " vs " +
             std::to_string(rwb.total_cycles) + ")";
    return {};
  });
}

SweepResult run_named_sweep(const std::string& name, const SweepOptions& opts) {
  if (name == "clone-truth-table") return sweep_clone_truth_table(opts);
  if (name == "half-select") return sweep_half_select(opts);
  if (name == "word-parallelism") return sweep_word_parallelism(opts);
  if (name == "strategy-equivalence") return sweep_strategy_equivalence(opts);
  throw ConfigError("unknown sweep property '" + name +
                    "' (expected clone-truth-table, half-select, word-parallelism, or "
                    "strategy-equivalence)");
}

}  // namespace immsim
