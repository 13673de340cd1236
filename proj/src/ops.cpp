#include "immsim/ops.hpp"

#include <cmath>
#include <sstream>

#include "immsim/errors.hpp"

namespace immsim {

const char* to_string(MicroOpKind k) {
  switch (k) {
    case MicroOpKind::Set: return "SET";
    case MicroOpKind::Reset: return "RESET";
    case MicroOpKind::Read: return "READ";
    case MicroOpKind::CloneBitRow: return "CLONE_BIT_ROW";
    case MicroOpKind::CloneBitCol: return "CLONE_BIT_COL";
    case MicroOpKind::CloneWord: return "CLONE_WORD";
  }
  return "?";
}

std::string MicroOp::to_string() const {
  std::ostringstream os;
  os << immsim::to_string(kind) << ' ';
  switch (kind) {
    case MicroOpKind::Set:
    case MicroOpKind::Reset:
    case MicroOpKind::Read: os << target.row << ' ' << target.col; break;
    case MicroOpKind::CloneBitRow:
    case MicroOpKind::CloneBitCol: os << line << ' ' << src << ' ' << dst; break;
    case MicroOpKind::CloneWord: os << src << ' ' << dst; break;
  }
  return os.str();
}

std::vector<std::string> check_voltage_margins(const OpVoltages& v, const MemristorParams& m) {
  std::vector<std::string> notes;
  if (!(v.v_clone >= m.v_set))
    notes.push_back("v_clone below v_set: cloning a '1' cannot switch the destination");
  if (!(v.v_clone < m.v_reset))
    notes.push_back("v_clone reaches v_reset: the clone supply can reset the source");
  if (!(v.v_half() < m.v_set))
    notes.push_back("v_clone/2 reaches v_set: half-selected cells can switch");
  if (!(v.v_read < m.v_set)) notes.push_back("v_read reaches v_set: reads are destructive");
  return notes;
}

namespace {

// Role-space drive: electrode-line drives E, source-line drives S, one gate
// per electrode line. Vertical maps E to columns, Horizontal to rows.
struct RoleDrive {
  std::vector<Drive> electrode;
  std::vector<Drive> source;
  std::vector<double> gate;
};

DriveConfig to_drive_config(const CrossbarState& cb, RoleDrive&& rd) {
  DriveConfig d;
  if (cb.orientation() == Orientation::Vertical) {
    d.col_drives = std::move(rd.electrode);
    d.row_drives = std::move(rd.source);
  } else {
    d.row_drives = std::move(rd.electrode);
    d.col_drives = std::move(rd.source);
  }
  d.gate_voltages = std::move(rd.gate);
  return d;
}

struct Roles {
  std::size_t n_electrode;
  std::size_t n_source;
};

Roles roles_of(const CrossbarState& cb) {
  if (cb.orientation() == Orientation::Vertical) return {cb.cols(), cb.rows()};
  return {cb.rows(), cb.cols()};
}

RoleDrive blank_roles(const Roles& r) {
  RoleDrive rd;
  rd.electrode.assign(r.n_electrode, Drive::floating());
  rd.source.assign(r.n_source, Drive::floating());
  rd.gate.assign(r.n_electrode, 0.0);
  return rd;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

// Series clone: source and destination share a source line and sit on two
// driven electrode lines; the shared line floats and every other source line
// is held at v_clone/2 because the two open gate lines enable all their cells.
RoleDrive series_clone(const Roles& r, std::size_t shared_source, std::size_t e_src,
                       std::size_t e_dst, const OpVoltages& v) {
  RoleDrive rd = blank_roles(r);
  rd.gate[e_src] = v.v_gate;
  rd.gate[e_dst] = v.v_gate;
  rd.electrode[e_src] = Drive::driven(0.0);
  rd.electrode[e_dst] = Drive::driven(v.v_clone);
  for (std::size_t i = 0; i < r.n_source; ++i)
    if (i != shared_source) rd.source[i] = Drive::driven(v.v_half());
  return rd;
}

// Divider clone: source and destination share an electrode line and sit on
// two driven source lines; the shared electrode line floats and takes the
// divider voltage that decides whether the destination switches.
RoleDrive divider_clone(const Roles& r, std::size_t shared_electrode, std::size_t s_src,
                        std::size_t s_dst, const OpVoltages& v) {
  RoleDrive rd = blank_roles(r);
  rd.gate[shared_electrode] = v.v_gate;
  rd.source[s_src] = Drive::driven(v.v_clone);
  rd.source[s_dst] = Drive::driven(0.0);
  for (std::size_t i = 0; i < r.n_source; ++i)
    if (i != s_src && i != s_dst) rd.source[i] = Drive::driven(v.v_half());
  return rd;
}

// Parallel word clone: the divider clone applied to every electrode line at
// once. The v_clone/2 bias on unselected source lines keeps the electrode
// lines decoupled from each other.
RoleDrive word_clone(const Roles& r, std::size_t s_src, std::size_t s_dst, const OpVoltages& v) {
  RoleDrive rd = blank_roles(r);
  for (std::size_t e = 0; e < r.n_electrode; ++e) rd.gate[e] = v.v_gate;
  rd.source[s_src] = Drive::driven(v.v_clone);
  rd.source[s_dst] = Drive::driven(0.0);
  for (std::size_t i = 0; i < r.n_source; ++i)
    if (i != s_src && i != s_dst) rd.source[i] = Drive::driven(v.v_half());
  return rd;
}

RoleDrive single_cell(const CrossbarState& cb, CellAddress a, double v_electrode, double v_source,
                      const OpVoltages& v) {
  RoleDrive rd = blank_roles(roles_of(cb));
  rd.gate[cb.gate_line(a)] = v.v_gate;
  rd.electrode[cb.electrode_line(a).index] = Drive::driven(v_electrode);
  rd.source[cb.source_line(a).index] = Drive::driven(v_source);
  return rd;
}

}  // namespace

std::vector<CellAddress> clone_sources(const MicroOp& op, const CrossbarState& cb) {
  switch (op.kind) {
    case MicroOpKind::CloneBitRow: return {{op.line, op.src}};
    case MicroOpKind::CloneBitCol: return {{op.src, op.line}};
    case MicroOpKind::CloneWord: {
      std::vector<CellAddress> cells;
      if (cb.orientation() == Orientation::Vertical)
        for (std::size_t c = 0; c < cb.cols(); ++c) cells.push_back({op.src, c});
      else
        for (std::size_t r = 0; r < cb.rows(); ++r) cells.push_back({r, op.src});
      return cells;
    }
    default: return {};
  }
}

std::vector<CellAddress> clone_destinations(const MicroOp& op, const CrossbarState& cb) {
  switch (op.kind) {
    case MicroOpKind::CloneBitRow: return {{op.line, op.dst}};
    case MicroOpKind::CloneBitCol: return {{op.dst, op.line}};
    case MicroOpKind::CloneWord: {
      std::vector<CellAddress> cells;
      if (cb.orientation() == Orientation::Vertical)
        for (std::size_t c = 0; c < cb.cols(); ++c) cells.push_back({op.dst, c});
      else
        for (std::size_t r = 0; r < cb.rows(); ++r) cells.push_back({r, op.dst});
      return cells;
    }
    default: return {};
  }
}

std::vector<CellAddress> participant_cells(const MicroOp& op, const CrossbarState& cb) {
  if (op.is_clone()) {
    std::vector<CellAddress> cells = clone_sources(op, cb);
    std::vector<CellAddress> dst = clone_destinations(op, cb);
    cells.insert(cells.end(), dst.begin(), dst.end());
    return cells;
  }
  return {op.target};
}

DriveConfig compile(const MicroOp& op, const CrossbarState& cb, const OpVoltages& volts) {
  const Roles r = roles_of(cb);
  const bool vertical = cb.orientation() == Orientation::Vertical;
  switch (op.kind) {
    case MicroOpKind::Set:
      cb.index(op.target);
      return to_drive_config(cb, single_cell(cb, op.target, volts.v_set_drive, 0.0, volts));
    case MicroOpKind::Reset:
      // Source line driven positive with the electrode grounded, so the
      // device sees the negative drop that resets it.
      cb.index(op.target);
      return to_drive_config(cb, single_cell(cb, op.target, 0.0, volts.v_reset_drive, volts));
    case MicroOpKind::Read:
      cb.index(op.target);
      return to_drive_config(cb, single_cell(cb, op.target, volts.v_read, 0.0, volts));
    case MicroOpKind::CloneBitRow: {
      require(op.line < cb.rows(), "clone row out of bounds");
      require(op.src < cb.cols() && op.dst < cb.cols(), "clone column out of bounds");
      require(op.src != op.dst, "clone source and destination must differ");
      // Within a row: on a vertical crossbar the row is a source line
      // (series form); on a horizontal one it is an electrode line (divider
      // form).
      if (vertical) return to_drive_config(cb, series_clone(r, op.line, op.src, op.dst, volts));
      return to_drive_config(cb, divider_clone(r, op.line, op.src, op.dst, volts));
    }
    case MicroOpKind::CloneBitCol: {
      require(op.line < cb.cols(), "clone column out of bounds");
      require(op.src < cb.rows() && op.dst < cb.rows(), "clone row out of bounds");
      require(op.src != op.dst, "clone source and destination must differ");
      if (vertical) return to_drive_config(cb, divider_clone(r, op.line, op.src, op.dst, volts));
      return to_drive_config(cb, series_clone(r, op.line, op.src, op.dst, volts));
    }
    case MicroOpKind::CloneWord: {
      require(op.src < r.n_source && op.dst < r.n_source, "word clone line out of bounds");
      require(op.src != op.dst, "clone source and destination must differ");
      require(r.n_source >= 2, "word clone needs at least two source lines");
      return to_drive_config(cb, word_clone(r, op.src, op.dst, volts));
    }
  }
  throw ConfigError("unknown micro-op");
}

PulseResult execute(const MicroOp& op, CrossbarState& cb, const OpVoltages& volts,
                    const SolverOptions& solver) {
  const DriveConfig drive = compile(op, cb, volts);
  if (op.is_clone()) {
    for (const CellAddress& a : clone_destinations(op, cb))
      if (cb.read_state(a) != LogicState::HRS)
        throw DestinationNotInitialized("clone destination (" + to_string(a) + ") is not HRS");
  }
  PulseResult pr = run_pulse(cb, drive, solver);
  pr.participants.assign(cb.rows() * cb.cols(), false);
  for (const CellAddress& a : participant_cells(op, cb))
    pr.participants[a.row * cb.cols() + a.col] = true;
  return pr;
}

double read_current_threshold(const OpVoltages& volts, const MemristorParams& m) {
  return volts.v_read / std::sqrt(m.r_on_mid() * m.r_off_mid());
}

ReadResult read_electrical(CellAddress a, CrossbarState& cb, const OpVoltages& volts,
                           const SolverOptions& solver) {
  ReadResult rr;
  rr.pulse = execute(MicroOp::read(a), cb, volts, solver);
  const DeviceSample& s = rr.pulse.intervals.front().devices[a.row * cb.cols() + a.col];
  rr.current = std::abs(s.i_memristor);
  rr.value = rr.current >= read_current_threshold(volts, cb.memristor_params())
                 ? LogicState::LRS
                 : LogicState::HRS;
  return rr;
}

std::vector<MicroOp> parse_script(const std::string& text) {
  std::vector<MicroOp> ops;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string word;
    if (!(ls >> word)) continue;  // blank or comment-only line

    auto fail = [&](const std::string& msg) {
      throw ConfigError("script line " + std::to_string(line_no) + ": " + msg);
    };
    auto read_index = [&]() -> std::size_t {
      long long v = 0;
      if (!(ls >> v) || v < 0) fail("expected a non-negative index");
      return static_cast<std::size_t>(v);
    };

    MicroOp op;
    if (word == "SET" || word == "RESET" || word == "READ") {
      const std::size_t r = read_index();
      const std::size_t c = read_index();
      if (word == "SET") op = MicroOp::set({r, c});
      else if (word == "RESET") op = MicroOp::reset({r, c});
      else op = MicroOp::read({r, c});
    } else if (word == "CLONE_BIT_ROW") {
      const std::size_t row = read_index();
      const std::size_t s = read_index();
      const std::size_t d = read_index();
      op = MicroOp::clone_bit_row(row, s, d);
    } else if (word == "CLONE_BIT_COL") {
      const std::size_t col = read_index();
      const std::size_t s = read_index();
      const std::size_t d = read_index();
      op = MicroOp::clone_bit_col(col, s, d);
    } else if (word == "CLONE_WORD") {
      const std::size_t s = read_index();
      const std::size_t d = read_index();
      op = MicroOp::clone_word(s, d);
    } else {
      fail("unknown op '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
    ops.push_back(op);
  }
  return ops;
}

}  // namespace immsim
