#include "immsim/scheduler.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "immsim/errors.hpp"

namespace immsim {

const char* to_string(CopyStrategy s) {
  return s == CopyStrategy::IMM ? "imm" : "read_write_back";
}

ComplementCopyCost complement_copy_cost(const SchedulerConfig& cfg) {
  return {2, 2.0 * cfg.complement_op_energy_j};
}

namespace {

const char* kLogicTags[] = {"OR", "AND", "XOR", "NOR", "NAND", "XNOR", "NOT"};

bool known_logic_tag(const std::string& op) {
  return std::find(std::begin(kLogicTags), std::end(kLogicTags), op) != std::end(kLogicTags);
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
  throw ConfigError("program line " + std::to_string(line_no) + ": " + msg);
}

CellAddress parse_address(std::istringstream& in, std::size_t line_no) {
  long long r = 0, c = 0;
  if (!(in >> r >> c) || r < 0 || c < 0) fail_line(line_no, "expected a cell address 'row col'");
  return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
}

void expect_token(std::istringstream& in, const std::string& tok, std::size_t line_no) {
  std::string word;
  if (!(in >> word) || word != tok) fail_line(line_no, "expected '" + tok + "'");
}

}  // namespace

bool eval_logic(const std::string& op, const std::vector<bool>& inputs) {
  auto count = [&] { return std::count(inputs.begin(), inputs.end(), true); };
  if (op == "NOT") return !inputs.at(0);
  if (op == "OR") return count() > 0;
  if (op == "NOR") return count() == 0;
  if (op == "AND") return static_cast<std::size_t>(count()) == inputs.size();
  if (op == "NAND") return static_cast<std::size_t>(count()) != inputs.size();
  if (op == "XOR") return (count() % 2) == 1;
  if (op == "XNOR") return (count() % 2) == 0;
  throw ConfigError("unknown logic op '" + op + "'");
}

LimProgram LimProgram::parse(const std::string& text) {
  LimProgram prog;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    // Separate the punctuation so plain stream extraction works.
    std::string spaced;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      const char ch = raw[k];
      if (ch == '(' || ch == ')' || ch == ',') {
        spaced += ' ';
        spaced += ch;
        spaced += ' ';
      } else if (ch == '-' && k + 1 < raw.size() && raw[k + 1] == '>') {
        spaced += " -> ";
        ++k;
      } else {
        spaced += ch;
      }
    }
    std::istringstream ls(spaced);
    std::string word;
    if (!(ls >> word)) continue;

    Statement st;
    if (word == "COPY") {
      CopyStmt cp;
      cp.src = parse_address(ls, line_no);
      expect_token(ls, "->", line_no);
      cp.dst = parse_address(ls, line_no);
      if (cp.src == cp.dst) fail_line(line_no, "copy source equals destination");
      if (cp.src.row != cp.dst.row && cp.src.col != cp.dst.col)
        fail_line(line_no, "copy must stay within one row or one column");
      st.stmt = cp;
    } else if (word == "LOGIC") {
      LogicStmt lg;
      if (!(ls >> lg.op) || !known_logic_tag(lg.op))
        fail_line(line_no, "expected a logic op tag (OR, AND, XOR, NOR, NAND, XNOR, NOT)");
      expect_token(ls, "(", line_no);
      for (;;) {
        lg.inputs.push_back(parse_address(ls, line_no));
        std::string sep;
        if (!(ls >> sep)) fail_line(line_no, "unterminated input list");
        if (sep == ")") break;
        if (sep != ",") fail_line(line_no, "expected ',' or ')' in input list");
      }
      expect_token(ls, "->", line_no);
      lg.output = parse_address(ls, line_no);
      if (lg.op == "NOT" && lg.inputs.size() != 1) fail_line(line_no, "NOT takes one input");
      if (lg.op != "NOT" && lg.inputs.size() < 2)
        fail_line(line_no, lg.op + " takes at least two inputs");
      for (const CellAddress& a : lg.inputs)
        if (a == lg.output)
          fail_line(line_no, "logic output must not be one of its inputs");
      st.stmt = lg;
    } else {
      fail_line(line_no, "unknown statement '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) fail_line(line_no, "trailing token '" + extra + "'");

    // Normalized text for reports.
    std::ostringstream os;
    if (const auto* cp = std::get_if<CopyStmt>(&st.stmt)) {
      os << "COPY " << cp->src.row << ' ' << cp->src.col << " -> " << cp->dst.row << ' '
         << cp->dst.col;
    } else {
      const auto& lg = std::get<LogicStmt>(st.stmt);
      os << "LOGIC " << lg.op << " (";
      for (std::size_t i = 0; i < lg.inputs.size(); ++i) {
        if (i) os << ", ";
        os << lg.inputs[i].row << ' ' << lg.inputs[i].col;
      }
      os << ") -> " << lg.output.row << ' ' << lg.output.col;
    }
    st.text = os.str();
    prog.statements.push_back(std::move(st));
  }
  return prog;
}

namespace {

struct Shadow {
  std::size_t cols = 0;
  std::vector<LogicState> grid;
  LogicState& at(CellAddress a) { return grid[a.row * cols + a.col]; }
};

MicroOp copy_clone_op(const CopyStmt& cp) {
  if (cp.src.row == cp.dst.row) return MicroOp::clone_bit_row(cp.src.row, cp.src.col, cp.dst.col);
  return MicroOp::clone_bit_col(cp.src.col, cp.src.row, cp.dst.row);
}

}  // namespace

std::vector<LoweredStep> lower(const LimProgram& prog, CopyStrategy strategy,
                               const CrossbarState& cb) {
  Shadow shadow{cb.cols(), cb.logic_grid()};
  std::vector<LoweredStep> steps;
  for (std::size_t i = 0; i < prog.statements.size(); ++i) {
    const Statement& st = prog.statements[i];
    if (const auto* cp = std::get_if<CopyStmt>(&st.stmt)) {
      cb.index(cp->src);
      cb.index(cp->dst);
      if (strategy == CopyStrategy::IMM) {
        if (shadow.at(cp->dst) != LogicState::HRS)
          steps.push_back({i, LoweredStep::Kind::Micro, MicroOp::reset(cp->dst),
                           "reset pre-cycle: destination in use"});
        steps.push_back({i, LoweredStep::Kind::Micro, copy_clone_op(*cp), "mirror copy"});
      } else {
        steps.push_back({i, LoweredStep::Kind::Micro, MicroOp::read(cp->src), "read source"});
        const LogicState value = shadow.at(cp->src);
        if (shadow.at(cp->dst) == value) {
          steps.push_back({i, LoweredStep::Kind::IdleWrite, {},
                           "write-back: destination already holds the value"});
        } else if (value == LogicState::LRS) {
          steps.push_back(
              {i, LoweredStep::Kind::Micro, MicroOp::set(cp->dst), "write-back set"});
        } else {
          steps.push_back(
              {i, LoweredStep::Kind::Micro, MicroOp::reset(cp->dst), "write-back reset"});
        }
      }
      shadow.at(cp->dst) = shadow.at(cp->src);
    } else {
      const auto& lg = std::get<LogicStmt>(st.stmt);
      cb.index(lg.output);
      std::vector<bool> bits;
      for (const CellAddress& a : lg.inputs) {
        cb.index(a);
        bits.push_back(shadow.at(a) == LogicState::LRS);
      }
      steps.push_back({i, LoweredStep::Kind::AbstractLogic, {}, "abstract logic " + lg.op});
      shadow.at(lg.output) = eval_logic(lg.op, bits) ? LogicState::LRS : LogicState::HRS;
    }
  }
  return steps;
}

ScheduleReport run(const LimProgram& prog, CopyStrategy strategy, CrossbarState& cb,
                   const SchedulerConfig& cfg) {
  const std::vector<LoweredStep> steps = lower(prog, strategy, cb);
  ScheduleReport report;
  report.strategy = strategy;
  report.per_statement.resize(prog.statements.size());
  for (std::size_t i = 0; i < prog.statements.size(); ++i) {
    report.per_statement[i].statement = i;
    report.per_statement[i].text = prog.statements[i].text;
  }

  for (const LoweredStep& step : steps) {
    StatementCost& cost = report.per_statement[step.statement];
    cost.cycles += 1;
    switch (step.kind) {
      case LoweredStep::Kind::Micro: {
        const PulseResult pr = execute(step.op, cb, cfg.voltages, cfg.solver);
        cost.energy_j += integrate_energy(pr, cfg.pulse_width).pulse_total;
        cost.ops.push_back(step.op.to_string());
        break;
      }
      case LoweredStep::Kind::AbstractLogic: {
        const auto& lg = std::get<LogicStmt>(prog.statements[step.statement].stmt);
        std::vector<bool> bits;
        for (const CellAddress& a : lg.inputs) bits.push_back(cb.read_state(a) == LogicState::LRS);
        cb.set_state(lg.output, eval_logic(lg.op, bits) ? LogicState::LRS : LogicState::HRS);
        cost.energy_j += cfg.logic_op_energy_j;
        cost.ops.push_back("LOGIC " + lg.op);
        break;
      }
      case LoweredStep::Kind::IdleWrite:
        cost.ops.push_back("IDLE_WRITE");
        break;
    }
  }

  for (const StatementCost& cost : report.per_statement) {
    report.total_cycles += cost.cycles;
    report.total_energy_j += cost.energy_j;
  }
  report.final_states = cb.logic_grid();
  return report;
}

std::string ScheduleReport::to_json_string() const {
  nlohmann::json j;
  j["strategy"] = to_string(strategy);
  j["cycles"] = total_cycles;
  j["energy_J"] = total_energy_j;
  nlohmann::json stmts = nlohmann::json::array();
  for (const StatementCost& cost : per_statement) {
    stmts.push_back({{"statement", cost.statement},
                     {"text", cost.text},
                     {"cycles", cost.cycles},
                     {"energy_J", cost.energy_j},
                     {"ops", cost.ops}});
  }
  j["per_statement"] = std::move(stmts);
  return j.dump(2);
}

}  // namespace immsim
