#include "immsim/crossbar.hpp"

#include <utility>

#include "immsim/errors.hpp"
#include "immsim/serialization.hpp"

namespace immsim {

const char* to_string(Orientation o) {
  return o == Orientation::Vertical ? "vertical" : "horizontal";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "vertical") return Orientation::Vertical;
  if (s == "horizontal") return Orientation::Horizontal;
  throw ConfigError("unknown orientation '" + s + "' (expected vertical or horizontal)");
}

std::string to_string(const CellAddress& a) {
  return std::to_string(a.row) + "," + std::to_string(a.col);
}

CrossbarState::CrossbarState(std::size_t rows, std::size_t cols, Orientation orientation,
                             const MemristorParams& memristor,
                             const TransistorParams& transistor, std::uint64_t seed)
    : rows_(rows), cols_(cols), orientation_(orientation), mparams_(memristor),
      tparams_(transistor) {
  if (rows == 0 || cols == 0) throw ConfigError("crossbar dimensions must be positive");
  if (rows > kMaxDimension || cols > kMaxDimension)
    throw ConfigError("crossbar dimensions exceed the supported maximum of " +
                      std::to_string(kMaxDimension));
  mparams_.validate();
  tparams_.validate();
  cells_.reserve(rows * cols);
  Rng rng(seed);
  for (std::size_t i = 0; i < rows * cols; ++i) cells_.push_back(sample_device(mparams_, rng));
}

std::size_t CrossbarState::index(CellAddress a) const {
  if (a.row >= rows_ || a.col >= cols_)
    throw ConfigError("cell (" + to_string(a) + ") out of bounds for " + std::to_string(rows_) +
                      "x" + std::to_string(cols_) + " crossbar");
  return a.row * cols_ + a.col;
}

void CrossbarState::apply_transition(CellAddress a, Transition t) {
  if (t == Transition::ToLRS) cells_[index(a)].logic = LogicState::LRS;
  else if (t == Transition::ToHRS) cells_[index(a)].logic = LogicState::HRS;
}

LineId CrossbarState::electrode_line(CellAddress a) const {
  index(a);  // bounds check
  if (orientation_ == Orientation::Vertical) return {LineKind::Column, a.col};
  return {LineKind::Row, a.row};
}

LineId CrossbarState::source_line(CellAddress a) const {
  index(a);
  if (orientation_ == Orientation::Vertical) return {LineKind::Row, a.row};
  return {LineKind::Column, a.col};
}

std::size_t CrossbarState::gate_line(CellAddress a) const {
  index(a);
  return orientation_ == Orientation::Vertical ? a.col : a.row;
}

std::vector<LogicState> CrossbarState::logic_grid() const {
  std::vector<LogicState> g(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) g[i] = cells_[i].logic;
  return g;
}

CrossbarState CrossbarState::transposed() const {
  CrossbarState t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.orientation_ =
      orientation_ == Orientation::Vertical ? Orientation::Horizontal : Orientation::Vertical;
  t.mparams_ = mparams_;
  t.tparams_ = tparams_;
  t.cells_.resize(cells_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.cells_[c * rows_ + r] = cells_[r * cols_ + c];
  return t;
}

std::string CrossbarState::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["rows"] = rows_;
  j["cols"] = cols_;
  j["orientation"] = to_string(orientation_);
  j["memristor"] = mparams_;
  j["transistor"] = tparams_;
  nlohmann::json cells = nlohmann::json::array();
  nlohmann::json r_on = nlohmann::json::array();
  nlohmann::json r_off = nlohmann::json::array();
  for (std::size_t r = 0; r < rows_; ++r) {
    nlohmann::json crow = nlohmann::json::array();
    nlohmann::json on_row = nlohmann::json::array();
    nlohmann::json off_row = nlohmann::json::array();
    for (std::size_t c = 0; c < cols_; ++c) {
      const DeviceState& d = cells_[r * cols_ + c];
      crow.push_back(std::string(1, logic_char(d.logic)));
      on_row.push_back(d.r_on);
      off_row.push_back(d.r_off);
    }
    cells.push_back(std::move(crow));
    r_on.push_back(std::move(on_row));
    r_off.push_back(std::move(off_row));
  }
  j["cells"] = std::move(cells);
  j["r_on"] = std::move(r_on);
  j["r_off"] = std::move(r_off);
  return j.dump(2);
}

CrossbarState CrossbarState::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("crossbar dump: ") + e.what());
  }
  try {
    validate_keys(j, {"schema_version", "rows", "cols", "orientation", "memristor", "transistor",
                      "cells", "r_on", "r_off"},
                  "crossbar dump");
    if (j.value("schema_version", 0) != 1) throw ConfigError("crossbar dump: unsupported schema");
    CrossbarState cb;
    cb.rows_ = j.at("rows").get<std::size_t>();
    cb.cols_ = j.at("cols").get<std::size_t>();
    if (cb.rows_ == 0 || cb.cols_ == 0 || cb.rows_ > kMaxDimension || cb.cols_ > kMaxDimension)
      throw ConfigError("crossbar dump: bad dimensions");
    cb.orientation_ = orientation_from_string(j.at("orientation").get<std::string>());
    cb.mparams_ = j.at("memristor").get<MemristorParams>();
    cb.tparams_ = j.at("transistor").get<TransistorParams>();
    cb.mparams_.validate();
    cb.tparams_.validate();
    const auto& cells = j.at("cells");
    const auto& r_on = j.at("r_on");
    const auto& r_off = j.at("r_off");
    if (cells.size() != cb.rows_ || r_on.size() != cb.rows_ || r_off.size() != cb.rows_)
      throw ConfigError("crossbar dump: row count mismatch");
    cb.cells_.resize(cb.rows_ * cb.cols_);
    for (std::size_t r = 0; r < cb.rows_; ++r) {
      if (cells[r].size() != cb.cols_ || r_on[r].size() != cb.cols_ ||
          r_off[r].size() != cb.cols_)
        throw ConfigError("crossbar dump: column count mismatch");
      for (std::size_t c = 0; c < cb.cols_; ++c) {
        DeviceState& d = cb.cells_[r * cb.cols_ + c];
        const std::string s = cells[r][c].get<std::string>();
        if (s == "0") d.logic = LogicState::HRS;
        else if (s == "1") d.logic = LogicState::LRS;
        else throw ConfigError("crossbar dump: cell state must be \"0\" or \"1\"");
        d.r_on = r_on[r][c].get<double>();
        d.r_off = r_off[r][c].get<double>();
        if (d.r_on < cb.mparams_.r_on_min || d.r_on > cb.mparams_.r_on_max ||
            d.r_off < cb.mparams_.r_off_min || d.r_off > cb.mparams_.r_off_max)
          throw ConfigError("crossbar dump: sampled resistance outside its declared range");
      }
    }
    return cb;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("crossbar dump: ") + e.what());
  }
}

}  // namespace immsim
