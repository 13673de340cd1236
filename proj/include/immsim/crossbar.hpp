#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "immsim/device.hpp"

namespace immsim {

// Which physical lines contact the memristor electrodes. Vertical: column
// lines at the electrodes, row lines at the transistor sources, one gate line
// per column. Horizontal is the transpose: electrodes on rows, sources on
// columns, one gate line per row. In both cases gate lines run parallel to
// the electrode lines, so opening one gate line enables every cell on that
// electrode line.
enum class Orientation : std::uint8_t { Vertical, Horizontal };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);  // throws ConfigError

enum class LineKind : std::uint8_t { Row, Column };

struct LineId {
  LineKind kind = LineKind::Row;
  std::size_t index = 0;
  bool operator==(const LineId&) const = default;
};

struct CellAddress {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const CellAddress&) const = default;
  auto operator<=>(const CellAddress&) const = default;
};

std::string to_string(const CellAddress& a);  // "r,c"

// Boundary condition of one line for one pulse.
class Drive {
 public:
  static Drive driven(double volts) {
    Drive d;
    d.v_ = volts;
    return d;
  }
  static Drive floating() { return Drive{}; }
  bool is_driven() const { return v_.has_value(); }
  double voltage() const { return *v_; }
  bool operator==(const Drive&) const = default;

 private:
  std::optional<double> v_;
};

struct DriveConfig {
  std::vector<Drive> row_drives;      // size = rows
  std::vector<Drive> col_drives;      // size = cols
  std::vector<double> gate_voltages;  // size = cols (vertical) or rows (horizontal)
};

// The reference solver handles arrays up to this dimension.
inline constexpr std::size_t kMaxDimension = 64;

class CrossbarState {
 public:
  // Samples every device from `memristor` using `seed`; all cells start HRS.
  CrossbarState(std::size_t rows, std::size_t cols, Orientation orientation,
                const MemristorParams& memristor, const TransistorParams& transistor,
                std::uint64_t seed);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Orientation orientation() const { return orientation_; }
  const MemristorParams& memristor_params() const { return mparams_; }
  const TransistorParams& transistor_params() const { return tparams_; }

  std::size_t gate_line_count() const {
    return orientation_ == Orientation::Vertical ? cols_ : rows_;
  }

  const DeviceState& cell(CellAddress a) const { return cells_[index(a)]; }
  LogicState read_state(CellAddress a) const { return cell(a).logic; }

  // Harness-level mutation (program initialization, abstract logic results).
  void set_state(CellAddress a, LogicState s) { cells_[index(a)].logic = s; }
  void apply_transition(CellAddress a, Transition t);

  LineId electrode_line(CellAddress a) const;
  LineId source_line(CellAddress a) const;
  // Index into DriveConfig::gate_voltages; equals the electrode-line index.
  std::size_t gate_line(CellAddress a) const;

  std::vector<LogicState> logic_grid() const;  // row-major snapshot

  // Same devices viewed with rows and columns swapped; a Horizontal m x n
  // crossbar behaves identically to the transposed Vertical n x m one.
  CrossbarState transposed() const;

  std::string to_json_string() const;
  static CrossbarState from_json_string(const std::string& text);

  std::size_t index(CellAddress a) const;  // throws ConfigError when out of bounds

 private:
  CrossbarState() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Orientation orientation_ = Orientation::Vertical;
  MemristorParams mparams_;
  TransistorParams tparams_;
  std::vector<DeviceState> cells_;  // row-major
};

}  // namespace immsim
