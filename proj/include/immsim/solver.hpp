#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "immsim/crossbar.hpp"

namespace immsim {

// Virtual reference node; leaks and hand-built branches may terminate here.
inline constexpr std::size_t kGroundNode = static_cast<std::size_t>(-1);

enum class BranchKind : std::uint8_t { Memristor, Transistor, Other };

struct Branch {
  std::size_t node_a = 0;  // kGroundNode allowed
  std::size_t node_b = 0;
  double conductance = 0.0;  // S, strictly positive
  CellAddress cell{};        // owning cell for crossbar-built networks
  BranchKind kind = BranchKind::Other;
};

// Node numbering for crossbar-built networks: row line i -> i,
// column line j -> rows + j, internal node of cell (r, c) -> rows + cols + r*cols + c.
struct NodeLayout {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t row_node(std::size_t i) const { return i; }
  std::size_t col_node(std::size_t j) const { return rows + j; }
  std::size_t cell_node(std::size_t r, std::size_t c) const { return rows + cols + r * cols + c; }
  std::size_t cell_node(CellAddress a) const { return cell_node(a.row, a.col); }
  std::size_t line_node(LineId id) const {
    return id.kind == LineKind::Row ? row_node(id.index) : col_node(id.index);
  }
  std::size_t count() const { return rows + cols + rows * cols; }
};

// Resistive network with known-voltage boundary nodes. Driven lines become
// boundary conditions; floating lines stay unknowns with a small leak to
// ground so that the reduced system cannot go singular.
struct Network {
  std::size_t node_count = 0;
  std::vector<Branch> branches;
  std::vector<std::optional<double>> boundary;  // per node; nullopt = unknown
  std::vector<double> leak;                     // per node, conductance to ground (S)
  std::vector<bool> gate_on;                    // per cell, crossbar-built networks only
};

struct SolverOptions {
  double leak_conductance = 1e-12;  // S on floating lines; 0 disables regularization
  double min_resistance = 1e-6;     // Ω, clamp so ideal (0 Ω) elements stay finite
  double residual_rel_tol = 1e-9;   // KCL residual vs. the largest injected current
  std::size_t max_refinements = 3;
};

// Assembles the 1T1R network for one drive configuration. Branch order is two
// per cell, row-major: memristor then transistor.
Network build_network(const CrossbarState& cb, const DriveConfig& drive,
                      const SolverOptions& opts = {});

// Direct sparse SPD solve of the reduced nodal system, with iterative
// refinement until the KCL residual at every unknown node is below
// residual_rel_tol times the largest boundary-injected current. Returns the
// voltage of every node (boundary nodes keep their driven values).
std::vector<double> solve_dc(const Network& net, const SolverOptions& opts = {});

struct DeviceSample {
  double v_memristor = 0.0;   // V, electrode terminal minus internal node
  double i_memristor = 0.0;   // A, positive from electrode into the cell
  double v_transistor = 0.0;  // V, internal node minus source line
  double i_transistor = 0.0;  // A
};

struct PulseInterval {
  double fraction = 0.0;  // of the pulse width; fractions over a pulse sum to 1
  std::vector<double> node_voltages;
  std::vector<DeviceSample> devices;  // row-major, rows*cols entries
};

struct SwitchingEvent {
  CellAddress cell{};
  Transition transition = Transition::None;
  std::size_t interval = 0;  // interval whose solve triggered the switch
};

struct PulseResult {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<PulseInterval> intervals;
  std::vector<SwitchingEvent> switching_events;
  std::vector<LogicState> final_states;  // row-major
  // Cells whose dissipation an energy integration should count. run_pulse
  // marks every cell; operation-level execution narrows this to the cells the
  // operation addresses.
  std::vector<bool> participants;
};

// Quasi-static pulse: solve, apply every pending switch simultaneously,
// re-solve, until no device wants to switch. One interval is recorded per
// solve; the first interval spans t_switch_frac of the pulse when a switch
// occurred, and the remainder is split equally over the following intervals.
// Mutates cb to the post-pulse states. At most one transition per device per
// pulse; a second request raises OscillationError.
PulseResult run_pulse(CrossbarState& cb, const DriveConfig& drive,
                      const SolverOptions& opts = {});

}  // namespace immsim
