#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "immsim/ops.hpp"
#include "immsim/solver.hpp"

namespace immsim {

struct EnergyRecord {
  std::map<CellAddress, double> per_device;  // J, participating cells only
  double pulse_total = 0.0;                  // J
  std::string op_kind;
  double pulse_width = 0.0;  // s
};

// E = sum over intervals of |v*i| * duration, memristor plus its access
// transistor, restricted to the pulse's participant cells.
EnergyRecord integrate_energy(const PulseResult& pr, double pulse_width,
                              const std::string& op_kind = "");

// Per-operation energy targets (pJ) for pulse-width calibration.
struct CalibrationTargets {
  double set_pj = 20.17;
  double bit1_pj = 9.52;
  double bit0_pj = 0.71;
};

// Least-squares fit of log-energy against the targets over the pulse width.
// Energies are linear in the width, so the optimum is the geometric mean of
// the per-target implied widths. Uses nominal (midpoint) devices, so the
// result is seed-free. Throws SimulationError when the optimum falls outside
// (1 ns, 1 us).
double calibrate_pulse_width(const MemristorParams& memristor = {},
                             const TransistorParams& transistor = {},
                             const OpVoltages& volts = {}, const CalibrationTargets& targets = {},
                             const SolverOptions& solver = {});

// Step-sampled voltages and currents over a labeled sequence of pulses.
class WaveformTrace {
 public:
  struct Sample {
    double t = 0.0;  // s
    std::size_t cycle = 0;
    std::vector<double> row_v;     // line voltages
    std::vector<double> col_v;
    std::vector<double> device_i;  // memristor currents, row-major
  };

  // Appends one labeled cycle; the first call fixes the grid dimensions.
  void add_cycle(const std::string& label, const PulseResult& pr, double width);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::string>& cycle_labels() const { return labels_; }
  const std::vector<Sample>& samples() const { return samples_; }
  double end_time() const { return end_time_; }
  bool empty() const { return samples_.empty(); }

  std::string to_csv() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::string> labels_;
  std::vector<Sample> samples_;
  Sample end_values_;  // re-emitted at end_time_ so the last step has a width
  double end_time_ = 0.0;
};

void export_waveform(const WaveformTrace& trace, const std::string& path);  // throws IoError

}  // namespace immsim
