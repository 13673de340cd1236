#include "immsim/metering.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "immsim/errors.hpp"

namespace immsim {

EnergyRecord integrate_energy(const PulseResult& pr, double pulse_width,
                              const std::string& op_kind) {
  if (!(pulse_width > 0.0)) throw ConfigError("pulse width must be positive");
  EnergyRecord rec;
  rec.op_kind = op_kind;
  rec.pulse_width = pulse_width;
  for (std::size_t r = 0; r < pr.rows; ++r) {
    for (std::size_t c = 0; c < pr.cols; ++c) {
      const std::size_t i = r * pr.cols + c;
      if (!pr.participants[i]) continue;
      double e = 0.0;
      for (const PulseInterval& iv : pr.intervals) {
        const DeviceSample& s = iv.devices[i];
        e += (std::abs(s.v_memristor * s.i_memristor) +
              std::abs(s.v_transistor * s.i_transistor)) *
             iv.fraction * pulse_width;
      }
      rec.per_device[{r, c}] = e;
      rec.pulse_total += e;
    }
  }
  return rec;
}

double calibrate_pulse_width(const MemristorParams& memristor, const TransistorParams& transistor,
                             const OpVoltages& volts, const CalibrationTargets& targets,
                             const SolverOptions& solver) {
  if (!(targets.set_pj > 0.0) || !(targets.bit1_pj > 0.0) || !(targets.bit0_pj > 0.0))
    throw ConfigError("calibration targets must be positive");
  const MemristorParams nominal = memristor.nominal();

  // Average power of an operation = its energy on a unit-width pulse.
  auto op_power = [&](MicroOp op, bool src_lrs, std::size_t cols) {
    CrossbarState cb(1, cols, Orientation::Vertical, nominal, transistor, 0);
    if (src_lrs) cb.set_state({0, 0}, LogicState::LRS);
    const PulseResult pr = execute(op, cb, volts, solver);
    return integrate_energy(pr, 1.0).pulse_total;
  };

  const double p_set = op_power(MicroOp::set({0, 0}), false, 1);
  const double p_bit1 = op_power(MicroOp::clone_bit_row(0, 0, 1), true, 2);
  const double p_bit0 = op_power(MicroOp::clone_bit_row(0, 0, 1), false, 2);

  // Minimizing the squared log error of w*P against the targets gives the
  // geometric mean of the implied widths.
  const double w = std::exp((std::log(targets.set_pj * 1e-12 / p_set) +
                             std::log(targets.bit1_pj * 1e-12 / p_bit1) +
                             std::log(targets.bit0_pj * 1e-12 / p_bit0)) /
                            3.0);
  if (!(w > 1e-9) || !(w < 1e-6))
    throw SimulationError("calibrated pulse width " + std::to_string(w * 1e9) +
                          " ns falls outside (1 ns, 1 us)");
  return w;
}

void WaveformTrace::add_cycle(const std::string& label, const PulseResult& pr, double width) {
  if (!(width > 0.0)) throw ConfigError("pulse width must be positive");
  if (samples_.empty()) {
    rows_ = pr.rows;
    cols_ = pr.cols;
  } else if (rows_ != pr.rows || cols_ != pr.cols) {
    throw ConfigError("waveform cycles must share one crossbar shape");
  }

  const std::size_t cycle = labels_.size();
  labels_.push_back(label);
  double t = end_time_;
  for (const PulseInterval& iv : pr.intervals) {
    Sample s;
    s.t = t;
    s.cycle = cycle;
    s.row_v.assign(iv.node_voltages.begin(), iv.node_voltages.begin() + rows_);
    s.col_v.assign(iv.node_voltages.begin() + rows_, iv.node_voltages.begin() + rows_ + cols_);
    s.device_i.resize(rows_ * cols_);
    for (std::size_t i = 0; i < s.device_i.size(); ++i) s.device_i[i] = iv.devices[i].i_memristor;
    samples_.push_back(s);
    t += iv.fraction * width;
    end_values_ = std::move(s);
  }
  end_time_ = t;
  end_values_.t = end_time_;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void append_sample(std::string& out, const WaveformTrace::Sample& s,
                   const std::vector<std::string>& labels) {
  out += fmt(s.t);
  out += ',';
  out += std::to_string(s.cycle);
  out += ',';
  out += labels[s.cycle];
  for (double v : s.row_v) {
    out += ',';
    out += fmt(v);
  }
  for (double v : s.col_v) {
    out += ',';
    out += fmt(v);
  }
  for (double v : s.device_i) {
    out += ',';
    out += fmt(v);
  }
  out += '\n';
}

}  // namespace

std::string WaveformTrace::to_csv() const {
  std::string out = "time_s,cycle_index,cycle_label";
  for (std::size_t i = 0; i < rows_; ++i) out += ",v_r" + std::to_string(i);
  for (std::size_t j = 0; j < cols_; ++j) out += ",v_c" + std::to_string(j);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      out += ",i_d_" + std::to_string(r) + "_" + std::to_string(c);
  out += '\n';
  for (const Sample& s : samples_) append_sample(out, s, labels_);
  // Close the last step so every sample has a duration.
  if (!samples_.empty()) append_sample(out, end_values_, labels_);
  return out;
}

void export_waveform(const WaveformTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << trace.to_csv();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace immsim
