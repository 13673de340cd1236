#pragma once

#include <cstdint>

#include "immsim/rng.hpp"

namespace immsim {

// Logic encoding: high-resistance state stores '0', low-resistance state '1'.
enum class LogicState : std::uint8_t { HRS = 0, LRS = 1 };

inline char logic_char(LogicState s) { return s == LogicState::LRS ? '1' : '0'; }

// Abrupt piecewise-linear threshold-switching memristor. State resistances
// are sampled once per device from [min, max]; thresholds are shared.
struct MemristorParams {
  double r_on_min = 3.5e3;      // Ω
  double r_on_max = 4.5e3;      // Ω
  double r_off_min = 65e3;      // Ω
  double r_off_max = 70e3;      // Ω
  double v_set = 1.0;           // V, positive threshold seen at the electrode terminal
  double v_reset = 2.0;         // V, magnitude of the negative threshold
  double t_switch_frac = 0.25;  // fraction of the pulse after which a switch completes

  double r_on_mid() const { return 0.5 * (r_on_min + r_on_max); }
  double r_off_mid() const { return 0.5 * (r_off_min + r_off_max); }
  // Ranges collapsed to their midpoints; used for seed-free calibration.
  MemristorParams nominal() const;
  void validate() const;  // throws ConfigError
};

// Series access transistor modeled as a gate-controlled two-state resistor.
struct TransistorParams {
  double v_gate_th = 2.0;   // V, conducts at or above this gate voltage
  double r_fet_on = 100.0;  // Ω
  double r_fet_off = 1e9;   // Ω

  bool conducts(double v_gate) const { return v_gate >= v_gate_th; }
  double resistance(double v_gate) const { return conducts(v_gate) ? r_fet_on : r_fet_off; }
  void validate() const;
};

struct DeviceState {
  LogicState logic = LogicState::HRS;
  double r_on = 0.0;   // Ω, fixed at initialization
  double r_off = 0.0;  // Ω

  double resistance() const { return logic == LogicState::LRS ? r_on : r_off; }
};

enum class Transition : std::uint8_t { None = 0, ToLRS, ToHRS };

// Draws r_on then r_off uniformly from their ranges; state starts HRS.
DeviceState sample_device(const MemristorParams& params, Rng& rng);
DeviceState sample_device(const MemristorParams& params, std::uint64_t seed);

// v is the signed drop from the electrode terminal to the internal
// (transistor-side) terminal of the memristor. A positive drop can only set,
// a negative drop can only reset.
Transition switching_decision(const DeviceState& state, double v_electrode_minus_internal,
                              const MemristorParams& params);

}  // namespace immsim
