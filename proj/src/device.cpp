#include "immsim/device.hpp"

#include <string>

#include "immsim/errors.hpp"

namespace immsim {

MemristorParams MemristorParams::nominal() const {
  MemristorParams p = *this;
  p.r_on_min = p.r_on_max = r_on_mid();
  p.r_off_min = p.r_off_max = r_off_mid();
  return p;
}

void MemristorParams::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("memristor params: " + msg); };
  if (!(r_on_min > 0.0) || !(r_off_min > 0.0)) fail("resistances must be positive");
  if (r_on_min > r_on_max) fail("r_on range inverted");
  if (r_off_min > r_off_max) fail("r_off range inverted");
  if (!(r_on_max < r_off_min)) fail("r_on range must lie strictly below r_off range");
  if (!(v_set > 0.0)) fail("v_set must be positive");
  if (!(v_reset > 0.0)) fail("v_reset must be positive");
  if (!(t_switch_frac > 0.0) || !(t_switch_frac < 1.0)) fail("t_switch_frac must be in (0, 1)");
}

void TransistorParams::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("transistor params: " + msg); };
  if (!(r_fet_on >= 0.0)) fail("r_fet_on must be non-negative");
  if (!(r_fet_off > 0.0)) fail("r_fet_off must be positive");
  if (r_fet_on >= r_fet_off) fail("r_fet_on must be below r_fet_off");
}

DeviceState sample_device(const MemristorParams& params, Rng& rng) {
  DeviceState d;
  d.logic = LogicState::HRS;
  d.r_on = rng.uniform(params.r_on_min, params.r_on_max);
  d.r_off = rng.uniform(params.r_off_min, params.r_off_max);
  return d;
}

DeviceState sample_device(const MemristorParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return sample_device(params, rng);
}

Transition switching_decision(const DeviceState& state, double v, const MemristorParams& params) {
  if (state.logic == LogicState::HRS && v >= params.v_set) return Transition::ToLRS;
  if (state.logic == LogicState::LRS && v <= -params.v_reset) return Transition::ToHRS;
  return Transition::None;
}

}  // namespace immsim
