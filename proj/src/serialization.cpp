#include "immsim/serialization.hpp"

namespace immsim {

namespace {

void get_if_present(const nlohmann::json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const MemristorParams& p) {
  j = nlohmann::json{{"r_on_min", p.r_on_min},   {"r_on_max", p.r_on_max},
                     {"r_off_min", p.r_off_min}, {"r_off_max", p.r_off_max},
                     {"v_set", p.v_set},         {"v_reset", p.v_reset},
                     {"t_switch_frac", p.t_switch_frac}};
}

void from_json(const nlohmann::json& j, MemristorParams& p) {
  validate_keys(j, {"r_on_min", "r_on_max", "r_off_min", "r_off_max", "v_set", "v_reset",
                    "t_switch_frac"},
                "memristor");
  get_if_present(j, "r_on_min", p.r_on_min);
  get_if_present(j, "r_on_max", p.r_on_max);
  get_if_present(j, "r_off_min", p.r_off_min);
  get_if_present(j, "r_off_max", p.r_off_max);
  get_if_present(j, "v_set", p.v_set);
  get_if_present(j, "v_reset", p.v_reset);
  get_if_present(j, "t_switch_frac", p.t_switch_frac);
}

void to_json(nlohmann::json& j, const TransistorParams& p) {
  j = nlohmann::json{
      {"v_gate_th", p.v_gate_th}, {"r_fet_on", p.r_fet_on}, {"r_fet_off", p.r_fet_off}};
}

void from_json(const nlohmann::json& j, TransistorParams& p) {
  validate_keys(j, {"v_gate_th", "r_fet_on", "r_fet_off"}, "transistor");
  get_if_present(j, "v_gate_th", p.v_gate_th);
  get_if_present(j, "r_fet_on", p.r_fet_on);
  get_if_present(j, "r_fet_off", p.r_fet_off);
}

void validate_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                   const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(context + ": unknown property '" + item.key() + "'");
  }
}

}  // namespace immsim
