#pragma once

// nlohmann-json adapters for the parameter structs shared by the crossbar
// dump format and the scenario config format.

#include "json.hpp"

#include "immsim/crossbar.hpp"
#include "immsim/device.hpp"
#include "immsim/errors.hpp"

namespace immsim {

void to_json(nlohmann::json& j, const MemristorParams& p);
void from_json(const nlohmann::json& j, MemristorParams& p);

void to_json(nlohmann::json& j, const TransistorParams& p);
void from_json(const nlohmann::json& j, TransistorParams& p);

// Fetches j[key] into out if present; unknown keys in `j` raise ConfigError
// through validate_keys.
void validate_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                   const std::string& context);

}  // namespace immsim
