#pragma once

#include <json.hpp>

#include "wald/wald.hpp"

namespace wald {

// {"n_leaves": N, "splits": [{"a": [...], "b": [...], "lambda": x}, ...]}
// with splits in canonical order and both sides sorted ascending.
nlohmann::json wald_to_json(const Wald& w);

// Inverse; throws std::invalid_argument on schema violations and the usual
// topology errors on invalid split systems.
Wald wald_from_json(const nlohmann::json& j);

}  // namespace wald
