#pragma once

#include <json.hpp>

#include "twinpp/numcore/param_store.hpp"

namespace twinpp::num {

// Parameter document: {"format_version": 1, "params": [{name, rows, cols,
// values(row-major)}]} in insertion order.
nlohmann::json params_to_json(const ParamStore& store);

// Rebuilds a store from a document; validates version, shapes and finiteness.
ParamStore params_from_json(const nlohmann::json& doc);

}  // namespace twinpp::num
