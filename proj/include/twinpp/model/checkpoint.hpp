#pragma once

#include <json.hpp>
#include <memory>

#include "twinpp/model/network.hpp"
#include "twinpp/taxonomy.hpp"

namespace twinpp::model {

// Checkpoint document: format version, ModelConfig header, the type
// vocabularies and the parameter tensors.
nlohmann::json to_checkpoint(const TwinRnn& model, const Taxonomy& taxonomy);

struct LoadedModel {
    std::unique_ptr<TwinRnn> model;
    Taxonomy taxonomy;
};

LoadedModel from_checkpoint(const nlohmann::json& doc);

}  // namespace twinpp::model
