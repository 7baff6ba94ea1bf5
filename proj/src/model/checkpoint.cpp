#include "twinpp/model/checkpoint.hpp"

#include <stdexcept>

#include "twinpp/numcore/serialize.hpp"

namespace twinpp::model {

nlohmann::json to_checkpoint(const TwinRnn& model, const Taxonomy& taxonomy) {
    nlohmann::json doc;
    doc["format_version"] = num::kFormatVersion;
    doc["model_config"] = model.config().to_json();
    doc["taxonomy"] = taxonomy.to_json();
    doc["params"] = num::params_to_json(model.params());
    return doc;
}

LoadedModel from_checkpoint(const nlohmann::json& doc) {
    if (!doc.contains("format_version"))
        throw std::runtime_error("checkpoint: missing format_version");
    if (doc.at("format_version").get<int>() != num::kFormatVersion)
        throw std::runtime_error("checkpoint: unsupported format_version");
    LoadedModel loaded;
    loaded.taxonomy = Taxonomy::from_json(doc.at("taxonomy"));
    ModelConfig cfg = ModelConfig::from_json(doc.at("model_config"));
    num::ParamStore values = num::params_from_json(doc.at("params"));
    loaded.model = TwinRnn::from_store(std::move(cfg), values);
    return loaded;
}

}  // namespace twinpp::model
