#include "twinpp/model/config.hpp"

#include <cmath>
#include <stdexcept>

namespace twinpp::model {

std::string to_string(HeadMode m) { return m == HeadMode::Flat ? "flat" : "hierarchical"; }

std::string to_string(Variant v) {
    switch (v) {
        case Variant::TimeSeries: return "time-series";
        case Variant::Event: return "event";
        case Variant::Intensity: return "intensity";
    }
    return "intensity";
}

HeadMode head_mode_from_string(const std::string& s) {
    if (s == "flat") return HeadMode::Flat;
    if (s == "hierarchical") return HeadMode::Hierarchical;
    throw std::invalid_argument("unknown head mode: " + s);
}

Variant variant_from_string(const std::string& s) {
    if (s == "time-series") return Variant::TimeSeries;
    if (s == "event") return Variant::Event;
    if (s == "intensity") return Variant::Intensity;
    throw std::invalid_argument("unknown variant: " + s);
}

int ModelConfig::fusion_input_dim() const {
    switch (variant) {
        case Variant::TimeSeries:
        case Variant::Event: return hidden_dim;
        case Variant::Intensity: return 2 * hidden_dim;
    }
    return 2 * hidden_dim;
}

void ModelConfig::validate() const {
    if (sigma2 <= 0.0) throw std::invalid_argument("model config: sigma2 must be > 0");
    if (k_main < 2) throw std::invalid_argument("model config: k_main must be >= 2");
    if (k_sub < k_main) throw std::invalid_argument("model config: k_sub must be >= k_main");
    if (hidden_dim < 1 || embed_dim < 1) throw std::invalid_argument("model config: bad dims");
    if (variant != Variant::Event && ts_feature_dim < 1)
        throw std::invalid_argument("model config: ts_feature_dim must be set");
    if (event_embed_dim < 0) throw std::invalid_argument("model config: bad event_embed_dim");
}

nlohmann::json ModelConfig::to_json() const {
    return nlohmann::json{{"hidden_dim", hidden_dim},
                          {"embed_dim", embed_dim},
                          {"head_mode", to_string(head_mode)},
                          {"variant", to_string(variant)},
                          {"k_main", k_main},
                          {"k_sub", k_sub},
                          {"ts_feature_dim", ts_feature_dim},
                          {"event_embed_dim", event_embed_dim},
                          {"sigma2", sigma2},
                          {"dense_peephole", dense_peephole}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
    ModelConfig cfg;
    cfg.hidden_dim = doc.value("hidden_dim", cfg.hidden_dim);
    cfg.embed_dim = doc.value("embed_dim", cfg.embed_dim);
    if (doc.contains("head_mode")) cfg.head_mode = head_mode_from_string(doc.at("head_mode"));
    if (doc.contains("variant")) cfg.variant = variant_from_string(doc.at("variant"));
    cfg.k_main = doc.value("k_main", cfg.k_main);
    cfg.k_sub = doc.value("k_sub", cfg.k_sub);
    cfg.ts_feature_dim = doc.value("ts_feature_dim", cfg.ts_feature_dim);
    cfg.event_embed_dim = doc.value("event_embed_dim", cfg.event_embed_dim);
    cfg.sigma2 = doc.value("sigma2", cfg.sigma2);
    cfg.dense_peephole = doc.value("dense_peephole", cfg.dense_peephole);
    return cfg;
}

double time_penalty(double s_true, double s_hat, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("time_penalty: sigma2 must be > 0");
    const double two_pi = 6.283185307179586;
    const double diff = s_true - s_hat;
    return 0.5 * std::log(two_pi * sigma2) + diff * diff / (2.0 * sigma2);
}

}  // namespace twinpp::model
