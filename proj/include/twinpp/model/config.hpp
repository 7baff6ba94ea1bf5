#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "twinpp/numcore/vec.hpp"

namespace twinpp::model {

// Subtype head layout: flat reads the fused embedding alone, hierarchical
// additionally consumes the main-type probability vector.
enum class HeadMode { Flat, Hierarchical };

// Which input streams the network keeps. TimeSeries and Event are the
// degraded single-stream ablations; Intensity fuses both.
enum class Variant { TimeSeries, Event, Intensity };

std::string to_string(HeadMode m);
std::string to_string(Variant v);
HeadMode head_mode_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

struct ModelConfig {
    int hidden_dim = 32;
    int embed_dim = 16;
    HeadMode head_mode = HeadMode::Hierarchical;
    Variant variant = Variant::Intensity;
    int k_main = 2;
    int k_sub = 7;
    int ts_feature_dim = 0;   // set from the prepared dataset
    int event_embed_dim = 0;  // 0: one-hot(+null)+dt fed directly; >0: learned linear projection
    double sigma2 = 10.0;     // time-penalty variance, days^2
    bool dense_peephole = false;

    // Raw event-token width: one-hot over subtypes plus the reserved null
    // pad type, plus the scalar time gap.
    int event_input_dim() const { return k_sub + 2; }
    int event_lstm_input_dim() const { return event_embed_dim > 0 ? event_embed_dim : event_input_dim(); }
    int fusion_input_dim() const;

    void validate() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& doc);
};

// One event-window token: subtype id (k_sub = reserved null pad) and the
// gap in days to the preceding event.
struct EventTok {
    int type_id = 0;
    double dt = 0.0;
};

// One supervised instance. ts_window holds n_sub_windows feature vectors,
// oldest first; event_window holds the event_window_len most recent events
// before the target, front-padded with the null type.
struct Sample {
    std::string entity_id;
    double anchor_time = 0.0;  // the target event's timestamp (days)
    std::vector<num::Vec> ts_window;
    std::vector<EventTok> event_window;
    int target_main = 0;
    int target_sub = 0;
    double target_gap = 0.0;  // days since the previous event, > 0
};

// Loss weights of the two cross-entropy terms. A disabled term carries
// exactly-zero weights.
struct ClassWeights {
    num::Vec main;
    num::Vec sub;

    static ClassWeights uniform(int k_main, int k_sub) {
        return ClassWeights{num::Vec(static_cast<std::size_t>(k_main), 1.0),
                            num::Vec(static_cast<std::size_t>(k_sub), 1.0)};
    }
};

// Negative log Gaussian density of the observed gap under N(s_hat, sigma2):
// 0.5*log(2*pi*sigma2) + (s_true - s_hat)^2 / (2*sigma2).
double time_penalty(double s_true, double s_hat, double sigma2);

}  // namespace twinpp::model
