#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twinpp/data/event_log.hpp"
#include "twinpp/model/config.hpp"

namespace twinpp::data {

struct WindowConfig {
    double sub_window_days = 7.0;
    int n_sub_windows = 5;
    int event_window_len = 7;

    void validate() const;
    nlohmann::json to_json() const;
    static WindowConfig from_json(const nlohmann::json& doc);
};

// Train-set statistics applied to the static profile columns.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stdev;
};

// A self-describing sample collection: window geometry, taxonomy, static
// feature names and normalization statistics travel with the samples.
struct SampleSet {
    WindowConfig window;
    Taxonomy taxonomy;
    std::vector<std::string> static_feature_names;
    NormStats norm;
    int ts_feature_dim = 0;  // statics + one count per subtype
    std::vector<model::Sample> samples;

    std::string to_jsonl() const;
    static SampleSet from_jsonl(std::istream& in);
};

// Builds one sample per event that has at least one prior event on its
// entity. For a target event at time t the time-series window is the
// n_sub_windows most recent completed sub-windows ending at t (half-open,
// so nothing at or after t is read); each sub-window vector is the z-scored
// static profile features concatenated with raw per-subtype occurrence
// counts. The event window is the event_window_len most recent events
// strictly before t (front-padded with the reserved null type). When
// `stats` is absent, normalization statistics are computed from the given
// profiles and persisted in the returned set (train build); pass the train
// stats when building evaluation samples.
SampleSet build_samples(const std::vector<EventLogRecord>& events, const ParsedProfiles& profiles,
                        const WindowConfig& wc, const Taxonomy& taxonomy,
                        const std::optional<NormStats>& stats = std::nullopt);

// Feature window for live prediction, anchored at `at_time`: the entity's
// events at or before at_time fill the event window, sub-windows cover
// (at_time - k*d, at_time - (k-1)*d]. Requires at least one prior event
// ("insufficient history" otherwise). Targets in the returned sample are
// placeholders.
model::Sample build_inference_sample(const std::vector<EventLogRecord>& events,
                                     const ParsedProfiles& profiles, const WindowConfig& wc,
                                     const Taxonomy& taxonomy, const NormStats& norm,
                                     const std::string& entity, double at_time);

// Entity-level split: no entity appears on both sides; deterministic per
// seed. Returns (train_ids, test_ids).
std::pair<std::vector<std::string>, std::vector<std::string>> split_entities(
    std::vector<std::string> entity_ids, double test_fraction, std::uint64_t seed);

std::vector<std::string> entity_ids_of(const std::vector<EventLogRecord>& events);

std::vector<EventLogRecord> filter_by_entities(const std::vector<EventLogRecord>& events,
                                               const std::vector<std::string>& ids);

}  // namespace twinpp::data
