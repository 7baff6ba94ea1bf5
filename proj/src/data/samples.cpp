#include "twinpp/data/samples.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "twinpp/numcore/param_store.hpp"
#include "twinpp/numcore/rng.hpp"

namespace twinpp::data {

void WindowConfig::validate() const {
    if (!(sub_window_days >= 1.0)) throw std::invalid_argument("window: sub_window_days must be >= 1");
    if (n_sub_windows < 1) throw std::invalid_argument("window: n_sub_windows must be >= 1");
    if (event_window_len < 1) throw std::invalid_argument("window: event_window_len must be >= 1");
}

nlohmann::json WindowConfig::to_json() const {
    return nlohmann::json{{"sub_window_days", sub_window_days},
                          {"n_sub_windows", n_sub_windows},
                          {"event_window_len", event_window_len}};
}

WindowConfig WindowConfig::from_json(const nlohmann::json& doc) {
    WindowConfig wc;
    wc.sub_window_days = doc.value("sub_window_days", wc.sub_window_days);
    wc.n_sub_windows = doc.value("n_sub_windows", wc.n_sub_windows);
    wc.event_window_len = doc.value("event_window_len", wc.event_window_len);
    wc.validate();
    return wc;
}

SampleSet build_samples(const std::vector<EventLogRecord>& events, const ParsedProfiles& profiles,
                        const WindowConfig& wc, const Taxonomy& taxonomy,
                        const std::optional<NormStats>& stats) {
    wc.validate();
    taxonomy.validate();
    const auto k_sub = static_cast<std::size_t>(taxonomy.k_sub());
    const std::size_t n_static = profiles.feature_names.size();

    SampleSet out;
    out.window = wc;
    out.taxonomy = taxonomy;
    out.static_feature_names = profiles.feature_names;
    out.ts_feature_dim = static_cast<int>(n_static + k_sub);

    if (stats.has_value()) {
        if (stats->mean.size() != n_static || stats->stdev.size() != n_static)
            throw std::invalid_argument("build_samples: normalization stats dimension mismatch");
        out.norm = *stats;
    } else {
        out.norm.mean.assign(n_static, 0.0);
        out.norm.stdev.assign(n_static, 1.0);
        if (!profiles.records.empty()) {
            const double n = static_cast<double>(profiles.records.size());
            for (std::size_t j = 0; j < n_static; ++j) {
                double mean = 0.0;
                for (const auto& r : profiles.records) mean += r.features[j];
                mean /= n;
                double var = 0.0;
                for (const auto& r : profiles.records) {
                    const double d = r.features[j] - mean;
                    var += d * d;
                }
                var /= n;
                out.norm.mean[j] = mean;
                out.norm.stdev[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
            }
        }
    }

    std::map<std::string, const ProfileRecord*> profile_of;
    for (const auto& r : profiles.records) profile_of[r.entity_id] = &r;

    // Group per entity; input is required sorted by (entity, timestamp).
    std::map<std::string, std::vector<const EventLogRecord*>> per_entity;
    for (const auto& e : events) {
        auto& seq = per_entity[e.entity_id];
        if (!seq.empty() && !(e.timestamp > seq.back()->timestamp))
            throw std::invalid_argument(
                "build_samples: events not strictly increasing for entity " + e.entity_id);
        seq.push_back(&e);
    }

    for (const auto& [entity, seq] : per_entity) {
        auto pit = profile_of.find(entity);
        if (pit == profile_of.end())
            throw std::runtime_error("build_samples: entity '" + entity + "' missing a profile");
        num::Vec statics(n_static);
        for (std::size_t j = 0; j < n_static; ++j)
            statics[j] = (pit->second->features[j] - out.norm.mean[j]) / out.norm.stdev[j];

        for (std::size_t k = 1; k < seq.size(); ++k) {
            const double t = seq[k]->timestamp;
            model::Sample s;
            s.entity_id = entity;
            s.anchor_time = t;
            s.target_main = seq[k]->main_type;
            s.target_sub = seq[k]->sub_type;
            s.target_gap = t - seq[k - 1]->timestamp;

            s.ts_window.reserve(static_cast<std::size_t>(wc.n_sub_windows));
            for (int w = 0; w < wc.n_sub_windows; ++w) {
                // Oldest first; window w covers [t - (n-w)*d, t - (n-1-w)*d).
                const double lo = t - static_cast<double>(wc.n_sub_windows - w) * wc.sub_window_days;
                const double hi =
                    t - static_cast<double>(wc.n_sub_windows - 1 - w) * wc.sub_window_days;
                num::Vec feat(n_static + k_sub, 0.0);
                for (std::size_t j = 0; j < n_static; ++j) feat[j] = statics[j];
                for (std::size_t i = 0; i < k; ++i) {
                    const double ti = seq[i]->timestamp;
                    if (ti >= lo && ti < hi)
                        feat[n_static + static_cast<std::size_t>(seq[i]->sub_type)] += 1.0;
                }
                s.ts_window.push_back(std::move(feat));
            }

            const auto wl = static_cast<std::size_t>(wc.event_window_len);
            s.event_window.assign(wl, model::EventTok{taxonomy.k_sub(), 0.0});
            const std::size_t take = std::min(wl, k);
            for (std::size_t j = 0; j < take; ++j) {
                const std::size_t idx = k - take + j;  // oldest of the kept events first
                const double dt =
                    idx == 0 ? 0.0 : seq[idx]->timestamp - seq[idx - 1]->timestamp;
                s.event_window[wl - take + j] = model::EventTok{seq[idx]->sub_type, dt};
            }
            out.samples.push_back(std::move(s));
        }
    }
    // std::map iteration already gives (entity, anchor) canonical order.
    return out;
}

model::Sample build_inference_sample(const std::vector<EventLogRecord>& events,
                                     const ParsedProfiles& profiles, const WindowConfig& wc,
                                     const Taxonomy& taxonomy, const NormStats& norm,
                                     const std::string& entity, double at_time) {
    wc.validate();
    const auto k_sub = static_cast<std::size_t>(taxonomy.k_sub());
    const std::size_t n_static = profiles.feature_names.size();
    if (norm.mean.size() != n_static || norm.stdev.size() != n_static)
        throw std::invalid_argument("build_inference_sample: normalization stats mismatch");

    const ProfileRecord* profile = nullptr;
    for (const auto& r : profiles.records)
        if (r.entity_id == entity) profile = &r;
    if (profile == nullptr)
        throw std::runtime_error("build_inference_sample: entity '" + entity +
                                 "' missing a profile");

    std::vector<const EventLogRecord*> seq;
    for (const auto& e : events)
        if (e.entity_id == entity && e.timestamp <= at_time) seq.push_back(&e);
    if (seq.empty())
        throw std::runtime_error("insufficient history: entity '" + entity +
                                 "' has no events at or before " + std::to_string(at_time));

    model::Sample s;
    s.entity_id = entity;
    s.anchor_time = at_time;
    s.ts_window.reserve(static_cast<std::size_t>(wc.n_sub_windows));
    for (int w = 0; w < wc.n_sub_windows; ++w) {
        const double lo = at_time - static_cast<double>(wc.n_sub_windows - w) * wc.sub_window_days;
        const double hi =
            at_time - static_cast<double>(wc.n_sub_windows - 1 - w) * wc.sub_window_days;
        num::Vec feat(n_static + k_sub, 0.0);
        for (std::size_t j = 0; j < n_static; ++j)
            feat[j] = (profile->features[j] - norm.mean[j]) / norm.stdev[j];
        for (const auto* e : seq)
            if (e->timestamp > lo && e->timestamp <= hi)
                feat[n_static + static_cast<std::size_t>(e->sub_type)] += 1.0;
        s.ts_window.push_back(std::move(feat));
    }
    const auto wl = static_cast<std::size_t>(wc.event_window_len);
    s.event_window.assign(wl, model::EventTok{taxonomy.k_sub(), 0.0});
    const std::size_t take = std::min(wl, seq.size());
    for (std::size_t j = 0; j < take; ++j) {
        const std::size_t idx = seq.size() - take + j;
        const double dt = idx == 0 ? 0.0 : seq[idx]->timestamp - seq[idx - 1]->timestamp;
        s.event_window[wl - take + j] = model::EventTok{seq[idx]->sub_type, dt};
    }
    return s;
}

std::vector<std::string> entity_ids_of(const std::vector<EventLogRecord>& events) {
    std::set<std::string> ids;
    for (const auto& e : events) ids.insert(e.entity_id);
    return {ids.begin(), ids.end()};
}

std::vector<EventLogRecord> filter_by_entities(const std::vector<EventLogRecord>& events,
                                               const std::vector<std::string>& ids) {
    const std::set<std::string> keep(ids.begin(), ids.end());
    std::vector<EventLogRecord> out;
    for (const auto& e : events)
        if (keep.count(e.entity_id)) out.push_back(e);
    return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_entities(
    std::vector<std::string> entity_ids, double test_fraction, std::uint64_t seed) {
    if (entity_ids.size() < 2)
        throw std::invalid_argument("split_entities: need at least 2 entities");
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
        throw std::invalid_argument("split_entities: fraction out of [0,1]");
    std::sort(entity_ids.begin(), entity_ids.end());
    num::Rng rng(num::Rng::mix(seed, 0x9d2c5680d1f3aULL));
    for (std::size_t i = entity_ids.size(); i > 1; --i) {
        const std::size_t j = rng.integer(i);
        std::swap(entity_ids[i - 1], entity_ids[j]);
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(entity_ids.size())));
    std::vector<std::string> test(entity_ids.begin(),
                                  entity_ids.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::string> train(entity_ids.begin() + static_cast<std::ptrdiff_t>(n_test),
                                   entity_ids.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::string SampleSet::to_jsonl() const {
    std::string out;
    nlohmann::json header;
    header["format_version"] = num::kFormatVersion;
    header["window"] = window.to_json();
    header["taxonomy"] = taxonomy.to_json();
    header["static_feature_names"] = static_feature_names;
    header["static_mean"] = norm.mean;
    header["static_stdev"] = norm.stdev;
    header["ts_feature_dim"] = ts_feature_dim;
    header["count"] = samples.size();
    out += header.dump();
    out += '\n';
    for (const auto& s : samples) {
        nlohmann::json doc;
        doc["entity_id"] = s.entity_id;
        doc["t"] = s.anchor_time;
        nlohmann::json ts = nlohmann::json::array();
        for (const auto& v : s.ts_window) ts.push_back(v.values());
        doc["ts"] = std::move(ts);
        nlohmann::json ev = nlohmann::json::array();
        for (const auto& tok : s.event_window) ev.push_back({tok.type_id, tok.dt});
        doc["ev"] = std::move(ev);
        doc["y_main"] = s.target_main;
        doc["y_sub"] = s.target_sub;
        doc["gap"] = s.target_gap;
        out += doc.dump();
        out += '\n';
    }
    return out;
}

SampleSet SampleSet::from_jsonl(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("sample file: missing header");
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("format_version", -1) != num::kFormatVersion)
        throw std::runtime_error("sample file: unsupported format_version");
    SampleSet out;
    out.window = WindowConfig::from_json(header.at("window"));
    out.taxonomy = Taxonomy::from_json(header.at("taxonomy"));
    out.static_feature_names = header.at("static_feature_names").get<std::vector<std::string>>();
    out.norm.mean = header.at("static_mean").get<std::vector<double>>();
    out.norm.stdev = header.at("static_stdev").get<std::vector<double>>();
    out.ts_feature_dim = header.at("ts_feature_dim").get<int>();

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample file line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        model::Sample s;
        s.entity_id = doc.at("entity_id").get<std::string>();
        s.anchor_time = doc.at("t").get<double>();
        for (const auto& row : doc.at("ts")) {
            num::Vec v(row.size());
            for (std::size_t i = 0; i < row.size(); ++i) v[i] = row[i].get<double>();
            s.ts_window.push_back(std::move(v));
        }
        for (const auto& tok : doc.at("ev"))
            s.event_window.push_back(model::EventTok{tok.at(0).get<int>(), tok.at(1).get<double>()});
        s.target_main = doc.at("y_main").get<int>();
        s.target_sub = doc.at("y_sub").get<int>();
        s.target_gap = doc.at("gap").get<double>();
        out.samples.push_back(std::move(s));
    }
    if (out.samples.size() != header.value("count", out.samples.size()))
        throw std::runtime_error("sample file: sample count mismatch with header");
    return out;
}

}  // namespace twinpp::data
