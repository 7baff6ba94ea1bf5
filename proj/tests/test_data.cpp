#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "twinpp/data/event_log.hpp"
#include "twinpp/data/samples.hpp"
#include "twinpp/numcore/rng.hpp"
#include "twinpp/ppsim/synthetic.hpp"

using namespace twinpp;
using data::EventLogRecord;
using data::ParsedProfiles;
using data::WindowConfig;

namespace {

Taxonomy two_level() {
    Taxonomy t;
    t.main_names = {"ticket", "error"};
    t.sub_names = {"ticket", "PRT", "CNG"};
    t.sub_parent = {0, 1, 1};
    return t;
}

std::string line(const std::string& entity, double t, const std::string& main,
                 const std::string& sub) {
    nlohmann::json doc{{"entity_id", entity}, {"timestamp", t}, {"main_type", main},
                       {"sub_type", sub}};
    return doc.dump() + "\n";
}

ParsedProfiles one_profile(const std::string& entity) {
    ParsedProfiles p;
    p.feature_names = {"age"};
    p.records.push_back({entity, {3.0}});
    return p;
}

}  // namespace

TEST_CASE("parse_event_log: empty, dedup, ordering") {
    const Taxonomy tax = two_level();
    {
        std::stringstream in("");
        const auto log = data::parse_event_log(in, tax);
        CHECK(log.records.empty());
        CHECK(log.duplicates_removed == 0);
    }
    {
        std::stringstream in(line("a", 1.0, "error", "PRT") + line("a", 1.0, "error", "PRT"));
        const auto log = data::parse_event_log(in, tax);
        CHECK(log.records.size() == 1);
        CHECK(log.duplicates_removed == 1);
    }
    {
        std::stringstream in(line("a", 5.0, "error", "CNG") + line("a", 1.0, "ticket", "ticket") +
                             line("b", 3.0, "error", "PRT"));
        const auto log = data::parse_event_log(in, tax);
        REQUIRE(log.records.size() == 3);
        CHECK(log.records[0].entity_id == "a");
        CHECK(log.records[0].timestamp == 1.0);
        CHECK(log.records[1].timestamp == 5.0);
        CHECK(log.records[2].entity_id == "b");
    }
}

TEST_CASE("parse_event_log: errors carry line numbers and name the defect") {
    const Taxonomy tax = two_level();
    {
        std::stringstream in(line("a", 1.0, "error", "PRT") + "{broken\n");
        CHECK_THROWS_WITH_AS(data::parse_event_log(in, tax), doctest::Contains("line 2"),
                             std::runtime_error);
    }
    {
        std::stringstream in(line("a", 1.0, "error", "XXX"));
        CHECK_THROWS_WITH_AS(data::parse_event_log(in, tax), doctest::Contains("XXX"),
                             std::runtime_error);
    }
    {
        std::stringstream in(line("a", 1.0, "ticket", "PRT"));  // wrong parent
        CHECK_THROWS_AS(data::parse_event_log(in, tax), std::runtime_error);
    }
    {
        // Distinct events at one timestamp break strict ordering.
        std::stringstream in(line("a", 2.0, "error", "PRT") + line("a", 2.0, "error", "CNG"));
        CHECK_THROWS_WITH_AS(data::parse_event_log(in, tax), doctest::Contains("identical"),
                             std::runtime_error);
    }
}

TEST_CASE("parse_profiles: header, duplicates, malformed cells") {
    {
        std::stringstream in("entity_id,age,loc\na,1.5,2\nb,3,4\n");
        const auto p = data::parse_profiles(in);
        CHECK(p.feature_names == std::vector<std::string>{"age", "loc"});
        REQUIRE(p.records.size() == 2);
        CHECK(p.records[1].features[1] == 4.0);
    }
    {
        std::stringstream in("entity_id,age\na,1\na,2\n");
        CHECK_THROWS_WITH_AS(data::parse_profiles(in), doctest::Contains("duplicate"),
                             std::runtime_error);
    }
    {
        std::stringstream in("entity_id,age\na,notanumber\n");
        CHECK_THROWS_AS(data::parse_profiles(in), std::runtime_error);
    }
    {
        std::stringstream in("age,entity_id\na,1\n");
        CHECK_THROWS_AS(data::parse_profiles(in), std::runtime_error);
    }
}

TEST_CASE("build_samples: single-event entity yields nothing, gaps stay positive") {
    const Taxonomy tax = two_level();
    std::vector<EventLogRecord> events{{"a", 3.0, 1, 1}};
    const auto set = data::build_samples(events, one_profile("a"), WindowConfig{}, tax);
    CHECK(set.samples.empty());

    std::vector<EventLogRecord> more{{"a", 3.0, 1, 1}, {"a", 4.5, 1, 2}, {"a", 10.0, 0, 0}};
    const auto set2 = data::build_samples(more, one_profile("a"), WindowConfig{}, tax);
    REQUIRE(set2.samples.size() == 2);
    for (const auto& s : set2.samples) CHECK(s.target_gap > 0.0);
    CHECK(set2.samples[0].target_gap == doctest::Approx(1.5));
    CHECK(set2.samples[1].target_gap == doctest::Approx(5.5));
    CHECK(set2.samples[0].target_sub == 2);
    CHECK(set2.samples[1].target_main == 0);
}

TEST_CASE("build_samples: window counts match a brute-force recount") {
    const Taxonomy tax = two_level();
    num::Rng rng(404);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<EventLogRecord> events;
        ParsedProfiles profiles;
        profiles.feature_names = {"age", "loc"};
        const int n_entities = 1 + static_cast<int>(rng.integer(3));
        for (int e = 0; e < n_entities; ++e) {
            const std::string id = "e" + std::to_string(e);
            profiles.records.push_back({id, {rng.uniform(0.0, 9.0), rng.uniform(0.0, 5.0)}});
            double t = 0.0;
            const int n_events = 2 + static_cast<int>(rng.integer(28));
            for (int i = 0; i < n_events; ++i) {
                t += rng.uniform(0.05, 9.0);
                const int sub = static_cast<int>(rng.integer(3));
                events.push_back({id, t, tax.sub_parent[static_cast<std::size_t>(sub)], sub});
            }
        }
        WindowConfig wc;
        const auto set = data::build_samples(events, profiles, wc, tax);

        for (const auto& s : set.samples) {
            // Brute-force recount straight from the raw events.
            for (int w = 0; w < wc.n_sub_windows; ++w) {
                const double lo =
                    s.anchor_time - (wc.n_sub_windows - w) * wc.sub_window_days;
                const double hi =
                    s.anchor_time - (wc.n_sub_windows - 1 - w) * wc.sub_window_days;
                std::vector<double> counts(3, 0.0);
                for (const auto& e : events) {
                    if (e.entity_id != s.entity_id) continue;
                    if (e.timestamp >= s.anchor_time) continue;  // strictly causal
                    if (e.timestamp >= lo && e.timestamp < hi)
                        counts[static_cast<std::size_t>(e.sub_type)] += 1.0;
                }
                for (std::size_t k = 0; k < 3; ++k)
                    CHECK(s.ts_window[static_cast<std::size_t>(w)][2 + k] == counts[k]);
            }
            // Event window: the last events strictly before the anchor.
            std::vector<std::pair<double, int>> prior;
            for (const auto& e : events)
                if (e.entity_id == s.entity_id && e.timestamp < s.anchor_time)
                    prior.emplace_back(e.timestamp, e.sub_type);
            const std::size_t wl = static_cast<std::size_t>(wc.event_window_len);
            const std::size_t take = std::min(wl, prior.size());
            for (std::size_t j = 0; j < wl - take; ++j)
                CHECK(s.event_window[j].type_id == tax.k_sub());
            for (std::size_t j = 0; j < take; ++j) {
                const auto idx = prior.size() - take + j;
                CHECK(s.event_window[wl - take + j].type_id == prior[idx].second);
            }
        }
    }
}

TEST_CASE("build_samples: z-scored statics, train stats reused for test") {
    const Taxonomy tax = two_level();
    ParsedProfiles profiles;
    profiles.feature_names = {"age"};
    profiles.records.push_back({"a", {2.0}});
    profiles.records.push_back({"b", {6.0}});
    std::vector<EventLogRecord> events{{"a", 1.0, 1, 1}, {"a", 2.0, 1, 1},
                                       {"b", 1.0, 1, 2}, {"b", 3.0, 1, 2}};
    const auto train_set = data::build_samples(events, profiles, WindowConfig{}, tax);
    CHECK(train_set.norm.mean[0] == doctest::Approx(4.0));
    CHECK(train_set.norm.stdev[0] == doctest::Approx(2.0));
    // z-scored static features: a -> -1, b -> +1.
    CHECK(train_set.samples[0].ts_window[0][0] == doctest::Approx(-1.0));
    CHECK(train_set.samples[1].ts_window[0][0] == doctest::Approx(1.0));

    ParsedProfiles test_profiles;
    test_profiles.feature_names = {"age"};
    test_profiles.records.push_back({"c", {8.0}});
    std::vector<EventLogRecord> test_events{{"c", 1.0, 0, 0}, {"c", 2.0, 0, 0}};
    const auto test_set =
        data::build_samples(test_events, test_profiles, WindowConfig{}, tax, train_set.norm);
    CHECK(test_set.samples[0].ts_window[0][0] == doctest::Approx(2.0));  // (8-4)/2
}

TEST_CASE("build_samples: missing profile is an error naming the entity") {
    const Taxonomy tax = two_level();
    std::vector<EventLogRecord> events{{"ghost", 1.0, 1, 1}, {"ghost", 2.0, 1, 1}};
    ParsedProfiles empty;
    empty.feature_names = {"age"};
    CHECK_THROWS_WITH_AS(data::build_samples(events, empty, WindowConfig{}, tax),
                         doctest::Contains("ghost"), std::runtime_error);
}

TEST_CASE("build_samples output is in canonical (entity, anchor) order") {
    const Taxonomy tax = two_level();
    ParsedProfiles profiles;
    profiles.feature_names = {"age"};
    profiles.records.push_back({"b", {1.0}});
    profiles.records.push_back({"a", {2.0}});
    std::vector<EventLogRecord> events{{"a", 1.0, 1, 1}, {"a", 2.0, 1, 1}, {"a", 3.0, 1, 1},
                                       {"b", 1.0, 1, 2}, {"b", 2.5, 1, 2}};
    const auto set = data::build_samples(events, profiles, WindowConfig{}, tax);
    REQUIRE(set.samples.size() == 3);
    CHECK(set.samples[0].entity_id == "a");
    CHECK(set.samples[0].anchor_time == 2.0);
    CHECK(set.samples[1].anchor_time == 3.0);
    CHECK(set.samples[2].entity_id == "b");
}

TEST_CASE("causality: deleting the future leaves earlier samples bit-identical") {
    num::Rng rng(777);
    for (int trial = 0; trial < 6; ++trial) {
        ppsim::SyntheticSpec spec = ppsim::SyntheticSpec::default_spec();
        spec.n_entities = 3;
        spec.horizon_days = 80.0;
        const auto ds = ppsim::make_synthetic_dataset(spec, 900 + static_cast<std::uint64_t>(trial));
        const double cutoff = rng.uniform(20.0, 70.0);

        const auto full = data::build_samples(ds.events, ds.profiles, WindowConfig{}, ds.taxonomy);
        std::vector<EventLogRecord> truncated;
        for (const auto& e : ds.events)
            if (e.timestamp < cutoff) truncated.push_back(e);
        const auto cut = data::build_samples(truncated, ds.profiles, WindowConfig{}, ds.taxonomy);

        std::vector<const model::Sample*> full_before, cut_before;
        for (const auto& s : full.samples)
            if (s.anchor_time < cutoff) full_before.push_back(&s);
        for (const auto& s : cut.samples)
            if (s.anchor_time < cutoff) cut_before.push_back(&s);
        REQUIRE(full_before.size() == cut_before.size());
        for (std::size_t i = 0; i < full_before.size(); ++i) {
            const auto& a = *full_before[i];
            const auto& b = *cut_before[i];
            CHECK(a.entity_id == b.entity_id);
            CHECK(a.anchor_time == b.anchor_time);
            CHECK(a.target_gap == b.target_gap);
            CHECK(a.target_sub == b.target_sub);
            for (std::size_t w = 0; w < a.ts_window.size(); ++w)
                for (std::size_t k = 0; k < a.ts_window[w].size(); ++k)
                    CHECK(a.ts_window[w][k] == b.ts_window[w][k]);
            for (std::size_t j = 0; j < a.event_window.size(); ++j) {
                CHECK(a.event_window[j].type_id == b.event_window[j].type_id);
                CHECK(a.event_window[j].dt == b.event_window[j].dt);
            }
        }
    }
}

TEST_CASE("split_entities: sizes, determinism, disjoint union") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("e" + std::to_string(i));
    const auto [train1, test1] = data::split_entities(ids, 0.3, 99);
    CHECK(test1.size() == 3);
    CHECK(train1.size() == 7);
    const auto [train2, test2] = data::split_entities(ids, 0.3, 99);
    CHECK(train1 == train2);
    CHECK(test1 == test2);

    std::set<std::string> all(train1.begin(), train1.end());
    for (const auto& id : test1) {
        CHECK(all.count(id) == 0);
        all.insert(id);
    }
    CHECK(all.size() == ids.size());

    const auto [train3, test3] = data::split_entities(ids, 0.3, 100);
    CHECK(test3 != test1);  // different seed, different draw (overwhelmingly)
    CHECK_THROWS(data::split_entities({"only"}, 0.5, 1));
}

TEST_CASE("sample set serialization round-trips bitwise") {
    ppsim::SyntheticSpec spec = ppsim::SyntheticSpec::default_spec();
    spec.n_entities = 2;
    spec.horizon_days = 60.0;
    const auto ds = ppsim::make_synthetic_dataset(spec, 5);
    const auto set = data::build_samples(ds.events, ds.profiles, WindowConfig{}, ds.taxonomy);
    REQUIRE_FALSE(set.samples.empty());

    const std::string text = set.to_jsonl();
    std::stringstream in(text);
    const auto loaded = data::SampleSet::from_jsonl(in);
    CHECK(loaded.to_jsonl() == text);
    REQUIRE(loaded.samples.size() == set.samples.size());
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        CHECK(loaded.samples[i].target_gap == set.samples[i].target_gap);
        CHECK(loaded.samples[i].anchor_time == set.samples[i].anchor_time);
        for (std::size_t w = 0; w < set.samples[i].ts_window.size(); ++w)
            for (std::size_t k = 0; k < set.samples[i].ts_window[w].size(); ++k)
                CHECK(loaded.samples[i].ts_window[w][k] == set.samples[i].ts_window[w][k]);
    }
    CHECK(loaded.ts_feature_dim == set.ts_feature_dim);
}

TEST_CASE("inference sample includes the anchor event and requires history") {
    const Taxonomy tax = two_level();
    std::vector<EventLogRecord> events{{"a", 1.0, 1, 1}, {"a", 6.0, 1, 2}};
    const auto profiles = one_profile("a");
    data::NormStats norm{{0.0}, {1.0}};

    const auto s =
        data::build_inference_sample(events, profiles, WindowConfig{}, tax, norm, "a", 6.0);
    // The event at exactly t=6 is visible to a live prediction.
    CHECK(s.event_window.back().type_id == 2);
    CHECK(s.event_window.back().dt == doctest::Approx(5.0));
    double last_window_count = 0.0;
    for (std::size_t k = 1; k < 4; ++k) last_window_count += s.ts_window.back()[k];
    CHECK(last_window_count == 2.0);  // both events fall in the last 7-day window

    CHECK_THROWS_WITH_AS(
        data::build_inference_sample(events, profiles, WindowConfig{}, tax, norm, "a", 0.5),
        doctest::Contains("insufficient history"), std::runtime_error);
}
