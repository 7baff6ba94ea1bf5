#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twinpp/taxonomy.hpp"

namespace twinpp::data {

// One marked event: entity, timestamp in (fractional) days, resolved type
// ids against the run's taxonomy.
struct EventLogRecord {
    std::string entity_id;
    double timestamp = 0.0;
    int main_type = 0;
    int sub_type = 0;
};

// Static per-entity features (model/age/location analogues).
struct ProfileRecord {
    std::string entity_id;
    std::vector<double> features;
};

struct ParsedLog {
    std::vector<EventLogRecord> records;  // sorted by (entity, timestamp)
    int duplicates_removed = 0;
};

// JSONL, one object per line: {"entity_id", "timestamp", "main_type",
// "sub_type"}. Output is sorted per entity with exact duplicate
// (entity, timestamp, sub_type) lines removed and counted. Malformed lines
// and unknown types raise errors carrying the line number; residual
// equal-timestamp events of one entity violate the strict-ordering
// invariant and are an error as well.
ParsedLog parse_event_log(std::istream& in, const Taxonomy& taxonomy);

struct ParsedProfiles {
    std::vector<std::string> feature_names;
    std::vector<ProfileRecord> records;
};

// CSV with a header row; entity_id is the first column, every other column
// is numeric.
ParsedProfiles parse_profiles(std::istream& in);

std::string to_jsonl(const std::vector<EventLogRecord>& records, const Taxonomy& taxonomy);
std::string to_csv(const ParsedProfiles& profiles);

}  // namespace twinpp::data
