#include "twinpp/data/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace twinpp::data {

ParsedLog parse_event_log(std::istream& in, const Taxonomy& taxonomy) {
    taxonomy.validate();
    ParsedLog out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("event log line " + std::to_string(line_no) +
                                     ": malformed JSON (" + e.what() + ")");
        }
        EventLogRecord rec;
        try {
            rec.entity_id = doc.at("entity_id").get<std::string>();
            rec.timestamp = doc.at("timestamp").get<double>();
            const auto main_name = doc.at("main_type").get<std::string>();
            const auto sub_name = doc.at("sub_type").get<std::string>();
            rec.sub_type = taxonomy.sub_id(sub_name);
            if (rec.sub_type < 0)
                throw std::runtime_error("unknown sub_type '" + sub_name + "'");
            rec.main_type = taxonomy.sub_parent[static_cast<std::size_t>(rec.sub_type)];
            if (taxonomy.main_names[static_cast<std::size_t>(rec.main_type)] != main_name)
                throw std::runtime_error("main_type '" + main_name +
                                         "' inconsistent with taxonomy parent of '" + sub_name +
                                         "'");
        } catch (const std::exception& e) {
            throw std::runtime_error("event log line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!std::isfinite(rec.timestamp))
            throw std::runtime_error("event log line " + std::to_string(line_no) +
                                     ": non-finite timestamp");
        out.records.push_back(std::move(rec));
    }

    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const EventLogRecord& a, const EventLogRecord& b) {
                         if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
                         return a.timestamp < b.timestamp;
                     });

    // Dedup exact (entity, timestamp, sub_type) repeats, keeping the first
    // occurrence; any distinct types left at one (entity, timestamp) break
    // the strict-ordering invariant.
    std::vector<EventLogRecord> kept;
    kept.reserve(out.records.size());
    std::size_t i = 0;
    while (i < out.records.size()) {
        std::size_t j = i;
        while (j < out.records.size() && out.records[j].entity_id == out.records[i].entity_id &&
               out.records[j].timestamp == out.records[i].timestamp)
            ++j;
        std::vector<int> seen;
        for (std::size_t k = i; k < j; ++k) {
            if (std::find(seen.begin(), seen.end(), out.records[k].sub_type) != seen.end()) {
                out.duplicates_removed++;
                continue;
            }
            seen.push_back(out.records[k].sub_type);
            kept.push_back(out.records[k]);
        }
        if (seen.size() > 1)
            throw std::runtime_error("event log: entity '" + out.records[i].entity_id +
                                     "' has distinct events at identical timestamp " +
                                     std::to_string(out.records[i].timestamp));
        i = j;
    }
    out.records = std::move(kept);
    return out;
}

ParsedProfiles parse_profiles(std::istream& in) {
    ParsedProfiles out;
    std::string line;
    if (!std::getline(in, line)) return out;
    {
        std::stringstream header(line);
        std::string col;
        bool first = true;
        while (std::getline(header, col, ',')) {
            if (first) {
                if (col != "entity_id")
                    throw std::runtime_error("profiles: first column must be entity_id");
                first = false;
            } else {
                out.feature_names.push_back(col);
            }
        }
        if (first) throw std::runtime_error("profiles: empty header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        ProfileRecord rec;
        if (!std::getline(row, cell, ','))
            throw std::runtime_error("profiles line " + std::to_string(line_no) + ": empty row");
        rec.entity_id = cell;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                rec.features.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("profiles line " + std::to_string(line_no) +
                                         ": non-numeric value '" + cell + "'");
            }
        }
        if (rec.features.size() != out.feature_names.size())
            throw std::runtime_error("profiles line " + std::to_string(line_no) +
                                     ": column count mismatch");
        for (const auto& existing : out.records)
            if (existing.entity_id == rec.entity_id)
                throw std::runtime_error("profiles line " + std::to_string(line_no) +
                                         ": duplicate entity " + rec.entity_id);
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::string to_jsonl(const std::vector<EventLogRecord>& records, const Taxonomy& taxonomy) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::json doc{
            {"entity_id", r.entity_id},
            {"timestamp", r.timestamp},
            {"main_type", taxonomy.main_names.at(static_cast<std::size_t>(r.main_type))},
            {"sub_type", taxonomy.sub_names.at(static_cast<std::size_t>(r.sub_type))}};
        out += doc.dump();
        out += '\n';
    }
    return out;
}

std::string to_csv(const ParsedProfiles& profiles) {
    std::ostringstream out;
    out.precision(17);
    out << "entity_id";
    for (const auto& name : profiles.feature_names) out << "," << name;
    out << "\n";
    for (const auto& r : profiles.records) {
        out << r.entity_id;
        for (double v : r.features) out << "," << v;
        out << "\n";
    }
    return out.str();
}

}  // namespace twinpp::data
