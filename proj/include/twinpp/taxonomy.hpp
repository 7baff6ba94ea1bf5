#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace twinpp {

// Two-level event type vocabulary: every subtype belongs to exactly one
// main type. Ids are dense and stable (position in the name vectors).
struct Taxonomy {
    std::vector<std::string> main_names;
    std::vector<std::string> sub_names;
    std::vector<int> sub_parent;  // subtype id -> main type id

    int k_main() const { return static_cast<int>(main_names.size()); }
    int k_sub() const { return static_cast<int>(sub_names.size()); }

    // -1 when unknown.
    int main_id(const std::string& name) const;
    int sub_id(const std::string& name) const;

    void validate() const;

    nlohmann::json to_json() const;
    static Taxonomy from_json(const nlohmann::json& doc);

    // Predictive-maintenance default: main types {ticket, error}; `ticket`
    // is its own subtype and `error` splits into six component subtypes.
    static Taxonomy default_two_level();
};

}  // namespace twinpp
