#include "twinpp/taxonomy.hpp"

#include <stdexcept>

namespace twinpp {

int Taxonomy::main_id(const std::string& name) const {
    for (int i = 0; i < k_main(); ++i)
        if (main_names[static_cast<std::size_t>(i)] == name) return i;
    return -1;
}

int Taxonomy::sub_id(const std::string& name) const {
    for (int i = 0; i < k_sub(); ++i)
        if (sub_names[static_cast<std::size_t>(i)] == name) return i;
    return -1;
}

void Taxonomy::validate() const {
    if (main_names.empty() || sub_names.empty())
        throw std::invalid_argument("taxonomy: empty type vocabulary");
    if (sub_parent.size() != sub_names.size())
        throw std::invalid_argument("taxonomy: sub_parent size mismatch");
    for (int p : sub_parent) {
        if (p < 0 || p >= k_main()) throw std::invalid_argument("taxonomy: parent id out of range");
    }
}

nlohmann::json Taxonomy::to_json() const {
    nlohmann::json doc;
    doc["main_types"] = main_names;
    nlohmann::json subs = nlohmann::json::array();
    for (std::size_t i = 0; i < sub_names.size(); ++i) {
        subs.push_back({{"name", sub_names[i]},
                        {"main", main_names[static_cast<std::size_t>(sub_parent[i])]}});
    }
    doc["sub_types"] = std::move(subs);
    return doc;
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc) {
    Taxonomy t;
    t.main_names = doc.at("main_types").get<std::vector<std::string>>();
    for (const auto& s : doc.at("sub_types")) {
        t.sub_names.push_back(s.at("name").get<std::string>());
        const auto parent = s.at("main").get<std::string>();
        const int pid = t.main_id(parent);
        if (pid < 0) throw std::runtime_error("taxonomy: unknown main type " + parent);
        t.sub_parent.push_back(pid);
    }
    t.validate();
    return t;
}

Taxonomy Taxonomy::default_two_level() {
    Taxonomy t;
    t.main_names = {"ticket", "error"};
    t.sub_names = {"ticket", "PRT", "CNG", "IDC", "COMM", "LMTP", "MISC"};
    t.sub_parent = {0, 1, 1, 1, 1, 1, 1};
    return t;
}

}  // namespace twinpp
