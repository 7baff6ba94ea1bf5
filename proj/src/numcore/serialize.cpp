#include "twinpp/numcore/serialize.hpp"

#include <stdexcept>

namespace twinpp::num {

nlohmann::json params_to_json(const ParamStore& store) {
    nlohmann::json doc;
    doc["format_version"] = kFormatVersion;
    nlohmann::json params = nlohmann::json::array();
    for (const auto& name : store.names()) {
        const Tensor& t = store.at(name);
        nlohmann::json p;
        p["name"] = name;
        p["rows"] = t.value.rows();
        p["cols"] = t.value.cols();
        p["values"] = std::vector<double>(t.value.data(), t.value.data() + t.value.size());
        params.push_back(std::move(p));
    }
    doc["params"] = std::move(params);
    return doc;
}

ParamStore params_from_json(const nlohmann::json& doc) {
    if (!doc.contains("format_version"))
        throw std::runtime_error("parameter document: missing format_version");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion)
        throw std::runtime_error("parameter document: unsupported format_version " +
                                 std::to_string(version));
    ParamStore store;
    for (const auto& p : doc.at("params")) {
        const auto name = p.at("name").get<std::string>();
        const auto rows = p.at("rows").get<std::size_t>();
        const auto cols = p.at("cols").get<std::size_t>();
        const auto values = p.at("values").get<std::vector<double>>();
        if (values.size() != rows * cols)
            throw std::runtime_error("parameter document: size mismatch for " + name);
        Tensor& t = store.add(name, rows, cols);
        std::copy(values.begin(), values.end(), t.value.data());
        check_finite(t.value, "parameter " + name);
    }
    return store;
}

}  // namespace twinpp::num
