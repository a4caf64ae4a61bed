#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace gapflood {

/// Canonical predicate label, rendered "c_<id>".
struct ClusterId {
    std::uint32_t id = 0;

    std::string str() const { return "c_" + std::to_string(id); }
    friend auto operator<=>(const ClusterId&, const ClusterId&) = default;
};

/// Surface predicate -> cluster id, as produced once per dataset.
struct PredicateClustering {
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
    std::map<std::string, ClusterId> assignment;
    std::vector<std::vector<double>> centroids;
    /// WCSS(k) for k = 1..len, when k was picked by the elbow rule.
    std::vector<double> wcss_curve;

    bool covers(const std::string& predicate) const { return assignment.count(predicate) != 0; }

    ClusterId at(const std::string& predicate) const {
        auto it = assignment.find(predicate);
        if (it == assignment.end()) throw CoverageError(predicate);
        return it->second;
    }
};

inline nlohmann::json to_json(const PredicateClustering& c) {
    nlohmann::json preds = nlohmann::json::object();
    for (const auto& [p, id] : c.assignment) preds[p] = id.id;
    nlohmann::json j{{"k", c.k}, {"seed", c.seed}, {"predicates", preds}};
    if (!c.wcss_curve.empty()) j["wcss"] = c.wcss_curve;
    return j;
}

inline PredicateClustering clustering_from_json(const nlohmann::json& j) {
    PredicateClustering c;
    try {
        c.k = j.at("k").get<std::uint32_t>();
        c.seed = j.value("seed", std::uint64_t{0});
        for (const auto& [p, id] : j.at("predicates").items()) {
            auto v = id.get<std::uint32_t>();
            if (v >= c.k)
                throw ValidationError("cluster id " + std::to_string(v) + " for \"" + p +
                                      "\" is outside 0.." + std::to_string(c.k - 1));
            c.assignment[p] = ClusterId{v};
        }
        if (j.contains("wcss")) c.wcss_curve = j.at("wcss").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("clustering json: ") + e.what());
    }
    return c;
}

} // namespace gapflood
