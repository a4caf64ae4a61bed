#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "flood_align.hpp"
#include "hungarian.hpp"

namespace gapflood {

enum class FilterKind { threshold, exact, best };

inline std::string_view to_string(FilterKind k) {
    switch (k) {
    case FilterKind::threshold: return "threshold";
    case FilterKind::exact: return "exact";
    case FilterKind::best: return "best";
    }
    return "?";
}

inline FilterKind parse_filter_kind(std::string_view s) {
    if (s == "threshold") return FilterKind::threshold;
    if (s == "exact") return FilterKind::exact;
    if (s == "best") return FilterKind::best;
    throw ValidationError("unknown filter kind: " + std::string(s));
}

struct ScoredPair {
    NodePair pair;
    double score = 0.0;
    friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

struct FilteredAlignment {
    FilterKind kind = FilterKind::threshold;
    std::vector<ScoredPair> pairs;
    double tau = 0.5;

    const ScoredPair* find_model(NodeIndex m) const {
        for (const auto& p : pairs)
            if (p.pair.model == m) return &p;
        return nullptr;
    }
    bool has_model(NodeIndex m) const { return find_model(m) != nullptr; }
};

inline constexpr double kDefaultTau = 0.5;

namespace detail {
inline void check_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ContractViolation("tau must lie in [0,1]");
}
} // namespace detail

/// FA-T: pairs with sigmaC > tau or sigma0 > tau; score sigmaF; many-to-many.
inline FilteredAlignment threshold_filter(const AlignmentState& state, double tau = kDefaultTau) {
    detail::check_tau(tau);
    FilteredAlignment out{FilterKind::threshold, {}, tau};
    for (const auto& p : state.pairs)
        if (p.sigmaC > tau || p.sigma0 > tau) out.pairs.push_back({p.pair, p.sigmaF});
    return out;
}

/// FA-E: greedy one-to-one selection over the threshold set, highest sigmaF
/// first, ties by (model id, student id).
inline FilteredAlignment exact_filter(const AlignmentState& state, double tau = kDefaultTau) {
    auto candidates = threshold_filter(state, tau).pairs;
    std::sort(candidates.begin(), candidates.end(), [](const ScoredPair& a, const ScoredPair& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.pair < b.pair;
    });
    FilteredAlignment out{FilterKind::exact, {}, tau};
    std::set<NodeIndex> used_m, used_s;
    for (const auto& c : candidates) {
        if (used_m.count(c.pair.model) || used_s.count(c.pair.student)) continue;
        used_m.insert(c.pair.model);
        used_s.insert(c.pair.student);
        out.pairs.push_back(c);
    }
    return out;
}

/// FA-B: maximum-weight one-to-one matching on sigmaC (Hungarian). Rows and
/// columns are the model / student nodes appearing in the state.
inline FilteredAlignment best_filter(const AlignmentState& state, double tau = kDefaultTau) {
    detail::check_tau(tau);
    std::set<NodeIndex> ms, ss;
    for (const auto& p : state.pairs) {
        ms.insert(p.pair.model);
        ss.insert(p.pair.student);
    }
    std::vector<NodeIndex> rows(ms.begin(), ms.end()), cols(ss.begin(), ss.end());
    auto pos = [](const std::vector<NodeIndex>& v, NodeIndex x) {
        return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    SimilarityMatrix w(rows.size(), cols.size());
    for (const auto& p : state.pairs) w.at(pos(rows, p.pair.model), pos(cols, p.pair.student)) = p.sigmaC;
    auto assignment = max_weight_assignment(w);

    FilteredAlignment out{FilterKind::best, {}, tau};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!assignment[r]) continue;
        const double score = w.at(r, *assignment[r]);
        if (score <= 0.0) continue;
        out.pairs.push_back({NodePair{rows[r], cols[*assignment[r]]}, score});
    }
    return out;
}

inline FilteredAlignment apply_filter(FilterKind kind, const AlignmentState& state, double tau) {
    switch (kind) {
    case FilterKind::threshold: return threshold_filter(state, tau);
    case FilterKind::exact: return exact_filter(state, tau);
    case FilterKind::best: return best_filter(state, tau);
    }
    throw ContractViolation("unknown filter kind");
}

inline nlohmann::json to_json(const FilteredAlignment& f, const AnswerGraph* gm = nullptr,
                              const AnswerGraph* gs = nullptr) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : f.pairs) {
        nlohmann::json j{{"m", p.pair.model}, {"s", p.pair.student}, {"score", p.score}};
        if (gm) j["m_phrase"] = gm->node(p.pair.model).phrase;
        if (gs) j["s_phrase"] = gs->node(p.pair.student).phrase;
        pairs.push_back(std::move(j));
    }
    return {{"kind", std::string(to_string(f.kind))}, {"tau", f.tau}, {"pairs", pairs}};
}

} // namespace gapflood
