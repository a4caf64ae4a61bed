#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "alignment_filters.hpp"
#include "answer_graph.hpp"
#include "error.hpp"

namespace gapflood {

enum class GapKind { node, edge };

/// Which rule produced a gap. `residual` covers unaligned model nodes that
/// none of the four cases consumed.
enum class GapCase { case1 = 1, case2 = 2, case3 = 3, case4 = 4, residual = 0 };

/// Neighbour scope for Cases 1 and 3.
enum class NeighborMode { incident, outgoing };

inline NeighborMode parse_neighbor_mode(std::string_view s) {
    if (s == "incident") return NeighborMode::incident;
    if (s == "outgoing") return NeighborMode::outgoing;
    throw ValidationError("unknown neighbor mode: " + std::string(s));
}

inline std::string_view to_string(NeighborMode m) {
    return m == NeighborMode::incident ? "incident" : "outgoing";
}

struct Gap {
    std::string text;
    GapKind kind = GapKind::node;
    GapCase case_tag = GapCase::residual;
    std::vector<NodeIndex> nodes; // model nodes covered (dummies excluded)
    std::optional<std::size_t> edge;
};

inline std::string case_label(GapCase c) {
    return c == GapCase::residual ? "residual" : std::to_string(static_cast<int>(c));
}

namespace detail {

enum class NodeStatus { aligned, low, unaligned };

inline std::string render_edge(const AnswerGraph& gm, const Edge& e) {
    std::string out = gm.node(e.src).phrase + " " + e.surface_predicate;
    if (!gm.node(e.dst).is_dummy) out += " " + gm.node(e.dst).phrase;
    return out;
}

} // namespace detail

/// Infers gaps in the student answer from the filtered alignment over the
/// model graph. Edge gaps are emitted first (model edge order), then node
/// gaps (model node order); identical texts are collapsed.
inline std::vector<Gap> detect_gaps(const AnswerGraph& gm, const FilteredAlignment& alignment, double tau,
                                    NeighborMode mode = NeighborMode::incident) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ContractViolation("tau must lie in [0,1]");
    using detail::NodeStatus;
    const bool best = alignment.kind == FilterKind::best;

    std::vector<NodeStatus> status(gm.node_count(), NodeStatus::unaligned);
    for (const auto& p : alignment.pairs) {
        if (p.pair.model >= gm.node_count()) throw ContractViolation("alignment refers to an unknown model node");
        auto& st = status[p.pair.model];
        const bool low = best && p.score < tau;
        if (!low)
            st = NodeStatus::aligned;
        else if (st != NodeStatus::aligned)
            st = NodeStatus::low;
    }

    std::vector<Gap> gaps;
    std::set<std::string> seen;
    std::vector<bool> consumed(gm.node_count(), false);
    auto emit = [&](Gap g) {
        if (!seen.insert(g.text).second) return;
        gaps.push_back(std::move(g));
    };

    const auto& edges = gm.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        const NodeStatus s = status[e.src];
        // A dummy object is never aligned; it takes the subject's status.
        const NodeStatus o = gm.node(e.dst).is_dummy ? s : status[e.dst];
        std::optional<GapCase> c;
        if (s == NodeStatus::unaligned && o == NodeStatus::unaligned)
            c = GapCase::case2;
        else if (best && s == NodeStatus::low && o == NodeStatus::low)
            c = GapCase::case4;
        if (!c) continue;
        Gap g{detail::render_edge(gm, e), GapKind::edge, *c, {e.src}, i};
        if (!gm.node(e.dst).is_dummy) g.nodes.push_back(e.dst);
        consumed[e.src] = true;
        consumed[e.dst] = true;
        emit(std::move(g));
    }

    for (const auto& n : gm.nodes()) {
        if (n.is_dummy || consumed[n.id] || status[n.id] == NodeStatus::aligned) continue;
        const bool isolated = mode == NeighborMode::incident ? gm.degree(n.id) == 0 : gm.out_degree(n.id) == 0;
        GapCase c = GapCase::residual;
        if (isolated) c = status[n.id] == NodeStatus::unaligned ? GapCase::case1 : GapCase::case3;
        emit(Gap{n.phrase, GapKind::node, c, {n.id}, std::nullopt});
    }
    return gaps;
}

inline nlohmann::json to_json(const Gap& g) {
    return {{"text", g.text}, {"kind", g.kind == GapKind::edge ? "edge" : "node"}, {"case", case_label(g.case_tag)}};
}

} // namespace gapflood
