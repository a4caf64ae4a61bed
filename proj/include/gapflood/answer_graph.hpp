#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "clustering.hpp"
#include "error.hpp"
#include "text.hpp"

namespace gapflood {

/// One <subject, predicate, object> extraction; the object may be absent.
struct Triple {
    std::string subject;
    std::string predicate;
    std::optional<std::string> object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

using NodeIndex = std::size_t;

struct Node {
    NodeIndex id = 0;
    std::string phrase;
    bool is_dummy = false;
};

struct Edge {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    std::string surface_predicate;
    std::optional<ClusterId> canonical_label;
};

/// Directed labeled multigraph over phrase nodes. Node order is first appearance.
class AnswerGraph {
public:
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Node& node(NodeIndex i) const { return nodes_.at(i); }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    bool is_canonical() const {
        for (const auto& e : edges_)
            if (!e.canonical_label) return false;
        return true;
    }

    std::size_t out_degree(NodeIndex n) const {
        std::size_t d = 0;
        for (const auto& e : edges_) d += (e.src == n);
        return d;
    }

    std::size_t degree(NodeIndex n) const {
        std::size_t d = 0;
        for (const auto& e : edges_) d += (e.src == n) + (e.dst == n);
        return d;
    }

    /// Low-level builders; build_graph() is the usual entry point.
    NodeIndex add_node(std::string phrase, bool dummy = false) {
        nodes_.push_back(Node{nodes_.size(), std::move(phrase), dummy});
        return nodes_.back().id;
    }
    void add_edge(NodeIndex src, NodeIndex dst, std::string predicate,
                  std::optional<ClusterId> label = std::nullopt) {
        if (src >= nodes_.size() || dst >= nodes_.size())
            throw ContractViolation("edge endpoint out of range");
        if (nodes_[src].is_dummy) throw ContractViolation("dummy node used as edge source");
        edges_.push_back(Edge{src, dst, std::move(predicate), label});
    }
    void set_label(std::size_t edge, ClusterId label) { edges_.at(edge).canonical_label = label; }

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

inline AnswerGraph build_graph(const std::vector<Triple>& triples) {
    if (triples.empty()) throw EmptyInputError("cannot build an answer graph from zero triples");
    AnswerGraph g;
    std::unordered_map<std::string, NodeIndex> index;
    auto intern = [&](const std::string& raw) {
        auto phrase = text::normalize_whitespace(raw);
        auto [it, fresh] = index.try_emplace(phrase, 0);
        if (fresh) it->second = g.add_node(phrase);
        return it->second;
    };
    for (const auto& t : triples) {
        auto subj = text::normalize_whitespace(t.subject);
        auto pred = text::normalize_whitespace(t.predicate);
        if (subj.empty() || pred.empty())
            throw ValidationError("triple with empty subject or predicate");
        NodeIndex s = intern(subj);
        NodeIndex o = 0;
        if (t.object && !text::normalize_whitespace(*t.object).empty()) {
            o = intern(*t.object);
        } else {
            o = g.add_node("", /*dummy=*/true);
        }
        g.add_edge(s, o, pred);
    }
    return g;
}

/// Same structure with every edge labeled by its predicate's cluster id.
inline AnswerGraph canonicalize(const AnswerGraph& graph, const PredicateClustering& clustering) {
    AnswerGraph out = graph;
    for (std::size_t i = 0; i < out.edges().size(); ++i)
        out.set_label(i, clustering.at(out.edges()[i].surface_predicate));
    return out;
}

} // namespace gapflood
