#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include <json.hpp>

#include "answer_graph.hpp"
#include "embedding_store.hpp"
#include "error.hpp"
#include "similarity.hpp"

namespace gapflood {

// ---------------------------------------------------------------------------
// Pairwise connectivity graph
// ---------------------------------------------------------------------------

struct PcgEdge {
    std::size_t from = 0; // index into Pcg::nodes
    std::size_t to = 0;
    ClusterId label;
};

/// Product graph over non-dummy (model, student) node pairs. An edge
/// (m1,s1) -> (m2,s2) labeled p exists iff m1 -p-> m2 and s1 -p-> s2.
struct Pcg {
    std::size_t model_count = 0;
    std::size_t student_count = 0;
    std::vector<NodePair> nodes;
    std::vector<PcgEdge> edges;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t index_of(NodePair p) const {
        if (p.model >= model_count || p.student >= student_count) return npos;
        return lookup_[p.model * student_count + p.student];
    }

    void reset_index(std::size_t m, std::size_t s) {
        model_count = m;
        student_count = s;
        lookup_.assign(m * s, npos);
    }
    void add_node(NodePair p) {
        lookup_[p.model * student_count + p.student] = nodes.size();
        nodes.push_back(p);
    }

private:
    std::vector<std::size_t> lookup_;
};

inline Pcg build_pcg(const AnswerGraph& gm, const AnswerGraph& gs) {
    if (!gm.is_canonical() || !gs.is_canonical())
        throw ContractViolation("build_pcg: both graphs must be canonicalized");
    Pcg pcg;
    pcg.reset_index(gm.node_count(), gs.node_count());
    for (const auto& m : gm.nodes()) {
        if (m.is_dummy) continue;
        for (const auto& s : gs.nodes()) {
            if (s.is_dummy) continue;
            pcg.add_node(NodePair{m.id, s.id});
        }
    }
    for (const auto& em : gm.edges()) {
        for (const auto& es : gs.edges()) {
            if (*em.canonical_label != *es.canonical_label) continue;
            const auto from = pcg.index_of({em.src, es.src});
            const auto to = pcg.index_of({em.dst, es.dst});
            if (from == Pcg::npos || to == Pcg::npos) continue; // dummy endpoint
            pcg.edges.push_back(PcgEdge{from, to, *em.canonical_label});
        }
    }
    return pcg;
}

// ---------------------------------------------------------------------------
// Induced propagation graph
// ---------------------------------------------------------------------------

struct IpgEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    ClusterId label;
    double weight = 0.0;
    bool reverse = false;
};

struct Ipg {
    std::vector<NodePair> nodes;
    std::vector<IpgEdge> edges;

    /// First edge from -> to with the given orientation, if any.
    std::optional<IpgEdge> find(std::size_t from, std::size_t to, bool reverse) const {
        for (const auto& e : edges)
            if (e.from == from && e.to == to && e.reverse == reverse) return e;
        return std::nullopt;
    }
};

/// PCG plus a reverse for every edge. Each (node, label, direction) group of
/// outgoing edges shares weight 1/|group|.
inline Ipg build_ipg(const Pcg& pcg) {
    std::map<std::pair<std::size_t, ClusterId>, std::size_t> out_count, in_count;
    for (const auto& e : pcg.edges) {
        ++out_count[{e.from, e.label}];
        ++in_count[{e.to, e.label}];
    }
    Ipg ipg;
    ipg.nodes = pcg.nodes;
    ipg.edges.reserve(pcg.edges.size() * 2);
    for (const auto& e : pcg.edges) {
        ipg.edges.push_back({e.from, e.to, e.label, 1.0 / static_cast<double>(out_count[{e.from, e.label}]), false});
        ipg.edges.push_back({e.to, e.from, e.label, 1.0 / static_cast<double>(in_count[{e.to, e.label}]), true});
    }
    return ipg;
}

// ---------------------------------------------------------------------------
// Similarity flooding
// ---------------------------------------------------------------------------

/// sigma0 over pcg.nodes: cosine of the two nodes' phrase vectors.
inline std::vector<double> initial_similarity(const AnswerGraph& gm, const AnswerGraph& gs, const Pcg& pcg,
                                              const EmbeddingStore& store) {
    std::vector<PhraseVector> mv(gm.node_count()), sv(gs.node_count());
    for (const auto& n : gm.nodes())
        if (!n.is_dummy) mv[n.id] = phrase_vector(n.phrase, store);
    for (const auto& n : gs.nodes())
        if (!n.is_dummy) sv[n.id] = phrase_vector(n.phrase, store);
    std::vector<double> sigma0;
    sigma0.reserve(pcg.nodes.size());
    for (const auto& p : pcg.nodes) sigma0.push_back(cosine(mv[p.model], sv[p.student]));
    return sigma0;
}

struct PairState {
    NodePair pair;
    double sigma0 = 0.0;
    double sigmaC = 0.0;
    double sigmaF = 0.0;
};

struct AlignmentState {
    std::vector<PairState> pairs;
    int iterations_used = 0;
    bool converged_naturally = true;

    /// Dense matrices sized by the largest node ids present.
    SimilarityMatrix matrix(double PairState::*field) const {
        std::size_t rows = 0, cols = 0;
        for (const auto& p : pairs) {
            rows = std::max(rows, p.pair.model + 1);
            cols = std::max(cols, p.pair.student + 1);
        }
        SimilarityMatrix mtx(rows, cols);
        for (const auto& p : pairs) mtx.at(p.pair.model, p.pair.student) = p.*field;
        return mtx;
    }

    const PairState* find(NodePair p) const {
        for (const auto& s : pairs)
            if (s.pair == p) return &s;
        return nullptr;
    }
};

/// One propagation step without normalisation: u(x) = sigma(x) + sum over
/// IPG in-edges (a -> x) of sigma(a) * w(a, x).
inline std::vector<double> propagate(const Ipg& ipg, std::span<const double> sigma) {
    std::vector<double> u(sigma.begin(), sigma.end());
    for (const auto& e : ipg.edges) u[e.to] += sigma[e.from] * e.weight;
    return u;
}

using FloodObserver = std::function<void(int iteration, std::span<const double> sigma)>;

inline constexpr double kDefaultEpsilon = 1e-4;
inline constexpr int kDefaultMaxIterations = 1000;

/// Fixpoint iteration normalised by the global maximum. Stops when the
/// Euclidean residual drops below epsilon or after max_iter rounds.
inline AlignmentState flood(const Ipg& ipg, std::span<const double> sigma0, double epsilon = kDefaultEpsilon,
                            int max_iter = kDefaultMaxIterations, const FloodObserver& observer = {}) {
    if (!(epsilon > 0.0)) throw ContractViolation("flood: epsilon must be positive");
    if (max_iter < 1) throw ContractViolation("flood: max_iter must be >= 1");
    if (sigma0.size() != ipg.nodes.size()) throw ContractViolation("flood: sigma0 size does not match IPG");
    for (double v : sigma0)
        if (!(v >= 0.0 && v <= 1.0)) throw ContractViolation("flood: sigma0 values must lie in [0,1]");

    AlignmentState state;
    std::vector<double> sigma(sigma0.begin(), sigma0.end());
    state.converged_naturally = false;
    for (int it = 1; it <= max_iter; ++it) {
        auto next = propagate(ipg, sigma);
        const double mx = next.empty() ? 0.0 : *std::max_element(next.begin(), next.end());
        if (mx > 0.0) {
            for (auto& v : next) v /= mx;
        } else {
            next = sigma;
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) residual += (next[i] - sigma[i]) * (next[i] - sigma[i]);
        residual = std::sqrt(residual);
        sigma = std::move(next);
        state.iterations_used = it;
        if (observer) observer(it, sigma);
        if (residual < epsilon) {
            state.converged_naturally = true;
            break;
        }
    }
    state.pairs.reserve(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        state.pairs.push_back({ipg.nodes[i], sigma0[i], sigma[i], std::max(sigma[i], sigma0[i])});
    return state;
}

/// Convenience: PCG, IPG, sigma0 and flooding for one canonical pair.
inline AlignmentState align(const AnswerGraph& gm, const AnswerGraph& gs, const EmbeddingStore& store,
                            double epsilon = kDefaultEpsilon, int max_iter = kDefaultMaxIterations) {
    auto pcg = build_pcg(gm, gs);
    auto ipg = build_ipg(pcg);
    auto sigma0 = initial_similarity(gm, gs, pcg, store);
    return flood(ipg, sigma0, epsilon, max_iter);
}

inline nlohmann::json to_json(const AlignmentState& s, const AnswerGraph* gm = nullptr,
                              const AnswerGraph* gs = nullptr) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : s.pairs) {
        nlohmann::json j{{"m", p.pair.model},
                         {"s", p.pair.student},
                         {"sigma0", p.sigma0},
                         {"sigmaC", p.sigmaC},
                         {"sigmaF", p.sigmaF}};
        if (gm) j["m_phrase"] = gm->node(p.pair.model).phrase;
        if (gs) j["s_phrase"] = gs->node(p.pair.student).phrase;
        pairs.push_back(std::move(j));
    }
    return {{"pairs", pairs}, {"iterations_used", s.iterations_used}, {"converged_naturally", s.converged_naturally}};
}

inline AlignmentState alignment_state_from_json(const nlohmann::json& j) {
    AlignmentState s;
    try {
        for (const auto& p : j.at("pairs")) {
            s.pairs.push_back({NodePair{p.at("m").get<NodeIndex>(), p.at("s").get<NodeIndex>()},
                               p.at("sigma0").get<double>(), p.at("sigmaC").get<double>(),
                               p.at("sigmaF").get<double>()});
        }
        s.iterations_used = j.at("iterations_used").get<int>();
        s.converged_naturally = j.at("converged_naturally").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("alignment state json: ") + e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Exhaustive predicate-induced alignment (small-instance oracle)
// ---------------------------------------------------------------------------

/// One member of A_p: a model edge and a student edge sharing label p.
struct PredicateAlignment {
    ClusterId label;
    std::size_t model_edge = 0;
    std::size_t student_edge = 0;
    NodePair subject;
    std::optional<NodePair> object; // absent when either object is a dummy
    double xi = 0.0;
};

struct OptimalAlignment {
    std::vector<PredicateAlignment> choice; // one per shared label, in label order
    double score = 0.0;

    /// Node-level pairs (subject-subject, object-object) of the chosen combination.
    std::set<NodePair> node_pairs() const {
        std::set<NodePair> out;
        for (const auto& a : choice) {
            out.insert(a.subject);
            if (a.object) out.insert(*a.object);
        }
        return out;
    }
};

/// A_p for every label present in both graphs, ordered by label.
inline std::vector<std::vector<PredicateAlignment>> predicate_induced_alignments(const AnswerGraph& gm,
                                                                                 const AnswerGraph& gs,
                                                                                 const SimilarityMatrix& sigma) {
    std::map<ClusterId, std::vector<PredicateAlignment>> by_label;
    const auto& me = gm.edges();
    const auto& se = gs.edges();
    for (std::size_t i = 0; i < me.size(); ++i) {
        for (std::size_t j = 0; j < se.size(); ++j) {
            if (!me[i].canonical_label || !se[j].canonical_label)
                throw ContractViolation("predicate-induced alignment needs canonical graphs");
            if (*me[i].canonical_label != *se[j].canonical_label) continue;
            PredicateAlignment a;
            a.label = *me[i].canonical_label;
            a.model_edge = i;
            a.student_edge = j;
            a.subject = {me[i].src, se[j].src};
            a.xi = sigma.at(a.subject);
            if (!gm.node(me[i].dst).is_dummy && !gs.node(se[j].dst).is_dummy) {
                a.object = NodePair{me[i].dst, se[j].dst};
                a.xi += sigma.at(*a.object);
            }
            by_label[a.label].push_back(a);
        }
    }
    std::vector<std::vector<PredicateAlignment>> out;
    for (auto& [label, v] : by_label) out.push_back(std::move(v));
    return out;
}

inline constexpr std::size_t kOracleLimit = 1'000'000;

/// Enumerates the Cartesian product of the A_p sets and returns the
/// combination with maximal total xi (first one wins ties).
inline OptimalAlignment brute_force_optimal_alignment(const AnswerGraph& gm, const AnswerGraph& gs,
                                                      const SimilarityMatrix& sigma) {
    auto sets = predicate_induced_alignments(gm, gs, sigma);
    std::size_t product = 1;
    for (const auto& s : sets) {
        if (product > kOracleLimit / s.size())
            throw OracleTooLargeError("predicate-induced alignment product exceeds 10^6 combinations");
        product *= s.size();
    }
    OptimalAlignment best;
    if (sets.empty()) return best;
    std::vector<std::size_t> idx(sets.size(), 0);
    bool have = false;
    for (std::size_t n = 0; n < product; ++n) {
        double score = 0.0;
        for (std::size_t k = 0; k < sets.size(); ++k) score += sets[k][idx[k]].xi;
        if (!have || score > best.score) {
            have = true;
            best.score = score;
            best.choice.clear();
            for (std::size_t k = 0; k < sets.size(); ++k) best.choice.push_back(sets[k][idx[k]]);
        }
        // odometer, last set varies fastest
        for (std::size_t k = sets.size(); k-- > 0;) {
            if (++idx[k] < sets[k].size()) break;
            idx[k] = 0;
        }
    }
    return best;
}

} // namespace gapflood
