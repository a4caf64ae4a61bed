#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gapflood/gapflood.hpp"

namespace fixtures {

using namespace gapflood;

inline std::string data_path(const std::string& name) { return std::string(GAPFLOOD_DATA_DIR) + "/" + name; }

inline const EmbeddingStore& toy_store() {
    static const EmbeddingStore store = load_vectors_file(data_path("toy_vectors.txt"));
    return store;
}

inline ClusterId c(std::uint32_t i) { return ClusterId{i}; }

// a1..a8 / b1..b5 live at index i-1.
inline NodeIndex a(int i) { return static_cast<NodeIndex>(i - 1); }
inline NodeIndex b(int i) { return static_cast<NodeIndex>(i - 1); }

struct GraphPair {
    AnswerGraph gm;
    AnswerGraph gs;
};

// Switch/bulb pair. Only c_0 edges feed the (a5,b3) / (a7,b4) neighbourhood.
inline GraphPair switch_bulb() {
    GraphPair p;
    for (const char* s : {"A switch", "a bulb", "the bulb appear in the same path", "a bulb when the switch",
                          "the switch", "the same path", "the bulb", "a switch again"})
        p.gm.add_node(s);
    for (const char* s : {"a bulb", "a bulb when the switch occurs in the same path as the bulb", "The switch",
                          "in the same path as the bulb when", "in the same path as the bulb"})
        p.gs.add_node(s);
    p.gm.add_edge(a(1), a(2), "affects", c(1));
    p.gm.add_edge(a(3), a(4), "appear", c(2));
    p.gm.add_edge(a(5), a(6), "is in", c(0));
    p.gm.add_edge(a(5), a(7), "is in", c(0));
    p.gm.add_edge(a(8), a(6), "is in", c(0));
    p.gm.add_edge(a(8), a(7), "is in", c(0));
    p.gs.add_edge(b(1), b(2), "occurs", c(2));
    p.gs.add_edge(b(3), b(1), "affects", c(1));
    p.gs.add_edge(b(3), b(4), "is in", c(0));
    p.gs.add_edge(b(3), b(5), "is in", c(0));
    return p;
}

// The six (sigma0, sigmaC) rows of the switch/bulb fixpoint table; every other
// pair of the 8x5 grid is present with zero similarity.
inline AlignmentState fixpoint_table_state() {
    struct Row {
        int m, s;
        double s0, sc;
    };
    const Row rows[] = {{1, 3, 1.0, 1.0},     {4, 2, 0.881, 0.333}, {3, 4, 0.859, 0.167},
                        {3, 2, 0.813, 0.211}, {3, 5, 0.761, 0.165}, {5, 4, 0.383, 0.0005}};
    AlignmentState st;
    for (int m = 1; m <= 8; ++m) {
        for (int s = 1; s <= 5; ++s) {
            PairState ps{NodePair{a(m), b(s)}, 0.0, 0.0, 0.0};
            for (const auto& r : rows)
                if (r.m == m && r.s == s) ps = {NodePair{a(m), b(s)}, r.s0, r.sc, std::max(r.s0, r.sc)};
            st.pairs.push_back(ps);
        }
    }
    return st;
}

inline PredicateClustering explicit_clustering(const std::vector<std::vector<std::string>>& groups) {
    PredicateClustering pc;
    pc.k = groups.size();
    for (std::uint32_t i = 0; i < groups.size(); ++i)
        for (const auto& p : groups[i]) pc.assignment[p] = ClusterId{i};
    return pc;
}

inline GraphPair erosion_pair() {
    auto cl = explicit_clustering({{"breaks down"}, {"are moved"}});
    GraphPair p;
    p.gm = canonicalize(build_graph({{"Weathering", "breaks down", "rocks"},
                                     {"the materials", "are moved", "during erosion"}}),
                        cl);
    p.gs = canonicalize(build_graph({{"Weathering", "breaks down", "the rocks"}}), cl);
    return p;
}

// Oil/water with one shared context triple. With `both_orientations` every
// edge is also added reversed, which is how an undirected model sees it.
inline GraphPair oil_water(bool both_orientations) {
    auto cl = explicit_clustering({{"shows"}, {"is less dense than"}});
    std::vector<Triple> m{{"The layering", "shows", "the density"}, {"Oil", "is less dense than", "water"}};
    std::vector<Triple> s{{"The layering", "shows", "the density"}, {"Water", "is less dense than", "oil"}};
    if (both_orientations) {
        for (auto* v : {&m, &s}) {
            const auto n = v->size();
            for (std::size_t i = 0; i < n; ++i) v->push_back({*(*v)[i].object, (*v)[i].predicate, (*v)[i].subject});
        }
    }
    return {canonicalize(build_graph(m), cl), canonicalize(build_graph(s), cl)};
}

// ---------------------------------------------------------------------------
// Random generators for property tests
// ---------------------------------------------------------------------------

struct RandomGraphSpec {
    std::size_t model_nodes = 4;
    std::size_t student_nodes = 4;
    std::uint32_t labels = 3;
    std::size_t max_edges_per_label = 3;
    double dummy_rate = 0.0;
};

inline AnswerGraph random_canonical_graph(std::mt19937_64& rng, std::size_t nodes, std::uint32_t labels,
                                          std::size_t max_edges, double dummy_rate) {
    AnswerGraph g;
    for (std::size_t i = 0; i < nodes; ++i) g.add_node("n" + std::to_string(i));
    std::uniform_int_distribution<std::size_t> pick(0, nodes - 1), count(1, max_edges);
    std::bernoulli_distribution dummy(dummy_rate);
    for (std::uint32_t l = 0; l < labels; ++l) {
        const auto n = count(rng);
        for (std::size_t k = 0; k < n; ++k) {
            const auto src = pick(rng);
            NodeIndex dst = dummy(rng) ? g.add_node("", true) : pick(rng);
            g.add_edge(src, dst, "p" + std::to_string(l), ClusterId{l});
        }
    }
    return g;
}

inline GraphPair random_pair(std::mt19937_64& rng, const RandomGraphSpec& spec) {
    return {random_canonical_graph(rng, spec.model_nodes, spec.labels, spec.max_edges_per_label, spec.dummy_rate),
            random_canonical_graph(rng, spec.student_nodes, spec.labels, spec.max_edges_per_label, spec.dummy_rate)};
}

inline std::vector<double> random_sigma(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Multiples of 1/1024 so sums are exact in binary floating point.
inline SimilarityMatrix random_dyadic_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_int_distribution<int> u(0, 1024);
    SimilarityMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t s = 0; s < cols; ++s) m.at(r, s) = u(rng) / 1024.0;
    return m;
}

inline AlignmentState state_from_sigmaC(const SimilarityMatrix& m) {
    AlignmentState st;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t s = 0; s < m.cols(); ++s) st.pairs.push_back({NodePair{r, s}, 0.0, m.at(r, s), m.at(r, s)});
    return st;
}

// Max total weight over injective row->column maps (rows may stay unmatched).
inline double brute_force_assignment(const SimilarityMatrix& m) {
    const std::size_t n = std::max(m.rows(), m.cols());
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    double best = 0.0;
    do {
        double total = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r)
            if (perm[r] < m.cols()) total += m.at(r, perm[r]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace fixtures
