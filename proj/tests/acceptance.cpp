// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fixtures.hpp"

using namespace gapflood;
using fixtures::a;
using fixtures::b;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;
const auto suite_start = std::chrono::steady_clock::now();

void criterion(int id, const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0) o.check(secs < limit_s, "runtime " + std::to_string(secs) + " s over limit");
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s (%.3f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
}

std::set<NodePair> pair_set(const FilteredAlignment& f) {
    std::set<NodePair> s;
    for (const auto& p : f.pairs) s.insert(p.pair);
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Best xi over each A_p using only candidates whose positive-similarity node
// pairs were all kept by the filter.
double restricted_xi(const std::vector<std::vector<PredicateAlignment>>& sets, const std::set<NodePair>& kept,
                     const SimilarityMatrix& sigma) {
    double total = 0.0;
    for (const auto& set : sets) {
        double best = 0.0;
        for (const auto& c : set) {
            auto ok = [&](NodePair p) { return kept.count(p) || sigma.at(p) == 0.0; };
            if (ok(c.subject) && (!c.object || ok(*c.object))) best = std::max(best, c.xi);
        }
        total += best;
    }
    return total;
}

} // namespace

int main() {
    criterion(1, "propagation coefficients on the switch/bulb graph pair", 1.0, [](Outcome& o) {
        auto p = fixtures::switch_bulb();
        auto pcg = build_pcg(p.gm, p.gs);
        auto ipg = build_ipg(pcg);
        const auto x = pcg.index_of({a(5), b(3)}), y = pcg.index_of({a(7), b(4)});
        auto fwd = ipg.find(x, y, false);
        auto rev = ipg.find(y, x, true);
        o.check(fwd && fwd->weight == 0.25, "forward weight != 0.25");
        o.check(rev && rev->weight == 0.5, "reverse weight != 0.5");
    });

    criterion(2, "unnormalized first fixpoint iterate at (a7,b4)", 0, [](Outcome& o) {
        auto p = fixtures::switch_bulb();
        auto pcg = build_pcg(p.gm, p.gs);
        auto ipg = build_ipg(pcg);
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 20; ++trial) {
            auto s0 = fixtures::random_sigma(rng, pcg.nodes.size());
            auto u = propagate(ipg, s0);
            auto at = [&](int m, int s) { return s0[pcg.index_of({a(m), b(s)})]; };
            const double expect = at(7, 4) + 0.25 * at(5, 3) + 0.25 * at(8, 3);
            o.check(std::abs(u[pcg.index_of({a(7), b(4)})] - expect) <= 1e-12, "mismatch beyond 1e-12");
        }
    });

    criterion(3, "threshold / exact / best filters on the fixpoint table rows", 1.0, [](Outcome& o) {
        auto st = fixtures::fixpoint_table_state();
        const std::set<NodePair> five{{a(1), b(3)}, {a(4), b(2)}, {a(3), b(4)}, {a(3), b(2)}, {a(3), b(5)}};
        const std::set<NodePair> three{{a(1), b(3)}, {a(4), b(2)}, {a(3), b(4)}};
        o.check(pair_set(threshold_filter(st, 0.5)) == five, "threshold set differs");
        o.check(pair_set(exact_filter(st, 0.5)) == three, "exact set differs");
        auto bf = best_filter(st, 0.5);
        o.check(pair_set(bf) == three, "best set differs");
        const std::pair<NodeIndex, double> expected[] = {{a(1), 1.0}, {a(4), 0.333}, {a(3), 0.167}};
        for (const auto& [m, s] : expected) {
            const auto* p = bf.find_model(m);
            o.check(p && std::abs(p->score - s) <= 0.005, "best score off for a" + std::to_string(m + 1));
        }
    });

    criterion(4, "best filter equals permutation maximum on 100 random matrices", 5.0, [](Outcome& o) {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
            auto w = fixtures::random_dyadic_matrix(rng, r, c);
            auto bf = best_filter(fixtures::state_from_sigmaC(w));
            double total = 0.0;
            for (const auto& p : bf.pairs) total += p.score;
            o.check(total == fixtures::brute_force_assignment(w), "trial " + std::to_string(trial));
        }
    });

    criterion(5, "exhaustive predicate-induced alignment vs best filter", 10.0, [](Outcome& o) {
        std::mt19937_64 rng(5);
        int equality_cases = 0;
        // returns true when the equality precondition held
        auto one = [&](bool singletons, int trial) {
            fixtures::RandomGraphSpec spec{2 + rng() % 4, 2 + rng() % 4, 1 + static_cast<std::uint32_t>(rng() % 3),
                                           singletons ? 1u : 3u, singletons ? 0.0 : 0.15};
            auto p = fixtures::random_pair(rng, spec);
            auto pcg = build_pcg(p.gm, p.gs);
            auto ipg = build_ipg(pcg);
            auto st = flood(ipg, fixtures::random_sigma(rng, pcg.nodes.size()), 1e-10, 1000);
            auto sigma = st.matrix(&PairState::sigmaC);
            auto kept = pair_set(best_filter(st));
            auto sets = predicate_induced_alignments(p.gm, p.gs, sigma);
            auto opt = brute_force_optimal_alignment(p.gm, p.gs, sigma);
            const double bound = restricted_xi(sets, kept, sigma);
            o.check(opt.score >= bound - 1e-12, "oracle below filter bound, trial " + std::to_string(trial));

            bool all_single = !sets.empty();
            for (const auto& s : sets) all_single &= s.size() == 1;
            auto phi = opt.node_pairs();
            std::set<double> values;
            for (const auto& np : phi) values.insert(sigma.at(np));
            std::set<NodeIndex> ms, ss;
            bool injective = true;
            for (const auto& np : phi) injective &= ms.insert(np.model).second && ss.insert(np.student).second;
            if (!(all_single && values.size() == phi.size() && injective)) return false;
            bool coincide = true;
            for (const auto& np : phi) coincide &= kept.count(np) == 1;
            o.check(coincide, "best filter misses an oracle pair, trial " + std::to_string(trial));
            o.check(std::abs(opt.score - bound) <= 1e-9, "equality case differs, trial " + std::to_string(trial));
            return true;
        };
        for (int trial = 0; trial < 50; ++trial) equality_cases += one(trial % 2 == 0, trial);
        // Flooding makes both ends of an isolated PCG edge equal, so the
        // distinct-sigma precondition is rare; draw extra singleton cases.
        for (int trial = 50; trial < 5000 && equality_cases < 25; ++trial) equality_cases += one(true, trial);
        o.check(equality_cases >= 25, "only " + std::to_string(equality_cases) + " equality cases exercised");
    });

    criterion(6, "flood invariants on 200 random PCGs", 10.0, [](Outcome& o) {
        std::mt19937_64 rng(6);
        for (int trial = 0; trial < 200; ++trial) {
            const bool edgeless = trial % 4 == 0;
            const std::size_t m = 1 + rng() % 5, s = 1 + rng() % 5;
            fixtures::RandomGraphSpec spec{m, s, edgeless ? 0u : 1 + static_cast<std::uint32_t>(rng() % 3), 3, 0.1};
            auto p = fixtures::random_pair(rng, spec);
            auto pcg = build_pcg(p.gm, p.gs);
            if (pcg.nodes.size() > 25) continue;
            auto ipg = build_ipg(pcg);
            auto s0 = fixtures::random_sigma(rng, pcg.nodes.size());
            const int cap = 1000;
            bool bounded = true;
            auto st = flood(ipg, s0, kDefaultEpsilon, cap, [&](int, std::span<const double> sig) {
                double mx = 0.0;
                for (double v : sig) {
                    bounded &= v >= 0.0 && v <= 1.0;
                    mx = std::max(mx, v);
                }
                bounded &= mx == 1.0;
            });
            o.check(bounded, "range/max violated, trial " + std::to_string(trial));
            o.check(st.iterations_used >= 1 && st.iterations_used <= cap, "iteration count out of range");
            if (edgeless) {
                for (std::size_t i = 0; i < st.pairs.size(); ++i)
                    for (std::size_t j = 0; j < st.pairs.size(); ++j)
                        if (s0[i] > s0[j] && !(st.pairs[i].sigmaC > st.pairs[j].sigmaC))
                            o.check(false, "edgeless ordering broken, trial " + std::to_string(trial));
            }
        }
    });

    criterion(7, "gap fixtures: erosion edge gap and oil/water directionality", 0, [](Outcome& o) {
        const auto& store = fixtures::toy_store();
        auto e = fixtures::erosion_pair();
        auto gaps = detect_gaps(e.gm, threshold_filter(align(e.gm, e.gs, store)), kDefaultTau);
        o.check(gaps.size() == 1, "erosion: expected exactly one gap, got " + std::to_string(gaps.size()));
        if (!gaps.empty()) {
            o.check(gaps[0].text == "the materials are moved during erosion", "erosion text: " + gaps[0].text);
            o.check(gaps[0].case_tag == GapCase::case2, "erosion case is not 2");
        }
        auto d = fixtures::oil_water(false);
        auto directed = detect_gaps(d.gm, best_filter(align(d.gm, d.gs, store)), kDefaultTau);
        o.check(!directed.empty(), "directed oil/water run found no gap");
        auto u = fixtures::oil_water(true);
        auto undirected = detect_gaps(u.gm, best_filter(align(u.gm, u.gs, store)), kDefaultTau);
        o.check(undirected.empty(), "both-orientation control emitted gaps");
    });

    criterion(8, "ROUGE-2 hand count and match_gaps degenerate table", 0, [](Outcome& o) {
        o.check(std::abs(rouge2_f1("move bones", "is to move bones") - 0.5) <= 1e-9, "rouge2_f1 != 0.5");
        struct Row {
            std::vector<std::string> sys, truth;
            double p, r, f;
        };
        const Row rows[] = {{{}, {}, 1, 1, 1},
                            {{}, {"seeing which one scratches the other"}, 1, 0, 0},
                            {{"seeing which one scratches the other"}, {}, 0, 1, 0},
                            {{"oil floats"}, {"seeing which one scratches the other"}, 0, 0, 0},
                            {{"seeing which one scratches the other"}, {"seeing which one scratches the other"}, 1, 1, 1}};
        for (const auto& row : rows) {
            auto m = per_answer_metrics(match_gaps(row.sys, row.truth));
            o.check(m.precision == row.p && m.recall == row.r && m.f1 == row.f, "degenerate row mismatch");
        }
    });

    criterion(9, "metric aggregation arithmetic and dataset statistics", 0, [](Outcome& o) {
        auto sc = [](std::string q, std::string id, GapMatchCounts c) {
            return AnswerScore{std::move(q), std::move(id), c, per_answer_metrics(c), std::nullopt};
        };
        auto r = aggregate({sc("q1", "a1", {1, 1, 0}), sc("q1", "a2", {0, 0, 2}), sc("q2", "a3", {2, 0, 1})});
        // q1 = mean(2/3, 0), q2 = 0.8
        const double q1p = (0.5 + 1.0) / 2, q1r = (1.0 + 0.0) / 2, q1f = (2.0 / 3.0 + 0.0) / 2;
        const double q2p = 1.0, q2r = 2.0 / 3.0, q2f = 0.8;
        o.check(r.macro.metrics.precision == (q1p + q2p) / 2, "macro P");
        o.check(r.macro.metrics.recall == (q1r + q2r) / 2, "macro R");
        o.check(r.macro.metrics.f1 == (q1f + q2f) / 2, "macro F1");
        auto s = dataset_stats(load_corpus_file(fixtures::data_path("mini_corpus.jsonl")));
        o.check(s.n == 8 && s.length_mean == 8.5 && s.length_max == 16 && s.gap_density == 0.875,
                "bundled fixture statistics");
        o.check(std::abs(s.length_stddev - 4.6636895265) < 1e-9, "bundled fixture stddev");
        std::printf("       note: published-dataset row check (UNT N=161, D=0.68) NOT RUN: dataset not bundled\n");
    });

    criterion(10, "two end-to-end runs produce byte-identical outputs", 0, [](Outcome& o) {
        const fs::path base = fs::temp_directory_path() / ("gapflood_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(base);
        std::vector<fs::path> dirs{base / "run1", base / "run2"};
        for (const auto& d : dirs) {
            const std::string cmd = std::string("\"") + GAPFLOOD_CLI + "\" run --embeddings \"" +
                                    fixtures::data_path("toy_vectors.txt") + "\" --corpus \"" +
                                    fixtures::data_path("mini_corpus.jsonl") + "\" --filter best --group-by dir" +
                                    " --jobs 2 --output-dir \"" + d.string() + "\" 2>/dev/null";
            o.check(std::system(cmd.c_str()) == 0, "cli run failed");
        }
        for (const char* f : {"predictions.json", "report.json", "report.csv", "clustering.json"}) {
            const auto x = slurp(dirs[0] / f), y = slurp(dirs[1] / f);
            o.check(!x.empty(), std::string(f) + " missing");
            o.check(x == y, std::string(f) + " differs");
        }
        fs::remove_all(base);
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
        o.check(total < 30.0, "whole suite took " + std::to_string(total) + " s");
    });

    return failures == 0 ? 0 : 1;
}
