#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "alignment_filters.hpp"
#include "answer_graph.hpp"
#include "corpus_io.hpp"
#include "embedding_store.hpp"
#include "error.hpp"
#include "evaluator.hpp"
#include "flood_align.hpp"
#include "gap_detector.hpp"
#include "predicate_canonicalizer.hpp"
#include "stats.hpp"

namespace gapflood {

struct PipelineConfig {
    std::string embeddings_path;
    std::string corpus_path;
    std::string clustering_path; // optional; built in-line when empty
    FilterKind filter = FilterKind::threshold;
    double tau = kDefaultTau;
    double delta = kDefaultDelta;
    double epsilon = kDefaultEpsilon;
    int max_iter = kDefaultMaxIterations;
    std::size_t k = 0; // 0: pick by elbow up to k_max
    std::size_t k_max = 30;
    std::uint64_t seed = 0;
    NeighborMode neighbor_mode = NeighborMode::incident;
    MatchStrategy matching = MatchStrategy::greedy;
    bool group_by_dir = false;
    std::size_t jobs = 1;
    std::string output_dir = ".";

    void validate() const {
        if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0,1]");
        if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in [0,1]");
        if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
        if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
        if (k_max == 0) throw ValidationError("k_max must be positive");
        if (jobs == 0) throw ValidationError("jobs must be positive");
    }
};

/// Fields present in the JSON object override the defaults in `base`.
inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
    try {
        if (j.contains("embeddings_path")) base.embeddings_path = j.at("embeddings_path").get<std::string>();
        if (j.contains("corpus_path")) base.corpus_path = j.at("corpus_path").get<std::string>();
        if (j.contains("clustering_path")) base.clustering_path = j.at("clustering_path").get<std::string>();
        if (j.contains("filter")) base.filter = parse_filter_kind(j.at("filter").get<std::string>());
        if (j.contains("tau")) base.tau = j.at("tau").get<double>();
        if (j.contains("delta")) base.delta = j.at("delta").get<double>();
        if (j.contains("epsilon")) base.epsilon = j.at("epsilon").get<double>();
        if (j.contains("max_iter")) base.max_iter = j.at("max_iter").get<int>();
        if (j.contains("k")) base.k = j.at("k").get<std::size_t>();
        if (j.contains("k_max")) base.k_max = j.at("k_max").get<std::size_t>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("neighbor_mode")) base.neighbor_mode = parse_neighbor_mode(j.at("neighbor_mode").get<std::string>());
        if (j.contains("matching")) base.matching = parse_match_strategy(j.at("matching").get<std::string>());
        if (j.contains("group_by")) base.group_by_dir = j.at("group_by").get<std::string>() == "dir";
        if (j.contains("jobs")) base.jobs = j.at("jobs").get<std::size_t>();
        if (j.contains("output_dir")) base.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("config json: ") + e.what());
    }
    return base;
}

/// Clustering over every predicate in the corpus: fixed k, or elbow-selected.
inline PredicateClustering build_clustering(const std::vector<AnswerRecord>& corpus, const EmbeddingStore& store,
                                            std::size_t k, std::size_t k_max, std::uint64_t seed) {
    auto preds = corpus_predicates(corpus);
    if (preds.empty()) throw EmptyInputError("corpus has no predicates to cluster");
    if (k != 0) return cluster_predicates(preds, store, k, seed);
    return cluster_predicates_auto(preds, store, k_max, seed);
}

/// Everything computed for one <M, S> pair.
struct RecordResult {
    AnswerGraph model_graph;
    AnswerGraph student_graph;
    AlignmentState state;
    FilteredAlignment alignment;
    std::vector<Gap> gaps;
};

inline RecordResult process_record(const AnswerRecord& rec, const EmbeddingStore& store,
                                   const PredicateClustering& clustering, const PipelineConfig& cfg) {
    RecordResult r;
    r.model_graph = canonicalize(build_graph(rec.model_triples), clustering);
    r.student_graph = canonicalize(build_graph(rec.student_triples), clustering);
    auto pcg = build_pcg(r.model_graph, r.student_graph);
    auto ipg = build_ipg(pcg);
    auto sigma0 = initial_similarity(r.model_graph, r.student_graph, pcg, store);
    r.state = flood(ipg, sigma0, cfg.epsilon, cfg.max_iter);
    r.alignment = apply_filter(cfg.filter, r.state, cfg.tau);
    r.gaps = detect_gaps(r.model_graph, r.alignment, cfg.tau, cfg.neighbor_mode);
    return r;
}

struct RecordFailure {
    std::string question_id;
    std::string student_answer_id;
    std::string message;
};

struct RunOutput {
    nlohmann::json predictions; // array, input order
    EvalReport report;
    std::vector<RecordFailure> failures;
};

/// Runs every record; failures are collected, never fatal. Output order
/// follows input order regardless of `cfg.jobs`.
inline RunOutput run_pipeline(const std::vector<AnswerRecord>& corpus, const EmbeddingStore& store,
                              const PredicateClustering& clustering, const PipelineConfig& cfg) {
    cfg.validate();
    struct Slot {
        std::optional<RecordResult> result;
        std::string error;
    };
    std::vector<Slot> slots(corpus.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) {
            try {
                slots[i].result = process_record(corpus[i], store, clustering, cfg);
            } catch (const std::exception& e) {
                slots[i].error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::min(cfg.jobs, std::max<std::size_t>(corpus.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    RunOutput out;
    out.predictions = nlohmann::json::array();
    std::vector<AnswerScore> scores;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& rec = corpus[i];
        if (!slots[i].result) {
            out.failures.push_back({rec.question_id, rec.student_answer_id, slots[i].error});
            continue;
        }
        const auto& res = *slots[i].result;
        nlohmann::json gaps = nlohmann::json::array();
        std::vector<std::string> texts;
        for (const auto& g : res.gaps) {
            gaps.push_back(to_json(g));
            texts.push_back(g.text);
        }
        out.predictions.push_back({{"question_id", rec.question_id},
                                   {"student_answer_id", rec.student_answer_id},
                                   {"gaps", gaps},
                                   {"alignment", to_json(res.alignment, &res.model_graph, &res.student_graph)},
                                   {"iterations_used", res.state.iterations_used},
                                   {"converged_naturally", res.state.converged_naturally}});
        AnswerScore s;
        s.question_id = rec.question_id;
        s.answer_id = rec.student_answer_id;
        s.counts = match_gaps(texts, rec.true_gaps, cfg.delta, cfg.matching);
        s.metrics = per_answer_metrics(s.counts);
        s.group = rec.group;
        scores.push_back(std::move(s));
    }
    out.report = aggregate(std::move(scores), cfg.group_by_dir);
    return out;
}

/// Report JSON with run metadata and failure accounting.
inline nlohmann::json report_document(const RunOutput& run, const PipelineConfig& cfg) {
    auto j = to_json(run.report);
    j["config"] = {{"filter", std::string(to_string(cfg.filter))},
                   {"tau", cfg.tau},
                   {"delta", cfg.delta},
                   {"epsilon", cfg.epsilon},
                   {"max_iter", cfg.max_iter},
                   {"neighbor_mode", std::string(to_string(cfg.neighbor_mode))},
                   {"matching", cfg.matching == MatchStrategy::greedy ? "greedy" : "optimal"},
                   {"seed", cfg.seed}};
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& f : run.failures)
        fails.push_back({{"question_id", f.question_id}, {"student_answer_id", f.student_answer_id}, {"error", f.message}});
    j["record_failures"] = run.failures.size();
    j["failures"] = fails;
    return j;
}

// ---------------------------------------------------------------------------
// Report comparison
// ---------------------------------------------------------------------------

struct ComparisonSummary {
    TTestResult test;
    std::vector<std::pair<std::string, double>> per_question_delta; // a - b F1
    double macro_f1_delta = 0.0;
};

inline ComparisonSummary compare_reports(const EvalReport& a, const EvalReport& b) {
    std::map<std::string, double> fa, fb;
    for (const auto& q : a.per_question) fa[q.question_id] = q.metrics.f1;
    for (const auto& q : b.per_question) fb[q.question_id] = q.metrics.f1;
    std::vector<std::string> only;
    for (const auto& [id, v] : fa)
        if (!fb.count(id)) only.push_back(id + " (only in first)");
    for (const auto& [id, v] : fb)
        if (!fa.count(id)) only.push_back(id + " (only in second)");
    if (!only.empty()) {
        std::string msg = "reports cover different question sets:";
        for (const auto& s : only) msg += " " + s;
        throw ValidationError(msg);
    }
    ComparisonSummary out;
    std::vector<double> xa, xb;
    for (const auto& [id, v] : fa) {
        xa.push_back(v);
        xb.push_back(fb[id]);
        out.per_question_delta.emplace_back(id, v - fb[id]);
    }
    out.test = paired_t_test(xa, xb);
    out.macro_f1_delta = a.macro.metrics.f1 - b.macro.metrics.f1;
    return out;
}

} // namespace gapflood
