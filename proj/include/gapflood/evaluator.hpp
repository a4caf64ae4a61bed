#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corpus_io.hpp"
#include "error.hpp"
#include "hungarian.hpp"
#include "rouge.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace gapflood {

struct GapMatchCounts {
    std::size_t tp = 0, fp = 0, fn = 0;
    friend bool operator==(const GapMatchCounts&, const GapMatchCounts&) = default;
};

enum class MatchStrategy { greedy, optimal };

inline MatchStrategy parse_match_strategy(std::string_view s) {
    if (s == "greedy") return MatchStrategy::greedy;
    if (s == "optimal") return MatchStrategy::optimal;
    throw ValidationError("unknown matching strategy: " + std::string(s));
}

inline constexpr double kDefaultDelta = 0.5;

/// Counts TP/FP/FN. A system gap is a TP when its ROUGE-2 F1 with the chosen
/// unconsumed true gap exceeds delta; each true gap is consumed at most once.
inline GapMatchCounts match_gaps(const std::vector<std::string>& sys, const std::vector<std::string>& truth,
                                 double delta = kDefaultDelta, MatchStrategy strategy = MatchStrategy::greedy) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ContractViolation("delta must lie in [0,1]");
    GapMatchCounts c;
    if (strategy == MatchStrategy::greedy) {
        std::vector<bool> used(truth.size(), false);
        for (const auto& s : sys) {
            std::size_t best = truth.size();
            double best_score = -1.0;
            for (std::size_t j = 0; j < truth.size(); ++j) {
                if (used[j]) continue;
                const double sc = rouge2_f1(s, truth[j]);
                if (sc > best_score) {
                    best_score = sc;
                    best = j;
                }
            }
            if (best < truth.size() && best_score > delta) {
                used[best] = true;
                ++c.tp;
            } else {
                ++c.fp;
            }
        }
    } else {
        SimilarityMatrix w(sys.size(), truth.size());
        for (std::size_t i = 0; i < sys.size(); ++i)
            for (std::size_t j = 0; j < truth.size(); ++j) {
                const double sc = rouge2_f1(sys[i], truth[j]);
                w.at(i, j) = sc > delta ? sc : 0.0;
            }
        auto assign = max_weight_assignment(w);
        for (std::size_t i = 0; i < sys.size(); ++i) {
            if (assign[i] && w.at(i, *assign[i]) > 0.0)
                ++c.tp;
            else
                ++c.fp;
        }
    }
    c.fn = truth.size() - c.tp;
    return c;
}

struct Prf {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Standard P/R/F1 with the empty-set conventions: nothing predicted and
/// nothing required scores 1/1/1; a vacuous side scores 1 and F1 is 0.
inline Prf per_answer_metrics(const GapMatchCounts& c) {
    const std::size_t sys = c.tp + c.fp, truth = c.tp + c.fn;
    if (sys == 0 && truth == 0) return {1.0, 1.0, 1.0};
    Prf m;
    m.precision = sys == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(sys);
    m.recall = truth == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(truth);
    if (sys == 0 || truth == 0) {
        m.f1 = 0.0;
        return m;
    }
    const double s = m.precision + m.recall;
    m.f1 = s == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / s;
    return m;
}

struct AnswerScore {
    std::string question_id; // may be left empty when a question map is supplied
    std::string answer_id;
    GapMatchCounts counts;
    Prf metrics;
    std::optional<AnswerGroup> group;
};

struct QuestionScore {
    std::string question_id;
    std::size_t answers = 0;
    Prf metrics;
};

struct MacroScore {
    std::size_t questions = 0;
    std::size_t answers = 0;
    Prf metrics;
};

struct EvalReport {
    std::vector<AnswerScore> per_answer;
    std::vector<QuestionScore> per_question; // sorted by question id
    MacroScore macro;
    std::map<std::string, MacroScore> groups; // "dir" / "nodir", when requested
};

namespace detail {

inline std::vector<QuestionScore> per_question_means(const std::vector<const AnswerScore*>& answers) {
    std::map<std::string, QuestionScore> acc;
    for (const auto* a : answers) {
        auto& q = acc[a->question_id];
        q.question_id = a->question_id;
        ++q.answers;
        q.metrics.precision += a->metrics.precision;
        q.metrics.recall += a->metrics.recall;
        q.metrics.f1 += a->metrics.f1;
    }
    std::vector<QuestionScore> out;
    for (auto& [id, q] : acc) {
        const double n = static_cast<double>(q.answers);
        q.metrics.precision /= n;
        q.metrics.recall /= n;
        q.metrics.f1 /= n;
        out.push_back(q);
    }
    return out;
}

inline MacroScore macro_of(const std::vector<QuestionScore>& qs) {
    MacroScore m;
    m.questions = qs.size();
    for (const auto& q : qs) {
        m.answers += q.answers;
        m.metrics.precision += q.metrics.precision;
        m.metrics.recall += q.metrics.recall;
        m.metrics.f1 += q.metrics.f1;
    }
    if (!qs.empty()) {
        const double n = static_cast<double>(qs.size());
        m.metrics.precision /= n;
        m.metrics.recall /= n;
        m.metrics.f1 /= n;
    }
    return m;
}

} // namespace detail

/// Unweighted mean within each question, then across questions, separately
/// for P, R and F1. Answers use their own question_id.
inline EvalReport aggregate(std::vector<AnswerScore> per_answer, bool by_group = false) {
    EvalReport r;
    r.per_answer = std::move(per_answer);
    std::vector<const AnswerScore*> all;
    for (const auto& a : r.per_answer) all.push_back(&a);
    r.per_question = detail::per_question_means(all);
    r.macro = detail::macro_of(r.per_question);
    if (by_group) {
        for (AnswerGroup g : {AnswerGroup::dir, AnswerGroup::nodir}) {
            std::vector<const AnswerScore*> sub;
            for (const auto& a : r.per_answer)
                if (a.group == g) sub.push_back(&a);
            r.groups[to_string(g)] = detail::macro_of(detail::per_question_means(sub));
        }
    }
    return r;
}

/// Variant resolving questions through answer_id -> question_id.
inline EvalReport aggregate(std::vector<AnswerScore> per_answer, const std::map<std::string, std::string>& question_of,
                            bool by_group = false) {
    for (auto& a : per_answer) {
        auto it = question_of.find(a.answer_id);
        if (it == question_of.end()) throw ValidationError("answer " + a.answer_id + " has no question mapping");
        a.question_id = it->second;
    }
    return aggregate(std::move(per_answer), by_group);
}

// ---------------------------------------------------------------------------
// Dataset statistics
// ---------------------------------------------------------------------------

struct DatasetStats {
    std::size_t n = 0;
    double length_mean = 0.0;
    double length_stddev = 0.0; // population
    std::size_t length_max = 0;
    double gap_density = 0.0;

    long rounded_mean() const { return std::lround(length_mean); }
    long rounded_stddev() const { return std::lround(length_stddev); }
};

inline DatasetStats dataset_stats(const std::vector<AnswerRecord>& corpus) {
    if (corpus.empty()) throw EmptyInputError("dataset_stats: empty corpus");
    DatasetStats s;
    s.n = corpus.size();
    std::vector<double> lens;
    std::size_t gaps = 0;
    for (const auto& r : corpus) {
        const auto len = text::split_whitespace(r.student_answer).size();
        lens.push_back(static_cast<double>(len));
        s.length_max = std::max(s.length_max, len);
        gaps += r.true_gaps.size();
    }
    const double n = static_cast<double>(s.n);
    for (double l : lens) s.length_mean += l;
    s.length_mean /= n;
    for (double l : lens) s.length_stddev += (l - s.length_mean) * (l - s.length_mean);
    s.length_stddev = std::sqrt(s.length_stddev / n);
    s.gap_density = static_cast<double>(gaps) / n;
    return s;
}

// ---------------------------------------------------------------------------
// Report serialisation
// ---------------------------------------------------------------------------

namespace detail {
inline nlohmann::json prf_json(const Prf& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}
inline nlohmann::json macro_json(const MacroScore& m) {
    auto j = prf_json(m.metrics);
    j["questions"] = m.questions;
    j["answers"] = m.answers;
    return j;
}
inline Prf prf_from(const nlohmann::json& j) {
    return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}
} // namespace detail

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json answers = nlohmann::json::array();
    for (const auto& a : r.per_answer) {
        auto j = detail::prf_json(a.metrics);
        j["question_id"] = a.question_id;
        j["student_answer_id"] = a.answer_id;
        j["tp"] = a.counts.tp;
        j["fp"] = a.counts.fp;
        j["fn"] = a.counts.fn;
        if (a.group) j["group"] = to_string(*a.group);
        answers.push_back(std::move(j));
    }
    nlohmann::json questions = nlohmann::json::array();
    for (const auto& q : r.per_question) {
        auto j = detail::prf_json(q.metrics);
        j["question_id"] = q.question_id;
        j["answers"] = q.answers;
        questions.push_back(std::move(j));
    }
    nlohmann::json out{{"per_answer", answers}, {"per_question", questions}, {"macro", detail::macro_json(r.macro)}};
    if (!r.groups.empty()) {
        nlohmann::json g = nlohmann::json::object();
        for (const auto& [name, m] : r.groups) g[name] = detail::macro_json(m);
        out["groups"] = g;
    }
    return out;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    try {
        for (const auto& a : j.at("per_answer")) {
            AnswerScore s;
            s.question_id = a.at("question_id").get<std::string>();
            s.answer_id = a.at("student_answer_id").get<std::string>();
            s.counts = {a.at("tp").get<std::size_t>(), a.at("fp").get<std::size_t>(), a.at("fn").get<std::size_t>()};
            s.metrics = detail::prf_from(a);
            if (a.contains("group")) s.group = a.at("group") == "dir" ? AnswerGroup::dir : AnswerGroup::nodir;
            r.per_answer.push_back(std::move(s));
        }
        for (const auto& q : j.at("per_question"))
            r.per_question.push_back(
                {q.at("question_id").get<std::string>(), q.at("answers").get<std::size_t>(), detail::prf_from(q)});
        const auto& m = j.at("macro");
        r.macro = {m.at("questions").get<std::size_t>(), m.at("answers").get<std::size_t>(), detail::prf_from(m)};
        if (j.contains("groups"))
            for (const auto& [name, g] : j.at("groups").items())
                r.groups[name] = {g.at("questions").get<std::size_t>(), g.at("answers").get<std::size_t>(),
                                  detail::prf_from(g)};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("report json: ") + e.what());
    }
    return r;
}

namespace detail {
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}
} // namespace detail

/// One row per question, then a MACRO row.
inline void write_report_csv(const EvalReport& r, std::ostream& out) {
    out << "question_id,answers,precision,recall,f1\n";
    for (const auto& q : r.per_question)
        out << detail::csv_field(q.question_id) << ',' << q.answers << ',' << detail::fixed6(q.metrics.precision) << ','
            << detail::fixed6(q.metrics.recall) << ',' << detail::fixed6(q.metrics.f1) << '\n';
    out << "MACRO," << r.macro.answers << ',' << detail::fixed6(r.macro.metrics.precision) << ','
        << detail::fixed6(r.macro.metrics.recall) << ',' << detail::fixed6(r.macro.metrics.f1) << '\n';
    for (const auto& [name, m] : r.groups)
        out << "MACRO_" << name << ',' << m.answers << ',' << detail::fixed6(m.metrics.precision) << ','
            << detail::fixed6(m.metrics.recall) << ',' << detail::fixed6(m.metrics.f1) << '\n';
}

} // namespace gapflood
