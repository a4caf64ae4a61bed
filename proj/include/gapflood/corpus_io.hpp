#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "answer_graph.hpp"
#include "clustering.hpp"
#include "error.hpp"
#include "text.hpp"

namespace gapflood {

enum class AnswerGroup { dir, nodir };

inline std::string to_string(AnswerGroup g) { return g == AnswerGroup::dir ? "dir" : "nodir"; }

/// One gap-annotated <model answer, student answer> pair with its triples.
struct AnswerRecord {
    std::string question_id;
    std::string question;
    std::string model_answer;
    std::string student_answer_id;
    std::string student_answer;
    std::vector<std::string> true_gaps;
    std::vector<Triple> model_triples;
    std::vector<Triple> student_triples;
    std::optional<AnswerGroup> group;

    friend bool operator==(const AnswerRecord&, const AnswerRecord&) = default;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError("line " + std::to_string(line) + ": missing required field '" + key + "'");
    return *it;
}

inline std::string require_string(const nlohmann::json& j, const char* key, std::size_t line) {
    const auto& v = require(j, key, line);
    if (!v.is_string())
        throw ValidationError("line " + std::to_string(line) + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<Triple> parse_triples(const nlohmann::json& j, const char* key, std::size_t line) {
    const auto& arr = require(j, key, line);
    if (!arr.is_array())
        throw ValidationError("line " + std::to_string(line) + ": field '" + key + "' must be an array");
    std::vector<Triple> out;
    for (const auto& t : arr) {
        if (!t.is_object())
            throw ValidationError("line " + std::to_string(line) + ": " + key + " entries must be objects");
        Triple tr;
        tr.subject = require_string(t, "subject", line);
        tr.predicate = require_string(t, "predicate", line);
        if (auto it = t.find("object"); it != t.end() && !it->is_null()) {
            if (!it->is_string())
                throw ValidationError("line " + std::to_string(line) + ": triple object must be a string or null");
            tr.object = it->get<std::string>();
        }
        if (text::normalize_whitespace(tr.subject).empty() || text::normalize_whitespace(tr.predicate).empty())
            throw ValidationError("line " + std::to_string(line) + ": " + key +
                                  " contains a triple with an empty subject or predicate");
        out.push_back(std::move(tr));
    }
    return out;
}

inline nlohmann::json triples_json(const std::vector<Triple>& ts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : ts) {
        nlohmann::json o{{"subject", t.subject}, {"predicate", t.predicate}};
        o["object"] = t.object ? nlohmann::json(*t.object) : nlohmann::json(nullptr);
        arr.push_back(std::move(o));
    }
    return arr;
}

} // namespace detail

inline AnswerRecord record_from_json(const nlohmann::json& j, std::size_t line) {
    if (!j.is_object()) throw ValidationError("line " + std::to_string(line) + ": record must be a JSON object");
    AnswerRecord r;
    r.question_id = detail::require_string(j, "question_id", line);
    r.question = detail::require_string(j, "question", line);
    r.model_answer = detail::require_string(j, "model_answer", line);
    r.student_answer_id = detail::require_string(j, "student_answer_id", line);
    r.student_answer = detail::require_string(j, "student_answer", line);
    const auto& gaps = detail::require(j, "true_gaps", line);
    if (!gaps.is_array()) throw ValidationError("line " + std::to_string(line) + ": 'true_gaps' must be an array");
    for (const auto& g : gaps) {
        if (!g.is_string()) throw ValidationError("line " + std::to_string(line) + ": true_gaps entries must be strings");
        r.true_gaps.push_back(g.get<std::string>());
    }
    r.model_triples = detail::parse_triples(j, "model_triples", line);
    r.student_triples = detail::parse_triples(j, "student_triples", line);
    if (r.model_triples.empty())
        throw ValidationError("line " + std::to_string(line) + ": model_triples must not be empty");
    if (auto it = j.find("group"); it != j.end() && !it->is_null()) {
        const auto g = it->is_string() ? it->get<std::string>() : std::string();
        if (g == "dir")
            r.group = AnswerGroup::dir;
        else if (g == "nodir")
            r.group = AnswerGroup::nodir;
        else
            throw ValidationError("line " + std::to_string(line) + ": group must be \"dir\", \"nodir\" or null");
    }
    return r;
}

inline nlohmann::json to_json(const AnswerRecord& r) {
    nlohmann::json j{{"question_id", r.question_id},
                     {"question", r.question},
                     {"model_answer", r.model_answer},
                     {"student_answer_id", r.student_answer_id},
                     {"student_answer", r.student_answer},
                     {"true_gaps", r.true_gaps},
                     {"model_triples", detail::triples_json(r.model_triples)},
                     {"student_triples", detail::triples_json(r.student_triples)}};
    j["group"] = r.group ? nlohmann::json(to_string(*r.group)) : nlohmann::json(nullptr);
    return j;
}

/// JSON Lines, one AnswerRecord per non-blank line.
inline std::vector<AnswerRecord> load_corpus(std::istream& in) {
    std::vector<AnswerRecord> out;
    std::map<std::pair<std::string, std::string>, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::normalize_whitespace(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        auto rec = record_from_json(j, line_no);
        auto key = std::make_pair(rec.question_id, rec.student_answer_id);
        auto [it, fresh] = first_line.try_emplace(key, line_no);
        if (!fresh)
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate record (question_id=" +
                                  rec.question_id + ", student_answer_id=" + rec.student_answer_id +
                                  "), first seen at line " + std::to_string(it->second));
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<AnswerRecord> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    try {
        return load_corpus(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void write_corpus(const std::vector<AnswerRecord>& records, std::ostream& out) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

/// Every predicate of every record (model and student), normalised.
inline std::set<std::string> corpus_predicates(const std::vector<AnswerRecord>& records) {
    std::set<std::string> out;
    for (const auto& r : records) {
        for (const auto& t : r.model_triples) out.insert(text::normalize_whitespace(t.predicate));
        for (const auto& t : r.student_triples) out.insert(text::normalize_whitespace(t.predicate));
    }
    return out;
}

struct CorpusWarning {
    std::string question_id;
    std::string student_answer_id;
    std::string message;
};

/// Non-fatal checks: empty student answers, gaps that are not spans of the
/// model answer, and (when a clustering is given) uncovered predicates.
inline std::vector<CorpusWarning> validate_corpus(const std::vector<AnswerRecord>& records,
                                                  const PredicateClustering* clustering = nullptr) {
    std::vector<CorpusWarning> out;
    for (const auto& r : records) {
        auto warn = [&](std::string msg) { out.push_back({r.question_id, r.student_answer_id, std::move(msg)}); };
        if (text::normalize_whitespace(r.student_answer).empty()) warn("empty student answer");
        const auto model = text::to_lower(text::normalize_whitespace(r.model_answer));
        for (const auto& g : r.true_gaps) {
            if (model.find(text::to_lower(text::normalize_whitespace(g))) == std::string::npos)
                warn("true gap not found in model answer: \"" + g + "\"");
        }
        if (clustering) {
            std::set<std::string> missing;
            for (const auto* ts : {&r.model_triples, &r.student_triples})
                for (const auto& t : *ts) {
                    auto p = text::normalize_whitespace(t.predicate);
                    if (!clustering->covers(p)) missing.insert(p);
                }
            for (const auto& p : missing) warn("predicate not covered by clustering: \"" + p + "\"");
        }
    }
    return out;
}

} // namespace gapflood
