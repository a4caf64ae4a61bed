#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace gapflood {

/// Word vectors keyed by lowercase token. Immutable once loaded.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw ContractViolation("embedding dimension must be positive");
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vocab_.size(); }

    /// Inserts or replaces (last write wins). Token is lowercased.
    void set(std::string_view token, std::vector<double> values) {
        if (values.size() != dim_)
            throw ContractViolation("vector for \"" + std::string(token) + "\" has length " +
                                    std::to_string(values.size()) + ", expected " +
                                    std::to_string(dim_));
        vocab_[text::to_lower(token)] = std::move(values);
    }

    /// nullptr when out of vocabulary.
    const std::vector<double>* find(std::string_view token) const {
        auto it = vocab_.find(text::to_lower(token));
        return it == vocab_.end() ? nullptr : &it->second;
    }

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vocab_;
};

struct PhraseVector {
    std::vector<double> values;
    std::size_t in_vocab_count = 0;
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && errno != ERANGE;
}

inline bool parse_size(const std::string& s, std::size_t& out) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
    errno = 0;
    unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

} // namespace detail

/// Reads the word2vec text format: "<count> <dim>" then "<token> <dim floats>" rows.
inline EmbeddingStore load_vectors(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw FormatError("embedding file is empty (line 1)");
    ++line_no;
    auto header = text::split_whitespace(line);
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !detail::parse_size(header[0], count) ||
        !detail::parse_size(header[1], dim) || dim == 0)
        throw FormatError("malformed header at line 1: expected \"<count> <dim>\"");

    EmbeddingStore store(dim);
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = text::split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != dim + 1)
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " floats, got " +
                              std::to_string(fields.size() - 1));
        std::vector<double> values(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!detail::parse_double(fields[i + 1], values[i]))
                throw FormatError("line " + std::to_string(line_no) + ": bad float \"" +
                                  fields[i + 1] + "\"");
        }
        store.set(fields[0], std::move(values));
    }
    return store;
}

inline EmbeddingStore load_vectors_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embeddings file: " + path);
    try {
        return load_vectors(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

/// Mean of the in-vocabulary token vectors; OOV tokens are skipped.
inline PhraseVector phrase_vector(std::string_view phrase, const EmbeddingStore& store) {
    PhraseVector out{std::vector<double>(store.dim(), 0.0), 0};
    for (const auto& tok : text::tokenize(phrase)) {
        const auto* v = store.find(tok);
        if (!v) continue;
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += (*v)[i];
        ++out.in_vocab_count;
    }
    if (out.in_vocab_count > 0) {
        const double n = static_cast<double>(out.in_vocab_count);
        for (auto& x : out.values) x /= n;
    }
    return out;
}

/// Cosine similarity clamped to [0,1]; zero vectors give 0.
inline double cosine(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ContractViolation("cosine: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) return 0.0;
    const double c = dot / (std::sqrt(nx) * std::sqrt(ny));
    return std::clamp(c, 0.0, 1.0);
}

inline double cosine(const PhraseVector& x, const PhraseVector& y) {
    return cosine(std::span<const double>(x.values), std::span<const double>(y.values));
}

} // namespace gapflood
