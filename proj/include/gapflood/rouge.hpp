#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "text.hpp"

namespace gapflood {

namespace detail {

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& toks,
                                                                    std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                       toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

inline double overlap_f1(const std::vector<std::string>& cand, const std::vector<std::string>& ref, std::size_t n) {
    auto c = ngram_counts(cand, n), r = ngram_counts(ref, n);
    std::size_t total_c = 0, total_r = 0, hits = 0;
    for (const auto& [g, k] : c) {
        total_c += k;
        if (auto it = r.find(g); it != r.end()) hits += std::min(k, it->second);
    }
    for (const auto& [g, k] : r) total_r += k;
    if (hits == 0 || total_c == 0 || total_r == 0) return 0.0;
    const double p = static_cast<double>(hits) / static_cast<double>(total_c);
    const double rc = static_cast<double>(hits) / static_cast<double>(total_r);
    return 2.0 * p * rc / (p + rc);
}

} // namespace detail

/// ROUGE-2 F1 with clipped bigram counts. Falls back to unigram overlap when
/// either side has fewer than two tokens; 0 when either side is empty.
inline double rouge2_f1(std::string_view candidate, std::string_view reference) {
    const auto c = text::tokenize(candidate);
    const auto r = text::tokenize(reference);
    if (c.empty() || r.empty()) return 0.0;
    const std::size_t n = (c.size() < 2 || r.size() < 2) ? 1 : 2;
    return detail::overlap_f1(c, r, n);
}

} // namespace gapflood
