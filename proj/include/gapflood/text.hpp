#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace gapflood::text {

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline bool is_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Trim both ends and collapse internal whitespace runs to a single space.
inline std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Whitespace split, strip leading/trailing punctuation per token, lowercase.
/// Tokens that are pure punctuation disappear.
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    for (auto& raw : split_whitespace(s)) {
        std::size_t b = 0, e = raw.size();
        while (b < e && is_punct(raw[b])) ++b;
        while (e > b && is_punct(raw[e - 1])) --e;
        if (e > b) out.push_back(to_lower(std::string_view(raw).substr(b, e - b)));
    }
    return out;
}

} // namespace gapflood::text
