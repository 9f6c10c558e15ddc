#include "agora/common/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <unordered_set>

namespace agora::text {

namespace {

bool is_ascii_word(unsigned char c) { return std::isalnum(c) != 0; }

// Length of the UTF-8 sequence starting with `lead`; 1 for stray bytes.
std::size_t seq_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 1;
}

const std::unordered_set<std::string_view>& stopwords() {
    static const std::unordered_set<std::string_view> words = {
        "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
        "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
        "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few",
        "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him",
        "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "know", "let",
        "like", "may", "me", "might", "more", "most", "much", "must", "my", "no", "nor", "not", "now",
        "of", "off", "on", "once", "only", "or", "other", "our", "ours", "out", "over", "own", "same",
        "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
        "then", "there", "these", "they", "this", "those", "through", "to", "too", "under", "until",
        "up", "us", "use", "using", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "one",
        "think", "well", "still", "even", "rather", "whether", "within", "without", "via", "yet",
        "per", "etc", "get", "make", "way", "thing", "things", "really", "many", "another"};
    return words;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && ws(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && ws(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = seq_length(c);
        if (i + len > s.size()) len = 1;
        bool word = false;
        if (len == 1) {
            word = is_ascii_word(c);
        } else {
            // U+2000..U+203F is encoded E2 80 xx.
            const bool punct = len == 3 && c == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x80;
            word = !punct;
        }
        if (word) {
            for (std::size_t k = 0; k < len; ++k) {
                current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i + k]))));
            }
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
        i += len;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool is_stopword(std::string_view lowered) { return stopwords().count(lowered) > 0; }

std::vector<std::string> keywords(std::string_view s, std::size_t n) {
    std::map<std::string, std::pair<int, std::size_t>> stats;  // token -> (count, first index)
    const auto tokens = tokenize(s);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.size() < 3 || is_stopword(t)) continue;
        if (std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) continue;
        auto [it, inserted] = stats.try_emplace(t, 0, i);
        ++it->second.first;
    }
    std::vector<std::pair<std::string, std::pair<int, std::size_t>>> ranked(stats.begin(), stats.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < n; ++i) out.push_back(ranked[i].first);
    return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_end = i + 1 == s.size();
        if (!at_end && !std::isspace(static_cast<unsigned char>(s[i + 1]))) continue;
        auto sentence = trim(s.substr(start, i + 1 - start));
        if (!sentence.empty()) out.push_back(std::move(sentence));
        start = i + 1;
    }
    auto tail = trim(s.substr(std::min(start, s.size())));
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

std::string clip_words(std::string_view s, std::size_t max_words) {
    std::string out;
    std::size_t words = 0;
    std::size_t i = 0;
    while (i < s.size() && words < max_words) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (!out.empty()) out.push_back(' ');
        out.append(s.substr(i, j - i));
        ++words;
        i = j;
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!ws && !in_word) ++n;
        in_word = !ws;
    }
    return n;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string utf8_prefix(std::string_view s, std::size_t max_code_points) {
    std::size_t i = 0;
    std::size_t count = 0;
    while (i < s.size() && count < max_code_points) {
        std::size_t len = seq_length(static_cast<unsigned char>(s[i]));
        if (i + len > s.size()) break;
        i += len;
        ++count;
    }
    return std::string(s.substr(0, i));
}

}  // namespace agora::text
