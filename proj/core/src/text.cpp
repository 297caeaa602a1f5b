#include "prodlex/text.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "prodlex/error.hpp"

namespace prodlex::text {

namespace {

// Decodes one UTF-8 scalar value starting at s[i]; advances i. Invalid
// sequences decode to U+FFFD and advance one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) -> std::uint8_t {
        return static_cast<std::uint8_t>(s[k]);
    };
    std::uint8_t b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        std::uint8_t b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Accent folding for the Latin-1 Supplement and Latin Extended-A blocks,
// plus a handful of typographic characters common in catalog text.
// Codepoints not in the table pass through unchanged.
const std::unordered_map<char32_t, const char*>& fold_table() {
    static const std::unordered_map<char32_t, const char*> table = [] {
        std::unordered_map<char32_t, const char*> t;
        auto fill = [&t](char32_t lo, char32_t hi, const char* repl) {
            for (char32_t c = lo; c <= hi; ++c) t[c] = repl;
        };
        // Latin-1 Supplement, uppercase then lowercase.
        fill(0x00C0, 0x00C5, "a");
        t[0x00C6] = "ae";
        t[0x00C7] = "c";
        fill(0x00C8, 0x00CB, "e");
        fill(0x00CC, 0x00CF, "i");
        t[0x00D0] = "d";
        t[0x00D1] = "n";
        fill(0x00D2, 0x00D6, "o");
        t[0x00D8] = "o";
        fill(0x00D9, 0x00DC, "u");
        t[0x00DD] = "y";
        t[0x00DE] = "th";
        t[0x00DF] = "ss";
        fill(0x00E0, 0x00E5, "a");
        t[0x00E6] = "ae";
        t[0x00E7] = "c";
        fill(0x00E8, 0x00EB, "e");
        fill(0x00EC, 0x00EF, "i");
        t[0x00F0] = "d";
        t[0x00F1] = "n";
        fill(0x00F2, 0x00F6, "o");
        t[0x00F8] = "o";
        fill(0x00F9, 0x00FC, "u");
        t[0x00FD] = "y";
        t[0x00FE] = "th";
        t[0x00FF] = "y";
        // Latin-1 letterlike symbols and fractions.
        t[0x00AA] = "a";
        t[0x00BA] = "o";
        t[0x00B9] = "1";
        t[0x00B2] = "2";
        t[0x00B3] = "3";
        t[0x00BC] = "1/4";
        t[0x00BD] = "1/2";
        t[0x00BE] = "3/4";
        t[0x00A1] = "!";
        t[0x00BF] = "?";
        t[0x00AB] = "\"";
        t[0x00BB] = "\"";
        // Latin Extended-A.
        fill(0x0100, 0x0105, "a");
        fill(0x0106, 0x010D, "c");
        fill(0x010E, 0x0111, "d");
        fill(0x0112, 0x011B, "e");
        fill(0x011C, 0x0123, "g");
        fill(0x0124, 0x0127, "h");
        fill(0x0128, 0x0131, "i");
        fill(0x0132, 0x0133, "ij");
        fill(0x0134, 0x0135, "j");
        fill(0x0136, 0x0138, "k");
        fill(0x0139, 0x0142, "l");
        fill(0x0143, 0x014B, "n");
        fill(0x014C, 0x0151, "o");
        fill(0x0152, 0x0153, "oe");
        fill(0x0154, 0x0159, "r");
        fill(0x015A, 0x0161, "s");
        fill(0x0162, 0x0167, "t");
        fill(0x0168, 0x0173, "u");
        fill(0x0174, 0x0175, "w");
        fill(0x0176, 0x0178, "y");
        fill(0x0179, 0x017E, "z");
        t[0x017F] = "s";
        // Typographic quotes and dashes.
        fill(0x2018, 0x201B, "'");
        fill(0x201C, 0x201F, "\"");
        fill(0x2010, 0x2015, "-");
        t[0x2212] = "-";
        return t;
    }();
    return table;
}

bool is_space_cp(char32_t cp) {
    if (cp <= 0x20 || cp == 0x7F) return true;  // controls fold into whitespace
    switch (cp) {
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

bool is_ignorable(char32_t cp) {
    return (cp >= 0x200B && cp <= 0x200D) || cp == 0xFEFF || cp == 0xAD;
}

bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return (u >= '!' && u <= '/') || (u >= ':' && u <= '@') ||
           (u >= '[' && u <= '`') || (u >= '{' && u <= '~');
}

}  // namespace

std::string normalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    const auto& table = fold_table();

    auto emit = [&](char32_t cp) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        if (cp >= 'A' && cp <= 'Z') cp += 'a' - 'A';
        encode_utf8(cp, out);
    };

    std::size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = decode_utf8(raw, i);
        if (is_space_cp(cp)) {
            pending_space = true;
            continue;
        }
        if (is_combining_mark(cp) || is_ignorable(cp)) continue;
        if (cp >= 0xFF01 && cp <= 0xFF5E) cp -= 0xFEE0;  // fullwidth forms
        auto it = table.find(cp);
        if (it != table.end()) {
            for (const char* p = it->second; *p; ++p) emit(static_cast<char32_t>(*p));
        } else {
            emit(cp);
        }
    }
    return out;
}

std::size_t char_len(std::string_view utf8) {
    std::size_t n = 0;
    for (char c : utf8) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::vector<Token> tokenize(std::string_view normalized) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = normalized.size();
    while (i < n) {
        while (i < n && static_cast<unsigned char>(normalized[i]) <= ' ') ++i;
        std::size_t start = i;
        while (i < n && static_cast<unsigned char>(normalized[i]) > ' ') ++i;
        if (i == start) break;
        std::string_view piece = normalized.substr(start, i - start);
        std::size_t b = 0;
        std::size_t e = piece.size();
        while (b < e && is_ascii_punct(piece[b])) ++b;
        while (e > b && is_ascii_punct(piece[e - 1])) --e;
        if (e > b) {
            std::string surface(piece.substr(b, e - b));
            int len = static_cast<int>(char_len(surface));
            tokens.push_back(Token{std::move(surface), len});
        }
    }
    return tokens;
}

std::vector<std::string> tokenize_surfaces(std::string_view normalized) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(normalized)) out.push_back(std::move(tok.surface));
    return out;
}

std::vector<std::string> split_sentences(std::string_view normalized) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    const std::size_t n = normalized.size();
    auto flush = [&](std::size_t end) {
        while (start < end && normalized[start] == ' ') ++start;
        std::size_t stop = end;
        while (stop > start && normalized[stop - 1] == ' ') --stop;
        if (stop > start) sentences.emplace_back(normalized.substr(start, stop - start));
        start = end;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        char c = normalized[i];
        if ((c == '.' || c == '!' || c == '?') &&
            static_cast<unsigned char>(normalized[i + 1]) <= ' ') {
            flush(i + 1);
        }
    }
    flush(n);
    return sentences;
}

Vocabulary::Vocabulary(std::vector<std::string> index_to_token, int min_count)
    : index_to_token_(std::move(index_to_token)), min_count_(min_count) {
    token_to_index_.reserve(index_to_token_.size());
    for (std::size_t i = 0; i < index_to_token_.size(); ++i) {
        token_to_index_.emplace(index_to_token_[i], static_cast<int>(i));
    }
}

int Vocabulary::index_of(std::string_view token) const {
    auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? -1 : it->second;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_count) {
    if (min_count < 1) throw Error("build_vocab: min_count must be >= 1");
    std::unordered_map<std::string, long long> counts;
    for (const auto& doc : corpus) {
        for (const auto& tok : doc) ++counts[tok];
    }
    std::vector<std::pair<std::string, long long>> kept;
    for (auto& [tok, cnt] : counts) {
        if (cnt >= min_count) kept.emplace_back(tok, cnt);
    }
    if (kept.empty()) throw Error("vocabulary empty");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> tokens;
    tokens.reserve(kept.size());
    for (auto& [tok, cnt] : kept) tokens.push_back(std::move(tok));
    return Vocabulary(std::move(tokens), min_count);
}

}  // namespace prodlex::text
