#include "cogdist/textprep.hpp"

#include <cstdint>
#include <stdexcept>

namespace cogdist {

namespace {

constexpr uint32_t kInvalidCp = 0xFFFFFFFF;

// Decodes one UTF-8 codepoint starting at pos; advances pos past it.
// Malformed bytes decode as kInvalidCp and consume one byte.
uint32_t decode_utf8(std::string_view s, size_t& pos) {
    const auto byte = [&](size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    size_t len = 0;
    uint32_t cp = 0;
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
        ++pos;
        return kInvalidCp;
    }
    if (pos + len > s.size()) {
        ++pos;
        return kInvalidCp;
    }
    for (size_t i = 1; i < len; ++i) {
        const unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalidCp;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
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

bool is_whitespace(uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_apostrophe(uint32_t cp) {
    return cp == 0x27 || cp == 0x2019 || cp == 0x02BC;
}

// Letter or digit under a compact Unicode classification: ASCII alphanumerics,
// plus any non-ASCII codepoint that is not whitespace, an apostrophe, or in a
// known punctuation/symbol block. Unknown scripts fall on the "letter" side so
// they are preserved rather than split.
bool is_word_char(uint32_t cp) {
    if (cp == kInvalidCp) return false;
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (is_whitespace(cp) || is_apostrophe(cp)) return false;
    if (cp >= 0xA1 && cp <= 0xBF) return false;   // Latin-1 punctuation and symbols
    if (cp == 0xD7 || cp == 0xF7) return false;   // multiplication / division signs
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
    if (cp >= 0x2070 && cp <= 0x2BFF) return false;  // super/subscripts, symbols, arrows
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;  // supplemental punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;  // CJK compatibility forms
    if (cp >= 0xFF01 && cp <= 0xFF0F) return false;  // fullwidth punctuation
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;  // emoji and pictographs
    return true;
}

uint32_t cp_tolower(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp < 0x80) return cp;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // Latin-1
    if (cp >= 0x100 && cp <= 0x137) return cp | 1;               // Latin Extended-A pairs
    if (cp >= 0x139 && cp <= 0x148) return ((cp - 1) | 1) + 1;
    if (cp >= 0x14A && cp <= 0x177) return cp | 1;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return ((cp - 1) | 1) + 1;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;  // Greek
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                 // Cyrillic
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

}  // namespace

std::string normalize(std::string_view text) {
    std::vector<uint32_t> cps;
    cps.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        cps.push_back(decode_utf8(text, pos));
    }

    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < cps.size(); ++i) {
        const uint32_t cp = cps[i];
        if (is_whitespace(cp)) {
            encode_utf8(cp, out);
        } else if (is_word_char(cp)) {
            encode_utf8(cp_tolower(cp), out);
        } else if (is_apostrophe(cp) && i > 0 && i + 1 < cps.size() &&
                   is_word_char(cps[i - 1]) && is_word_char(cps[i + 1])) {
            out.push_back('\'');  // intra-word apostrophe, folded to ASCII
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t start = pos;
        const uint32_t cp = decode_utf8(text, pos);
        if (is_whitespace(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.append(text.substr(start, pos - start));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

TermSequence ngrams(const std::vector<std::string>& tokens, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max || n_max > 2) {
        throw std::invalid_argument("ngrams: invalid range, need 1 <= n_min <= n_max <= 2");
    }
    TermSequence seq;
    const size_t count = tokens.size();
    seq.terms.reserve(count * static_cast<size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n) {
        if (count + 1 < static_cast<size_t>(n)) continue;
        for (size_t i = 0; i + n <= count; ++i) {
            if (n == 1) {
                seq.terms.push_back(tokens[i]);
            } else {
                seq.terms.push_back(tokens[i] + " " + tokens[i + 1]);
            }
        }
    }
    return seq;
}

}  // namespace cogdist
