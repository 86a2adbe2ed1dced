#include "text.hpp"

#include <cstdint>

namespace covote::detail {

namespace {

// ASCII folding for Latin-1 Supplement and Latin Extended-A letters, plus
// the comma-below S/T used in Romanian names.  Returns nullptr when the
// codepoint has no folding.
const char* ascii_fold(char32_t cp) {
    switch (cp) {
        case 0xC6: case 0xE6: return "ae";
        case 0xD0: case 0xF0: return "d";
        case 0xDE: case 0xFE: return "th";
        case 0xDF: return "ss";
        case 0x132: case 0x133: return "ij";
        case 0x152: case 0x153: return "oe";
        default: break;
    }
    if (cp >= 0xC0 && cp <= 0xFF) {
        if (cp == 0xD7 || cp == 0xF7) return nullptr; // multiplication, division signs
        char32_t base = (cp >= 0xE0) ? cp - 0x20 : cp; // fold lowercase onto uppercase row
        if (base <= 0xC5) return "a";
        if (base == 0xC7) return "c";
        if (base <= 0xCB) return "e";
        if (base <= 0xCF) return "i";
        if (base == 0xD1) return "n";
        if (base <= 0xD6 || base == 0xD8) return "o";
        if (base <= 0xDC) return "u";
        if (base == 0xDD) return "y";
        if (cp == 0xFF) return "y";
        return nullptr;
    }
    if (cp >= 0x100 && cp <= 0x17F) {
        if (cp <= 0x105) return "a";
        if (cp <= 0x10D) return "c";
        if (cp <= 0x111) return "d";
        if (cp <= 0x11B) return "e";
        if (cp <= 0x123) return "g";
        if (cp <= 0x127) return "h";
        if (cp <= 0x131) return "i";
        if (cp <= 0x135) return "j";
        if (cp <= 0x138) return "k";
        if (cp <= 0x142) return "l";
        if (cp <= 0x14B) return "n";
        if (cp <= 0x151) return "o";
        if (cp <= 0x159) return "r";
        if (cp <= 0x161) return "s";
        if (cp <= 0x167) return "t";
        if (cp <= 0x173) return "u";
        if (cp <= 0x175) return "w";
        if (cp <= 0x178) return "y";
        if (cp <= 0x17E) return "z";
        return "s"; // long s
    }
    if (cp == 0x218 || cp == 0x219) return "s";
    if (cp == 0x21A || cp == 0x21B) return "t";
    return nullptr;
}

// Decodes one UTF-8 codepoint; malformed bytes decode as U+FFFD and advance
// one byte so normalization never fails outright.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    unsigned char c0 = static_cast<unsigned char>(text[pos]);
    if (c0 < 0x80) {
        ++pos;
        return c0;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((c0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = c0 & 0x1F;
    } else if ((c0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = c0 & 0x0F;
    } else if ((c0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = c0 & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + static_cast<std::size_t>(extra) >= text.size()) {
        ++pos;
        return 0xFFFD; // truncated sequence
    }
    for (int k = 1; k <= extra; ++k) {
        unsigned char ck = static_cast<unsigned char>(text[pos + static_cast<std::size_t>(k)]);
        if ((ck & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (ck & 0x3F);
    }
    pos += static_cast<std::size_t>(extra) + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

} // namespace

std::vector<std::string> normalize_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = decode_utf8(text, pos);
        if (is_space(cp)) {
            flush();
        } else if (is_ascii_alnum(cp)) {
            char c = static_cast<char>(cp);
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            current.push_back(c);
        } else if (const char* folded = ascii_fold(cp)) {
            current += folded;
        } else if (cp >= 0x80 && cp != 0xFFFD) {
            // Non-Latin letters pass through; ASCII punctuation is dropped.
            append_utf8(current, cp);
        }
    }
    flush();
    return tokens;
}

std::set<std::string> token_set(std::string_view text) {
    auto tokens = normalize_tokens(text);
    return {tokens.begin(), tokens.end()};
}

std::string normalized_name(std::string_view text) {
    std::string out;
    for (const std::string& token : token_set(text)) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

} // namespace covote::detail
