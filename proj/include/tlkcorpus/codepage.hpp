#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlkcorpus/error.hpp"

namespace tlkcorpus {

enum class Codepage {
    Utf8,
    Latin1,
    Windows1250,
    Windows1251,
    Windows1252,
};

inline std::string_view codepage_name(Codepage cp)
{
    switch (cp) {
    case Codepage::Utf8: return "utf-8";
    case Codepage::Latin1: return "iso-8859-1";
    case Codepage::Windows1250: return "windows-1250";
    case Codepage::Windows1251: return "windows-1251";
    case Codepage::Windows1252: return "windows-1252";
    }
    return "windows-1252";
}

inline std::optional<Codepage> codepage_from_name(std::string_view name)
{
    std::string lower;
    for (char c : name)
        lower += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    if (lower == "utf-8" || lower == "utf8")
        return Codepage::Utf8;
    if (lower == "iso-8859-1" || lower == "latin1" || lower == "latin-1")
        return Codepage::Latin1;
    if (lower == "windows-1250" || lower == "cp1250")
        return Codepage::Windows1250;
    if (lower == "windows-1251" || lower == "cp1251")
        return Codepage::Windows1251;
    if (lower == "windows-1252" || lower == "cp1252")
        return Codepage::Windows1252;
    return std::nullopt;
}

namespace detail {

    // Code points for bytes 0x80..0xFF; 0 marks an unassigned byte.
    inline constexpr std::array<char16_t, 128> kWindows1250 = {
        0x20AC, 0x0000, 0x201A, 0x0000, 0x201E, 0x2026, 0x2020, 0x2021,
        0x0000, 0x2030, 0x0160, 0x2039, 0x015A, 0x0164, 0x017D, 0x0179,
        0x0000, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x0000, 0x2122, 0x0161, 0x203A, 0x015B, 0x0165, 0x017E, 0x017A,
        0x00A0, 0x02C7, 0x02D8, 0x0141, 0x00A4, 0x0104, 0x00A6, 0x00A7,
        0x00A8, 0x00A9, 0x015E, 0x00AB, 0x00AC, 0x00AD, 0x00AE, 0x017B,
        0x00B0, 0x00B1, 0x02DB, 0x0142, 0x00B4, 0x00B5, 0x00B6, 0x00B7,
        0x00B8, 0x0105, 0x015F, 0x00BB, 0x013D, 0x02DD, 0x013E, 0x017C,
        0x0154, 0x00C1, 0x00C2, 0x0102, 0x00C4, 0x0139, 0x0106, 0x00C7,
        0x010C, 0x00C9, 0x0118, 0x00CB, 0x011A, 0x00CD, 0x00CE, 0x010E,
        0x0110, 0x0143, 0x0147, 0x00D3, 0x00D4, 0x0150, 0x00D6, 0x00D7,
        0x0158, 0x016E, 0x00DA, 0x0170, 0x00DC, 0x00DD, 0x0162, 0x00DF,
        0x0155, 0x00E1, 0x00E2, 0x0103, 0x00E4, 0x013A, 0x0107, 0x00E7,
        0x010D, 0x00E9, 0x0119, 0x00EB, 0x011B, 0x00ED, 0x00EE, 0x010F,
        0x0111, 0x0144, 0x0148, 0x00F3, 0x00F4, 0x0151, 0x00F6, 0x00F7,
        0x0159, 0x016F, 0x00FA, 0x0171, 0x00FC, 0x00FD, 0x0163, 0x02D9,
    };

    inline constexpr std::array<char16_t, 128> kWindows1251 = {
        0x0402, 0x0403, 0x201A, 0x0453, 0x201E, 0x2026, 0x2020, 0x2021,
        0x20AC, 0x2030, 0x0409, 0x2039, 0x040A, 0x040C, 0x040B, 0x040F,
        0x0452, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x0000, 0x2122, 0x0459, 0x203A, 0x045A, 0x045C, 0x045B, 0x045F,
        0x00A0, 0x040E, 0x045E, 0x0408, 0x00A4, 0x0490, 0x00A6, 0x00A7,
        0x0401, 0x00A9, 0x0404, 0x00AB, 0x00AC, 0x00AD, 0x00AE, 0x0407,
        0x00B0, 0x00B1, 0x0406, 0x0456, 0x0491, 0x00B5, 0x00B6, 0x00B7,
        0x0451, 0x2116, 0x0454, 0x00BB, 0x0458, 0x0405, 0x0455, 0x0457,
        0x0410, 0x0411, 0x0412, 0x0413, 0x0414, 0x0415, 0x0416, 0x0417,
        0x0418, 0x0419, 0x041A, 0x041B, 0x041C, 0x041D, 0x041E, 0x041F,
        0x0420, 0x0421, 0x0422, 0x0423, 0x0424, 0x0425, 0x0426, 0x0427,
        0x0428, 0x0429, 0x042A, 0x042B, 0x042C, 0x042D, 0x042E, 0x042F,
        0x0430, 0x0431, 0x0432, 0x0433, 0x0434, 0x0435, 0x0436, 0x0437,
        0x0438, 0x0439, 0x043A, 0x043B, 0x043C, 0x043D, 0x043E, 0x043F,
        0x0440, 0x0441, 0x0442, 0x0443, 0x0444, 0x0445, 0x0446, 0x0447,
        0x0448, 0x0449, 0x044A, 0x044B, 0x044C, 0x044D, 0x044E, 0x044F,
    };

    inline constexpr std::array<char16_t, 128> kWindows1252 = {
        0x20AC, 0x0000, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
        0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x0000, 0x017D, 0x0000,
        0x0000, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x0000, 0x017E, 0x0178,
        0x00A0, 0x00A1, 0x00A2, 0x00A3, 0x00A4, 0x00A5, 0x00A6, 0x00A7,
        0x00A8, 0x00A9, 0x00AA, 0x00AB, 0x00AC, 0x00AD, 0x00AE, 0x00AF,
        0x00B0, 0x00B1, 0x00B2, 0x00B3, 0x00B4, 0x00B5, 0x00B6, 0x00B7,
        0x00B8, 0x00B9, 0x00BA, 0x00BB, 0x00BC, 0x00BD, 0x00BE, 0x00BF,
        0x00C0, 0x00C1, 0x00C2, 0x00C3, 0x00C4, 0x00C5, 0x00C6, 0x00C7,
        0x00C8, 0x00C9, 0x00CA, 0x00CB, 0x00CC, 0x00CD, 0x00CE, 0x00CF,
        0x00D0, 0x00D1, 0x00D2, 0x00D3, 0x00D4, 0x00D5, 0x00D6, 0x00D7,
        0x00D8, 0x00D9, 0x00DA, 0x00DB, 0x00DC, 0x00DD, 0x00DE, 0x00DF,
        0x00E0, 0x00E1, 0x00E2, 0x00E3, 0x00E4, 0x00E5, 0x00E6, 0x00E7,
        0x00E8, 0x00E9, 0x00EA, 0x00EB, 0x00EC, 0x00ED, 0x00EE, 0x00EF,
        0x00F0, 0x00F1, 0x00F2, 0x00F3, 0x00F4, 0x00F5, 0x00F6, 0x00F7,
        0x00F8, 0x00F9, 0x00FA, 0x00FB, 0x00FC, 0x00FD, 0x00FE, 0x00FF,
    };

    inline const std::array<char16_t, 128>* high_half(Codepage cp)
    {
        switch (cp) {
        case Codepage::Windows1250: return &kWindows1250;
        case Codepage::Windows1251: return &kWindows1251;
        case Codepage::Windows1252: return &kWindows1252;
        default: return nullptr;
        }
    }

} // namespace detail

inline std::string hex_string(std::uint32_t value, int width)
{
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string out(static_cast<std::size_t>(width), '0');
    for (int i = width - 1; i >= 0 && value != 0; --i, value >>= 4)
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    return out;
}

inline void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

/// Decodes one UTF-8 sequence starting at `pos`, advancing it. Returns nullopt
/// for overlong forms, surrogates, out-of-range values and truncated input.
inline std::optional<char32_t> next_utf8(std::string_view text, std::size_t& pos)
{
    if (pos >= text.size())
        return std::nullopt;
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        return std::nullopt;
    }
    if (text.size() - pos < len)
        return std::nullopt;
    for (std::size_t i = 1; i < len; ++i) {
        const auto c = static_cast<unsigned char>(text[pos + i]);
        if ((c & 0xC0) != 0x80)
            return std::nullopt;
        cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return std::nullopt;
    pos += len;
    return cp;
}

inline bool is_valid_utf8(std::string_view text)
{
    std::size_t pos = 0;
    while (pos < text.size())
        if (!next_utf8(text, pos))
            return false;
    return true;
}

/// Converts raw single-byte (or UTF-8) text to internal UTF-8.
inline std::string decode_text(std::span<const std::uint8_t> bytes, Codepage cp)
{
    std::string out;
    if (cp == Codepage::Utf8) {
        out.assign(bytes.begin(), bytes.end());
        std::size_t pos = 0;
        while (pos < out.size()) {
            const std::size_t at = pos;
            if (!next_utf8(out, pos))
                throw Error(ErrorCode::DecodeError, "invalid UTF-8 sequence", at);
        }
        return out;
    }
    const auto* table = detail::high_half(cp);
    out.reserve(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const std::uint8_t b = bytes[i];
        if (b < 0x80 || table == nullptr) {
            append_utf8(out, b);
            continue;
        }
        const char16_t mapped = (*table)[b - 0x80];
        if (mapped == 0)
            throw Error(ErrorCode::DecodeError,
                "byte 0x" + hex_string(b, 2) + " is unassigned in " + std::string(codepage_name(cp)), i);
        append_utf8(out, mapped);
    }
    return out;
}

inline std::vector<std::uint8_t> encode_text(std::string_view text, Codepage cp)
{
    std::vector<std::uint8_t> out;
    if (cp == Codepage::Utf8) {
        if (!is_valid_utf8(text))
            throw Error(ErrorCode::EncodeError, "text is not valid UTF-8");
        out.assign(text.begin(), text.end());
        return out;
    }
    const auto* table = detail::high_half(cp);
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto cp32 = next_utf8(text, pos);
        if (!cp32)
            throw Error(ErrorCode::EncodeError, "text is not valid UTF-8");
        if (*cp32 < 0x80 || (table == nullptr && *cp32 < 0x100)) {
            out.push_back(static_cast<std::uint8_t>(*cp32));
            continue;
        }
        bool found = false;
        if (table != nullptr) {
            for (std::size_t i = 0; i < table->size(); ++i) {
                if ((*table)[i] != 0 && (*table)[i] == *cp32) {
                    out.push_back(static_cast<std::uint8_t>(0x80 + i));
                    found = true;
                    break;
                }
            }
        }
        if (!found)
            throw Error(ErrorCode::EncodeError,
                "U+" + hex_string(static_cast<std::uint32_t>(*cp32), 4) + " is not representable in "
                    + std::string(codepage_name(cp)));
    }
    return out;
}

/// Maps a talk table's language id to the codepage its text is stored in.
struct CodepageConfig {
    std::map<std::uint32_t, Codepage> by_language {
        {0, Codepage::Windows1252}, // English
        {1, Codepage::Windows1252}, // French
        {2, Codepage::Windows1252}, // German
        {3, Codepage::Windows1252}, // Italian
        {4, Codepage::Windows1252}, // Spanish
    };
    Codepage fallback = Codepage::Windows1252;

    Codepage for_language(std::uint32_t language_id) const
    {
        const auto it = by_language.find(language_id);
        return it == by_language.end() ? fallback : it->second;
    }

    /// Forces every language to one codepage.
    static CodepageConfig uniform(Codepage cp)
    {
        CodepageConfig config;
        config.by_language.clear();
        config.fallback = cp;
        return config;
    }

    bool operator==(const CodepageConfig&) const = default;
};

} // namespace tlkcorpus
