#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tlkcorpus/codepage.hpp"

namespace tlkcorpus {

namespace detail {

    inline bool is_space(char c)
    {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    inline bool is_upper_code_point(char32_t cp)
    {
        if (cp >= 'A' && cp <= 'Z')
            return true;
        if (cp >= 0xC0 && cp <= 0xDE)
            return cp != 0xD7;
        if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
            return cp % 2 == 0;
        if (cp >= 0x139 && cp <= 0x148)
            return cp % 2 == 1;
        if (cp == 0x178 || cp == 0x179 || cp == 0x17B || cp == 0x17D)
            return true;
        if (cp >= 0x391 && cp <= 0x3A9)
            return true;
        return cp >= 0x400 && cp <= 0x42F;
    }

    inline bool is_opening_quote(char32_t cp)
    {
        switch (cp) {
        case '"':
        case '\'':
        case '(':
        case 0x00AB: // «
        case 0x00A1: // ¡
        case 0x00BF: // ¿
        case 0x2018: // ‘
        case 0x201C: // “
        case 0x201E: // „
            return true;
        default:
            return false;
        }
    }

    inline bool is_closing_punct(char32_t cp)
    {
        switch (cp) {
        case '"':
        case '\'':
        case ')':
        case 0x00BB: // »
        case 0x2019: // ’
        case 0x201D: // ”
            return true;
        default:
            return false;
        }
    }

    inline bool is_terminal(char32_t cp)
    {
        return cp == '.' || cp == '!' || cp == '?' || cp == 0x2026;
    }

    inline char32_t peek(std::string_view text, std::size_t pos, std::size_t& next)
    {
        next = pos;
        const auto cp = next_utf8(text, next);
        if (!cp) {
            next = pos + 1;
            return 0xFFFD;
        }
        return *cp;
    }

} // namespace detail

/// Abbreviations (without the trailing period) that never end a sentence.
inline const std::set<std::string>& sentence_abbreviations(std::string_view language)
{
    static const std::map<std::string, std::set<std::string>, std::less<>> kTable {
        { "en", { "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Jr", "Sr", "Lt", "Capt", "Cmdr", "Sgt", "Gen", "Col", "Mt", "vs", "e.g", "i.e" } },
        { "de", { "Hr", "Fr", "Dr", "Prof", "Nr", "St", "bzw", "ca", "usw", "z.B", "d.h", "u.a", "Hrsg" } },
        { "fr", { "M", "MM", "Mme", "Mmes", "Mlle", "Dr", "Pr", "St", "Ste", "cf", "p.ex" } },
        { "es", { "Sr", "Sra", "Srta", "Dr", "Dra", "Ud", "Uds", "Vd", "Vds", "Sto", "Sta", "p.ej" } },
        { "it", { "Sig", "Sigg", "Sig.ra", "Dott", "Dott.ssa", "Prof", "Avv", "Ing", "S" } },
    };
    static const std::set<std::string> kNone;
    const auto it = kTable.find(language);
    return it == kTable.end() ? kNone : it->second;
}

/// Rule-based sentence splitter. A boundary is a run of . ! ? or an ellipsis,
/// optionally followed by closing quotes/brackets, then whitespace, then an
/// uppercase letter or an opening quote. A lone period after a known
/// abbreviation for `language` is not a boundary. Sentences keep their
/// terminal punctuation and are trimmed.
inline std::vector<std::string> sentence_tokenize(std::string_view text, std::string_view language)
{
    const auto& abbreviations = sentence_abbreviations(language);
    std::vector<std::string> sentences;

    const auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && detail::is_space(text[begin]))
            ++begin;
        while (end > begin && detail::is_space(text[end - 1]))
            --end;
        if (end > begin)
            sentences.emplace_back(text.substr(begin, end - begin));
    };

    std::size_t start = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = 0;
        const char32_t cp = detail::peek(text, pos, next);
        if (!detail::is_terminal(cp)) {
            pos = next;
            continue;
        }

        const std::size_t run_begin = pos;
        std::size_t run_end = next;
        bool only_single_period = cp == '.';
        while (run_end < text.size()) {
            std::size_t after = 0;
            const char32_t c = detail::peek(text, run_end, after);
            if (!detail::is_terminal(c))
                break;
            only_single_period = false;
            run_end = after;
        }
        std::size_t boundary = run_end;
        while (boundary < text.size()) {
            std::size_t after = 0;
            const char32_t c = detail::peek(text, boundary, after);
            if (!detail::is_closing_punct(c))
                break;
            only_single_period = false;
            boundary = after;
        }

        std::size_t gap_end = boundary;
        while (gap_end < text.size() && detail::is_space(text[gap_end]))
            ++gap_end;
        if (gap_end == boundary || gap_end == text.size()) {
            pos = std::max(boundary, run_end);
            continue;
        }
        std::size_t after = 0;
        const char32_t starter = detail::peek(text, gap_end, after);
        if (!detail::is_upper_code_point(starter) && !detail::is_opening_quote(starter)) {
            pos = boundary;
            continue;
        }
        if (only_single_period) {
            std::size_t word_begin = run_begin;
            while (word_begin > start && !detail::is_space(text[word_begin - 1]))
                --word_begin;
            while (word_begin < run_begin) {
                std::size_t next_char = 0;
                if (!detail::is_opening_quote(detail::peek(text, word_begin, next_char)))
                    break;
                word_begin = next_char;
            }
            if (abbreviations.count(std::string(text.substr(word_begin, run_begin - word_begin))) != 0) {
                pos = boundary;
                continue;
            }
        }
        emit(start, boundary);
        start = gap_end;
        pos = gap_end;
    }
    emit(start, text.size());
    return sentences;
}

} // namespace tlkcorpus
