#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tlkcorpus/error.hpp"
#include "tlkcorpus/labels.hpp"
#include "tlkcorpus/random.hpp"
#include "tlkcorpus/sentence_tokenizer.hpp"
#include "tlkcorpus/tlk.hpp"

namespace tlkcorpus {

inline constexpr std::string_view kDefaultTagPattern = R"(\[\s*(Persuade|Persuasion)[^\[\]]*\])";

struct PipelineConfig {
    std::vector<std::string> languages { "en", "es", "de", "fr", "it" };
    std::string pivot_language = "en";
    std::vector<std::string> tag_patterns { std::string(kDefaultTagPattern) };
    std::vector<std::string> comment_denylist { "do not translate", "placeholder" };
    double persuade_fraction = 0.20;
    std::array<double, 3> split_fractions { 0.70, 0.15, 0.15 };
    std::uint64_t seed = 42;

    bool operator==(const PipelineConfig&) const = default;

    void validate() const
    {
        if (languages.empty())
            throw Error(ErrorCode::InvalidConfig, "no languages configured");
        std::set<std::string> seen;
        for (const auto& lang : languages) {
            if (lang.empty())
                throw Error(ErrorCode::InvalidConfig, "empty language code");
            if (!seen.insert(lang).second)
                throw Error(ErrorCode::InvalidConfig, "language \"" + lang + "\" listed twice");
        }
        if (!seen.count(pivot_language))
            throw Error(ErrorCode::InvalidConfig, "pivot language \"" + pivot_language + "\" is not among the languages");
        if (!(persuade_fraction > 0.0 && persuade_fraction < 1.0))
            throw Error(ErrorCode::InvalidConfig, "persuade_fraction must lie in (0, 1)");
        double sum = 0.0;
        for (double f : split_fractions) {
            if (!(f > 0.0 && f < 1.0))
                throw Error(ErrorCode::InvalidConfig, "split fractions must lie in (0, 1)");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidConfig, "split fractions must sum to 1");
        if (tag_patterns.empty())
            throw Error(ErrorCode::InvalidConfig, "at least one tag pattern is required");
    }
};

namespace detail {

    inline std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns, std::string_view what)
    {
        std::vector<std::regex> out;
        out.reserve(patterns.size());
        for (const auto& p : patterns) {
            try {
                out.emplace_back(p, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
            } catch (const std::regex_error& e) {
                throw Error(ErrorCode::InvalidConfig, std::string(what) + " \"" + p + "\" is not a valid regex: " + e.what());
            }
        }
        return out;
    }

} // namespace detail

/// Compiled persuasion-tag patterns. Matching is case-insensitive.
class TagMatcher {
public:
    explicit TagMatcher(const std::vector<std::string>& patterns = { std::string(kDefaultTagPattern) })
        : regexes_(detail::compile_patterns(patterns, "tag pattern"))
    {
    }

    const std::vector<std::regex>& regexes() const { return regexes_; }

private:
    std::vector<std::regex> regexes_;
};

/// Compiled developer-comment patterns. Matching is case-insensitive.
class CommentDenylist {
public:
    explicit CommentDenylist(const std::vector<std::string>& patterns = { "do not translate", "placeholder" })
        : regexes_(detail::compile_patterns(patterns, "comment pattern"))
    {
    }

    bool matches(std::string_view text) const
    {
        return std::any_of(regexes_.begin(), regexes_.end(),
            [&](const std::regex& re) { return std::regex_search(text.begin(), text.end(), re); });
    }

private:
    std::vector<std::regex> regexes_;
};

struct DialogLine {
    StrRef str_ref = 0;
    std::string game_id;
    std::string language;
    std::string raw_text;
    std::string clean_text;
    Label label = Label::NonPersuade;
    std::vector<std::string> matched_tags;

    LineKey key() const { return { game_id, str_ref }; }
    bool operator==(const DialogLine&) const = default;
};

struct AlignedLine {
    StrRef str_ref = 0;
    std::string game_id;
    Label label = Label::NonPersuade;
    std::map<std::string, std::string> texts;

    LineKey key() const { return { game_id, str_ref }; }
    bool operator==(const AlignedLine&) const = default;
};

struct SentenceRecord {
    StrRef str_ref = 0;
    std::string game_id;
    std::string language;
    std::uint32_t sentence_index = 0;
    std::string text;
    Label label = Label::NonPersuade;
    Split split = Split::Train;

    LineKey key() const { return { game_id, str_ref }; }
    bool operator==(const SentenceRecord&) const = default;
};

/// Canonical record order: language, game, StrRef, sentence position.
inline bool record_less(const SentenceRecord& a, const SentenceRecord& b)
{
    return std::tie(a.language, a.game_id, a.str_ref, a.sentence_index)
        < std::tie(b.language, b.game_id, b.str_ref, b.sentence_index);
}

struct LabelResult {
    Label label = Label::NonPersuade;
    std::vector<std::string> matched_tags;
};

/// Hybrid tags such as "[Persuade/Lie]" and the "[Persuasion]" spelling are
/// recorded as "Persuade"; other tags keep their first component.
inline std::string normalize_tag(std::string_view matched)
{
    std::string inner(matched);
    if (!inner.empty() && inner.front() == '[')
        inner.erase(0, 1);
    if (!inner.empty() && inner.back() == ']')
        inner.pop_back();
    if (const auto slash = inner.find('/'); slash != std::string::npos)
        inner.resize(slash);
    const auto first = inner.find_first_not_of(" \t");
    const auto last = inner.find_last_not_of(" \t");
    inner = first == std::string::npos ? std::string() : inner.substr(first, last - first + 1);
    std::string lower;
    for (char c : inner)
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.rfind("persua", 0) == 0)
        return "Persuade";
    return inner;
}

inline LabelResult detect_label(std::string_view raw_text, const TagMatcher& tags)
{
    LabelResult result;
    for (const auto& re : tags.regexes()) {
        for (auto it = std::cregex_iterator(raw_text.data(), raw_text.data() + raw_text.size(), re);
             it != std::cregex_iterator(); ++it)
            result.matched_tags.push_back(normalize_tag(it->str()));
    }
    if (!result.matched_tags.empty())
        result.label = Label::Persuade;
    return result;
}

namespace detail {

    inline std::string collapse_whitespace(std::string_view text)
    {
        std::string out;
        out.reserve(text.size());
        bool pending_space = false;
        for (char c : text) {
            if (is_space(c)) {
                pending_space = !out.empty();
                continue;
            }
            if (pending_space)
                out += ' ';
            pending_space = false;
            out += c;
        }
        return out;
    }

    inline const std::regex& bracket_tag_regex()
    {
        static const std::regex re(R"(\[[^\[\]]*\])");
        return re;
    }

    inline const std::regex& markup_regex()
    {
        static const std::regex re(R"(<[^<>]*>)");
        return re;
    }

} // namespace detail

/// Removes configured tag matches, any other bracketed tag and angle-bracket
/// markup, repeating until nothing changes, then collapses whitespace.
inline std::string strip_tags_and_markup(std::string_view raw_text, const TagMatcher& tags)
{
    std::string text(raw_text);
    for (;;) {
        std::string next = text;
        for (const auto& re : tags.regexes())
            next = std::regex_replace(next, re, " ");
        next = std::regex_replace(next, detail::bracket_tag_regex(), " ");
        next = std::regex_replace(next, detail::markup_regex(), " ");
        if (next == text)
            break;
        text = std::move(next);
    }
    return detail::collapse_whitespace(text);
}

inline std::string strip_tags_and_markup(std::string_view raw_text)
{
    static const TagMatcher kDefault;
    return strip_tags_and_markup(raw_text, kDefault);
}

inline DialogLine make_dialog_line(
    std::string game_id, std::string language, StrRef ref, std::string raw_text, const TagMatcher& tags)
{
    DialogLine line;
    line.str_ref = ref;
    line.game_id = std::move(game_id);
    line.language = std::move(language);
    auto detected = detect_label(raw_text, tags);
    line.label = detected.label;
    line.matched_tags = std::move(detected.matched_tags);
    line.clean_text = strip_tags_and_markup(raw_text, tags);
    line.raw_text = std::move(raw_text);
    return line;
}

struct FilterResult {
    std::vector<DialogLine> kept;
    std::vector<DialogLine> dropped;
};

/// Splits lines into kept and dropped by matching raw text against the
/// developer-comment denylist.
inline FilterResult filter_developer_comments(std::vector<DialogLine> lines, const CommentDenylist& denylist)
{
    FilterResult result;
    for (auto& line : lines) {
        if (denylist.matches(line.raw_text))
            result.dropped.push_back(std::move(line));
        else
            result.kept.push_back(std::move(line));
    }
    return result;
}

/// Joins languages on (game, StrRef). A line survives only if every
/// configured language has it with non-empty clean text; the label comes from
/// the pivot language.
inline std::vector<AlignedLine> align(
    const std::map<std::string, std::vector<DialogLine>>& per_language, const PipelineConfig& config)
{
    std::map<std::string, std::map<LineKey, const DialogLine*>> index;
    for (const auto& lang : config.languages) {
        const auto it = per_language.find(lang);
        if (it == per_language.end())
            throw Error(ErrorCode::MissingLanguage, "no dialogue lines for language \"" + lang + "\"");
        auto& by_key = index[lang];
        for (const auto& line : it->second) {
            if (!by_key.emplace(line.key(), &line).second)
                throw Error(ErrorCode::DuplicateStrRef,
                    "StrRef " + std::to_string(line.str_ref) + " appears twice in language \"" + lang + "\" of game \""
                        + line.game_id + "\"");
        }
    }

    std::vector<AlignedLine> aligned;
    for (const auto& [key, pivot] : index.at(config.pivot_language)) {
        AlignedLine out;
        out.str_ref = key.str_ref;
        out.game_id = key.game_id;
        out.label = pivot->label;
        bool complete = true;
        for (const auto& lang : config.languages) {
            const auto& by_key = index.at(lang);
            const auto found = by_key.find(key);
            if (found == by_key.end() || found->second->clean_text.empty()) {
                complete = false;
                break;
            }
            out.texts.emplace(lang, found->second->clean_text);
        }
        if (complete)
            aligned.push_back(std::move(out));
    }
    return aligned;
}

struct BalanceResult {
    std::vector<AlignedLine> lines;
    std::size_t persuade = 0;
    std::size_t non_persuade_available = 0;
    std::size_t non_persuade_kept = 0;
    std::optional<std::string> warning;
};

/// Number of non-persuade lines to keep so persuade lines make up `fraction`.
inline std::size_t balanced_non_persuade_count(std::size_t persuade, double fraction)
{
    // the epsilon absorbs representation error in products like 100 * 0.8 / 0.2
    return static_cast<std::size_t>(std::floor(static_cast<double>(persuade) * (1.0 - fraction) / fraction + 1e-9));
}

/// Keeps every persuade line and a seeded uniform sample of non-persuade
/// lines. Output is sorted by (game, StrRef).
inline BalanceResult balance(std::vector<AlignedLine> aligned, double persuade_fraction, std::uint64_t seed)
{
    std::sort(aligned.begin(), aligned.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    std::vector<AlignedLine> persuade;
    std::vector<AlignedLine> other;
    for (auto& line : aligned)
        (line.label == Label::Persuade ? persuade : other).push_back(std::move(line));

    if (persuade.empty())
        throw Error(ErrorCode::EmptyClass, "no persuade lines to balance");
    if (other.empty())
        throw Error(ErrorCode::EmptyClass, "no non_persuade lines to balance");

    BalanceResult result;
    result.persuade = persuade.size();
    result.non_persuade_available = other.size();

    const double share = static_cast<double>(persuade.size()) / static_cast<double>(persuade.size() + other.size());
    std::size_t keep = other.size();
    if (share >= persuade_fraction) {
        result.warning = "persuade share " + std::to_string(share) + " already meets the target fraction "
            + std::to_string(persuade_fraction) + "; nothing subsampled";
    } else {
        keep = std::min(balanced_non_persuade_count(persuade.size(), persuade_fraction), other.size());
        PortableRng rng(seed, RandomStream::Balance);
        rng.shuffle(std::span(other));
        other.resize(keep);
    }
    result.non_persuade_kept = keep;

    result.lines = std::move(persuade);
    result.lines.insert(result.lines.end(), std::make_move_iterator(other.begin()), std::make_move_iterator(other.end()));
    std::sort(result.lines.begin(), result.lines.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return result;
}

/// Line-level split assignment: keys are sorted, shuffled with the split
/// stream, then cut into floor(n * f) validation and test lines; the rest are
/// training lines.
inline std::map<LineKey, Split> assign_splits(
    const std::vector<AlignedLine>& lines, const std::array<double, 3>& fractions, std::uint64_t seed)
{
    if (lines.empty())
        throw Error(ErrorCode::EmptyInput, "no lines to split");
    std::vector<LineKey> keys;
    keys.reserve(lines.size());
    for (const auto& line : lines)
        keys.push_back(line.key());
    std::sort(keys.begin(), keys.end());

    PortableRng rng(seed, RandomStream::Split);
    rng.shuffle(std::span(keys));

    const double n = static_cast<double>(keys.size());
    const auto n_validation = static_cast<std::size_t>(std::floor(n * fractions[1] + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(n * fractions[2] + 1e-9));
    const std::size_t n_train = keys.size() - n_validation - n_test;

    std::map<LineKey, Split> out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const Split split = i < n_train ? Split::Train : (i < n_train + n_validation ? Split::Validation : Split::Test);
        out.emplace(std::move(keys[i]), split);
    }
    return out;
}

} // namespace tlkcorpus
