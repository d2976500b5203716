#pragma once

// Run configuration file. Line oriented:
//
//   # comment (also ';'); no trailing comments, since patterns may contain '#'
//   key = value            top-level pipeline settings
//   [codepages]            language_id = codepage name, plus "default"
//   [baseline]             classifier hyperparameters
//   [input]                <language>.<game_id> = path to a .tlk or XML file
//
// `tag_pattern` and `comment_pattern` may repeat; the first occurrence
// replaces the built-in list. An empty `comment_pattern =` clears it.
// Relative paths are taken from the directory holding the file.

#include <charconv>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tlkcorpus/classifier.hpp"
#include "tlkcorpus/codepage.hpp"
#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/error.hpp"

namespace tlkcorpus {

struct InputSpec {
    std::string language;
    std::string game_id;
    std::filesystem::path path;

    bool operator==(const InputSpec&) const = default;
};

struct RunConfig {
    PipelineConfig pipeline;
    CodepageConfig codepages;
    BaselineHyperparams baseline;
    std::filesystem::path output_dir = "corpus";
    std::vector<InputSpec> inputs;
    /// Directory relative paths are taken from; not part of the rendered file.
    std::filesystem::path base_dir;

    /// `path` as seen from the current directory.
    std::filesystem::path resolve(const std::filesystem::path& path) const
    {
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

    inline std::string_view trim(std::string_view s)
    {
        while (!s.empty() && is_space(s.front()))
            s.remove_prefix(1);
        while (!s.empty() && is_space(s.back()))
            s.remove_suffix(1);
        return s;
    }

    inline std::vector<std::string> split_list(std::string_view value)
    {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos <= value.size()) {
            auto comma = value.find(',', pos);
            if (comma == std::string_view::npos)
                comma = value.size();
            const auto item = trim(value.substr(pos, comma - pos));
            if (!item.empty())
                out.emplace_back(item);
            pos = comma + 1;
        }
        return out;
    }

    inline std::string format_double(double value)
    {
        char buf[64];
        const auto res = std::to_chars(std::begin(buf), std::end(buf), value);
        return std::string(buf, res.ptr);
    }

} // namespace detail

inline RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {})
{
    RunConfig config;
    config.base_dir = base_dir;
    std::string section;
    std::set<std::string> seen;
    bool custom_tags = false;
    bool custom_comments = false;
    std::size_t line_no = 0;

    const auto fail = [&](const std::string& message) -> Error {
        return Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": " + message);
    };
    const auto number = [&](std::string_view key, std::string_view value, auto& out) {
        const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
        if (value.empty() || res.ec != std::errc {} || res.ptr != value.data() + value.size())
            throw fail("\"" + std::string(key) + "\" expects a number, got \"" + std::string(value) + "\"");
    };

    std::istringstream in { std::string(text) };
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw fail("unterminated section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "codepages" && section != "baseline" && section != "input")
                throw fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw fail("expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw fail("empty key");

        const bool repeatable = section.empty() && (key == "tag_pattern" || key == "comment_pattern");
        if (!repeatable && !seen.insert(section + "." + key).second)
            throw fail("duplicate key \"" + key + "\"");

        if (section.empty()) {
            auto& p = config.pipeline;
            if (key == "languages") {
                p.languages = detail::split_list(value);
            } else if (key == "pivot_language") {
                p.pivot_language = std::string(value);
            } else if (key == "seed") {
                number(key, value, p.seed);
            } else if (key == "persuade_fraction") {
                number(key, value, p.persuade_fraction);
            } else if (key == "split_fractions") {
                const auto parts = detail::split_list(value);
                if (parts.size() != 3)
                    throw fail("split_fractions needs three values: train, validation, test");
                for (std::size_t i = 0; i < 3; ++i)
                    number(key, parts[i], p.split_fractions[i]);
            } else if (key == "output_dir") {
                config.output_dir = std::filesystem::path(std::string(value));
            } else if (key == "tag_pattern") {
                if (!custom_tags)
                    p.tag_patterns.clear();
                custom_tags = true;
                if (value.empty())
                    throw fail("tag_pattern cannot be empty");
                p.tag_patterns.emplace_back(value);
            } else if (key == "comment_pattern") {
                if (!custom_comments)
                    p.comment_denylist.clear();
                custom_comments = true;
                if (!value.empty())
                    p.comment_denylist.emplace_back(value);
            } else {
                throw fail("unknown key \"" + key + "\"");
            }
        } else if (section == "codepages") {
            const auto cp = codepage_from_name(value);
            if (!cp)
                throw fail("unknown codepage \"" + std::string(value) + "\"");
            if (key == "default") {
                config.codepages.fallback = *cp;
            } else {
                std::uint32_t id = 0;
                number(key, key, id);
                config.codepages.by_language[id] = *cp;
            }
        } else if (section == "baseline") {
            if (key == "learning_rate")
                number(key, value, config.baseline.learning_rate);
            else if (key == "epochs")
                number(key, value, config.baseline.epochs);
            else if (key == "l2")
                number(key, value, config.baseline.l2);
            else if (key == "seed")
                number(key, value, config.baseline.seed);
            else
                throw fail("unknown key \"" + key + "\" in [baseline]");
        } else {
            const auto dot = key.find('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
                throw fail("input keys look like <language>.<game_id>, got \"" + key + "\"");
            if (value.empty())
                throw fail("empty path for input \"" + key + "\"");
            config.inputs.push_back({ key.substr(0, dot), key.substr(dot + 1), std::filesystem::path(std::string(value)) });
        }
    }

    try {
        config.pipeline.validate();
        (void)TagMatcher(config.pipeline.tag_patterns);
        (void)CommentDenylist(config.pipeline.comment_denylist);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("configuration: ") + e.what());
    }
    for (const auto& input : config.inputs) {
        const auto& langs = config.pipeline.languages;
        if (std::find(langs.begin(), langs.end(), input.language) == langs.end())
            throw Error(ErrorCode::InvalidConfig,
                "configuration: input " + input.language + "." + input.game_id + " names an unconfigured language");
    }
    return config;
}

/// Renders a configuration, with comments, in the format parse_run_config reads.
inline std::string render_run_config(const RunConfig& config)
{
    const auto& p = config.pipeline;
    std::ostringstream out;
    out << "# tlkcorpus run configuration\n"
           "\n"
           "# Languages to align; every line must exist in all of them.\n"
           "languages = ";
    for (std::size_t i = 0; i < p.languages.size(); ++i)
        out << (i ? ", " : "") << p.languages[i];
    out << "\n"
           "# Language whose tags decide each line's label.\n"
           "pivot_language = "
        << p.pivot_language
        << "\n"
           "# Target share of persuade lines after subsampling non-persuade lines.\n"
           "persuade_fraction = "
        << detail::format_double(p.persuade_fraction)
        << "\n"
           "# train, validation, test (line level, shared by all languages)\n"
           "split_fractions = "
        << detail::format_double(p.split_fractions[0]) << ", " << detail::format_double(p.split_fractions[1]) << ", "
        << detail::format_double(p.split_fractions[2])
        << "\n"
           "seed = "
        << p.seed
        << "\n"
           "output_dir = "
        << config.output_dir.generic_string()
        << "\n"
           "\n"
           "# Persuasion tags (ECMAScript regex, case-insensitive). Repeat the key for more.\n";
    for (const auto& t : p.tag_patterns)
        out << "tag_pattern = " << t << "\n";
    out << "# Developer-comment lines dropped from non-pivot languages. Repeat for more;\n"
           "# a single empty value disables the filter.\n";
    if (p.comment_denylist.empty())
        out << "comment_pattern =\n";
    for (const auto& c : p.comment_denylist)
        out << "comment_pattern = " << c << "\n";
    out << "\n"
           "[codepages]\n"
           "# talk-table language id = codepage of its text\n"
           "default = "
        << codepage_name(config.codepages.fallback) << "\n";
    for (const auto& [id, cp] : config.codepages.by_language)
        out << id << " = " << codepage_name(cp) << "\n";
    out << "\n"
           "[baseline]\n"
           "learning_rate = "
        << detail::format_double(config.baseline.learning_rate) << "\n"
        << "epochs = " << config.baseline.epochs << "\n"
        << "l2 = " << detail::format_double(config.baseline.l2) << "\n"
        << "seed = " << config.baseline.seed << "\n"
        << "\n"
           "[input]\n"
           "# <language>.<game_id> = path to dialog.tlk (binary or XML)\n";
    for (const auto& input : config.inputs)
        out << input.language << "." << input.game_id << " = " << input.path.generic_string() << "\n";
    return out.str();
}

} // namespace tlkcorpus
