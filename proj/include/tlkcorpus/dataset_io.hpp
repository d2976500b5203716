#pragma once

// On-disk corpus layout (one directory):
//
//   manifest.json            counts, config snapshot, sources
//   <lang>.<split>.jsonl     one record per line, keys in this order:
//                            str_ref, game_id, sentence_index, text, label
//
// Records are UTF-8 with LF endings, sorted by (game_id, str_ref,
// sentence_index). Every (language, split) file exists, possibly empty.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/error.hpp"
#include "tlkcorpus/manifest.hpp"
#include "tlkcorpus/pipeline.hpp"

namespace tlkcorpus {

using ordered_json = nlohmann::ordered_json;

namespace detail {

    template <typename Map>
    ordered_json label_map_json(const Map& counts)
    {
        ordered_json j = ordered_json::object();
        for (Label label : kAllLabels) {
            const auto it = counts.find(label);
            j[std::string(to_string(label))] = it == counts.end() ? 0 : it->second;
        }
        return j;
    }

    inline const ordered_json& require(const ordered_json& j, const char* key, const std::string& where)
    {
        if (!j.is_object() || !j.contains(key))
            throw Error(ErrorCode::SchemaError, where + ": missing field \"" + key + "\"");
        return j.at(key);
    }

    inline void expect_keys(const ordered_json& j, std::initializer_list<const char*> keys, const std::string& where)
    {
        if (!j.is_object())
            throw Error(ErrorCode::SchemaError, where + ": expected an object");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : j.items())
            if (!allowed.count(k))
                throw Error(ErrorCode::SchemaError, where + ": unknown field \"" + k + "\"");
        for (const char* k : keys)
            if (!j.contains(k))
                throw Error(ErrorCode::SchemaError, where + ": missing field \"" + k + "\"");
    }

    template <typename T>
    T get_as(const ordered_json& j, const char* key, const std::string& where)
    {
        const auto& v = require(j, key, where);
        try {
            if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string())
                    throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\" must be a string");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\" must be a non-negative integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number())
                    throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\" must be a number");
            }
            return v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\": " + e.what());
        }
    }

    inline std::vector<std::string> string_list(const ordered_json& j, const char* key, const std::string& where)
    {
        const auto& v = require(j, key, where);
        if (!v.is_array())
            throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\" must be an array");
        std::vector<std::string> out;
        for (const auto& item : v) {
            if (!item.is_string())
                throw Error(ErrorCode::SchemaError, where + ": field \"" + key + "\" must hold strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    inline std::string read_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    inline void write_file(const std::filesystem::path& path, std::string_view contents)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot create " + path.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out)
            throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }

    /// Writes via a sibling temporary file and rename.
    inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
    {
        auto tmp = path;
        tmp += ".tmp";
        write_file(tmp, contents);
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec)
            throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
    }

} // namespace detail

inline ordered_json config_to_json(const PipelineConfig& c)
{
    ordered_json j;
    j["languages"] = c.languages;
    j["pivot_language"] = c.pivot_language;
    j["tag_patterns"] = c.tag_patterns;
    j["comment_denylist"] = c.comment_denylist;
    j["persuade_fraction"] = c.persuade_fraction;
    j["split_fractions"] = { { "train", c.split_fractions[0] }, { "validation", c.split_fractions[1] },
        { "test", c.split_fractions[2] } };
    j["seed"] = c.seed;
    return j;
}

inline PipelineConfig config_from_json(const ordered_json& j)
{
    const std::string where = "manifest config";
    detail::expect_keys(j,
        { "languages", "pivot_language", "tag_patterns", "comment_denylist", "persuade_fraction", "split_fractions",
            "seed" },
        where);
    PipelineConfig c;
    c.languages = detail::string_list(j, "languages", where);
    c.pivot_language = detail::get_as<std::string>(j, "pivot_language", where);
    c.tag_patterns = detail::string_list(j, "tag_patterns", where);
    c.comment_denylist = detail::string_list(j, "comment_denylist", where);
    c.persuade_fraction = detail::get_as<double>(j, "persuade_fraction", where);
    const auto& splits = j.at("split_fractions");
    detail::expect_keys(splits, { "train", "validation", "test" }, where + " split_fractions");
    c.split_fractions = { detail::get_as<double>(splits, "train", where), detail::get_as<double>(splits, "validation", where),
        detail::get_as<double>(splits, "test", where) };
    c.seed = detail::get_as<std::uint64_t>(j, "seed", where);
    return c;
}

inline ordered_json manifest_to_json(const DatasetManifest& m)
{
    ordered_json j;
    j["format_version"] = m.format_version;
    j["record_format"] = kRecordFormat;
    j["seed"] = m.config.seed;
    j["config"] = config_to_json(m.config);
    j["sources"] = ordered_json::array();
    for (const auto& s : m.sources)
        j["sources"].push_back({ { "language", s.language }, { "game_id", s.game_id }, { "path", s.path },
            { "language_id", s.language_id }, { "string_count", s.string_count } });
    j["stages"] = { { "extracted_lines", m.stages.extracted_lines },
        { "dropped_comment_lines", m.stages.dropped_comment_lines }, { "aligned_lines", m.stages.aligned_lines },
        { "aligned_persuade_lines", m.stages.aligned_persuade_lines }, { "balanced_lines", m.stages.balanced_lines } };
    j["line_counts"] = detail::label_map_json(m.line_counts);
    ordered_json splits = ordered_json::object();
    for (Split s : kAllSplits) {
        const auto it = m.split_line_counts.find(s);
        splits[std::string(to_string(s))] = it == m.split_line_counts.end() ? 0 : it->second;
    }
    j["split_line_counts"] = splits;
    ordered_json sentences = ordered_json::object();
    for (const auto& language : m.config.languages) {
        ordered_json per_label = ordered_json::object();
        for (Label label : kAllLabels) {
            ordered_json per_split = ordered_json::object();
            for (Split s : kAllSplits)
                per_split[std::string(to_string(s))] = m.sentence_counts.count(language, label, s);
            per_label[std::string(to_string(label))] = per_split;
        }
        sentences[language] = per_label;
    }
    j["sentence_counts"] = sentences;
    j["sentence_totals"] = { { "persuade", m.sentence_counts.total(Label::Persuade) },
        { "non_persuade", m.sentence_counts.total(Label::NonPersuade) } };
    j["warnings"] = m.warnings;
    return j;
}

inline DatasetManifest manifest_from_json(const ordered_json& j)
{
    const std::string where = "manifest";
    detail::expect_keys(j,
        { "format_version", "record_format", "seed", "config", "sources", "stages", "line_counts", "split_line_counts",
            "sentence_counts", "sentence_totals", "warnings" },
        where);
    DatasetManifest m;
    m.format_version = detail::get_as<std::string>(j, "format_version", where);
    if (m.format_version != kManifestFormat)
        throw Error(ErrorCode::SchemaError, "unsupported manifest format \"" + m.format_version + "\"");
    if (detail::get_as<std::string>(j, "record_format", where) != kRecordFormat)
        throw Error(ErrorCode::SchemaError, "unsupported record format");
    m.config = config_from_json(j.at("config"));
    if (detail::get_as<std::uint64_t>(j, "seed", where) != m.config.seed)
        throw Error(ErrorCode::SchemaError, "manifest seed disagrees with its config snapshot");
    try {
        m.config.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::SchemaError, std::string("manifest config: ") + e.what());
    }

    if (!j.at("sources").is_array())
        throw Error(ErrorCode::SchemaError, "manifest: sources must be an array");
    for (const auto& s : j.at("sources")) {
        detail::expect_keys(s, { "language", "game_id", "path", "language_id", "string_count" }, "manifest source");
        m.sources.push_back({ detail::get_as<std::string>(s, "language", where),
            detail::get_as<std::string>(s, "game_id", where), detail::get_as<std::string>(s, "path", where),
            detail::get_as<std::uint32_t>(s, "language_id", where), detail::get_as<std::uint64_t>(s, "string_count", where) });
    }

    const auto& stages = j.at("stages");
    detail::expect_keys(stages,
        { "extracted_lines", "dropped_comment_lines", "aligned_lines", "aligned_persuade_lines", "balanced_lines" },
        "manifest stages");
    try {
        m.stages.extracted_lines = stages.at("extracted_lines").get<std::map<std::string, std::uint64_t>>();
        m.stages.dropped_comment_lines = stages.at("dropped_comment_lines").get<std::map<std::string, std::uint64_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("manifest stages: ") + e.what());
    }
    m.stages.aligned_lines = detail::get_as<std::uint64_t>(stages, "aligned_lines", where);
    m.stages.aligned_persuade_lines = detail::get_as<std::uint64_t>(stages, "aligned_persuade_lines", where);
    m.stages.balanced_lines = detail::get_as<std::uint64_t>(stages, "balanced_lines", where);

    detail::expect_keys(j.at("line_counts"), { "persuade", "non_persuade" }, "manifest line_counts");
    for (Label label : kAllLabels)
        m.line_counts[label] = detail::get_as<std::uint64_t>(j.at("line_counts"), std::string(to_string(label)).c_str(), where);
    detail::expect_keys(j.at("split_line_counts"), { "train", "validation", "test" }, "manifest split_line_counts");
    for (Split s : kAllSplits)
        m.split_line_counts[s]
            = detail::get_as<std::uint64_t>(j.at("split_line_counts"), std::string(to_string(s)).c_str(), where);

    const auto& sentences = j.at("sentence_counts");
    if (!sentences.is_object())
        throw Error(ErrorCode::SchemaError, "manifest: sentence_counts must be an object");
    for (const auto& [language, per_label] : sentences.items()) {
        if (std::find(m.config.languages.begin(), m.config.languages.end(), language) == m.config.languages.end())
            throw Error(ErrorCode::SchemaError, "manifest: sentence_counts for unconfigured language \"" + language + "\"");
        detail::expect_keys(per_label, { "persuade", "non_persuade" }, "manifest sentence_counts." + language);
        for (Label label : kAllLabels) {
            const auto& per_split = per_label.at(std::string(to_string(label)));
            detail::expect_keys(per_split, { "train", "validation", "test" }, "manifest sentence_counts." + language);
            for (Split s : kAllSplits) {
                const auto n = detail::get_as<std::uint64_t>(per_split, std::string(to_string(s)).c_str(), where);
                if (n != 0)
                    m.sentence_counts.by_language[language][label][s] = n;
            }
        }
    }
    const auto& totals = j.at("sentence_totals");
    detail::expect_keys(totals, { "persuade", "non_persuade" }, "manifest sentence_totals");
    for (Label label : kAllLabels)
        if (detail::get_as<std::uint64_t>(totals, std::string(to_string(label)).c_str(), where)
            != m.sentence_counts.total(label))
            throw Error(ErrorCode::CountMismatch, "manifest sentence_totals disagree with sentence_counts");
    m.warnings = detail::string_list(j, "warnings", where);
    return m;
}

inline std::string record_to_jsonl(const SentenceRecord& r)
{
    ordered_json j;
    j["str_ref"] = r.str_ref;
    j["game_id"] = r.game_id;
    j["sentence_index"] = r.sentence_index;
    j["text"] = r.text;
    j["label"] = to_string(r.label);
    return j.dump();
}

inline std::filesystem::path record_file_name(const std::string& language, Split split)
{
    return language + "." + std::string(to_string(split)) + ".jsonl";
}

/// Drops zero cells so counts built from records and from a manifest compare equal.
inline SentenceCounts normalized(SentenceCounts counts)
{
    for (auto lang = counts.by_language.begin(); lang != counts.by_language.end();) {
        for (auto label = lang->second.begin(); label != lang->second.end();) {
            std::erase_if(label->second, [](const auto& kv) { return kv.second == 0; });
            label = label->second.empty() ? lang->second.erase(label) : std::next(label);
        }
        lang = lang->second.empty() ? counts.by_language.erase(lang) : std::next(lang);
    }
    return counts;
}

/// Checks records against the corpus invariants and the manifest counts.
/// `mismatch` is the error raised when counts disagree.
inline void validate_corpus(
    const std::vector<SentenceRecord>& records, const DatasetManifest& manifest, ErrorCode mismatch)
{
    if (records.empty())
        throw Error(ErrorCode::ValidationError, "corpus has no records");
    const auto& languages = manifest.config.languages;
    std::map<LineKey, std::pair<Label, Split>> line_class;
    std::set<std::tuple<std::string, LineKey, std::uint32_t>> seen;
    for (const auto& r : records) {
        if (!seen.emplace(r.language, r.key(), r.sentence_index).second)
            throw Error(ErrorCode::ValidationError,
                "duplicate sentence " + std::to_string(r.sentence_index) + " of line " + to_string(r.key()) + " in "
                    + r.language);
        if (std::find(languages.begin(), languages.end(), r.language) == languages.end())
            throw Error(ErrorCode::ValidationError, "record in unconfigured language \"" + r.language + "\"");
        if (r.text.find_first_not_of(" \t\r\n") == std::string::npos)
            throw Error(ErrorCode::ValidationError, "record " + to_string(r.key()) + " has empty text");
        if (r.text.find('\n') != std::string::npos || r.text.find('\r') != std::string::npos)
            throw Error(ErrorCode::ValidationError, "record " + to_string(r.key()) + " contains a line break");
        const auto [it, inserted] = line_class.emplace(r.key(), std::pair { r.label, r.split });
        if (!inserted && it->second != std::pair { r.label, r.split })
            throw Error(ErrorCode::ValidationError,
                "sentences of line " + to_string(r.key()) + " disagree on label or split");
    }
    if (normalized(compute_stats(records)) != normalized(manifest.sentence_counts))
        throw Error(mismatch, "sentence counts in the manifest do not match the records");
    if (count_lines(records) != manifest.line_counts)
        throw Error(mismatch, "line counts in the manifest do not match the records");
    std::map<Split, std::uint64_t> split_lines;
    for (Split s : kAllSplits)
        split_lines[s] = 0;
    for (const auto& [key, cls] : line_class)
        ++split_lines[cls.second];
    if (split_lines != manifest.split_line_counts)
        throw Error(mismatch, "split line counts in the manifest do not match the records");
}

/// Writes the corpus into `destination`. Files are staged in a sibling
/// directory and moved into place at the end. An existing destination is
/// replaced only if it is empty or holds a previous corpus.
inline void export_corpus(
    const std::vector<SentenceRecord>& records, const DatasetManifest& manifest, const std::filesystem::path& destination)
{
    namespace fs = std::filesystem;
    validate_corpus(records, manifest, ErrorCode::ValidationError);

    std::map<std::pair<std::string, Split>, std::vector<const SentenceRecord*>> files;
    for (const auto& language : manifest.config.languages)
        for (Split s : kAllSplits)
            files[{ language, s }];
    for (const auto& r : records)
        files[{ r.language, r.split }].push_back(&r);

    std::error_code ec;
    if (fs::exists(destination, ec) && !fs::is_empty(destination, ec) && !fs::exists(destination / "manifest.json", ec))
        throw Error(ErrorCode::IoError, destination.string() + " exists and does not look like a corpus directory");

    auto staging = destination;
    staging += ".partial";
    fs::remove_all(staging, ec);
    if (!fs::create_directories(staging, ec) || ec)
        throw Error(ErrorCode::IoError, "cannot create " + staging.string() + ": " + ec.message());

    for (auto& [key, rows] : files) {
        std::sort(rows.begin(), rows.end(), [](const SentenceRecord* a, const SentenceRecord* b) {
            return std::tie(a->game_id, a->str_ref, a->sentence_index) < std::tie(b->game_id, b->str_ref, b->sentence_index);
        });
        std::string contents;
        for (const auto* r : rows) {
            contents += record_to_jsonl(*r);
            contents += '\n';
        }
        detail::write_file(staging / record_file_name(key.first, key.second), contents);
    }
    detail::write_file(staging / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");

    fs::remove_all(destination, ec);
    if (destination.has_parent_path())
        fs::create_directories(destination.parent_path(), ec);
    fs::rename(staging, destination, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot move corpus into " + destination.string() + ": " + ec.message());
}

inline SentenceRecord record_from_jsonl(std::string_view line, const std::string& language, Split split, const std::string& where)
{
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, where + ": " + e.what());
    }
    detail::expect_keys(j, { "str_ref", "game_id", "sentence_index", "text", "label" }, where);
    SentenceRecord r;
    r.language = language;
    r.split = split;
    r.str_ref = detail::get_as<std::uint32_t>(j, "str_ref", where);
    r.game_id = detail::get_as<std::string>(j, "game_id", where);
    r.sentence_index = detail::get_as<std::uint32_t>(j, "sentence_index", where);
    r.text = detail::get_as<std::string>(j, "text", where);
    const auto label_text = detail::get_as<std::string>(j, "label", where);
    const auto label = label_from_string(label_text);
    if (!label)
        throw Error(ErrorCode::SchemaError, where + ": unknown label \"" + label_text + "\"");
    r.label = *label;
    return r;
}

/// Reads a corpus directory and re-verifies every count in its manifest.
/// Records come back in canonical order (see record_less).
inline Corpus import_corpus(const std::filesystem::path& source)
{
    namespace fs = std::filesystem;
    const auto manifest_path = source / "manifest.json";
    if (!fs::exists(manifest_path))
        throw Error(ErrorCode::IoError, "no manifest.json in " + source.string());

    Corpus corpus;
    try {
        corpus.manifest = manifest_from_json(ordered_json::parse(detail::read_file(manifest_path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, manifest_path.string() + ": " + e.what());
    }

    for (const auto& language : corpus.manifest.config.languages) {
        for (Split s : kAllSplits) {
            const auto path = source / record_file_name(language, s);
            const auto contents = detail::read_file(path);
            std::size_t line_no = 0;
            std::size_t pos = 0;
            while (pos < contents.size()) {
                auto end = contents.find('\n', pos);
                if (end == std::string::npos)
                    end = contents.size();
                ++line_no;
                const std::string_view line(contents.data() + pos, end - pos);
                if (!line.empty())
                    corpus.records.push_back(
                        record_from_jsonl(line, language, s, path.string() + ":" + std::to_string(line_no)));
                pos = end + 1;
            }
        }
    }
    std::sort(corpus.records.begin(), corpus.records.end(), record_less);
    validate_corpus(corpus.records, corpus.manifest, ErrorCode::CountMismatch);
    return corpus;
}

} // namespace tlkcorpus
