#pragma once

#include <map>
#include <string>
#include <vector>

#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/manifest.hpp"
#include "tlkcorpus/tlk.hpp"

namespace tlkcorpus {

/// One game's talk table in one language.
struct SourceTable {
    std::string game_id;
    std::string path;
    TalkTable table;
};

struct Corpus {
    std::vector<SentenceRecord> records;
    DatasetManifest manifest;
};

/// Extracts one DialogLine per text-bearing entry of every table.
inline std::vector<DialogLine> extract_lines(
    const std::string& language, const std::vector<SourceTable>& tables, const TagMatcher& tags)
{
    std::vector<DialogLine> lines;
    for (const auto& source : tables) {
        const auto& entries = source.table.entries;
        for (std::size_t ref = 0; ref < entries.size(); ++ref) {
            if (!entries[ref].has_text() || entries[ref].text.empty())
                continue;
            lines.push_back(make_dialog_line(
                source.game_id, language, static_cast<StrRef>(ref), entries[ref].text, tags));
        }
    }
    return lines;
}

/// Full pipeline: label, clean, drop developer comments, align, balance,
/// split, then sentence-tokenize every language of every kept line.
inline Corpus build_corpus(const std::map<std::string, std::vector<SourceTable>>& tables, const PipelineConfig& config)
{
    config.validate();
    const TagMatcher tags(config.tag_patterns);
    const CommentDenylist denylist(config.comment_denylist);

    Corpus corpus;
    auto& manifest = corpus.manifest;
    manifest.config = config;

    std::map<std::string, std::vector<DialogLine>> per_language;
    for (const auto& language : config.languages) {
        const auto it = tables.find(language);
        if (it == tables.end() || it->second.empty())
            throw Error(ErrorCode::MissingLanguage, "no talk table supplied for language \"" + language + "\"");
        for (const auto& source : it->second)
            manifest.sources.push_back(
                { language, source.game_id, source.path, source.table.language_id, source.table.entries.size() });

        auto lines = extract_lines(language, it->second, tags);
        manifest.stages.extracted_lines[language] = lines.size();
        if (language != config.pivot_language) {
            auto filtered = filter_developer_comments(std::move(lines), denylist);
            manifest.stages.dropped_comment_lines[language] = filtered.dropped.size();
            lines = std::move(filtered.kept);
        } else {
            manifest.stages.dropped_comment_lines[language] = 0;
        }
        per_language.emplace(language, std::move(lines));
    }

    const auto aligned = align(per_language, config);
    manifest.stages.aligned_lines = aligned.size();
    manifest.stages.aligned_persuade_lines = static_cast<std::uint64_t>(
        std::count_if(aligned.begin(), aligned.end(), [](const auto& l) { return l.label == Label::Persuade; }));

    auto balanced = balance(aligned, config.persuade_fraction, config.seed);
    if (balanced.warning)
        manifest.warnings.push_back(*balanced.warning);
    manifest.stages.balanced_lines = balanced.lines.size();

    const auto splits = assign_splits(balanced.lines, config.split_fractions, config.seed);

    for (Label label : kAllLabels)
        manifest.line_counts[label] = 0;
    for (Split split : kAllSplits)
        manifest.split_line_counts[split] = 0;
    for (const auto& line : balanced.lines) {
        const Split split = splits.at(line.key());
        ++manifest.line_counts[line.label];
        ++manifest.split_line_counts[split];
        for (const auto& language : config.languages) {
            const auto sentences = sentence_tokenize(line.texts.at(language), language);
            for (std::size_t i = 0; i < sentences.size(); ++i)
                corpus.records.push_back({ line.str_ref, line.game_id, language, static_cast<std::uint32_t>(i),
                    sentences[i], line.label, split });
        }
    }
    std::sort(corpus.records.begin(), corpus.records.end(), record_less);
    manifest.sentence_counts = compute_stats(corpus.records);
    return corpus;
}

} // namespace tlkcorpus
