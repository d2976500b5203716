#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/labels.hpp"

namespace tlkcorpus {

inline constexpr std::string_view kManifestFormat = "tlkcorpus-manifest/1";
inline constexpr std::string_view kRecordFormat = "tlkcorpus-records/1";

/// Sentence counts keyed by language, label and split.
struct SentenceCounts {
    std::map<std::string, std::map<Label, std::map<Split, std::uint64_t>>> by_language;

    std::uint64_t count(const std::string& language, Label label) const
    {
        std::uint64_t total = 0;
        if (const auto lang = by_language.find(language); lang != by_language.end())
            if (const auto lab = lang->second.find(label); lab != lang->second.end())
                for (const auto& [split, n] : lab->second)
                    total += n;
        return total;
    }

    std::uint64_t count(const std::string& language, Label label, Split split) const
    {
        if (const auto lang = by_language.find(language); lang != by_language.end())
            if (const auto lab = lang->second.find(label); lab != lang->second.end())
                if (const auto s = lab->second.find(split); s != lab->second.end())
                    return s->second;
        return 0;
    }

    /// Sum over all languages, the "multilingual total" row.
    std::uint64_t total(Label label) const
    {
        std::uint64_t sum = 0;
        for (const auto& [language, unused] : by_language)
            sum += count(language, label);
        return sum;
    }

    bool operator==(const SentenceCounts&) const = default;
};

/// Per-language persuade / non-persuade sentence counts, split by split.
inline SentenceCounts compute_stats(const std::vector<SentenceRecord>& records)
{
    SentenceCounts counts;
    for (const auto& r : records)
        ++counts.by_language[r.language][r.label][r.split];
    return counts;
}

/// Distinct lines per label, counted over the union of all languages.
inline std::map<Label, std::uint64_t> count_lines(const std::vector<SentenceRecord>& records)
{
    std::map<Label, std::set<LineKey>> keys;
    for (const auto& r : records)
        keys[r.label].insert(r.key());
    std::map<Label, std::uint64_t> out;
    for (Label label : kAllLabels)
        out[label] = keys[label].size();
    return out;
}

struct SourceInfo {
    std::string language;
    std::string game_id;
    std::string path;
    std::uint32_t language_id = 0;
    std::uint64_t string_count = 0;

    bool operator==(const SourceInfo&) const = default;
};

/// Line counts at each pipeline stage, for auditing what was discarded.
struct StageCounts {
    std::map<std::string, std::uint64_t> extracted_lines;
    std::map<std::string, std::uint64_t> dropped_comment_lines;
    std::uint64_t aligned_lines = 0;
    std::uint64_t aligned_persuade_lines = 0;
    std::uint64_t balanced_lines = 0;

    bool operator==(const StageCounts&) const = default;
};

struct DatasetManifest {
    std::string format_version { kManifestFormat };
    PipelineConfig config;
    std::vector<SourceInfo> sources;
    StageCounts stages;
    std::map<Label, std::uint64_t> line_counts;
    std::map<Split, std::uint64_t> split_line_counts;
    SentenceCounts sentence_counts;
    std::vector<std::string> warnings;

    bool operator==(const DatasetManifest&) const = default;
};

} // namespace tlkcorpus
