#pragma once

// Implementations behind the tlkcorpus command-line tool. Each command writes
// its artifact to `out` and diagnostics to `err`, and reports failure by
// throwing tlkcorpus::Error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tlkcorpus/classifier.hpp"
#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/dataset_io.hpp"
#include "tlkcorpus/metrics.hpp"
#include "tlkcorpus/pipeline.hpp"
#include "tlkcorpus/run_config.hpp"
#include "tlkcorpus/tlk.hpp"
#include "tlkcorpus/tlk_xml.hpp"

namespace tlkcorpus {

/// XML if the first non-blank byte (after an optional UTF-8 BOM) is '<'.
inline bool looks_like_xml(std::string_view bytes)
{
    if (bytes.substr(0, 3) == "\xEF\xBB\xBF")
        bytes.remove_prefix(3);
    const auto first = bytes.find_first_not_of(" \t\r\n");
    return first != std::string_view::npos && bytes[first] == '<';
}

inline TalkTable load_talk_table(
    const std::filesystem::path& path, const CodepageConfig& codepages, std::vector<std::string>& warnings)
{
    std::string bytes;
    try {
        bytes = detail::read_file(path);
    } catch (const Error&) {
        throw Error(ErrorCode::IoError, "cannot read talk table " + path.string());
    }
    try {
        if (looks_like_xml(bytes)) {
            std::vector<std::string> local;
            auto table = parse_tlk_xml(bytes, local);
            for (auto& w : local)
                warnings.push_back(path.string() + ": " + w);
            return table;
        }
        return parse_tlk(bytes, codepages);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message(), e.offset());
    }
}

struct ExtractOptions {
    std::filesystem::path input;
    std::string language = "en";
    std::optional<Codepage> codepage;
    std::optional<std::filesystem::path> output;
    std::vector<std::string> tag_patterns { std::string(kDefaultTagPattern) };
};

/// One JSON line per text-bearing entry: str_ref, language, label, tags, text.
inline void cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err)
{
    const CodepageConfig codepages = opts.codepage ? CodepageConfig::uniform(*opts.codepage) : CodepageConfig {};
    std::vector<std::string> warnings;
    const auto table = load_talk_table(opts.input, codepages, warnings);
    for (const auto& w : warnings)
        err << "warning: " << w << "\n";

    const TagMatcher tags(opts.tag_patterns);
    std::string dump;
    std::size_t lines = 0;
    for (std::size_t ref = 0; ref < table.entries.size(); ++ref) {
        const auto& entry = table.entries[ref];
        if (!entry.has_text() || entry.text.empty())
            continue;
        const auto detected = detect_label(entry.text, tags);
        ordered_json j;
        j["str_ref"] = ref;
        j["language"] = opts.language;
        j["label"] = to_string(detected.label);
        j["tags"] = detected.matched_tags;
        j["text"] = entry.text;
        dump += j.dump() + "\n";
        ++lines;
    }
    if (opts.output) {
        detail::write_file_atomic(*opts.output, dump);
        err << "wrote " << lines << " lines to " << opts.output->string() << "\n";
    } else {
        out << dump;
    }
}

/// Loads every input named by the configuration, grouped by language.
inline std::map<std::string, std::vector<SourceTable>> load_inputs(const RunConfig& config, std::ostream& err)
{
    std::map<std::string, std::vector<SourceTable>> tables;
    for (const auto& input : config.inputs) {
        std::vector<std::string> warnings;
        TalkTable table;
        try {
            table = load_talk_table(config.resolve(input.path), config.codepages, warnings);
        } catch (const Error& e) {
            throw Error(e.code(), "language \"" + input.language + "\", game \"" + input.game_id + "\": " + e.message(),
                e.offset());
        }
        for (const auto& w : warnings)
            err << "warning: " << w << "\n";
        tables[input.language].push_back({ input.game_id, input.path.generic_string(), std::move(table) });
    }
    for (const auto& language : config.pipeline.languages)
        if (!tables.count(language))
            throw Error(ErrorCode::MissingLanguage, "configuration has no [input] entry for language \"" + language + "\"");
    return tables;
}

inline RunConfig read_run_config(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = detail::read_file(path);
    } catch (const Error&) {
        throw Error(ErrorCode::IoError, "cannot read configuration " + path.string());
    }
    try {
        return parse_run_config(text, path.parent_path());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

struct BuildOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> output_dir;
};

/// Builds and exports the corpus, then prints its manifest.
inline Corpus cmd_build(const BuildOptions& opts, std::ostream& out, std::ostream& err)
{
    auto config = read_run_config(opts.config);
    const auto output_dir = opts.output_dir ? *opts.output_dir : config.resolve(config.output_dir);
    const auto tables = load_inputs(config, err);
    auto corpus = build_corpus(tables, config.pipeline);
    for (const auto& w : corpus.manifest.warnings)
        err << "warning: " << w << "\n";
    export_corpus(corpus.records, corpus.manifest, output_dir);
    out << manifest_to_json(corpus.manifest).dump(2) << "\n";
    err << "wrote " << corpus.records.size() << " sentence records to " << output_dir.string() << "\n";
    return corpus;
}

/// Persuade / non-persuade sentence counts per language plus the
/// multilingual total row.
inline std::string render_stats(const SentenceCounts& counts, const std::vector<std::string>& languages)
{
    std::ostringstream out;
    out << std::left << std::setw(22) << "Language" << std::right << std::setw(10) << "Persuade" << std::setw(14)
        << "Non-persuade"
        << "\n";
    for (const auto& language : languages)
        out << std::left << std::setw(22) << language << std::right << std::setw(10)
            << counts.count(language, Label::Persuade) << std::setw(14) << counts.count(language, Label::NonPersuade)
            << "\n";
    out << std::left << std::setw(22) << "Multilingual (total)" << std::right << std::setw(10)
        << counts.total(Label::Persuade) << std::setw(14) << counts.total(Label::NonPersuade) << "\n";
    return out.str();
}

inline void cmd_stats(const std::filesystem::path& corpus_dir, std::ostream& out)
{
    const auto corpus = import_corpus(corpus_dir);
    out << render_stats(compute_stats(corpus.records), corpus.manifest.config.languages);
}

inline std::vector<SentenceRecord> select_records(
    const std::vector<SentenceRecord>& records, const std::string& language, Split split)
{
    std::vector<SentenceRecord> out;
    for (const auto& r : records)
        if (r.language == language && r.split == split)
            out.push_back(r);
    return out;
}

inline void require_language(const Corpus& corpus, const std::string& language)
{
    const auto& langs = corpus.manifest.config.languages;
    if (std::find(langs.begin(), langs.end(), language) == langs.end())
        throw Error(ErrorCode::MissingLanguage, "corpus has no language \"" + language + "\"");
}

inline MetricsReport evaluate_model(const BaselineModel& model, const FeatureVocab& vocab,
    const std::vector<SentenceRecord>& records, const std::string& language, Split split)
{
    if (records.empty())
        throw Error(ErrorCode::EmptyInput, "no " + std::string(to_string(split)) + " records for language \"" + language + "\"");
    std::vector<Label> predicted;
    std::vector<Label> gold;
    for (const auto& r : records) {
        predicted.push_back(predict(model, vocab, r.text).label);
        gold.push_back(r.label);
    }
    auto report = evaluate_predictions(predicted, gold);
    report.meta["model"] = "baseline-logreg";
    report.meta["language"] = language;
    report.meta["split"] = to_string(split);
    report.meta["learning_rate"] = model.hyperparams.learning_rate;
    report.meta["epochs"] = model.hyperparams.epochs;
    report.meta["l2"] = model.hyperparams.l2;
    report.meta["seed"] = model.hyperparams.seed;
    return report;
}

struct TrainOptions {
    std::filesystem::path corpus_dir;
    std::string language = "en";
    BaselineHyperparams hyperparams;
    std::filesystem::path model_out = "model.json";
    std::optional<std::filesystem::path> report_out;
    std::uint32_t log_every = 20;
};

/// Trains on the train split (validation loss watched for divergence) and
/// prints the test-split report.
inline MetricsReport cmd_train_baseline(const TrainOptions& opts, std::ostream& out, std::ostream& err)
{
    const auto corpus = import_corpus(opts.corpus_dir);
    require_language(corpus, opts.language);
    const auto train = select_records(corpus.records, opts.language, Split::Train);
    const auto validation = select_records(corpus.records, opts.language, Split::Validation);
    const auto test = select_records(corpus.records, opts.language, Split::Test);

    const auto log = [&](std::uint32_t epoch, double loss, double val_loss) {
        if (opts.log_every == 0)
            return;
        if (epoch % opts.log_every != 0 && epoch != opts.hyperparams.epochs)
            return;
        err << "epoch " << epoch << " train_loss " << std::setprecision(6) << loss;
        if (!std::isnan(val_loss))
            err << " validation_loss " << val_loss;
        err << "\n";
    };
    const auto result = train_baseline(train, opts.hyperparams, validation, log);
    detail::write_file_atomic(opts.model_out, model_to_json(result.model, result.vocab).dump() + "\n");

    auto report = evaluate_model(result.model, result.vocab, test, opts.language, Split::Test);
    report.meta["train_sentences"] = train.size();
    if (opts.report_out)
        detail::write_file_atomic(*opts.report_out, report_to_json(report).dump(2) + "\n");
    out << render_report(report, opts.language);
    return report;
}

inline LoadedModel read_model(const std::filesystem::path& path)
{
    try {
        return model_from_json(nlohmann::ordered_json::parse(detail::read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
}

struct EvaluateOptions {
    std::filesystem::path model;
    std::filesystem::path corpus_dir;
    std::string language = "en";
    Split split = Split::Test;
    std::optional<std::filesystem::path> report_out;
};

inline MetricsReport cmd_evaluate(const EvaluateOptions& opts, std::ostream& out)
{
    const auto loaded = read_model(opts.model);
    const auto corpus = import_corpus(opts.corpus_dir);
    require_language(corpus, opts.language);
    const auto records = select_records(corpus.records, opts.language, opts.split);
    const auto report = evaluate_model(loaded.model, loaded.vocab, records, opts.language, opts.split);
    if (opts.report_out)
        detail::write_file_atomic(*opts.report_out, report_to_json(report).dump(2) + "\n");
    out << render_report(report, opts.language);
    return report;
}

/// Renders existing report files side by side. Columns are named by the
/// report's meta.language when present, otherwise by file stem.
inline void cmd_render_reports(const std::vector<std::filesystem::path>& paths, std::ostream& out)
{
    std::vector<std::pair<std::string, MetricsReport>> columns;
    for (const auto& path : paths) {
        MetricsReport report;
        try {
            report = report_from_json(nlohmann::ordered_json::parse(detail::read_file(path)));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + ": " + e.message());
        }
        std::string name = path.stem().string();
        if (report.meta.contains("language") && report.meta["language"].is_string())
            name = report.meta["language"].get<std::string>();
        columns.emplace_back(name, std::move(report));
    }
    out << render_report_table(columns);
}

inline void cmd_dump_config(std::ostream& out)
{
    RunConfig defaults;
    defaults.inputs = {
        { "en", "nwn", "games/nwn/en/dialog.tlk" },
        { "es", "nwn", "games/nwn/es/dialog.tlk" },
        { "de", "nwn", "games/nwn/de/dialog.tlk" },
        { "fr", "nwn", "games/nwn/fr/dialog.tlk" },
        { "it", "nwn", "games/nwn/it/dialog.tlk" },
    };
    out << render_run_config(defaults);
}

} // namespace tlkcorpus
