#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlkcorpus/error.hpp"
#include "tlkcorpus/labels.hpp"

namespace tlkcorpus {

inline constexpr std::string_view kReportSchema = "tlkcorpus-metrics/1";

/// Persuade is the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> golds)
{
    if (predictions.size() != golds.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for "
                + std::to_string(golds.size()) + " gold labels");
    if (predictions.empty())
        throw Error(ErrorCode::EmptyInput, "no predictions");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool predicted = predictions[i] == Label::Persuade;
        const bool gold = golds[i] == Label::Persuade;
        if (predicted && gold)
            ++m.tp;
        else if (predicted)
            ++m.fp;
        else if (gold)
            ++m.fn;
        else
            ++m.tn;
    }
    return m;
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;

    bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    ClassMetrics persuade;
    ClassMetrics no_persuade;
    ConfusionMatrix matrix;
    /// Cells whose ratio was 0/0 and reported as 0.0, e.g. "persuade.precision".
    std::vector<std::string> zero_division;
    /// Free-form provenance: model name, language, hyperparameters, assumptions.
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();

    bool flagged(const std::string& cell) const
    {
        return std::find(zero_division.begin(), zero_division.end(), cell) != zero_division.end();
    }

    bool operator==(const MetricsReport&) const = default;
};

inline MetricsReport metrics(const ConfusionMatrix& m)
{
    if (m.total() == 0)
        throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no observations");

    MetricsReport r;
    r.matrix = m;
    const auto ratio = [&](std::uint64_t num, std::uint64_t den, const char* cell) {
        if (den == 0) {
            r.zero_division.emplace_back(cell);
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    const auto harmonic = [&](double p, double q, const char* cell) {
        if (p + q == 0.0) {
            r.zero_division.emplace_back(cell);
            return 0.0;
        }
        return 2.0 * p * q / (p + q);
    };

    r.persuade.precision = ratio(m.tp, m.tp + m.fp, "persuade.precision");
    r.persuade.recall = ratio(m.tp, m.tp + m.fn, "persuade.recall");
    r.persuade.f1 = harmonic(r.persuade.precision, r.persuade.recall, "persuade.f1");
    r.persuade.support = m.tp + m.fn;

    r.no_persuade.precision = ratio(m.tn, m.tn + m.fn, "no_persuade.precision");
    r.no_persuade.recall = ratio(m.tn, m.tn + m.fp, "no_persuade.recall");
    r.no_persuade.f1 = harmonic(r.no_persuade.precision, r.no_persuade.recall, "no_persuade.f1");
    r.no_persuade.support = m.tn + m.fp;

    const double total = static_cast<double>(m.total());
    r.accuracy = static_cast<double>(m.tp + m.tn) / total;
    r.macro_f1 = (r.persuade.f1 + r.no_persuade.f1) / 2.0;
    r.weighted_f1 = (r.persuade.f1 * static_cast<double>(r.persuade.support)
                        + r.no_persuade.f1 * static_cast<double>(r.no_persuade.support))
        / total;
    return r;
}

inline MetricsReport evaluate_predictions(std::span<const Label> predictions, std::span<const Label> golds)
{
    return metrics(confusion(predictions, golds));
}

namespace detail {

    inline std::string format_cell(double value, bool flagged)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", value);
        return flagged ? std::string(buf) + "*" : std::string(buf);
    }

    inline std::string pad_right(std::string s, std::size_t width)
    {
        if (s.size() < width)
            s.append(width - s.size(), ' ');
        return s;
    }

    inline std::string pad_left(std::string s, std::size_t width)
    {
        if (s.size() < width)
            s.insert(0, width - s.size(), ' ');
        return s;
    }

} // namespace detail

/// Side-by-side table, one column per report, rows in the order
/// Accuracy / Macro avg / Weighted avg / persuade block / no_persuade block.
/// Values are rounded to two decimals; "*" marks a 0/0 cell.
inline std::string render_report_table(const std::vector<std::pair<std::string, MetricsReport>>& columns)
{
    constexpr std::size_t kLabelWidth = 20;
    std::vector<std::size_t> widths;
    for (const auto& [name, unused] : columns)
        widths.push_back(std::max<std::size_t>(name.size(), 5));

    std::string out = detail::pad_right("", kLabelWidth);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out += "  " + detail::pad_left(columns[c].first, widths[c]);
    out += "\n";

    bool any_flag = false;
    const auto row = [&](const std::string& label, auto value_of, const std::string& cell) {
        std::string line = detail::pad_right(label, kLabelWidth);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto& report = columns[c].second;
            const bool flagged = !cell.empty() && report.flagged(cell);
            any_flag = any_flag || flagged;
            line += "  " + detail::pad_left(detail::format_cell(value_of(report), flagged), widths[c]);
        }
        // drop padding after the last column
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out += line + "\n";
    };
    const auto heading = [&](const std::string& label) { out += label + "\n"; };

    row("Accuracy", [](const MetricsReport& r) { return r.accuracy; }, "");
    row("Macro avg. (F1)", [](const MetricsReport& r) { return r.macro_f1; }, "");
    row("Weighted avg. (F1)", [](const MetricsReport& r) { return r.weighted_f1; }, "");
    heading("persuade");
    row("  Precision", [](const MetricsReport& r) { return r.persuade.precision; }, "persuade.precision");
    row("  Recall", [](const MetricsReport& r) { return r.persuade.recall; }, "persuade.recall");
    row("  F1-score", [](const MetricsReport& r) { return r.persuade.f1; }, "persuade.f1");
    heading("no_persuade");
    row("  Precision", [](const MetricsReport& r) { return r.no_persuade.precision; }, "no_persuade.precision");
    row("  Recall", [](const MetricsReport& r) { return r.no_persuade.recall; }, "no_persuade.recall");
    row("  F1-score", [](const MetricsReport& r) { return r.no_persuade.f1; }, "no_persuade.f1");
    if (any_flag)
        out += "* undefined ratio (0/0), reported as 0.00\n";
    return out;
}

inline std::string render_report(const MetricsReport& report, const std::string& column = "score")
{
    return render_report_table({ { column, report } });
}

inline nlohmann::ordered_json report_to_json(const MetricsReport& r)
{
    const auto cls = [](const ClassMetrics& c) {
        return nlohmann::ordered_json {
            { "precision", c.precision }, { "recall", c.recall }, { "f1", c.f1 }, { "support", c.support }
        };
    };
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["accuracy"] = r.accuracy;
    j["macro_avg_f1"] = r.macro_f1;
    j["weighted_avg_f1"] = r.weighted_f1;
    j["classes"] = { { "persuade", cls(r.persuade) }, { "no_persuade", cls(r.no_persuade) } };
    j["confusion"] = { { "tp", r.matrix.tp }, { "fp", r.matrix.fp }, { "fn", r.matrix.fn }, { "tn", r.matrix.tn } };
    j["zero_division"] = r.zero_division;
    j["meta"] = r.meta;
    return j;
}

/// Parses a report in the shared schema, written by this library or by the
/// transformer trainer. Every score is recomputed from the confusion matrix
/// and must agree with the stored value to 1e-9.
inline MetricsReport report_from_json(const nlohmann::ordered_json& j)
{
    MetricsReport stored;
    try {
        if (j.at("schema").get<std::string>() != kReportSchema)
            throw Error(ErrorCode::SchemaError, "unsupported report schema \"" + j.at("schema").get<std::string>() + "\"");
        const auto& c = j.at("confusion");
        stored.matrix = { c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(), c.at("fn").get<std::uint64_t>(),
            c.at("tn").get<std::uint64_t>() };
        stored.accuracy = j.at("accuracy").get<double>();
        stored.macro_f1 = j.at("macro_avg_f1").get<double>();
        stored.weighted_f1 = j.at("weighted_avg_f1").get<double>();
        const auto cls = [](const nlohmann::ordered_json& k) {
            return ClassMetrics { k.at("precision").get<double>(), k.at("recall").get<double>(), k.at("f1").get<double>(),
                k.at("support").get<std::uint64_t>() };
        };
        stored.persuade = cls(j.at("classes").at("persuade"));
        stored.no_persuade = cls(j.at("classes").at("no_persuade"));
        stored.zero_division = j.at("zero_division").get<std::vector<std::string>>();
        if (j.contains("meta")) {
            if (!j.at("meta").is_object())
                throw Error(ErrorCode::SchemaError, "report meta must be an object");
            stored.meta = j.at("meta");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("metrics report: ") + e.what());
    }

    auto recomputed = metrics(stored.matrix);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
    const auto same_class = [&](const ClassMetrics& a, const ClassMetrics& b) {
        return close(a.precision, b.precision) && close(a.recall, b.recall) && close(a.f1, b.f1) && a.support == b.support;
    };
    auto flags_a = stored.zero_division;
    auto flags_b = recomputed.zero_division;
    std::sort(flags_a.begin(), flags_a.end());
    std::sort(flags_b.begin(), flags_b.end());
    if (!close(stored.accuracy, recomputed.accuracy) || !close(stored.macro_f1, recomputed.macro_f1)
        || !close(stored.weighted_f1, recomputed.weighted_f1) || !same_class(stored.persuade, recomputed.persuade)
        || !same_class(stored.no_persuade, recomputed.no_persuade) || flags_a != flags_b)
        throw Error(ErrorCode::SchemaError, "metrics report scores disagree with its confusion matrix");
    return stored;
}

} // namespace tlkcorpus
