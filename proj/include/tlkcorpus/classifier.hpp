#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlkcorpus/codepage.hpp"
#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/error.hpp"

namespace tlkcorpus {

inline constexpr std::string_view kModelFormat = "tlkcorpus-baseline/1";

namespace detail {

    inline bool is_word_code_point(char32_t cp)
    {
        if (cp < 0x80)
            return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
        if (cp < 0xC0)
            return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
        if (cp == 0xD7 || cp == 0xF7)
            return false;
        // general punctuation, currency symbols, arrows, math operators, ...
        if (cp >= 0x2000 && cp <= 0x2BFF)
            return false;
        return true;
    }

    inline bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

    inline char32_t to_lower_code_point(char32_t cp)
    {
        if (cp >= 'A' && cp <= 'Z')
            return cp + 32;
        if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
            return cp + 32;
        if (((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) && cp % 2 == 0)
            return cp + 1;
        if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1)
            return cp + 1;
        if (cp >= 0x410 && cp <= 0x42F)
            return cp + 32;
        if (cp >= 0x400 && cp <= 0x40F)
            return cp + 80;
        return cp;
    }

} // namespace detail

/// Lowercased word tokens. Words are runs of letters and digits; an
/// apostrophe between two word characters stays inside the token ("didn't").
inline std::vector<std::string> word_tokens(std::string_view text)
{
    std::vector<char32_t> cps;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto cp = next_utf8(text, pos);
        cps.push_back(cp ? *cp : U' ');
        if (!cp)
            ++pos;
    }

    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (detail::is_word_code_point(cp)) {
            append_utf8(current, detail::to_lower_code_point(cp));
        } else if (detail::is_apostrophe(cp) && !current.empty() && i + 1 < cps.size()
            && detail::is_word_code_point(cps[i + 1])) {
            append_utf8(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

/// Unigrams followed by space-joined adjacent bigrams.
inline std::vector<std::string> ngram_features(std::string_view text)
{
    auto tokens = word_tokens(text);
    std::vector<std::string> features = tokens;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        features.push_back(tokens[i] + " " + tokens[i + 1]);
    return features;
}

class FeatureVocab {
public:
    FeatureVocab() = default;

    /// Features must be unique; they are indexed in lexicographic order.
    explicit FeatureVocab(std::vector<std::string> features)
        : features_(std::move(features))
    {
        std::sort(features_.begin(), features_.end());
        if (std::adjacent_find(features_.begin(), features_.end()) != features_.end())
            throw Error(ErrorCode::ValidationError, "duplicate feature in vocabulary");
        for (std::size_t i = 0; i < features_.size(); ++i)
            index_.emplace(features_[i], static_cast<std::uint32_t>(i));
    }

    template <typename Range>
    static FeatureVocab from_texts(const Range& texts)
    {
        std::set<std::string> seen;
        for (const auto& text : texts)
            for (auto& f : ngram_features(text))
                seen.insert(std::move(f));
        return FeatureVocab(std::vector<std::string>(seen.begin(), seen.end()));
    }

    std::size_t size() const { return features_.size(); }
    const std::vector<std::string>& features() const { return features_; }

    std::optional<std::uint32_t> find(const std::string& feature) const
    {
        const auto it = index_.find(feature);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    bool operator==(const FeatureVocab& other) const { return features_ == other.features_; }

private:
    std::vector<std::string> features_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Sorted (column, count) pairs.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline SparseVector featurize(std::string_view text, const FeatureVocab& vocab)
{
    std::map<std::uint32_t, double> counts;
    for (const auto& f : ngram_features(text))
        if (const auto idx = vocab.find(f))
            counts[*idx] += 1.0;
    return { counts.begin(), counts.end() };
}

struct BaselineHyperparams {
    double learning_rate = 0.1;
    std::uint32_t epochs = 200;
    double l2 = 1e-4;
    // Weights start at zero and descent is full-batch, so nothing is random;
    // the seed is carried for provenance only.
    std::uint64_t seed = 42;

    bool operator==(const BaselineHyperparams&) const = default;
};

struct BaselineModel {
    std::vector<double> weights;
    double bias = 0.0;
    BaselineHyperparams hyperparams;

    bool operator==(const BaselineModel&) const = default;
};

/// Feature rows with 0/1 targets (1 = persuade).
struct TrainingSet {
    std::vector<SparseVector> rows;
    std::vector<double> targets;
};

inline double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double decision_value(const std::vector<double>& weights, double bias, const SparseVector& x)
{
    double z = bias;
    for (const auto& [col, value] : x)
        z += weights[col] * value;
    return z;
}

/// Mean logistic loss plus (l2 / 2) * |w|^2; the bias is not regularized.
inline double logistic_loss(const std::vector<double>& weights, double bias, const TrainingSet& data, double l2)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const double z = decision_value(weights, bias, data.rows[i]);
        sum += softplus(z) - data.targets[i] * z;
    }
    double reg = 0.0;
    for (double w : weights)
        reg += w * w;
    return sum / static_cast<double>(data.rows.size()) + 0.5 * l2 * reg;
}

/// Analytic gradient of logistic_loss. Returns d/dbias; fills `grad_weights`.
inline double logistic_gradient(
    const std::vector<double>& weights, double bias, const TrainingSet& data, double l2, std::vector<double>& grad_weights)
{
    grad_weights.assign(weights.size(), 0.0);
    double grad_bias = 0.0;
    const double inv_n = 1.0 / static_cast<double>(data.rows.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const double residual = sigmoid(decision_value(weights, bias, data.rows[i])) - data.targets[i];
        for (const auto& [col, value] : data.rows[i])
            grad_weights[col] += residual * value;
        grad_bias += residual;
    }
    for (std::size_t j = 0; j < weights.size(); ++j)
        grad_weights[j] = grad_weights[j] * inv_n + l2 * weights[j];
    return grad_bias * inv_n;
}

inline TrainingSet make_training_set(const std::vector<SentenceRecord>& records, const FeatureVocab& vocab)
{
    TrainingSet data;
    data.rows.reserve(records.size());
    data.targets.reserve(records.size());
    for (const auto& r : records) {
        data.rows.push_back(featurize(r.text, vocab));
        data.targets.push_back(r.label == Label::Persuade ? 1.0 : 0.0);
    }
    return data;
}

struct TrainResult {
    FeatureVocab vocab;
    BaselineModel model;
    /// Loss before each update, then the final loss: epochs + 1 values.
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
};

/// Called after each epoch with (epoch, train loss, validation loss or NaN).
using EpochLogger = std::function<void(std::uint32_t, double, double)>;

/// Full-batch gradient descent from zero weights. Vocabulary comes from the
/// training records only. When validation records are given their loss is
/// tracked and a non-finite value aborts training.
inline TrainResult train_baseline(const std::vector<SentenceRecord>& train, const BaselineHyperparams& hp,
    const std::vector<SentenceRecord>& validation = {}, const EpochLogger& log = {})
{
    const auto persuade = std::count_if(train.begin(), train.end(), [](const auto& r) { return r.label == Label::Persuade; });
    if (persuade == 0 || persuade == static_cast<std::ptrdiff_t>(train.size()))
        throw Error(ErrorCode::EmptyClass, "training data must contain both persuade and non_persuade sentences");
    if (!(hp.learning_rate > 0.0) || !(hp.l2 >= 0.0) || !std::isfinite(hp.learning_rate) || !std::isfinite(hp.l2))
        throw Error(ErrorCode::InvalidConfig, "learning rate must be positive and l2 non-negative");

    std::vector<std::string> texts;
    texts.reserve(train.size());
    for (const auto& r : train)
        texts.push_back(r.text);

    TrainResult result;
    result.vocab = FeatureVocab::from_texts(texts);
    const auto data = make_training_set(train, result.vocab);
    const auto held_out = validation.empty() ? TrainingSet {} : make_training_set(validation, result.vocab);

    auto& model = result.model;
    model.hyperparams = hp;
    model.weights.assign(result.vocab.size(), 0.0);
    model.bias = 0.0;

    const auto check = [](double loss, std::uint32_t epoch, const char* which) {
        if (!std::isfinite(loss))
            throw Error(ErrorCode::NonFiniteLoss,
                std::string(which) + " loss diverged at epoch " + std::to_string(epoch) + "; lower the learning rate");
    };

    std::vector<double> grad;
    for (std::uint32_t epoch = 0; epoch <= hp.epochs; ++epoch) {
        const double loss = logistic_loss(model.weights, model.bias, data, hp.l2);
        check(loss, epoch, "training");
        result.train_loss.push_back(loss);
        double val_loss = std::nan("");
        if (!held_out.rows.empty()) {
            val_loss = logistic_loss(model.weights, model.bias, held_out, hp.l2);
            check(val_loss, epoch, "validation");
            result.validation_loss.push_back(val_loss);
        }
        if (log)
            log(epoch, loss, val_loss);
        if (epoch == hp.epochs)
            break;
        const double grad_bias = logistic_gradient(model.weights, model.bias, data, hp.l2, grad);
        for (std::size_t j = 0; j < grad.size(); ++j)
            model.weights[j] -= hp.learning_rate * grad[j];
        model.bias -= hp.learning_rate * grad_bias;
    }
    return result;
}

struct Prediction {
    Label label = Label::NonPersuade;
    double probability = 0.0; // of persuade
};

inline Prediction predict(const BaselineModel& model, const FeatureVocab& vocab, std::string_view text)
{
    const double p = sigmoid(decision_value(model.weights, model.bias, featurize(text, vocab)));
    return { p > 0.5 ? Label::Persuade : Label::NonPersuade, p };
}

inline nlohmann::ordered_json model_to_json(const BaselineModel& model, const FeatureVocab& vocab)
{
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["hyperparams"] = { { "learning_rate", model.hyperparams.learning_rate }, { "epochs", model.hyperparams.epochs },
        { "l2", model.hyperparams.l2 }, { "seed", model.hyperparams.seed } };
    j["bias"] = model.bias;
    j["vocab"] = vocab.features();
    j["weights"] = model.weights;
    return j;
}

struct LoadedModel {
    BaselineModel model;
    FeatureVocab vocab;
};

inline LoadedModel model_from_json(const nlohmann::ordered_json& j)
{
    try {
        if (j.at("format").get<std::string>() != kModelFormat)
            throw Error(ErrorCode::SchemaError, "unsupported model format \"" + j.at("format").get<std::string>() + "\"");
        LoadedModel out;
        const auto& hp = j.at("hyperparams");
        out.model.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
        out.model.hyperparams.epochs = hp.at("epochs").get<std::uint32_t>();
        out.model.hyperparams.l2 = hp.at("l2").get<double>();
        out.model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
        out.model.bias = j.at("bias").get<double>();
        out.model.weights = j.at("weights").get<std::vector<double>>();
        const auto features = j.at("vocab").get<std::vector<std::string>>();
        if (!std::is_sorted(features.begin(), features.end()))
            throw Error(ErrorCode::SchemaError, "model vocabulary is not in index order");
        out.vocab = FeatureVocab(features);
        if (out.model.weights.size() != out.vocab.size())
            throw Error(ErrorCode::SchemaError, "model has " + std::to_string(out.model.weights.size())
                    + " weights for " + std::to_string(out.vocab.size()) + " features");
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("model file: ") + e.what());
    }
}

} // namespace tlkcorpus
