#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tlkcorpus/tlk.hpp"

namespace tlkcorpus {

enum class Label : std::uint8_t {
    Persuade,
    NonPersuade,
};

enum class Split : std::uint8_t {
    Train,
    Validation,
    Test,
};

inline constexpr Label kAllLabels[] = { Label::Persuade, Label::NonPersuade };
inline constexpr Split kAllSplits[] = { Split::Train, Split::Validation, Split::Test };

inline std::string_view to_string(Label label)
{
    return label == Label::Persuade ? "persuade" : "non_persuade";
}

inline std::optional<Label> label_from_string(std::string_view text)
{
    if (text == "persuade")
        return Label::Persuade;
    if (text == "non_persuade")
        return Label::NonPersuade;
    return std::nullopt;
}

inline std::string_view to_string(Split split)
{
    switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    }
    return "train";
}

inline std::optional<Split> split_from_string(std::string_view text)
{
    for (Split s : kAllSplits)
        if (to_string(s) == text)
            return s;
    return std::nullopt;
}

/// Identifies one dialogue line across all localizations of a game.
struct LineKey {
    std::string game_id;
    StrRef str_ref = 0;

    auto operator<=>(const LineKey&) const = default;
    bool operator==(const LineKey&) const = default;
};

inline std::string to_string(const LineKey& key)
{
    return key.game_id + ":" + std::to_string(key.str_ref);
}

} // namespace tlkcorpus
