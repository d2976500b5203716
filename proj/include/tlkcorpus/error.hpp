#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tlkcorpus {

enum class ErrorCode {
    // talk tables
    BadMagic,
    BadVersion,
    Truncated,
    DecodeError,
    EncodeError,
    MalformedDocument,
    DuplicateId,
    // corpus pipeline
    DuplicateStrRef,
    EmptyClass,
    EmptyInput,
    MissingLanguage,
    InvalidConfig,
    // dataset files
    IoError,
    ValidationError,
    SchemaError,
    CountMismatch,
    // classifier / metrics
    NonFiniteLoss,
    LengthMismatch,
    EmptyMatrix,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::BadVersion: return "BadVersion";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DuplicateStrRef: return "DuplicateStrRef";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingLanguage: return "MissingLanguage";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    }
    return "Unknown";
}

/// Every failure raised by the library. `offset` is set for errors that can be
/// pinned to a byte position in a binary input.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::uint64_t> offset = std::nullopt)
        : std::runtime_error(format(code, message, offset))
        , code_(code)
        , message_(message)
        , offset_(offset)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix and offset suffix.
    const std::string& message() const noexcept { return message_; }
    std::optional<std::uint64_t> offset() const noexcept { return offset_; }

private:
    static std::string format(ErrorCode code, const std::string& message, std::optional<std::uint64_t> offset)
    {
        std::string out(to_string(code));
        out += ": ";
        out += message;
        if (offset)
            out += " (at offset " + std::to_string(*offset) + ")";
        return out;
    }

    ErrorCode code_;
    std::string message_;
    std::optional<std::uint64_t> offset_;
};

} // namespace tlkcorpus
