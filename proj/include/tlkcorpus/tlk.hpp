#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlkcorpus/codepage.hpp"
#include "tlkcorpus/error.hpp"

namespace tlkcorpus {

using StrRef = std::uint32_t;

namespace tlk_flags {
    inline constexpr std::uint32_t kTextPresent = 0x1;
    inline constexpr std::uint32_t kSoundPresent = 0x2;
    inline constexpr std::uint32_t kSoundLengthPresent = 0x4;
} // namespace tlk_flags

inline constexpr std::size_t kTlkHeaderSize = 20;
inline constexpr std::size_t kTlkEntrySize = 40;
inline constexpr std::size_t kSoundResRefSize = 16;

struct TlkEntry {
    std::uint32_t flags = 0;
    std::string text;
    std::string sound_resref;
    std::uint32_t volume_variance = 0;
    std::uint32_t pitch_variance = 0;
    float sound_length = 0.0f;

    bool has_text() const { return (flags & tlk_flags::kTextPresent) != 0; }

    bool operator==(const TlkEntry& other) const
    {
        // bitwise on the float so NaN payloads compare like the bytes they came from
        return flags == other.flags && text == other.text && sound_resref == other.sound_resref
            && volume_variance == other.volume_variance && pitch_variance == other.pitch_variance
            && std::bit_cast<std::uint32_t>(sound_length) == std::bit_cast<std::uint32_t>(other.sound_length);
    }
};

/// A decoded talk table. The index of an entry is its StrRef.
struct TalkTable {
    std::uint32_t language_id = 0;
    std::vector<TlkEntry> entries;

    std::size_t size() const { return entries.size(); }
    const TlkEntry& at(StrRef ref) const { return entries.at(ref); }

    bool operator==(const TalkTable&) const = default;
};

namespace detail {

    class ByteReader {
    public:
        explicit ByteReader(std::span<const std::uint8_t> bytes)
            : bytes_(bytes)
        {
        }

        std::size_t size() const { return bytes_.size(); }

        std::uint32_t u32(std::size_t offset) const
        {
            require(offset, 4, "u32");
            return static_cast<std::uint32_t>(bytes_[offset]) | (static_cast<std::uint32_t>(bytes_[offset + 1]) << 8)
                | (static_cast<std::uint32_t>(bytes_[offset + 2]) << 16)
                | (static_cast<std::uint32_t>(bytes_[offset + 3]) << 24);
        }

        float f32(std::size_t offset) const { return std::bit_cast<float>(u32(offset)); }

        std::span<const std::uint8_t> slice(std::size_t offset, std::size_t length) const
        {
            require(offset, length, "slice");
            return bytes_.subspan(offset, length);
        }

        void require(std::size_t offset, std::size_t length, std::string_view what) const
        {
            if (offset > bytes_.size() || length > bytes_.size() - offset)
                throw Error(ErrorCode::Truncated,
                    std::string(what) + " of " + std::to_string(length) + " bytes runs past end of file ("
                        + std::to_string(bytes_.size()) + " bytes)",
                    offset);
        }

    private:
        std::span<const std::uint8_t> bytes_;
    };

    inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value)
    {
        out.push_back(static_cast<std::uint8_t>(value));
        out.push_back(static_cast<std::uint8_t>(value >> 8));
        out.push_back(static_cast<std::uint8_t>(value >> 16));
        out.push_back(static_cast<std::uint8_t>(value >> 24));
    }

} // namespace detail

/// Decodes a TLK V3.0 file image. Every offset and count is checked against
/// the buffer before use.
inline TalkTable parse_tlk(std::span<const std::uint8_t> bytes, const CodepageConfig& codepages = {})
{
    const detail::ByteReader in(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "TLK ", 4) != 0)
        throw Error(ErrorCode::BadMagic, "missing \"TLK \" signature", 0);
    if (bytes.size() < 8)
        throw Error(ErrorCode::Truncated, "file ends inside the header", bytes.size());
    if (std::memcmp(bytes.data() + 4, "V3.0", 4) != 0)
        throw Error(ErrorCode::BadVersion,
            "unsupported version \"" + std::string(reinterpret_cast<const char*>(bytes.data() + 4), 4) + "\"", 4);
    in.require(0, kTlkHeaderSize, "header");

    TalkTable table;
    table.language_id = in.u32(8);
    const std::uint64_t count = in.u32(12);
    const std::uint64_t heap_offset = in.u32(16);

    if (kTlkHeaderSize + count * kTlkEntrySize > bytes.size())
        throw Error(ErrorCode::Truncated,
            "declared " + std::to_string(count) + " entries but the file holds only "
                + std::to_string((bytes.size() - kTlkHeaderSize) / kTlkEntrySize),
            kTlkHeaderSize);
    if (heap_offset > bytes.size())
        throw Error(ErrorCode::Truncated, "string data offset " + std::to_string(heap_offset) + " is past end of file",
            16);

    const Codepage cp = codepages.for_language(table.language_id);
    table.entries.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t base = kTlkHeaderSize + static_cast<std::size_t>(i) * kTlkEntrySize;
        TlkEntry entry;
        entry.flags = in.u32(base);
        const auto resref = in.slice(base + 4, kSoundResRefSize);
        const auto end = std::find(resref.begin(), resref.end(), std::uint8_t { 0 });
        entry.sound_resref.assign(resref.begin(), end);
        entry.volume_variance = in.u32(base + 20);
        entry.pitch_variance = in.u32(base + 24);
        const std::uint64_t text_offset = in.u32(base + 28);
        const std::uint64_t text_size = in.u32(base + 32);
        entry.sound_length = in.f32(base + 36);

        if (entry.has_text()) {
            const std::uint64_t start = heap_offset + text_offset;
            if (start > bytes.size() || text_size > bytes.size() - start)
                throw Error(ErrorCode::Truncated,
                    "text of entry " + std::to_string(i) + " (" + std::to_string(text_size)
                        + " bytes) runs past end of file",
                    start);
            try {
                entry.text = decode_text(in.slice(static_cast<std::size_t>(start), static_cast<std::size_t>(text_size)), cp);
            } catch (const Error& e) {
                throw Error(ErrorCode::DecodeError,
                    "entry " + std::to_string(i) + " is not valid " + std::string(codepage_name(cp)),
                    start + e.offset().value_or(0));
            }
        }
        table.entries.push_back(std::move(entry));
    }
    return table;
}

inline TalkTable parse_tlk(std::string_view bytes, const CodepageConfig& codepages = {})
{
    return parse_tlk(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), codepages);
}

/// Writes the canonical layout: records in StrRef order, then every entry's
/// text back to back in the same order. Each string offset is the running
/// heap size, so text-less entries point at the next entry's start.
inline std::vector<std::uint8_t> write_tlk(const TalkTable& table, const CodepageConfig& codepages = {})
{
    const Codepage cp = codepages.for_language(table.language_id);
    std::vector<std::vector<std::uint8_t>> encoded;
    encoded.reserve(table.entries.size());
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& entry = table.entries[i];
        if (!entry.has_text() && !entry.text.empty())
            throw Error(ErrorCode::EncodeError, "entry " + std::to_string(i) + " has text but no text-present flag");
        if (entry.sound_resref.size() > kSoundResRefSize)
            throw Error(ErrorCode::EncodeError, "entry " + std::to_string(i) + " sound resref exceeds 16 bytes");
        try {
            encoded.push_back(encode_text(entry.text, cp));
        } catch (const Error& e) {
            throw Error(ErrorCode::EncodeError, "entry " + std::to_string(i) + ": " + e.what());
        }
    }

    const std::uint64_t heap_offset = kTlkHeaderSize + table.entries.size() * kTlkEntrySize;
    std::uint64_t heap_size = 0;
    for (const auto& text : encoded)
        heap_size += text.size();
    if (heap_offset + heap_size > UINT32_MAX)
        throw Error(ErrorCode::EncodeError, "talk table exceeds 4 GiB");

    static constexpr std::string_view kMagic = "TLK V3.0";
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.reserve(static_cast<std::size_t>(heap_offset + heap_size));
    detail::put_u32(out, table.language_id);
    detail::put_u32(out, static_cast<std::uint32_t>(table.entries.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(heap_offset));

    std::uint32_t cursor = 0;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& entry = table.entries[i];
        detail::put_u32(out, entry.flags);
        std::uint8_t resref[kSoundResRefSize] = {};
        std::memcpy(resref, entry.sound_resref.data(), entry.sound_resref.size());
        out.insert(out.end(), std::begin(resref), std::end(resref));
        detail::put_u32(out, entry.volume_variance);
        detail::put_u32(out, entry.pitch_variance);
        detail::put_u32(out, cursor);
        detail::put_u32(out, static_cast<std::uint32_t>(encoded[i].size()));
        detail::put_u32(out, std::bit_cast<std::uint32_t>(entry.sound_length));
        cursor += static_cast<std::uint32_t>(encoded[i].size());
    }
    for (const auto& text : encoded)
        out.insert(out.end(), text.begin(), text.end());
    return out;
}

} // namespace tlkcorpus
