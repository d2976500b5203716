#pragma once

// XML form of a talk table, as produced by tlk2xml-style converters:
//
//   <tlk language="0">
//     <string id="0">Hello there.</string>
//     <string id="7" flags="0x7" sound="vo_0007" volumevariance="0"
//             pitchvariance="0" soundlength="2.5">Line with audio.</string>
//   </tlk>
//
// Only `id` is required. A missing `flags` attribute means "text present".
// The sound attributes default to empty/zero. Ids need not be contiguous;
// gaps become empty text-less entries and are reported as warnings.

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "tlkcorpus/codepage.hpp"
#include "tlkcorpus/error.hpp"
#include "tlkcorpus/tlk.hpp"

namespace tlkcorpus {

// StrRefs above this select an alternate (custom) table in the engine.
inline constexpr std::uint32_t kMaxXmlStrRef = 0x00FFFFFF;

namespace detail {

    template <typename T>
    bool parse_number(std::string_view text, T& out)
    {
        int base = 10;
        if constexpr (std::is_integral_v<T>) {
            if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
                text.remove_prefix(2);
                base = 16;
            }
        }
        const char* first = text.data();
        const char* last = text.data() + text.size();
        std::from_chars_result res;
        if constexpr (std::is_integral_v<T>)
            res = std::from_chars(first, last, out, base);
        else
            res = std::from_chars(first, last, out);
        return !text.empty() && res.ec == std::errc {} && res.ptr == last;
    }

    inline void append_xml_escaped(std::string& out, std::string_view text, bool attribute)
    {
        for (char c : text) {
            const auto u = static_cast<unsigned char>(c);
            switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"':
                out += attribute ? "&quot;" : "\"";
                break;
            default:
                if (u < 0x20 && (attribute || (c != '\n' && c != '\t')))
                    out += "&#x" + hex_string(u, 2) + ";";
                else
                    out += c;
            }
        }
    }

} // namespace detail

/// Renders a talk table in the XML form read by parse_tlk_xml.
inline std::string render_tlk_xml(const TalkTable& table)
{
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<tlk language=\"" + std::to_string(table.language_id) + "\">\n";
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        out += "  <string id=\"" + std::to_string(i) + "\"";
        if (e.flags != tlk_flags::kTextPresent)
            out += " flags=\"0x" + hex_string(e.flags, 8) + "\"";
        if (!e.sound_resref.empty()) {
            out += " sound=\"";
            detail::append_xml_escaped(out, e.sound_resref, true);
            out += "\"";
        }
        if (e.volume_variance != 0)
            out += " volumevariance=\"" + std::to_string(e.volume_variance) + "\"";
        if (e.pitch_variance != 0)
            out += " pitchvariance=\"" + std::to_string(e.pitch_variance) + "\"";
        if (std::bit_cast<std::uint32_t>(e.sound_length) != 0) {
            char buf[32];
            const auto res = std::to_chars(std::begin(buf), std::end(buf), e.sound_length);
            out += " soundlength=\"" + std::string(buf, res.ptr) + "\"";
        }
        if (e.text.empty()) {
            out += "/>\n";
        } else {
            out += ">";
            detail::append_xml_escaped(out, e.text, false);
            out += "</string>\n";
        }
    }
    out += "</tlk>\n";
    return out;
}

/// Reads the XML form. Gaps in the id range are filled with empty text-less
/// entries; one message per gap is appended to `warnings`.
inline TalkTable parse_tlk_xml(std::string_view text, std::vector<std::string>& warnings)
{
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        std::istringstream in { std::string(text) };
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::MalformedDocument, e.message() + " on line " + std::to_string(e.line()));
    }

    const pt::ptree* root = nullptr;
    for (const auto& [name, child] : doc) {
        if (name == "<xmlcomment>")
            continue;
        if (root != nullptr)
            throw Error(ErrorCode::MalformedDocument, "more than one root element");
        root = &child;
    }
    if (root == nullptr)
        throw Error(ErrorCode::MalformedDocument, "no root element");

    TalkTable table;
    if (const auto lang = root->get_optional<std::string>("<xmlattr>.language")) {
        if (!detail::parse_number(*lang, table.language_id))
            throw Error(ErrorCode::MalformedDocument, "language attribute \"" + *lang + "\" is not an integer");
    }

    std::map<std::uint32_t, TlkEntry> by_id;
    for (const auto& [name, node] : *root) {
        if (name != "string")
            continue;
        const auto id_text = node.get_optional<std::string>("<xmlattr>.id");
        if (!id_text)
            throw Error(ErrorCode::MalformedDocument, "string element without an id attribute");
        std::uint32_t id = 0;
        if (!detail::parse_number(*id_text, id))
            throw Error(ErrorCode::MalformedDocument, "string id \"" + *id_text + "\" is not an integer");

        if (id > kMaxXmlStrRef)
            throw Error(ErrorCode::MalformedDocument, "string id " + *id_text + " is beyond the talk-table range");

        TlkEntry entry;
        entry.flags = tlk_flags::kTextPresent;
        const auto attr = [&](const char* key, auto& field) {
            if (const auto value = node.get_optional<std::string>(std::string("<xmlattr>.") + key)) {
                if (!detail::parse_number(*value, field))
                    throw Error(ErrorCode::MalformedDocument,
                        std::string(key) + " attribute \"" + *value + "\" on string " + *id_text + " is not a number");
            }
        };
        attr("flags", entry.flags);
        attr("volumevariance", entry.volume_variance);
        attr("pitchvariance", entry.pitch_variance);
        attr("soundlength", entry.sound_length);
        entry.sound_resref = node.get<std::string>("<xmlattr>.sound", "");
        if (entry.sound_resref.size() > kSoundResRefSize)
            throw Error(ErrorCode::MalformedDocument, "sound resref on string " + *id_text + " exceeds 16 bytes");
        if (entry.has_text()) {
            entry.text = node.data();
            if (!is_valid_utf8(entry.text))
                throw Error(ErrorCode::MalformedDocument, "string " + *id_text + " is not valid UTF-8");
        }
        else if (!node.data().empty())
            throw Error(ErrorCode::MalformedDocument, "string " + *id_text + " has text but flags clear the text bit");

        if (!by_id.emplace(id, std::move(entry)).second)
            throw Error(ErrorCode::DuplicateId, "string id " + std::to_string(id) + " appears more than once");
    }

    if (by_id.empty())
        return table;
    const std::uint32_t last = by_id.rbegin()->first;
    table.entries.resize(static_cast<std::size_t>(last) + 1);
    std::uint32_t expected = 0;
    for (auto& [id, entry] : by_id) {
        if (id != expected)
            warnings.push_back(id - expected == 1
                    ? "missing string id " + std::to_string(expected) + ", filled with an empty entry"
                    : "missing string ids " + std::to_string(expected) + ".." + std::to_string(id - 1)
                        + ", filled with empty entries");
        table.entries[id] = std::move(entry);
        expected = id + 1;
    }
    return table;
}

inline TalkTable parse_tlk_xml(std::string_view text)
{
    std::vector<std::string> ignored;
    return parse_tlk_xml(text, ignored);
}

} // namespace tlkcorpus
