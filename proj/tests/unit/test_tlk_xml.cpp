#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "tlkcorpus/tlk_xml.hpp"

using namespace tlkcorpus;

namespace {

ErrorCode xml_error(std::string_view text)
{
    try {
        parse_tlk_xml(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parse succeeded: " << text;
    return ErrorCode::EmptyInput;
}

} // namespace

TEST(TlkXml, ContiguousIds)
{
    std::vector<std::string> warnings;
    const auto t = parse_tlk_xml(R"(<tlk><string id="0">a</string><string id="1">b</string></tlk>)", warnings);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.at(0).text, "a");
    EXPECT_EQ(t.at(1).text, "b");
    EXPECT_EQ(t.at(1).flags, tlk_flags::kTextPresent);
    EXPECT_TRUE(warnings.empty());
}

TEST(TlkXml, GapIsFilledAndReported)
{
    std::vector<std::string> warnings;
    const auto t = parse_tlk_xml(R"(<tlk><string id="0">a</string><string id="2">c</string></tlk>)", warnings);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_FALSE(t.at(1).has_text());
    EXPECT_TRUE(t.at(1).text.empty());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find('1'), std::string::npos);
}

TEST(TlkXml, OutOfOrderIdsAreSorted)
{
    const auto t = parse_tlk_xml(R"(<tlk><string id="1">b</string><string id="0">a</string></tlk>)");
    EXPECT_EQ(t.at(0).text, "a");
    EXPECT_EQ(t.at(1).text, "b");
}

TEST(TlkXml, DuplicateIdIsRejected)
{
    EXPECT_EQ(xml_error(R"(<tlk><string id="5">x</string><string id="5">y</string></tlk>)"), ErrorCode::DuplicateId);
}

TEST(TlkXml, MalformedDocuments)
{
    EXPECT_EQ(xml_error("<tlk><string id=\"0\">x</tlk>"), ErrorCode::MalformedDocument);
    EXPECT_EQ(xml_error("<tlk><string>x</string></tlk>"), ErrorCode::MalformedDocument);
    EXPECT_EQ(xml_error("<tlk><string id=\"abc\">x</string></tlk>"), ErrorCode::MalformedDocument);
    EXPECT_EQ(xml_error("<tlk><string id=\"16777216\">x</string></tlk>"), ErrorCode::MalformedDocument);
    EXPECT_EQ(xml_error("<tlk><string id=\"0\" flags=\"0x0\">text but no flag</string></tlk>"),
        ErrorCode::MalformedDocument);
    EXPECT_EQ(xml_error(""), ErrorCode::MalformedDocument);
}

TEST(TlkXml, RootNameIsNotChecked)
{
    EXPECT_EQ(parse_tlk_xml("<resource/>").size(), 0u);
    EXPECT_EQ(parse_tlk_xml("<?xml version=\"1.0\"?><!-- x --><t><string id=\"0\">a</string></t>").size(), 1u);
}

TEST(TlkXml, AttributesAndEntities)
{
    const auto t = parse_tlk_xml(R"(<tlk language="3">
  <string id="0" flags="0x7" sound="vo_0007" volumevariance="2" pitchvariance="9" soundlength="2.5">Tom &amp; Jerry &lt;3</string>
</tlk>)");
    EXPECT_EQ(t.language_id, 3u);
    const auto& e = t.at(0);
    EXPECT_EQ(e.flags, 7u);
    EXPECT_EQ(e.sound_resref, "vo_0007");
    EXPECT_EQ(e.volume_variance, 2u);
    EXPECT_EQ(e.pitch_variance, 9u);
    EXPECT_EQ(e.sound_length, 2.5f);
    EXPECT_EQ(e.text, "Tom & Jerry <3");
}

TEST(TlkXml, WhitespaceInsideTextIsKept)
{
    const auto t = parse_tlk_xml("<tlk><string id=\"0\">  two  spaces\n</string></tlk>");
    EXPECT_EQ(t.at(0).text, "  two  spaces\n");
}

TEST(TlkXml, RenderParseRoundTrip)
{
    synth::Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto table = synth::random_talk_table(rng);
        const auto xml = render_tlk_xml(table);
        std::vector<std::string> warnings;
        ASSERT_EQ(parse_tlk_xml(xml, warnings), table) << "case " << i << "\n" << xml;
        EXPECT_TRUE(warnings.empty());
    }
}

TEST(TlkXml, AgreesWithBinaryForm)
{
    synth::Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const auto table = synth::random_talk_table(rng);
        const auto binary = write_tlk(table);
        const auto via_xml = parse_tlk_xml(render_tlk_xml(parse_tlk(binary)));
        ASSERT_EQ(write_tlk(via_xml), binary) << "case " << i;
    }
}
