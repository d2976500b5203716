#include <gtest/gtest.h>

#include "tlkcorpus/corpus.hpp"
#include "tlkcorpus/sentence_tokenizer.hpp"

using namespace tlkcorpus;

namespace {

const std::string kCzerka = "After I overheard the deal they made with Lorso in the Czerka offices, I confronted them. "
                            "When they tried to run, I chased them down and killed them.";

DialogLine line(const std::string& lang, StrRef ref, const std::string& text, const std::string& game = "g")
{
    return make_dialog_line(game, lang, ref, text, TagMatcher {});
}

std::vector<AlignedLine> synthetic_aligned(std::size_t persuade, std::size_t non_persuade)
{
    std::vector<AlignedLine> out;
    for (std::size_t i = 0; i < persuade + non_persuade; ++i) {
        AlignedLine a;
        a.game_id = "g";
        a.str_ref = static_cast<StrRef>(i);
        a.label = i < persuade ? Label::Persuade : Label::NonPersuade;
        a.texts["en"] = "line " + std::to_string(i);
        out.push_back(a);
    }
    return out;
}

std::map<Split, std::size_t> split_sizes(const std::map<LineKey, Split>& splits)
{
    std::map<Split, std::size_t> out;
    for (const auto& [key, split] : splits)
        ++out[split];
    return out;
}

} // namespace

TEST(DetectLabel, PersuadeTag)
{
    const auto r = detect_label("[Persuade] Come on, what harm is there in telling me?", TagMatcher {});
    EXPECT_EQ(r.label, Label::Persuade);
    EXPECT_EQ(r.matched_tags, std::vector<std::string> { "Persuade" });
}

TEST(DetectLabel, HybridTagIsSimplified)
{
    const auto r = detect_label("[Persuade/Lie] I had nothing to do with it.", TagMatcher {});
    EXPECT_EQ(r.label, Label::Persuade);
    EXPECT_EQ(r.matched_tags, std::vector<std::string> { "Persuade" });
}

TEST(DetectLabel, UntaggedLine)
{
    const auto r = detect_label(kCzerka, TagMatcher {});
    EXPECT_EQ(r.label, Label::NonPersuade);
    EXPECT_TRUE(r.matched_tags.empty());
}

TEST(DetectLabel, VariantsAndNonMatches)
{
    const TagMatcher tags;
    EXPECT_EQ(detect_label("[PERSUADE] x", tags).label, Label::Persuade);
    EXPECT_EQ(detect_label("[ Persuasion ] x", tags).matched_tags, std::vector<std::string> { "Persuade" });
    EXPECT_EQ(detect_label("[Lie] x", tags).label, Label::NonPersuade);
    EXPECT_EQ(detect_label("I will persuade you.", tags).label, Label::NonPersuade);
    EXPECT_EQ(detect_label("", tags).label, Label::NonPersuade);
}

TEST(DetectLabel, CustomPatterns)
{
    const TagMatcher german({ R"(\[(Überreden)[^\]]*\])" });
    const auto r = detect_label("[Überreden] Vertrau mir.", german);
    EXPECT_EQ(r.label, Label::Persuade);
    EXPECT_THROW(TagMatcher({ "[unclosed" }), Error);
}

TEST(StripTags, Examples)
{
    EXPECT_EQ(strip_tags_and_markup("[Persuade] What other choice do you have?"), "What other choice do you have?");
    EXPECT_EQ(strip_tags_and_markup("Hello.</string>"), "Hello.");
    EXPECT_EQ(strip_tags_and_markup(""), "");
}

TEST(StripTags, NestedAndMixedMarkup)
{
    EXPECT_EQ(strip_tags_and_markup("[Persuade/Lie]   Fine.  <i>Really</i>\n[Lie]"), "Fine. Really");
    EXPECT_EQ(strip_tags_and_markup("[Per[Persuade]suade] ok"), "ok");
    EXPECT_EQ(strip_tags_and_markup("  \t "), "");
}

TEST(StripTags, OutputNeverMatchesTagPattern)
{
    const TagMatcher tags;
    for (const char* raw : { "[[Persuade]Persuade] a", "[Persuade][Persuasion] b", "<[Persuade]> c", "[Persuade" }) {
        const auto clean = strip_tags_and_markup(raw, tags);
        for (const auto& re : tags.regexes())
            EXPECT_FALSE(std::regex_search(clean, re)) << raw << " -> " << clean;
    }
}

TEST(FilterComments, Examples)
{
    const CommentDenylist denylist;
    auto result = filter_developer_comments(
        { line("de", 0, "DO NOT TRANSLATE — temp string"),
            line("de", 1, "Ihr werdet feststellen, dass ich jeder Sache sehr ergeben bin... wenn die Bezahlung stimmt."),
            line("de", 2, "Placeholder text") },
        denylist);
    ASSERT_EQ(result.kept.size(), 1u);
    EXPECT_EQ(result.kept[0].str_ref, 1u);
    ASSERT_EQ(result.dropped.size(), 2u);

    const CommentDenylist empty(std::vector<std::string> {});
    EXPECT_EQ(filter_developer_comments({ line("de", 0, "DO NOT TRANSLATE") }, empty).kept.size(), 1u);
}

TEST(Align, IntersectsStrRefs)
{
    PipelineConfig config;
    config.languages = { "en", "de" };
    std::map<std::string, std::vector<DialogLine>> per;
    for (StrRef r : { 1, 2, 3 })
        per["en"].push_back(line("en", r, "Line " + std::to_string(r) + "."));
    for (StrRef r : { 2, 3, 4 })
        per["de"].push_back(line("de", r, "Zeile " + std::to_string(r) + "."));
    const auto aligned = align(per, config);
    ASSERT_EQ(aligned.size(), 2u);
    EXPECT_EQ(aligned[0].str_ref, 2u);
    EXPECT_EQ(aligned[1].str_ref, 3u);
    EXPECT_EQ(aligned[0].texts.at("de"), "Zeile 2.");
}

TEST(Align, LabelComesFromPivot)
{
    PipelineConfig config;
    config.languages = { "en", "de" };
    std::map<std::string, std::vector<DialogLine>> per;
    per["en"].push_back(line("en", 0, "[Persuade] Trust me."));
    per["de"].push_back(line("de", 0, "Vertrau mir."));
    per["en"].push_back(line("en", 1, "Go away."));
    per["de"].push_back(line("de", 1, "[Persuasion] Geh weg."));
    const auto aligned = align(per, config);
    ASSERT_EQ(aligned.size(), 2u);
    EXPECT_EQ(aligned[0].label, Label::Persuade);
    EXPECT_EQ(aligned[1].label, Label::NonPersuade);
    EXPECT_EQ(aligned[1].texts.at("de"), "Geh weg.");
}

TEST(Align, SingleLanguageIsIdentityOverNonEmptyLines)
{
    PipelineConfig config;
    config.languages = { "en" };
    std::map<std::string, std::vector<DialogLine>> per;
    per["en"] = { line("en", 0, "A."), line("en", 1, "[Persuade]"), line("en", 2, "B."), line("en", 0, "C.", "h") };
    const auto aligned = align(per, config);
    ASSERT_EQ(aligned.size(), 3u);
    EXPECT_EQ(aligned[0].key(), (LineKey { "g", 0 }));
    EXPECT_EQ(aligned[1].key(), (LineKey { "g", 2 }));
    EXPECT_EQ(aligned[2].key(), (LineKey { "h", 0 }));
}

TEST(Align, Errors)
{
    PipelineConfig config;
    config.languages = { "en", "de" };
    std::map<std::string, std::vector<DialogLine>> per;
    per["en"] = { line("en", 0, "A."), line("en", 0, "B.") };
    per["de"] = { line("de", 0, "A.") };
    try {
        align(per, config);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateStrRef);
    }
    per.erase("de");
    per["en"].pop_back();
    try {
        align(per, config);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingLanguage);
    }
}

TEST(SentenceTokenize, Examples)
{
    EXPECT_EQ(sentence_tokenize(kCzerka, "en").size(), 2u);
    EXPECT_EQ(sentence_tokenize("You didn't see anything.", "en"),
        std::vector<std::string> { "You didn't see anything." });
    EXPECT_EQ(sentence_tokenize("Mr. Smith arrived. He left.", "en"),
        (std::vector<std::string> { "Mr. Smith arrived.", "He left." }));
    EXPECT_TRUE(sentence_tokenize("   ", "en").empty());
}

TEST(SentenceTokenize, EllipsisAndQuotes)
{
    EXPECT_EQ(sentence_tokenize(
                  "Ihr werdet feststellen, dass ich jeder Sache sehr ergeben bin... wenn die Bezahlung stimmt.", "de")
                  .size(),
        1u);
    EXPECT_EQ(sentence_tokenize("Wait... What was that?! \"Nothing.\" Fine.", "en"),
        (std::vector<std::string> { "Wait...", "What was that?!", "\"Nothing.\"", "Fine." }));
    EXPECT_EQ(sentence_tokenize("Ya voy. ¿Dónde está? ¡Aquí!", "es"),
        (std::vector<std::string> { "Ya voy.", "¿Dónde está?", "¡Aquí!" }));
    EXPECT_EQ(sentence_tokenize("Il est là… Ça va.", "fr").size(), 2u);
}

TEST(SentenceTokenize, LanguageSpecificAbbreviations)
{
    EXPECT_EQ(sentence_tokenize("Hr. Weber kommt. Er wartet.", "de").size(), 2u);
    EXPECT_EQ(sentence_tokenize("M. Dupont arrive. Il attend.", "fr").size(), 2u);
    EXPECT_EQ(sentence_tokenize("Sr. Gómez llega. Espera.", "es").size(), 2u);
    EXPECT_EQ(sentence_tokenize("Vale. ¿Sr. Gómez llega? «Dr. No» espera.", "es").size(), 3u);
    EXPECT_EQ(sentence_tokenize("Sig. Rossi arriva. Aspetta.", "it").size(), 2u);
    // without the German list "Hr." would end a sentence
    EXPECT_EQ(sentence_tokenize("Hr. Weber kommt.", "en").size(), 2u);
}

TEST(SentenceTokenize, ConcatenationReproducesInput)
{
    for (const std::string text : { kCzerka, std::string("A. B! C? D... E"), std::string("No terminal at all") }) {
        std::string joined;
        for (const auto& s : sentence_tokenize(text, "en"))
            joined += (joined.empty() ? "" : " ") + s;
        EXPECT_EQ(joined, text);
    }
}

TEST(Balance, SubsamplesToTargetFraction)
{
    const auto result = balance(synthetic_aligned(100, 1000), 0.2, 42);
    EXPECT_EQ(result.persuade, 100u);
    EXPECT_EQ(result.non_persuade_kept, 400u);
    EXPECT_EQ(result.lines.size(), 500u);
    EXPECT_FALSE(result.warning);
    std::size_t persuade = 0;
    for (const auto& l : result.lines)
        persuade += l.label == Label::Persuade;
    EXPECT_EQ(persuade, 100u);
    EXPECT_TRUE(std::is_sorted(result.lines.begin(), result.lines.end(),
        [](const auto& a, const auto& b) { return a.key() < b.key(); }));
}

TEST(Balance, EmptyClassIsAnError)
{
    try {
        balance(synthetic_aligned(0, 10), 0.2, 42);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyClass);
    }
    EXPECT_THROW(balance(synthetic_aligned(10, 0), 0.2, 42), Error);
}

TEST(Balance, AlreadyAtTargetKeepsEverything)
{
    const auto result = balance(synthetic_aligned(10, 10), 0.5, 42);
    EXPECT_EQ(result.lines.size(), 20u);
    EXPECT_TRUE(result.warning);
}

TEST(Balance, FloorFormula)
{
    EXPECT_EQ(balanced_non_persuade_count(100, 0.2), 400u);
    EXPECT_EQ(balanced_non_persuade_count(3, 0.2), 12u);
    EXPECT_EQ(balanced_non_persuade_count(7, 0.3), 16u);
    EXPECT_EQ(balanced_non_persuade_count(1, 0.7), 0u);
}

TEST(Balance, SeedChangesSelectionNotCounts)
{
    const auto a = balance(synthetic_aligned(50, 500), 0.2, 1);
    const auto b = balance(synthetic_aligned(50, 500), 0.2, 2);
    const auto a2 = balance(synthetic_aligned(50, 500), 0.2, 1);
    EXPECT_EQ(a.lines, a2.lines);
    EXPECT_EQ(a.lines.size(), b.lines.size());
    EXPECT_NE(a.lines, b.lines);
}

TEST(AssignSplits, SeventyFifteenFifteen)
{
    const auto splits = assign_splits(synthetic_aligned(20, 80), { 0.70, 0.15, 0.15 }, 42);
    auto sizes = split_sizes(splits);
    EXPECT_EQ(sizes[Split::Train], 70u);
    EXPECT_EQ(sizes[Split::Validation], 15u);
    EXPECT_EQ(sizes[Split::Test], 15u);
}

TEST(AssignSplits, RemainderGoesToTrain)
{
    auto sizes = split_sizes(assign_splits(synthetic_aligned(2, 5), { 0.70, 0.15, 0.15 }, 42));
    EXPECT_EQ(sizes[Split::Train], 5u);
    EXPECT_EQ(sizes[Split::Validation], 1u);
    EXPECT_EQ(sizes[Split::Test], 1u);
}

TEST(AssignSplits, DeterministicAndOrderIndependent)
{
    auto lines = synthetic_aligned(30, 70);
    const auto first = assign_splits(lines, { 0.70, 0.15, 0.15 }, 42);
    std::reverse(lines.begin(), lines.end());
    EXPECT_EQ(assign_splits(lines, { 0.70, 0.15, 0.15 }, 42), first);
    EXPECT_NE(assign_splits(lines, { 0.70, 0.15, 0.15 }, 43), first);
}

TEST(AssignSplits, EmptyInput)
{
    EXPECT_THROW(assign_splits({}, { 0.70, 0.15, 0.15 }, 42), Error);
}

TEST(PortableRng, KnownSequenceIsStable)
{
    // pins the derived stream so a library change cannot silently move splits
    PortableRng a(42, RandomStream::Split);
    PortableRng b(42, RandomStream::Split);
    PortableRng c(42, RandomStream::Balance);
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    std::seed_seq seq { 42u, 0u, 2u };
    std::mt19937_64 reference(seq);
    EXPECT_EQ(x, reference());
}

TEST(PortableRng, BelowStaysInRangeAndCoversIt)
{
    PortableRng rng(7, RandomStream::Balance);
    std::vector<int> seen(6, 0);
    for (int i = 0; i < 6000; ++i) {
        const auto v = rng.below(6);
        ASSERT_LT(v, 6u);
        ++seen[v];
    }
    for (int count : seen)
        EXPECT_GT(count, 800);
}

TEST(PipelineConfig, Validation)
{
    PipelineConfig config;
    EXPECT_NO_THROW(config.validate());
    auto bad = config;
    bad.pivot_language = "xx";
    EXPECT_THROW(bad.validate(), Error);
    bad = config;
    bad.split_fractions = { 0.5, 0.3, 0.3 };
    EXPECT_THROW(bad.validate(), Error);
    bad = config;
    bad.persuade_fraction = 1.0;
    EXPECT_THROW(bad.validate(), Error);
    bad = config;
    bad.languages = { "en", "en" };
    EXPECT_THROW(bad.validate(), Error);
}
