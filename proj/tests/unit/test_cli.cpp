#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/cli.hpp"
#include "support/temp_dir.hpp"
#include "tlkcorpus/dataset_io.hpp"
#include "tlkcorpus/run_config.hpp"
#include "tlkcorpus/tlk_xml.hpp"

using namespace tlkcorpus;
using synth::run_command;
using synth::shell_quote;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TLKCORPUS_TEST_DATA;
const std::string kCli = TLKCORPUS_CLI;

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir))
        out[entry.path().filename().string()] = synth::read_text(entry.path());
    return out;
}

/// Whitespace-separated cells following `label` at the start of a line.
std::vector<std::string> row_values(const std::string& table, const std::string& label)
{
    std::istringstream lines(table);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(label, 0) != 0)
            continue;
        std::istringstream cells(line.substr(label.size()));
        std::vector<std::string> out;
        for (std::string cell; cells >> cell;)
            out.push_back(cell);
        return out;
    }
    return {};
}

fs::path synthetic_project(const synth::TempDir& tmp, std::uint64_t seed = 21, const std::string& extra = "")
{
    synth::Rng rng(seed);
    const auto in = synth::make_synthetic_inputs(rng, 2, 150);
    return synth::write_synthetic_project(in, tmp / "project", extra);
}

} // namespace

TEST(CliExtract, DumpsOneLinePerTextEntry)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli, "extract " + shell_quote((kData / "tlk" / "mixed.tlk").string()), tmp.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(line_count(r.out), 3u);
    const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
    EXPECT_EQ(first.at("str_ref"), 0);
    EXPECT_EQ(first.at("label"), "persuade");
    EXPECT_EQ(first.at("tags"), nlohmann::json::array({ "Persuade" }));
}

TEST(CliExtract, BadMagicFailsWithTypedMessage)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli, "extract " + shell_quote((kData / "tlk" / "bad_magic.tlk").string()), tmp.path());
    EXPECT_NE(r.exit_code, 0);
    EXPECT_NE(r.err.find("BadMagic"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(CliExtract, XmlInputIsDetected)
{
    synth::TempDir tmp;
    const auto table = parse_tlk(synth::read_text(kData / "tlk" / "mixed.tlk"));
    synth::write_text(tmp / "mixed.xml", "\n  " + render_tlk_xml(table));
    const auto binary = run_command(kCli, "extract " + shell_quote((kData / "tlk" / "mixed.tlk").string()), tmp.path());
    const auto xml = run_command(kCli, "extract " + shell_quote((tmp / "mixed.xml").string()), tmp.path());
    ASSERT_EQ(xml.exit_code, 0) << xml.err;
    EXPECT_EQ(xml.out, binary.out);
}

TEST(CliBuild, TwoRunsAreByteIdentical)
{
    synth::TempDir tmp;
    const auto cfg = synthetic_project(tmp);
    const auto a = run_command(kCli, "build " + shell_quote(cfg.string()) + " -o " + shell_quote((tmp / "a").string()), tmp.path());
    ASSERT_EQ(a.exit_code, 0) << a.err;
    const auto b = run_command(kCli, "build " + shell_quote(cfg.string()) + " -o " + shell_quote((tmp / "b").string()), tmp.path());
    ASSERT_EQ(b.exit_code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(directory_bytes(tmp / "a"), directory_bytes(tmp / "b"));
    EXPECT_EQ(directory_bytes(tmp / "a").size(), 16u);
}

TEST(CliBuild, OutputDirIsRelativeToConfig)
{
    synth::TempDir tmp;
    const auto cfg = synthetic_project(tmp);
    const auto r = run_command(kCli, "build " + shell_quote(cfg.string()), tmp.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(fs::exists(tmp / "project" / "corpus" / "manifest.json"));
}

TEST(CliBuild, MissingLanguageFileIsNamed)
{
    synth::TempDir tmp;
    const auto cfg = synthetic_project(tmp);
    fs::remove(tmp / "project" / "tables" / "game1.fr.tlk");
    const auto r = run_command(kCli, "build " + shell_quote(cfg.string()), tmp.path());
    EXPECT_NE(r.exit_code, 0);
    EXPECT_NE(r.err.find("\"fr\""), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("game1.fr.tlk"), std::string::npos) << r.err;
}

TEST(CliBuild, SeedChangesSplitsNotLabelCounts)
{
    synth::TempDir tmp;
    const auto cfg = synthetic_project(tmp);
    auto text = synth::read_text(cfg);
    ASSERT_EQ(run_command(kCli, "build " + shell_quote(cfg.string()) + " -o " + shell_quote((tmp / "a").string()), tmp.path()).exit_code, 0);
    const auto pos = text.find("seed = ");
    text.replace(pos, text.find('\n', pos) - pos, "seed = 4242");
    synth::write_text(cfg, text);
    ASSERT_EQ(run_command(kCli, "build " + shell_quote(cfg.string()) + " -o " + shell_quote((tmp / "b").string()), tmp.path()).exit_code, 0);
    const auto a = import_corpus(tmp / "a");
    const auto b = import_corpus(tmp / "b");
    EXPECT_EQ(a.manifest.line_counts, b.manifest.line_counts);
    EXPECT_EQ(a.manifest.split_line_counts, b.manifest.split_line_counts);
    std::map<LineKey, Split> split_a, split_b;
    for (const auto& r : a.records)
        split_a[r.key()] = r.split;
    for (const auto& r : b.records)
        split_b[r.key()] = r.split;
    EXPECT_NE(split_a, split_b);
}

TEST(CliStats, CountsAndTotalsRow)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli, "stats " + shell_quote((kData / "separable" / "corpus").string()), tmp.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto corpus = import_corpus(kData / "separable" / "corpus");
    std::size_t persuade = 0, other = 0;
    for (const auto& rec : corpus.records)
        (rec.label == Label::Persuade ? persuade : other)++;
    const auto expect_row = [&](const std::string& name) {
        const auto pos = r.out.find(name);
        ASSERT_NE(pos, std::string::npos) << r.out;
        std::istringstream row(r.out.substr(pos + name.size()));
        std::size_t p = 0, n = 0;
        row >> p >> n;
        EXPECT_EQ(p, persuade);
        EXPECT_EQ(n, other);
    };
    expect_row("\nen ");
    expect_row("Multilingual (total)");
}

TEST(CliStats, EmptyDirectoryFails)
{
    synth::TempDir tmp;
    fs::create_directories(tmp / "empty");
    const auto r = run_command(kCli, "stats " + shell_quote((tmp / "empty").string()), tmp.path());
    EXPECT_NE(r.exit_code, 0);
    EXPECT_NE(r.err.find("manifest"), std::string::npos);
}

TEST(CliTrain, SeparableReportAndRerunIdentical)
{
    synth::TempDir tmp;
    const auto corpus = shell_quote((kData / "separable" / "corpus").string());
    const std::string args = "train-baseline " + corpus + " --log-every 0 -m " + shell_quote((tmp / "m1.json").string())
        + " -r " + shell_quote((tmp / "r1.json").string());
    const auto first = run_command(kCli, args, tmp.path());
    ASSERT_EQ(first.exit_code, 0) << first.err;
    EXPECT_EQ(row_values(first.out, "Accuracy"), std::vector<std::string> { "1.00" }) << first.out;
    EXPECT_EQ(row_values(first.out, "Macro avg. (F1)"), std::vector<std::string> { "1.00" }) << first.out;
    const auto second = run_command(kCli,
        "train-baseline " + corpus + " --log-every 0 -m " + shell_quote((tmp / "m2.json").string()) + " -r "
            + shell_quote((tmp / "r2.json").string()),
        tmp.path());
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(synth::read_text(tmp / "m1.json"), synth::read_text(tmp / "m2.json"));
    EXPECT_EQ(synth::read_text(tmp / "r1.json"), synth::read_text(tmp / "r2.json"));

    const auto eval = run_command(kCli,
        "evaluate " + corpus + " -m " + shell_quote((tmp / "m1.json").string()) + " -r "
            + shell_quote((tmp / "e.json").string()),
        tmp.path());
    ASSERT_EQ(eval.exit_code, 0) << eval.err;
    EXPECT_EQ(eval.out, first.out);

    const auto rendered = run_command(kCli,
        "evaluate --render " + shell_quote((tmp / "r1.json").string()) + " " + shell_quote((tmp / "e.json").string()),
        tmp.path());
    ASSERT_EQ(rendered.exit_code, 0) << rendered.err;
    EXPECT_EQ(row_values(rendered.out, "Accuracy"), (std::vector<std::string> { "1.00", "1.00" })) << rendered.out;
}

TEST(CliTrain, AbsentLanguageFails)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli,
        "train-baseline " + shell_quote((kData / "separable" / "corpus").string()) + " -l fr -m "
            + shell_quote((tmp / "m.json").string()),
        tmp.path());
    EXPECT_NE(r.exit_code, 0);
    EXPECT_NE(r.err.find("\"fr\""), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(tmp / "m.json"));
}

TEST(CliDumpConfig, OutputParsesBackToDefaults)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli, "dump-config", tmp.path());
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(parse_run_config(r.out).pipeline, PipelineConfig {});
}

TEST(CliArgs, UnknownSubcommandFails)
{
    synth::TempDir tmp;
    EXPECT_NE(run_command(kCli, "frobnicate", tmp.path()).exit_code, 0);
    EXPECT_NE(run_command(kCli, "", tmp.path()).exit_code, 0);
}

TEST(CommittedCorpus, RebuildMatchesCommittedBytes)
{
    synth::TempDir tmp;
    const auto r = run_command(kCli,
        "build " + shell_quote((kData / "separable" / "separable.cfg").string()) + " -o "
            + shell_quote((tmp / "rebuilt").string()),
        tmp.path());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(directory_bytes(tmp / "rebuilt"), directory_bytes(kData / "separable" / "corpus"));
}
