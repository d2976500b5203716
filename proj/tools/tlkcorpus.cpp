#include <iostream>

#include <CLI11.hpp>

#include "tlkcorpus/commands.hpp"

using namespace tlkcorpus;

namespace {

Split parse_split(const std::string& name)
{
    const auto split = split_from_string(name);
    if (!split)
        throw Error(ErrorCode::InvalidConfig, "unknown split \"" + name + "\"");
    return *split;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "tlkcorpus: build persuasion corpora from game talk tables and evaluate classifiers on them", "tlkcorpus" };
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand");

    ExtractOptions extract;
    std::string extract_codepage;
    auto* extract_cmd = app.add_subcommand("extract", "Dump the text entries of one talk table with detected labels");
    extract_cmd->add_option("input", extract.input, "Talk table (.tlk binary or XML form)")->required();
    extract_cmd->add_option("-l,--language", extract.language, "Language code written into the dump")
        ->capture_default_str();
    extract_cmd->add_option("-c,--codepage", extract_codepage,
        "Text codepage (utf-8, iso-8859-1, windows-1250, windows-1251, windows-1252); default by language id");
    auto* extract_out = extract_cmd->add_option("-o,--output", "Write the dump here instead of stdout")->type_name("PATH");

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build a labeled, aligned, split corpus from a run configuration");
    build_cmd->add_option("config", build.config, "Run configuration file")->required();
    auto* build_out = build_cmd->add_option("-o,--output", "Override output_dir from the configuration")->type_name("PATH");

    std::filesystem::path stats_dir;
    auto* stats_cmd = app.add_subcommand("stats", "Print per-language sentence counts of a corpus");
    stats_cmd->add_option("corpus", stats_dir, "Corpus directory")->required();

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train-baseline", "Train the n-gram logistic regression baseline and report on the test split");
    train_cmd->add_option("corpus", train.corpus_dir, "Corpus directory")->required();
    train_cmd->add_option("-l,--language", train.language, "Language to train on")->capture_default_str();
    train_cmd->add_option("--learning-rate", train.hyperparams.learning_rate, "Gradient descent step size")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train.hyperparams.epochs, "Full-batch epochs")->capture_default_str();
    train_cmd->add_option("--l2", train.hyperparams.l2, "L2 regularization strength")->capture_default_str();
    train_cmd->add_option("--seed", train.hyperparams.seed, "Seed recorded with the model")->capture_default_str();
    train_cmd->add_option("-m,--model", train.model_out, "Where to write the model")->capture_default_str();
    auto* train_report = train_cmd->add_option("-r,--report", "Also write the report as JSON")->type_name("PATH");
    train_cmd->add_option("--log-every", train.log_every, "Log losses every N epochs to stderr (0 = never)")
        ->capture_default_str();

    EvaluateOptions evaluate;
    std::string evaluate_split = "test";
    std::vector<std::filesystem::path> report_files;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a saved baseline model, or render saved metrics reports");
    eval_cmd->add_option("-m,--model", evaluate.model, "Model file from train-baseline");
    eval_cmd->add_option("corpus", evaluate.corpus_dir, "Corpus directory");
    eval_cmd->add_option("-l,--language", evaluate.language, "Language to evaluate")->capture_default_str();
    eval_cmd->add_option("-s,--split", evaluate_split, "Split to evaluate (train, validation, test)")
        ->capture_default_str();
    auto* eval_report = eval_cmd->add_option("-r,--report", "Also write the report as JSON")->type_name("PATH");
    auto* eval_render = eval_cmd->add_option("--render", report_files,
        "Render these report JSON files side by side instead of scoring a model");

    app.add_subcommand("dump-config", "Print the default run configuration with comments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract_cmd->parsed()) {
            if (!extract_codepage.empty()) {
                extract.codepage = codepage_from_name(extract_codepage);
                if (!extract.codepage)
                    throw Error(ErrorCode::InvalidConfig, "unknown codepage \"" + extract_codepage + "\"");
            }
            if (extract_out->count())
                extract.output = extract_out->as<std::string>();
            cmd_extract(extract, std::cout, std::cerr);
        } else if (build_cmd->parsed()) {
            if (build_out->count())
                build.output_dir = build_out->as<std::string>();
            cmd_build(build, std::cout, std::cerr);
        } else if (stats_cmd->parsed()) {
            cmd_stats(stats_dir, std::cout);
        } else if (train_cmd->parsed()) {
            if (train_report->count())
                train.report_out = train_report->as<std::string>();
            cmd_train_baseline(train, std::cout, std::cerr);
        } else if (eval_cmd->parsed()) {
            if (eval_render->count()) {
                cmd_render_reports(report_files, std::cout);
            } else {
                if (evaluate.model.empty() || evaluate.corpus_dir.empty())
                    throw Error(ErrorCode::InvalidConfig, "evaluate needs --model and a corpus directory (or --render)");
                evaluate.split = parse_split(evaluate_split);
                if (eval_report->count())
                    evaluate.report_out = eval_report->as<std::string>();
                cmd_evaluate(evaluate, std::cout);
            }
        } else {
            cmd_dump_config(std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
