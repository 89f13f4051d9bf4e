#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "league/pipeline.hpp"

namespace {

int exit_code_for(const league::Error& e) {
    switch (e.code()) {
        case league::ErrorCode::config_error:
        case league::ErrorCode::precondition:
            return 2;
        case league::ErrorCode::provider_error:
        case league::ErrorCode::script_miss:
        case league::ErrorCode::context_overflow:
            return 3;
        case league::ErrorCode::no_papers_survived:
            return 4;
        default:
            return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"league: leaderboard generation from harvested papers"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the full pipeline");
    std::string config_path;
    std::string topic;
    std::string cutoff;
    std::string provider_model;
    std::string judge_model;
    std::string source;
    std::string out_dir;
    std::string cache_dir;
    int k = 0;
    int items = 0;
    int iters = 0;
    bool offline = false;

    run_cmd->add_option("--config", config_path, "run configuration file (JSON)")->required();
    run_cmd->add_option("--topic", topic, "research topic");
    run_cmd->add_option("--cutoff", cutoff, "date cutoff YYYY-MM-DD");
    run_cmd->add_option("--k", k, "number of datasets (top-K)");
    run_cmd->add_option("--items", items, "leaderboard length L");
    run_cmd->add_option("--iters", iters, "candidate iterations");
    run_cmd->add_option("--provider", provider_model, "extraction model name override");
    run_cmd->add_option("--judge", judge_model, "judge model name override");
    run_cmd->add_option("--source", source, "paper source: arxiv | fixture_dir");
    run_cmd->add_option("--out", out_dir, "artifact output directory");
    run_cmd->add_option("--cache", cache_dir, "cache directory");
    run_cmd->add_flag("--offline", offline, "forbid live provider and source calls");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = league::run::RunConfig::from_file(config_path);
        if (!topic.empty()) config.topic = topic;
        if (!cutoff.empty()) config.cutoff_date = league::Date::parse(cutoff);
        if (k > 0) config.k_datasets = k;
        if (items > 0) config.items = items;
        if (iters > 0) config.iters = iters;
        if (!provider_model.empty()) config.extraction_profile.model_name = provider_model;
        if (!judge_model.empty()) config.judge_profile.model_name = judge_model;
        if (!source.empty()) {
            if (source == "arxiv") config.source_kind = league::harvest::SourceKind::arxiv;
            else if (source == "fixture_dir") config.source_kind = league::harvest::SourceKind::fixture_dir;
            else throw league::Error(league::ErrorCode::config_error, "unknown source " + source);
        }
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (!cache_dir.empty()) config.cache_dir = cache_dir;
        if (offline) config.offline = true;

        auto artifacts = league::run::run_pipeline(config);
        std::cout << "wrote " << artifacts.datasets.size() << " leaderboard(s) to "
                  << artifacts.output_dir.string() << "\n";
        for (const auto& d : artifacts.datasets) {
            std::cout << "  " << d.dataset << ": " << d.best_board.items() << " rows\n";
        }
        return 0;
    } catch (const league::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
