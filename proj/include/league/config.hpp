#pragma once

#include <filesystem>
#include <string>

#include "league/date.hpp"
#include "league/harvest.hpp"
#include "league/llm.hpp"

namespace league::run {

struct RunConfig {
    std::string topic;
    Date cutoff_date{};
    int k_datasets = 5;
    int items = 20;  // leaderboard length L
    int iters = 3;
    int max_results = 100;
    double relevance_threshold = 0.5;
    harvest::SourceKind source_kind = harvest::SourceKind::fixture_dir;
    bool offline = false;

    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path fixture_dir;
    std::filesystem::path prompt_dir;
    std::filesystem::path metric_config_path;  // optional; builtin table otherwise
    std::filesystem::path price_sheet_path;    // optional

    llm::ProviderProfile extraction_profile;
    llm::ProviderProfile judge_profile;
    std::filesystem::path extraction_script;  // scripted_mock only
    std::filesystem::path judge_script;

    void validate() const;
    static RunConfig from_file(const std::filesystem::path& path);
};

// Looks up prices for `model_name` in a price-sheet JSON
// {"<model>": {"input_per_million": x, "output_per_million": y}, ...}
void apply_price_sheet(llm::ProviderProfile& profile, const std::filesystem::path& sheet);

}  // namespace league::run
