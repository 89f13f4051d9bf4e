#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "league/board.hpp"
#include "league/cache.hpp"
#include "league/config.hpp"
#include "league/quality.hpp"

namespace league::run {

struct DatasetArtifact {
    std::string dataset;
    board::LeaderboardTable best_board;
    quality::QualityReport report;
};

struct RunArtifacts {
    std::vector<DatasetArtifact> datasets;
    nlohmann::ordered_json summary;   // deterministic: scores, tokens, cost
    nlohmann::ordered_json run_meta;  // wall times and upstream call counts
    std::filesystem::path output_dir;
    long long provider_calls = 0;  // actual upstream invocations this run
};

// Stage I -> IV end to end. Every provider call goes through the cache, so a
// re-run with unchanged inputs performs zero upstream calls. Failures carry a
// [stage] tag; partial artifacts stay on disk.
RunArtifacts run_pipeline(const RunConfig& config,
                          harvest::HttpTransport* transport = nullptr);

// Writes summary.json, summary.txt and run_meta.json under the output dir.
void emit_report(const RunArtifacts& artifacts);

}  // namespace league::run
