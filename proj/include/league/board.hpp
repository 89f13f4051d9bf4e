#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "league/date.hpp"
#include "league/intel.hpp"

namespace league::board {

enum class Direction { higher_better, lower_better, unknown };
enum class Unit { ratio, percent, absolute };

struct ParsedValue {
    double value = 0.0;
    std::optional<double> sigma;  // the ± spread, kept as an auxiliary field
    bool percent_mark = false;    // raw text carried a % sign
};

// Accepts decorations: arrows, %, ±spread, significance stars. Returns
// nullopt for placeholders ("-", "N/A", empty).
std::optional<ParsedValue> parse_metric_value(std::string_view raw);

struct MetricColumn {
    std::string canonical_name;         // display name (first-seen raw spelling)
    std::vector<std::string> aliases;   // observed raw variants
    Direction direction = Direction::unknown;
    Unit unit = Unit::absolute;
    bool direction_flagged = false;     // direction unknown, ordering not guaranteed
};

// The five-field record one paper contributes to one dataset's board.
struct Quintuple {
    std::string title;
    std::string dataset;
    std::vector<std::pair<std::string, std::string>> metrics_raw;  // name -> value text
    struct Settings {
        std::string model_size;
        std::string training_strategy;
        std::vector<std::pair<std::string, std::string>> hyperparameters;
    } settings;
    struct Source {
        std::string paper_id;
        Date published{};
        std::string github;
    } source;
};

struct Row {
    int rank = 0;
    std::string title;
    std::string setting_summary;
    Date published{};
    std::string paper_id;
    std::string github;
    std::vector<std::optional<double>> values;  // aligned with columns
    std::vector<std::optional<double>> sigmas;
};

struct LeaderboardTable {
    std::string dataset;
    std::vector<MetricColumn> columns;
    std::vector<Row> rows;

    int items() const { return static_cast<int>(rows.size()); }
    // rank contiguity, column/value alignment, alias uniqueness
    void check_invariants() const;
    nlohmann::ordered_json to_json() const;
    static LeaderboardTable from_json(const nlohmann::ordered_json& doc);
};

struct DatasetMention {
    std::string paper_id;
    std::string dataset;
};

struct DatasetCensus {
    std::vector<std::pair<std::string, int>> counts;  // sorted by count desc, name asc
    int k = 0;
    std::vector<std::string> selected;
};

// Frequency census; a paper counts once per dataset; top-K by count with
// lexicographic tie-break.
DatasetCensus census_datasets(std::span<const DatasetMention> mentions, int k);

struct DigestRecord {
    intel::TableDigest digest;
    std::string paper_id;
    Date published{};
};

DatasetCensus census_from_digests(const std::vector<DigestRecord>& digests, int k);

// One quintuple per digest; duplicate titles keep the later published record.
std::vector<Quintuple> build_quintuples(const std::vector<DigestRecord>& digests_for_dataset);

// Alias clusters and direction lookups, shipped as editable JSON config.
struct MetricConfig {
    std::vector<std::vector<std::string>> alias_groups;  // normalized spellings
    std::vector<std::string> higher_better;
    std::vector<std::string> lower_better;

    static MetricConfig load(const std::filesystem::path& path);
    static MetricConfig builtin();
};

// Case-fold, strip arrows/spaces/hyphens/underscores.
std::string normalize_metric_name(std::string_view name);

struct UnifyResult {
    std::vector<MetricColumn> columns;
    LeaderboardTable board;  // rows in quintuple order, ranks 1..n
    std::vector<std::string> warnings;
};

// Clusters aliases, picks one unit per column (majority representation,
// percent<->ratio conversion), infers direction from glyphs or the config.
UnifyResult unify_metrics(const std::vector<Quintuple>& quintuples, const std::string& dataset,
                          const MetricConfig& config);

// Drops columns with missing fraction strictly above 0.6, always keeping at
// least the densest column.
LeaderboardTable prune_sparse_columns(LeaderboardTable board,
                                      std::vector<std::string>* warnings = nullptr);

// Retained column with the fewest missing values; ties by column order.
std::string pick_primary_metric(const LeaderboardTable& board);

// Sorts by the primary metric respecting direction; missing values sink;
// ties by published date (newer first) then title; ranks reassigned 1..n.
LeaderboardTable rank_rows(LeaderboardTable board, const std::string& primary_metric);

// Keeps the top `items` rows (the leaderboard length L).
LeaderboardTable truncate_rows(LeaderboardTable board, int items);

// GitHub-flavored table: No. | Title | Experimental Setting | metrics...
// Missing values render as "-". Deterministic bytes.
std::string render_markdown(const LeaderboardTable& board);

struct MarkdownTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Parses the renderer's own output (round-trip checks and refinement).
MarkdownTable parse_markdown(const std::string& markdown);

}  // namespace league::board
