#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "league/latex.hpp"
#include "league/llm.hpp"
#include "league/prompts.hpp"

namespace league::intel {

enum class TableClass { main_result, ablation, hyper_parameter, other };

// Schema labels: main-result/comparison, ablation, hyper-parameter, others.
std::string class_schema_label(TableClass c);
std::optional<TableClass> parse_class_label(std::string_view label);

// Fold to the 3-way evaluation granularity (hyper_parameter counts as other).
TableClass fold_to_three_way(TableClass c);

// Per-paper extraction result mirroring the provider JSON schema.
struct TableDigest {
    std::string title;
    int number_of_tables = 0;
    std::vector<TableClass> classification;  // index -> class, contiguous 0..n-1
    int selected_index = -1;
    std::string metrics_text;            // metrics named in the prose
    std::string selected_table_metrics;  // metrics named in the selected table
    std::vector<std::pair<std::string, std::string>> core_results;  // metric -> value text
    std::string model_size;
    std::string training_strategy;
    std::vector<std::pair<std::string, std::string>> hyperparameters;
    std::string github;
    std::string dataset;

    void validate() const;
    nlohmann::ordered_json to_json() const;  // schema keys, bit-exact
    static TableDigest from_json(const nlohmann::ordered_json& doc, std::string dataset);
};

enum class EntityLabel { method, dataset, metric, setting, none };

std::string entity_label_name(EntityLabel l);
std::optional<EntityLabel> parse_entity_label(std::string_view name);

struct IntelOptions {
    bool one_shot = true;  // include the per-class exemplars in classification prompts
};

// Single-table classification (the standalone path; digest_paper embeds
// classification in its one round trip).
TableClass classify_table(const latex::TableBlock& block, llm::Gateway& gateway,
                          const prompts::PromptLibrary& prompts, const IntelOptions& options = {},
                          std::vector<std::string>* warnings = nullptr);

// One provider round trip per (paper, dataset): census, classification,
// selection, and extraction together.
TableDigest digest_paper(const std::vector<latex::TableBlock>& blocks, const std::string& title,
                         const std::string& dataset, llm::Gateway& gateway,
                         const prompts::PromptLibrary& prompts);

// One label per cell; numeric result cells are forced to none.
std::vector<std::vector<EntityLabel>> tag_table_entities(const latex::TableBlock& block,
                                                         llm::Gateway& gateway,
                                                         const prompts::PromptLibrary& prompts);

struct LabeledItem {
    std::string id;
    std::string label;
};

struct ClassPrf {
    double precision = 0.0;  // percentages
    double recall = 0.0;
    double f1 = 0.0;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
};

struct PrfReport {
    std::map<std::string, ClassPrf> per_class;
    double micro_precision = 0.0;
    double micro_recall = 0.0;
    double micro_f1 = 0.0;
};

// Standard P/R/F1 per class plus micro average, reported as percentages.
PrfReport score_prf(const std::vector<LabeledItem>& predicted,
                    const std::vector<LabeledItem>& gold);

// Plain-text rendering of a table block for prompts (index, caption, grid,
// description).
std::string render_block_for_prompt(const latex::TableBlock& block);

}  // namespace league::intel
