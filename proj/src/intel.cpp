#include "league/intel.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

namespace league::intel {

using Json = nlohmann::ordered_json;

std::string class_schema_label(TableClass c) {
    switch (c) {
        case TableClass::main_result: return "main-result/comparison";
        case TableClass::ablation: return "ablation";
        case TableClass::hyper_parameter: return "hyper-parameter";
        case TableClass::other: return "others";
    }
    return "others";
}

std::optional<TableClass> parse_class_label(std::string_view label) {
    std::string l = text::lower(label);
    if (l.find("main") != std::string::npos || l.find("comparison") != std::string::npos) {
        return TableClass::main_result;
    }
    if (l.find("ablation") != std::string::npos) return TableClass::ablation;
    if (l.find("hyper") != std::string::npos) return TableClass::hyper_parameter;
    if (l.find("other") != std::string::npos) return TableClass::other;
    return std::nullopt;
}

TableClass fold_to_three_way(TableClass c) {
    return c == TableClass::hyper_parameter ? TableClass::other : c;
}

std::string entity_label_name(EntityLabel l) {
    switch (l) {
        case EntityLabel::method: return "method";
        case EntityLabel::dataset: return "dataset";
        case EntityLabel::metric: return "metric";
        case EntityLabel::setting: return "setting";
        case EntityLabel::none: return "none";
    }
    return "none";
}

std::optional<EntityLabel> parse_entity_label(std::string_view name) {
    std::string l = text::lower(text::trim(name));
    if (l == "method" || l == "methods") return EntityLabel::method;
    if (l == "dataset" || l == "datasets") return EntityLabel::dataset;
    if (l == "metric" || l == "metrics") return EntityLabel::metric;
    if (l == "setting" || l == "settings") return EntityLabel::setting;
    if (l == "none" || l == "result" || l == "value" || l.empty()) return EntityLabel::none;
    return std::nullopt;
}

// ---- digest schema ------------------------------------------------------------

namespace {

constexpr const char* kKeyTitle = "title";
constexpr const char* kKeyCount = "number of tables";
constexpr const char* kKeyClassification = "classification of tables";
constexpr const char* kKeySelected = "selected table's index";
constexpr const char* kKeyMetrics = "metrics";
constexpr const char* kKeyTableMetrics = "selected table's metrics";
constexpr const char* kKeyCoreResults = "selected table's core results";
constexpr const char* kKeySettingModel = "selected table's settings (model & size)";
constexpr const char* kKeySettingStrategy = "selected table's settings (training strategy)";
constexpr const char* kKeySettingHyper = "selected table's settings (hyperparameter selection)";
constexpr const char* kKeyGithub = "github";

int as_int(const Json& v, const char* what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        const std::string s = text::trim(v.get<std::string>());
        int out = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc() && ptr == s.data() + s.size()) return out;
    }
    raise(ErrorCode::schema_violation, std::string(what) + " is not an integer");
}

std::string as_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

std::vector<std::pair<std::string, std::string>> as_string_map(const Json& v) {
    std::vector<std::pair<std::string, std::string>> out;
    if (!v.is_object()) return out;
    for (const auto& [key, value] : v.items()) {
        std::string rendered;
        if (value.is_string()) rendered = value.get<std::string>();
        else if (value.is_number_integer()) rendered = std::to_string(value.get<long long>());
        else if (value.is_number()) rendered = text::format_double(value.get<double>());
        else rendered = value.dump();
        out.emplace_back(key, rendered);
    }
    return out;
}

}  // namespace

void TableDigest::validate() const {
    require(static_cast<int>(classification.size()) == number_of_tables,
            ErrorCode::schema_violation, "classification size != number of tables");
    require(selected_index >= 0 && selected_index < number_of_tables, ErrorCode::schema_violation,
            "selected table index out of range");
    require(classification[static_cast<size_t>(selected_index)] == TableClass::main_result,
            ErrorCode::schema_violation, "selected table is not a main-result table");
    require(!core_results.empty(), ErrorCode::schema_violation, "core results are empty");
    require(!dataset.empty(), ErrorCode::precondition, "digest lacks a dataset");
}

Json TableDigest::to_json() const {
    Json classification_doc = Json::object();
    for (size_t i = 0; i < classification.size(); ++i) {
        classification_doc[std::to_string(i)] = class_schema_label(classification[i]);
    }
    Json core = Json::object();
    for (const auto& [k, v] : core_results) core[k] = v;
    Json hyper = Json::object();
    for (const auto& [k, v] : hyperparameters) hyper[k] = v;

    Json doc = Json::object();
    doc[kKeyTitle] = title;
    doc[kKeyCount] = number_of_tables;
    doc[kKeyClassification] = classification_doc;
    doc[kKeySelected] = selected_index;
    doc[kKeyMetrics] = metrics_text;
    doc[kKeyTableMetrics] = selected_table_metrics;
    doc[kKeyCoreResults] = core;
    doc[kKeySettingModel] = model_size;
    doc[kKeySettingStrategy] = training_strategy;
    doc[kKeySettingHyper] = hyper;
    doc[kKeyGithub] = github;
    doc["dataset"] = dataset;
    return doc;
}

TableDigest TableDigest::from_json(const Json& doc, std::string dataset) {
    TableDigest d;
    d.dataset = std::move(dataset);
    d.title = latex::strip_latex_markup(as_text(doc.at(kKeyTitle)));
    d.number_of_tables = as_int(doc.at(kKeyCount), kKeyCount);

    const Json& classes = doc.at(kKeyClassification);
    require(classes.is_object(), ErrorCode::schema_violation,
            "classification of tables is not a dict");
    std::map<int, TableClass> by_index;
    bool any_main = false;
    for (const auto& [key, value] : classes.items()) {
        int idx = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
        require(ec == std::errc() && ptr == key.data() + key.size(), ErrorCode::schema_violation,
                "non-integer table index '" + key + "'");
        auto parsed = parse_class_label(as_text(value));
        require(parsed.has_value(), ErrorCode::schema_violation,
                "unknown table class '" + as_text(value) + "'");
        by_index[idx] = *parsed;
        any_main = any_main || *parsed == TableClass::main_result;
    }

    const Json& selected = doc.at(kKeySelected);
    bool no_selection = selected.is_null() ||
                        (selected.is_number_integer() && selected.get<int>() < 0) ||
                        (selected.is_string() && text::trim(selected.get<std::string>()) == "-1");
    if (!any_main || no_selection) {
        raise(ErrorCode::no_main_result_table,
              "no main-result table for dataset '" + d.dataset + "'");
    }
    d.selected_index = as_int(selected, kKeySelected);

    d.classification.resize(by_index.size(), TableClass::other);
    int expect = 0;
    for (const auto& [idx, cls] : by_index) {
        require(idx == expect, ErrorCode::schema_violation,
                "table indexes are not contiguous from 0");
        d.classification[static_cast<size_t>(idx)] = cls;
        ++expect;
    }

    d.metrics_text = latex::strip_latex_markup(as_text(doc.at(kKeyMetrics)));
    d.selected_table_metrics = latex::strip_latex_markup(as_text(doc.at(kKeyTableMetrics)));
    for (auto& [k, v] : as_string_map(doc.at(kKeyCoreResults))) {
        d.core_results.emplace_back(latex::strip_latex_markup(k), latex::strip_latex_markup(v));
    }
    d.model_size = latex::strip_latex_markup(as_text(doc.at(kKeySettingModel)));
    d.training_strategy = latex::strip_latex_markup(as_text(doc.at(kKeySettingStrategy)));
    for (auto& [k, v] : as_string_map(doc.at(kKeySettingHyper))) {
        d.hyperparameters.emplace_back(latex::strip_latex_markup(k), latex::strip_latex_markup(v));
    }
    if (doc.contains(kKeyGithub)) d.github = text::trim(as_text(doc.at(kKeyGithub)));
    d.validate();
    return d;
}

// ---- prompt rendering -----------------------------------------------------------

std::string render_block_for_prompt(const latex::TableBlock& block) {
    std::ostringstream out;
    out << "Table " << block.index_in_paper << ":\n";
    if (!block.caption.empty()) out << "Caption: " << block.caption << "\n";
    for (const auto& row : block.grid) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << " | ";
            out << row[i];
        }
        out << "\n";
    }
    if (!block.description.empty()) out << "Description: " << block.description << "\n";
    return out.str();
}

// ---- operations ------------------------------------------------------------------

TableClass classify_table(const latex::TableBlock& block, llm::Gateway& gateway,
                          const prompts::PromptLibrary& prompts, const IntelOptions& options,
                          std::vector<std::string>* warnings) {
    require(!block.caption.empty() || !block.grid.empty(), ErrorCode::precondition,
            "table block has neither caption nor grid");

    llm::ChatRequest request = gateway.make_request();
    request.system_prompt = prompts.render(
        "classify_table",
        {{"EXEMPLARS", options.one_shot ? prompts.get("classify_exemplars") : std::string()}});
    request.user_prompt = render_block_for_prompt(block);

    auto completion = gateway.complete(request);
    if (auto parsed = parse_class_label(completion.text)) return *parsed;

    request.user_prompt +=
        "\n\nAnswer with exactly one of: main-result/comparison, ablation, hyper-parameter, "
        "others.";
    completion = gateway.complete(request);
    if (auto parsed = parse_class_label(completion.text)) return *parsed;

    if (warnings) {
        warnings->push_back("unparseable class label '" + completion.text + "', using others");
    }
    return TableClass::other;
}

TableDigest digest_paper(const std::vector<latex::TableBlock>& blocks, const std::string& title,
                         const std::string& dataset, llm::Gateway& gateway,
                         const prompts::PromptLibrary& prompts) {
    require(!blocks.empty(), ErrorCode::precondition, "no table blocks to digest");
    require(!text::trim(dataset).empty(), ErrorCode::precondition, "dataset is empty");

    std::ostringstream article;
    article << "Title: " << title << "\n\n";
    for (const auto& b : blocks) article << render_block_for_prompt(b) << "\n";

    llm::ChatRequest request = gateway.make_request();
    request.system_prompt = prompts.render("extract_digest", {{"SPECIFIED DATASET", dataset}});

    // keep the prompt under the input cap: the article material is cut to the
    // remaining token budget (re-ask corrections need a little headroom)
    long long budget = gateway.profile().max_input_tokens -
                       text::count_tokens(request.system_prompt) - 128;
    request.user_prompt = prompts.render(
        "extract_digest_user",
        {{"ARTICLE", text::truncate_tokens(article.str(), budget)},
         {"SPECIFIED DATASET", dataset}});

    static const std::vector<std::string> kRequiredKeys = {
        kKeyTitle,        kKeyCount,        kKeyClassification, kKeySelected,
        kKeyMetrics,      kKeyTableMetrics, kKeyCoreResults,    kKeySettingModel,
        kKeySettingStrategy, kKeySettingHyper,
    };

    // one provider round trip on the happy path; a single re-ask on shape or
    // schema failures
    std::string correction;
    for (int attempt = 0; attempt < 2; ++attempt) {
        llm::ChatRequest round = request;
        round.user_prompt += correction;
        auto completion = gateway.complete(round);
        try {
            Json doc = llm::parse_json_payload(completion.text, kRequiredKeys);
            return TableDigest::from_json(doc, dataset);
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::no_json_found:
                case ErrorCode::missing_keys:
                case ErrorCode::schema_violation:
                    correction =
                        "\n\nYour previous reply was rejected (" + std::string(e.what()) +
                        "). Return only a JSON object following the requested format exactly.";
                    break;
                default:
                    throw;  // NoMainResultTable and provider failures surface as-is
            }
        }
    }
    raise(ErrorCode::schema_violation,
          "digest for '" + title + "' (" + dataset + ") failed schema validation after re-ask");
}

std::vector<std::vector<EntityLabel>> tag_table_entities(const latex::TableBlock& block,
                                                         llm::Gateway& gateway,
                                                         const prompts::PromptLibrary& prompts) {
    require(!block.grid.empty(), ErrorCode::precondition, "empty grid");
    const size_t rows = block.grid.size();
    const size_t cols = block.grid[0].size();
    for (const auto& r : block.grid) {
        require(r.size() == cols, ErrorCode::precondition, "grid is not rectangular");
    }

    llm::ChatRequest request = gateway.make_request();
    request.system_prompt = prompts.get("tag_entities");
    request.user_prompt = render_block_for_prompt(block);

    auto is_numeric_cell = [](const std::string& cell) {
        std::string t = text::trim(cell);
        if (t.empty()) return false;
        char* end = nullptr;
        std::strtod(t.c_str(), &end);
        while (end && *end && (std::isspace(static_cast<unsigned char>(*end)) || *end == '%' ||
                               *end == '*' || (*end & 0x80))) {
            ++end;  // tolerate %, significance stars, and arrow glyph bytes
        }
        return end && *end == '\0' && end != t.c_str();
    };

    std::string correction;
    for (int attempt = 0; attempt < 2; ++attempt) {
        llm::ChatRequest round = request;
        round.user_prompt += correction;
        auto completion = gateway.complete(round);

        try {
            Json doc = llm::parse_json_payload(completion.text, {"labels"});
            const Json& labels = doc["labels"];
            require(labels.is_array() && labels.size() == rows, ErrorCode::schema_violation,
                    "label grid row count mismatch");
            std::vector<std::vector<EntityLabel>> out(rows);
            for (size_t r = 0; r < rows; ++r) {
                require(labels[r].is_array() && labels[r].size() == cols,
                        ErrorCode::schema_violation, "label grid column count mismatch");
                out[r].resize(cols, EntityLabel::none);
                for (size_t c = 0; c < cols; ++c) {
                    auto parsed = parse_entity_label(as_text(labels[r][c]));
                    require(parsed.has_value(), ErrorCode::schema_violation,
                            "unknown entity label '" + as_text(labels[r][c]) + "'");
                    out[r][c] = is_numeric_cell(block.grid[r][c]) ? EntityLabel::none : *parsed;
                }
            }
            return out;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::schema_violation && e.code() != ErrorCode::no_json_found &&
                e.code() != ErrorCode::missing_keys) {
                throw;
            }
            correction = "\n\nReturn only JSON: {\"labels\": [[...]]} with exactly " +
                         std::to_string(rows) + " rows of " + std::to_string(cols) +
                         " labels each (method/dataset/metric/setting/none).";
        }
    }
    raise(ErrorCode::schema_violation, "entity label grid shape mismatch after re-ask");
}

PrfReport score_prf(const std::vector<LabeledItem>& predicted,
                    const std::vector<LabeledItem>& gold) {
    std::map<std::string, std::string> pred_by_id;
    std::map<std::string, std::string> gold_by_id;
    for (const auto& item : predicted) {
        require(pred_by_id.emplace(item.id, item.label).second, ErrorCode::alignment_error,
                "duplicate predicted id " + item.id);
    }
    for (const auto& item : gold) {
        require(gold_by_id.emplace(item.id, item.label).second, ErrorCode::alignment_error,
                "duplicate gold id " + item.id);
    }
    require(pred_by_id.size() == gold_by_id.size(), ErrorCode::alignment_error,
            "predicted and gold item counts differ");
    for (const auto& [id, label] : pred_by_id) {
        require(gold_by_id.count(id) > 0, ErrorCode::alignment_error,
                "predicted id " + id + " not in gold");
    }

    std::set<std::string> classes;
    for (const auto& [id, label] : gold_by_id) classes.insert(label);
    for (const auto& [id, label] : pred_by_id) classes.insert(label);

    PrfReport report;
    long long sum_tp = 0;
    long long sum_fp = 0;
    long long sum_fn = 0;
    for (const auto& cls : classes) {
        ClassPrf c;
        for (const auto& [id, gold_label] : gold_by_id) {
            const std::string& pred_label = pred_by_id.at(id);
            if (pred_label == cls && gold_label == cls) ++c.tp;
            else if (pred_label == cls) ++c.fp;
            else if (gold_label == cls) ++c.fn;
        }
        c.precision = c.tp + c.fp == 0 ? 0.0 : 100.0 * c.tp / static_cast<double>(c.tp + c.fp);
        c.recall = c.tp + c.fn == 0 ? 0.0 : 100.0 * c.tp / static_cast<double>(c.tp + c.fn);
        c.f1 = c.precision + c.recall == 0.0
                   ? 0.0
                   : 2.0 * c.precision * c.recall / (c.precision + c.recall);
        sum_tp += c.tp;
        sum_fp += c.fp;
        sum_fn += c.fn;
        report.per_class[cls] = c;
    }
    report.micro_precision =
        sum_tp + sum_fp == 0 ? 0.0 : 100.0 * sum_tp / static_cast<double>(sum_tp + sum_fp);
    report.micro_recall =
        sum_tp + sum_fn == 0 ? 0.0 : 100.0 * sum_tp / static_cast<double>(sum_tp + sum_fn);
    report.micro_f1 = report.micro_precision + report.micro_recall == 0.0
                          ? 0.0
                          : 2.0 * report.micro_precision * report.micro_recall /
                                (report.micro_precision + report.micro_recall);
    return report;
}

}  // namespace league::intel
