#include "league/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

namespace league::run {

using Json = nlohmann::ordered_json;

void RunConfig::validate() const {
    require(!text::trim(topic).empty(), ErrorCode::config_error, "topic is empty");
    require(cutoff_date.valid(), ErrorCode::config_error, "cutoff date is missing or invalid");
    require(k_datasets >= 1, ErrorCode::config_error, "k must be >= 1");
    require(items >= 1, ErrorCode::config_error, "items must be >= 1");
    require(iters >= 1, ErrorCode::config_error, "iters must be >= 1");
    require(max_results >= 1, ErrorCode::config_error, "max_results must be >= 1");
    require(relevance_threshold >= 0.0 && relevance_threshold <= 1.0, ErrorCode::config_error,
            "relevance threshold outside [0,1]");
    if (source_kind == harvest::SourceKind::fixture_dir) {
        require(std::filesystem::is_directory(fixture_dir), ErrorCode::config_error,
                "fixture_dir does not exist: " + fixture_dir.string());
    }
    if (offline) {
        require(extraction_profile.kind != llm::ProviderKind::live_http &&
                    judge_profile.kind != llm::ProviderKind::live_http,
                ErrorCode::config_error, "--offline forbids live providers");
        require(source_kind != harvest::SourceKind::arxiv, ErrorCode::config_error,
                "--offline forbids the live source");
    }
    if (extraction_profile.kind == llm::ProviderKind::scripted_mock) {
        require(std::filesystem::is_regular_file(extraction_script), ErrorCode::config_error,
                "mock provider needs a script file");
    }
    if (judge_profile.kind == llm::ProviderKind::scripted_mock) {
        require(std::filesystem::is_regular_file(judge_script), ErrorCode::config_error,
                "mock judge needs a script file");
    }
}

namespace {

llm::ProviderProfile parse_profile(const Json& doc, std::filesystem::path* script,
                                   const std::filesystem::path& base) {
    llm::ProviderProfile p;
    const std::string kind = doc.value("kind", "scripted_mock");
    if (kind == "live_http") p.kind = llm::ProviderKind::live_http;
    else if (kind == "scripted_mock") p.kind = llm::ProviderKind::scripted_mock;
    else raise(ErrorCode::config_error, "unknown provider kind '" + kind + "'");
    p.endpoint = doc.value("endpoint", "");
    p.model_name = doc.value("model", "");
    p.price_in_per_million = doc.value("input_per_million", 0.0);
    p.price_out_per_million = doc.value("output_per_million", 0.0);
    p.max_concurrent = doc.value("max_concurrent", 1);
    p.max_input_tokens = doc.value("max_input_tokens", 128000LL);
    p.temperature = doc.value("temperature", 0.3);
    p.max_output_tokens = doc.value("max_output_tokens", 4096LL);
    p.api_key_env = doc.value("api_key_env", "LEAGUE_API_KEY");
    if (doc.contains("script")) {
        *script = base / doc["script"].get<std::string>();
    }
    return p;
}

std::filesystem::path resolve(const Json& doc, const char* key,
                              const std::filesystem::path& base,
                              const std::filesystem::path& fallback = {}) {
    if (!doc.contains(key)) return fallback;
    std::filesystem::path p = doc[key].get<std::string>();
    return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::config_error, "cannot open config " + path.string());
    Json doc;
    try {
        doc = Json::parse(in, nullptr, true, true);  // comments allowed
    } catch (const std::exception& e) {
        raise(ErrorCode::config_error, "config parse failure: " + std::string(e.what()));
    }
    const std::filesystem::path base = path.parent_path();

    RunConfig c;
    c.topic = doc.value("topic", "");
    if (doc.contains("cutoff")) c.cutoff_date = Date::parse(doc["cutoff"].get<std::string>());
    c.k_datasets = doc.value("k", 5);
    c.items = doc.value("items", 20);
    c.iters = doc.value("iters", 3);
    c.max_results = doc.value("max_results", 100);
    c.relevance_threshold = doc.value("relevance_threshold", 0.5);
    c.offline = doc.value("offline", false);
    const std::string source = doc.value("source", "fixture_dir");
    if (source == "arxiv") c.source_kind = harvest::SourceKind::arxiv;
    else if (source == "fixture_dir") c.source_kind = harvest::SourceKind::fixture_dir;
    else raise(ErrorCode::config_error, "unknown source '" + source + "'");

    c.output_dir = resolve(doc, "out", base, "out");
    c.cache_dir = resolve(doc, "cache", base, "cache");
    c.fixture_dir = resolve(doc, "fixture_dir", base);
    c.prompt_dir = resolve(doc, "prompts", base);
    c.metric_config_path = resolve(doc, "metrics_config", base);
    c.price_sheet_path = resolve(doc, "prices", base);

    if (doc.contains("provider")) {
        c.extraction_profile = parse_profile(doc["provider"], &c.extraction_script, base);
    }
    if (doc.contains("judge")) {
        c.judge_profile = parse_profile(doc["judge"], &c.judge_script, base);
    } else {
        c.judge_profile = c.extraction_profile;
        c.judge_script = c.extraction_script;
    }
    if (!c.price_sheet_path.empty()) {
        apply_price_sheet(c.extraction_profile, c.price_sheet_path);
        apply_price_sheet(c.judge_profile, c.price_sheet_path);
    }
    return c;
}

void apply_price_sheet(llm::ProviderProfile& profile, const std::filesystem::path& sheet) {
    if (profile.model_name.empty()) return;
    std::ifstream in(sheet);
    require(in.good(), ErrorCode::config_error, "cannot open price sheet " + sheet.string());
    Json doc = Json::parse(in, nullptr, true, true);
    if (!doc.contains(profile.model_name)) return;
    const Json& entry = doc[profile.model_name];
    profile.price_in_per_million = entry.value("input_per_million", 0.0);
    profile.price_out_per_million = entry.value("output_per_million", 0.0);
}

}  // namespace league::run
