#include "league/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "league/intel.hpp"
#include "league/parallel.hpp"
#include "league/latex.hpp"
#include "league/text.hpp"

namespace league::run {

using Json = nlohmann::ordered_json;

namespace {

class StageClock {
public:
    void start(const std::string& stage) {
        stage_ = stage;
        begin_ = std::chrono::steady_clock::now();
    }
    void stop() {
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
        timings_.emplace_back(stage_, s);
    }
    Json to_json() const {
        Json doc = Json::object();
        double total = 0.0;
        for (const auto& [stage, seconds] : timings_) {
            doc[stage] = seconds;
            total += seconds;
        }
        doc["total"] = total;
        return doc;
    }

private:
    std::string stage_;
    std::chrono::steady_clock::time_point begin_;
    std::vector<std::pair<std::string, double>> timings_;
};

[[noreturn]] void stage_fail(const std::string& stage, const Error& e) {
    throw Error(e.code(), "[" + stage + "] " + e.what());
}

std::string dataset_slug(const std::string& dataset) {
    std::string slug;
    for (char c : dataset) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!slug.empty() && slug.back() != '-') {
            slug.push_back('-');
        }
    }
    while (!slug.empty() && slug.back() == '-') slug.pop_back();
    return slug.empty() ? "dataset" : slug;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

struct ParsedPaper {
    harvest::PaperRecord record;
    std::vector<latex::TableBlock> blocks;
};

std::vector<std::string> discover_datasets(const ParsedPaper& paper, llm::Gateway& gateway,
                                           const prompts::PromptLibrary& prompts) {
    std::ostringstream material;
    material << "Title: " << paper.record.title << "\n";
    for (const auto& b : paper.blocks) {
        material << "Table " << b.index_in_paper << " caption: " << b.caption << "\n";
        if (!b.description.empty()) material << "Description: " << b.description << "\n";
    }
    llm::ChatRequest request = gateway.make_request();
    request.system_prompt = prompts.get("discover_datasets");
    long long budget = gateway.profile().max_input_tokens -
                       text::count_tokens(request.system_prompt) - 128;
    request.user_prompt = text::truncate_tokens(material.str(), budget);

    Json doc = llm::complete_json(gateway, request, {"datasets"});
    std::vector<std::string> datasets;
    if (doc["datasets"].is_array()) {
        for (const auto& d : doc["datasets"]) {
            if (d.is_string() && !text::trim(d.get<std::string>()).empty()) {
                datasets.push_back(text::trim(d.get<std::string>()));
            }
        }
    }
    return datasets;
}

std::unique_ptr<llm::Provider> make_provider(const llm::ProviderProfile& profile,
                                             const std::filesystem::path& script) {
    if (profile.kind == llm::ProviderKind::scripted_mock) {
        return std::make_unique<llm::ScriptedMockProvider>(
            llm::ScriptedMockProvider::from_file(script));
    }
    return std::make_unique<llm::LiveHttpProvider>(profile);
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& config, harvest::HttpTransport* transport) {
    config.validate();
    auto prompt_lib = prompts::PromptLibrary::load(config.prompt_dir);
    auto metric_config = config.metric_config_path.empty()
                             ? board::MetricConfig::builtin()
                             : board::MetricConfig::load(config.metric_config_path);

    Cache cache(config.cache_dir);
    llm::UsageLedger ledger;

    auto extraction_inner = make_provider(config.extraction_profile, config.extraction_script);
    auto judge_inner = make_provider(config.judge_profile, config.judge_script);
    CachingProvider extraction_cached(*extraction_inner, cache);
    CachingProvider judge_cached(*judge_inner, cache);
    llm::Gateway extraction(extraction_cached, config.extraction_profile, ledger);
    llm::Gateway judge(judge_cached, config.judge_profile, ledger);

    std::unique_ptr<harvest::LiveTransport> owned_transport;
    if (transport == nullptr && config.source_kind == harvest::SourceKind::arxiv) {
        require(!config.offline, ErrorCode::config_error, "--offline forbids live fetches");
        owned_transport = std::make_unique<harvest::LiveTransport>();
        transport = owned_transport.get();
    }

    StageClock clock;
    RunArtifacts artifacts;
    artifacts.output_dir = config.output_dir;

    // ---- Stage I: collection and filtering -----------------------------------
    clock.start("stage1_collect");
    std::vector<harvest::PaperRecord> records;
    try {
        harvest::SourceQuery query;
        query.topic = config.topic;
        query.cutoff_date = config.cutoff_date;
        query.max_results = config.max_results;
        query.source_kind = config.source_kind;
        query.fixture_dir = config.fixture_dir;

        if (config.source_kind == harvest::SourceKind::arxiv) {
            const std::string key =
                Cache::key_of("search", "arxiv\x1f" + config.topic + "\x1f" +
                                            std::to_string(config.max_results));
            if (auto hit = cache.get("search", key)) {
                records = harvest::parse_atom_feed(*hit);
                if (static_cast<int>(records.size()) > config.max_results) {
                    records.resize(static_cast<size_t>(config.max_results));
                }
            } else {
                auto response =
                    transport->get(harvest::arxiv_query_url(config.topic, config.max_results));
                require(response.status == 200, ErrorCode::source_unreachable,
                        "search returned HTTP " + std::to_string(response.status));
                cache.put("search", key, response.body);
                records = harvest::parse_atom_feed(response.body);
                if (static_cast<int>(records.size()) > config.max_results) {
                    records.resize(static_cast<size_t>(config.max_results));
                }
            }
        } else {
            records = harvest::search_papers(query, transport);
        }

        records = harvest::filter_by_date(records, config.cutoff_date);
        records = harvest::filter_by_relevance(records, config.topic, config.relevance_threshold);
        if (records.empty()) {
            raise(ErrorCode::no_papers_survived, "filters emptied the corpus");
        }

        for (auto& record : records) {
            if (record.origin == harvest::SourceKind::arxiv) {
                const std::string key = Cache::key_of("fetch", record.paper_id);
                if (auto hit = cache.get("fetch", key)) {
                    record.latex_bundle = *hit;
                    record.fetch_status = harvest::FetchStatus::fetched;
                    continue;
                }
                record = harvest::fetch_source(std::move(record), transport);
                if (record.fetch_status == harvest::FetchStatus::fetched) {
                    cache.put("fetch", key, *record.latex_bundle, "bin");
                }
            } else {
                record = harvest::fetch_source(std::move(record), transport);
            }
        }
    } catch (const Error& e) {
        clock.stop();
        stage_fail("stage1_collect", e);
    }
    clock.stop();

    const long long p_total = static_cast<long long>(records.size());
    long long p_new = 0;
    for (const auto& r : records) {
        if (r.published >= config.cutoff_date) ++p_new;
    }

    // ---- Stage II: parsing and dataset discovery -------------------------------
    clock.start("stage2_tables");
    std::vector<ParsedPaper> papers;
    std::vector<board::DatasetMention> mentions;
    try {
        for (auto& record : records) {
            if (record.fetch_status != harvest::FetchStatus::fetched) continue;
            std::string bundle = record.source_files.size() > 1
                                     ? latex::assemble_bundle(record.source_files)
                                     : *record.latex_bundle;
            std::vector<latex::Section> sections;
            try {
                sections = latex::split_sections(bundle);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::no_sections) throw;
                // fall back to whole-document scope
            }
            auto experiment_sections = latex::select_experiment_sections(sections);
            std::vector<std::string> warnings;
            auto blocks = latex::extract_tables(bundle, experiment_sections, &warnings);
            if (blocks.empty()) continue;
            papers.push_back({std::move(record), std::move(blocks)});
        }
        for (const auto& paper : papers) {
            for (const auto& dataset : discover_datasets(paper, extraction, prompt_lib)) {
                mentions.push_back({paper.record.paper_id, dataset});
            }
        }
    } catch (const Error& e) {
        clock.stop();
        stage_fail("stage2_tables", e);
    }
    clock.stop();

    // ---- Stage III: census and digesting ----------------------------------------
    clock.start("stage3_digest");
    board::DatasetCensus census;
    std::map<std::string, std::vector<board::DigestRecord>> digests_by_dataset;
    try {
        require(!mentions.empty(), ErrorCode::no_papers_survived,
                "no dataset mentions discovered");
        census = board::census_datasets(mentions, config.k_datasets);

        std::set<std::pair<std::string, std::string>> wanted;
        for (const auto& m : mentions) wanted.insert({m.paper_id, m.dataset});

        struct DigestTask {
            std::string dataset;
            const ParsedPaper* paper;
        };
        std::vector<DigestTask> tasks;
        for (const auto& dataset : census.selected) {
            for (const auto& paper : papers) {
                if (wanted.count({paper.record.paper_id, dataset})) tasks.push_back({dataset, &paper});
            }
        }

        // one digest call per (paper, dataset) pair, parallel up to the
        // gateway cap; results land by index so output order is stable
        std::vector<std::optional<board::DigestRecord>> results(tasks.size());
        parallel::for_each_index(
            tasks.size(), config.extraction_profile.max_concurrent, [&](size_t i) {
                const auto& task = tasks[i];
                try {
                    auto digest = intel::digest_paper(task.paper->blocks, task.paper->record.title,
                                                      task.dataset, extraction, prompt_lib);
                    board::DigestRecord rec;
                    rec.digest = std::move(digest);
                    rec.paper_id = task.paper->record.paper_id;
                    rec.published = task.paper->record.published;
                    results[i] = std::move(rec);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::no_main_result_table) throw;
                    // skipped digests count against Coverage
                }
            });
        for (size_t i = 0; i < tasks.size(); ++i) {
            if (!results[i]) continue;
            write_file(config.output_dir / "digests" /
                           (results[i]->paper_id + "__" + dataset_slug(tasks[i].dataset) + ".json"),
                       results[i]->digest.to_json().dump(2) + "\n");
            digests_by_dataset[tasks[i].dataset].push_back(std::move(*results[i]));
        }
    } catch (const Error& e) {
        clock.stop();
        stage_fail("stage3_digest", e);
    }
    clock.stop();

    // ---- Stage IV: candidates, refinement, evaluation, selection -----------------
    clock.start("stage4_boards");
    try {
        std::vector<quality::QualityReport> selected_reports;
        for (const auto& dataset : census.selected) {
            const auto& digests = digests_by_dataset[dataset];
            if (digests.empty()) continue;

            quality::CandidateSet candidates;
            candidates.iters = config.iters;
            for (int iter = 1; iter <= config.iters; ++iter) {
                const std::string tag = "candidate " + std::to_string(iter) + "/" +
                                        std::to_string(config.iters);
                auto quintuples = board::build_quintuples(digests);
                auto unified = board::unify_metrics(quintuples, dataset, metric_config);
                auto b = board::prune_sparse_columns(std::move(unified.board));
                b = board::rank_rows(std::move(b), board::pick_primary_metric(b));
                b = board::truncate_rows(std::move(b), config.items);
                b = quality::refine_board(std::move(b), judge, prompt_lib, tag);

                quality::QualityReport report;
                std::set<std::string> contributing;
                for (const auto& row : b.rows) contributing.insert(row.paper_id);
                report.p_used = static_cast<long long>(contributing.size());
                report.p_total = p_total;
                report.p_new = p_new;
                report.coverage = quality::score_coverage(report.p_used, report.p_total);
                report.latest = quality::score_latest(report.p_new, report.p_total);
                report.structure =
                    static_cast<double>(quality::score_structure(b, judge, prompt_lib, tag));
                report.multiaspect = (report.coverage + report.latest + report.structure) / 3.0;
                candidates.candidates.push_back({std::move(b), report});
            }

            const auto& best = quality::select_best(candidates);
            DatasetArtifact artifact;
            artifact.dataset = dataset;
            artifact.best_board = best.board;
            artifact.report = best.report;
            selected_reports.push_back(best.report);
            artifacts.datasets.push_back(std::move(artifact));
        }
        require(!artifacts.datasets.empty(), ErrorCode::no_papers_survived,
                "no dataset produced a board");

        const double multiaspect = quality::score_multiaspect(selected_reports);
        for (auto& d : artifacts.datasets) d.report.multiaspect = multiaspect;
    } catch (const Error& e) {
        clock.stop();
        stage_fail("stage4_boards", e);
    }
    clock.stop();

    // ---- artifacts ------------------------------------------------------------------
    for (const auto& d : artifacts.datasets) {
        const auto dir = config.output_dir / dataset_slug(d.dataset);
        write_file(dir / "board.md", board::render_markdown(d.best_board));
        write_file(dir / "board.json", d.best_board.to_json().dump(2) + "\n");
        write_file(dir / "report.json", d.report.to_json().dump(2) + "\n");
    }

    const auto cost = llm::estimate_cost(ledger, config.extraction_profile);
    Json summary = Json::object();
    summary["topic"] = config.topic;
    summary["cutoff"] = config.cutoff_date.to_string();
    summary["datasets"] = Json::array();
    for (const auto& d : artifacts.datasets) {
        Json entry = Json::object();
        entry["dataset"] = d.dataset;
        entry["items"] = d.best_board.items();
        entry["coverage"] = d.report.coverage;
        entry["latest"] = d.report.latest;
        entry["structure"] = d.report.structure;
        entry["multiaspect"] = d.report.multiaspect;
        summary["datasets"].push_back(std::move(entry));
    }
    summary["multiaspect"] = artifacts.datasets.front().report.multiaspect;
    summary["papers_total"] = p_total;
    summary["papers_new"] = p_new;
    summary["input_tokens"] = ledger.total_input();
    summary["output_tokens"] = ledger.total_output();
    summary["estimated_cost"] = cost.display();
    artifacts.summary = std::move(summary);

    artifacts.provider_calls = extraction_cached.upstream_calls() + judge_cached.upstream_calls();
    Json meta = Json::object();
    meta["provider_calls"] = artifacts.provider_calls;
    meta["ledger_entries"] = static_cast<long long>(ledger.size());
    meta["timings"] = clock.to_json();
    artifacts.run_meta = std::move(meta);

    emit_report(artifacts);
    return artifacts;
}

void emit_report(const RunArtifacts& artifacts) {
    write_file(artifacts.output_dir / "summary.json", artifacts.summary.dump(2) + "\n");
    write_file(artifacts.output_dir / "run_meta.json", artifacts.run_meta.dump(2) + "\n");

    std::ostringstream out;
    out << "topic: " << artifacts.summary["topic"].get<std::string>() << "\n";
    out << "cutoff: " << artifacts.summary["cutoff"].get<std::string>() << "\n\n";
    for (const auto& d : artifacts.summary["datasets"]) {
        out << d["dataset"].get<std::string>() << ": items=" << d["items"].get<int>()
            << " coverage=" << text::format_double(d["coverage"].get<double>())
            << " latest=" << text::format_double(d["latest"].get<double>())
            << " structure=" << text::format_double(d["structure"].get<double>())
            << " multiaspect=" << text::format_double(d["multiaspect"].get<double>()) << "\n";
    }
    out << "\ninput tokens: " << artifacts.summary["input_tokens"].get<long long>() << "\n";
    out << "output tokens: " << artifacts.summary["output_tokens"].get<long long>() << "\n";
    out << "estimated cost: " << artifacts.summary["estimated_cost"].get<std::string>() << "\n";
    out << "(wall-clock timings and call counts: run_meta.json)\n";
    write_file(artifacts.output_dir / "summary.txt", out.str());
}

}  // namespace league::run
