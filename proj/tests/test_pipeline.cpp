#include <doctest.h>

#include <cstdlib>
#include <map>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "league/pipeline.hpp"
#include "league/harvest.hpp"

using namespace league;
using Json = nlohmann::ordered_json;

namespace {

run::RunConfig e2e_config(const std::filesystem::path& out, const std::filesystem::path& cache) {
    auto config = run::RunConfig::from_file(testutil::fixture_dir() / "e2e" / "league.json");
    config.output_dir = out;
    config.cache_dir = cache;
    return config;
}

// relative path -> bytes for every artifact file, minus the timing report
std::map<std::string, std::string> artifact_bytes(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto rel = std::filesystem::relative(entry.path(), dir).string();
        if (rel == "run_meta.json") continue;
        out[rel] = testutil::read_file(entry.path());
    }
    return out;
}

}  // namespace

TEST_CASE("run config loads from file with relative paths resolved") {
    auto config = run::RunConfig::from_file(testutil::fixture_dir() / "e2e" / "league.json");
    CHECK(config.topic == "semi-supervised medical image segmentation");
    CHECK(config.cutoff_date == Date{2024, 1, 1});
    CHECK(config.k_datasets == 1);
    CHECK(config.items == 20);
    CHECK(config.iters == 2);
    CHECK(config.offline);
    CHECK(std::filesystem::is_directory(config.fixture_dir));
    CHECK(std::filesystem::is_regular_file(config.extraction_script));
    CHECK(std::filesystem::is_regular_file(config.judge_script));
    // price sheet resolves the extraction model's prices
    CHECK(config.extraction_profile.price_in_per_million == doctest::Approx(2.5));
    CHECK(config.extraction_profile.price_out_per_million == doctest::Approx(10.0));
    config.validate();
}

TEST_CASE("empty fixture dir surfaces NoPapersSurvived with a stage tag") {
    testutil::TempDir out("pl_out");
    testutil::TempDir cache("pl_cache");
    testutil::TempDir empty("pl_empty");
    auto config = e2e_config(out.path(), cache.path());
    config.fixture_dir = empty.path();
    try {
        run::run_pipeline(config);
        FAIL("expected NoPapersSurvived");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_papers_survived);
        CHECK(std::string(e.what()).find("[stage1_collect]") != std::string::npos);
    }
}

TEST_CASE("offline end-to-end run produces the LA board and caches every call") {
    testutil::TempDir out1("pl_out1");
    testutil::TempDir out2("pl_out2");
    testutil::TempDir cache("pl_cache2");

    auto first = run::run_pipeline(e2e_config(out1.path(), cache.path()));
    REQUIRE(first.datasets.size() == 1);
    CHECK(first.datasets[0].dataset == "LA");
    CHECK(first.datasets[0].best_board.items() == 20);
    CHECK(first.provider_calls > 0);

    // emitted artifacts exist
    CHECK(std::filesystem::is_regular_file(out1.path() / "la" / "board.md"));
    CHECK(std::filesystem::is_regular_file(out1.path() / "la" / "board.json"));
    CHECK(std::filesystem::is_regular_file(out1.path() / "la" / "report.json"));
    CHECK(std::filesystem::is_regular_file(out1.path() / "summary.json"));
    CHECK(std::filesystem::is_regular_file(out1.path() / "summary.txt"));
    CHECK(std::filesystem::is_regular_file(out1.path() / "run_meta.json"));

    // scores follow from the planted corpus: every paper contributes a row
    const auto& report = first.datasets[0].report;
    CHECK(report.p_total == 20);
    CHECK(report.p_used == 20);
    CHECK(report.coverage == doctest::Approx(5.0));
    CHECK(report.latest == doctest::Approx(5.0));
    CHECK(report.structure == doctest::Approx(4.0));
    CHECK(report.multiaspect == doctest::Approx((5.0 + 5.0 + 4.0) / 3.0));

    auto second = run::run_pipeline(e2e_config(out2.path(), cache.path()));
    CHECK(second.provider_calls == 0);  // cache contract
    CHECK(artifact_bytes(out1.path()) == artifact_bytes(out2.path()));

    // ledger totals replay identically
    CHECK(first.summary["input_tokens"] == second.summary["input_tokens"]);
    CHECK(first.summary["output_tokens"] == second.summary["output_tokens"]);
    CHECK(first.summary["estimated_cost"] == second.summary["estimated_cost"]);
}

TEST_CASE("digest artifacts are persisted per (paper, dataset) with schema keys") {
    testutil::TempDir out("pl_out3");
    testutil::TempDir cache("pl_cache3");
    run::run_pipeline(e2e_config(out.path(), cache.path()));

    auto digest_path = out.path() / "digests" / "ep-01__la.json";
    REQUIRE(std::filesystem::is_regular_file(digest_path));
    auto doc = Json::parse(testutil::read_file(digest_path));
    CHECK(doc.contains("selected table's core results"));
    CHECK(doc["dataset"] == "LA");
    CHECK(doc["title"] == "Dual Consistency Regularization for Semi-Supervised Left Atrium "
                          "Segmentation");
}

TEST_CASE("cli runs the pipeline and maps error classes to exit codes") {
    testutil::TempDir work("cli");
    auto config_path = testutil::fixture_dir() / "e2e" / "league.json";
    std::string base = std::string(LEAGUE_CLI) + " run --config " + config_path.string();

    std::string ok_cmd = base + " --out " + (work.path() / "out").string() + " --cache " +
                         (work.path() / "cache").string() + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(ok_cmd.c_str())) == 0);

    std::string bad_config = std::string(LEAGUE_CLI) + " run --config /nonexistent.json >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(bad_config.c_str())) == 2);

    std::string empty_cmd = base + " --out " + (work.path() / "out2").string() + " --cache " +
                            (work.path() / "cache2").string() + " --topic \"completely unrelated topic nonsense\" >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(empty_cmd.c_str())) == 4);
}

TEST_CASE("cli maps provider failures (script miss) to exit code 3") {
    testutil::TempDir work("cli3");
    // a config whose mock script has no entries: the first provider call misses
    testutil::write_file(work.path() / "empty_script.json", "[]\n");
    Json config = Json::parse(testutil::read_file(testutil::fixture_dir() / "e2e" / "league.json"));
    config["provider"]["script"] = (work.path() / "empty_script.json").string();
    config["judge"]["script"] = (work.path() / "empty_script.json").string();
    config["fixture_dir"] = (testutil::fixture_dir() / "e2e" / "papers").string();
    config["prompts"] = (testutil::fixture_dir() / ".." / ".." / "assets" / "prompts").string();
    config["metrics_config"] = (testutil::fixture_dir() / ".." / ".." / "config" / "metrics.json").string();
    config["prices"] = (testutil::fixture_dir() / ".." / ".." / "config" / "prices.json").string();
    testutil::write_file(work.path() / "league.json", config.dump(2));

    std::string cmd = std::string(LEAGUE_CLI) + " run --config " +
                      (work.path() / "league.json").string() + " --out " +
                      (work.path() / "out").string() + " --cache " +
                      (work.path() / "cache").string() + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
}

TEST_CASE("search -> date filter -> relevance filter output never exceeds max_results") {
    harvest::SourceQuery q;
    q.topic = "question answering";
    q.cutoff_date = Date{2020, 1, 1};
    q.max_results = 4;
    q.source_kind = harvest::SourceKind::fixture_dir;
    q.fixture_dir = testutil::fixture_dir() / "corpus_basic";

    auto records = harvest::search_papers(q);
    records = harvest::filter_by_date(records, Date{2024, 1, 1});
    records = harvest::filter_by_relevance(records, q.topic, 0.1);
    CHECK(records.size() <= 4);
}

TEST_CASE("a failed stage leaves the cache consistent; the resume skips completed work") {
    testutil::TempDir out("resume_out");
    testutil::TempDir cache("resume_cache");

    // first attempt: the judge script is empty, so stage 4 fails after
    // stages 1-3 populated the cache
    auto broken = e2e_config(out.path(), cache.path());
    testutil::write_file(out.path() / "empty_judge.json", "[]\n");
    broken.judge_script = out.path() / "empty_judge.json";
    try {
        run::run_pipeline(broken);
        FAIL("expected ScriptMiss from the judge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::script_miss);
        CHECK(std::string(e.what()).find("[stage4_boards]") != std::string::npos);
    }
    // partial artifacts survive
    CHECK(std::filesystem::is_regular_file(out.path() / "digests" / "ep-01__la.json"));

    // resume with the real judge: extraction work is fully served by the cache
    auto fixed = e2e_config(out.path(), cache.path());
    auto artifacts = run::run_pipeline(fixed);
    CHECK(artifacts.datasets.size() == 1);
    // only the judge calls (refine + structure per iteration) hit upstream
    CHECK(artifacts.provider_calls == 2 * fixed.iters);
}
