#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "league/board.hpp"
#include "league/text.hpp"

using namespace league;
using board::DatasetMention;
using board::DigestRecord;
using board::Direction;
using board::LeaderboardTable;
using board::Quintuple;

namespace {

DigestRecord make_digest(const std::string& title, const std::string& dataset,
                         std::vector<std::pair<std::string, std::string>> core,
                         Date published = Date{2024, 6, 1}, const std::string& paper_id = "") {
    DigestRecord rec;
    rec.digest.title = title;
    rec.digest.dataset = dataset;
    rec.digest.number_of_tables = 1;
    rec.digest.classification = {intel::TableClass::main_result};
    rec.digest.selected_index = 0;
    rec.digest.core_results = std::move(core);
    rec.digest.model_size = "V-Net";
    rec.digest.training_strategy = "semi-supervised";
    rec.paper_id = paper_id.empty() ? "id-" + title : paper_id;
    rec.published = published;
    return rec;
}

board::MetricConfig metric_config() {
    return board::MetricConfig::load(testutil::config_dir() / "metrics.json");
}

LeaderboardTable board_from(const std::vector<Quintuple>& quintuples,
                            const std::string& dataset = "LA") {
    return board::unify_metrics(quintuples, dataset, metric_config()).board;
}

// random board generator for the property suites
LeaderboardTable random_board(std::mt19937& rng, int max_rows = 12, int max_cols = 5) {
    std::vector<DigestRecord> digests;
    int rows = 1 + static_cast<int>(rng() % max_rows);
    int cols = 1 + static_cast<int>(rng() % max_cols);
    for (int r = 0; r < rows; ++r) {
        std::vector<std::pair<std::string, std::string>> core;
        for (int c = 0; c < cols; ++c) {
            if (rng() % 4 == 0) continue;  // missing cell
            double v = static_cast<double>(rng() % 10000) / 10000.0;
            core.emplace_back("M" + std::to_string(c), text::format_double(v));
        }
        Date d{2023 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 12),
               1 + static_cast<int>(rng() % 28)};
        digests.push_back(make_digest("Paper |" + std::to_string(r), "DS", std::move(core), d));
    }
    auto quintuples = board::build_quintuples(digests);
    return board_from(quintuples, "DS");
}

}  // namespace

TEST_CASE("census: three papers on one dataset") {
    std::vector<DatasetMention> mentions = {{"p1", "LA"}, {"p2", "LA"}, {"p3", "LA"}};
    auto census = board::census_datasets(mentions, 1);
    REQUIRE(census.counts.size() == 1);
    CHECK(census.counts[0] == std::pair<std::string, int>{"LA", 3});
    CHECK(census.selected == std::vector<std::string>{"LA"});
}

TEST_CASE("census: tie resolved lexicographically") {
    std::vector<DatasetMention> mentions;
    for (int i = 0; i < 5; ++i) mentions.push_back({"pa" + std::to_string(i), "B"});
    for (int i = 0; i < 5; ++i) mentions.push_back({"pb" + std::to_string(i), "A"});
    for (int i = 0; i < 2; ++i) mentions.push_back({"pc" + std::to_string(i), "C"});
    auto census = board::census_datasets(mentions, 1);
    CHECK(census.selected == std::vector<std::string>{"A"});
}

TEST_CASE("census: a paper counts once per dataset") {
    std::vector<DatasetMention> mentions = {{"p1", "LA"}, {"p1", "LA"}, {"p2", "LA"}};
    auto census = board::census_datasets(mentions, 1);
    CHECK(census.counts[0].second == 2);
}

TEST_CASE("census equals a brute-force frequency sort on 40 synthetic digests (oracle)") {
    std::mt19937 rng(37);
    const std::vector<std::string> names = {"LA", "LIVE", "KonIQ-10K", "HotpotQA", "Pancreas-CT",
                                            "BraTS", "ACDC"};
    std::vector<DatasetMention> mentions;
    for (int i = 0; i < 40; ++i) {
        mentions.push_back({"p" + std::to_string(i), names[rng() % names.size()]});
    }
    auto census = board::census_datasets(mentions, 5);

    std::map<std::string, std::set<std::string>> oracle;
    for (const auto& m : mentions) oracle[m.dataset].insert(m.paper_id);
    std::vector<std::pair<std::string, int>> sorted;
    for (auto& [d, ps] : oracle) sorted.emplace_back(d, static_cast<int>(ps.size()));
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    sorted.resize(std::min<size_t>(5, sorted.size()));
    std::vector<std::string> expected;
    for (auto& [d, c] : sorted) expected.push_back(d);
    CHECK(census.selected == expected);
}

TEST_CASE("census rejects empty input") {
    try {
        board::census_datasets({}, 3);
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::empty_input);
    }
}

TEST_CASE("build_quintuples: one digest becomes one quintuple with identical fields") {
    auto digests = std::vector<DigestRecord>{
        make_digest("Alpha", "LA", {{"Dice", "0.91"}, {"95HD", "6.3"}})};
    auto quintuples = board::build_quintuples(digests);
    REQUIRE(quintuples.size() == 1);
    CHECK(quintuples[0].title == "Alpha");
    CHECK(quintuples[0].dataset == "LA");
    CHECK(quintuples[0].metrics_raw.size() == 2);
    CHECK(quintuples[0].settings.model_size == "V-Net");
    CHECK(quintuples[0].source.published == Date{2024, 6, 1});
}

TEST_CASE("build_quintuples dedups same title keeping the later published record") {
    auto digests = std::vector<DigestRecord>{
        make_digest("Same Title", "LA", {{"Dice", "0.90"}}, Date{2024, 3, 1}, "v1"),
        make_digest("Same Title", "LA", {{"Dice", "0.93"}}, Date{2024, 9, 1}, "v2"),
    };
    auto quintuples = board::build_quintuples(digests);
    REQUIRE(quintuples.size() == 1);
    CHECK(quintuples[0].source.paper_id == "v2");
    CHECK(quintuples[0].metrics_raw[0].second == "0.93");
}

TEST_CASE("parse_metric_value accepts decorations") {
    auto v = board::parse_metric_value("0.9383");
    REQUIRE(v.has_value());
    CHECK(v->value == doctest::Approx(0.9383));
    CHECK_FALSE(v->percent_mark);

    auto pct = board::parse_metric_value("95.2%");
    REQUIRE(pct.has_value());
    CHECK(pct->value == doctest::Approx(95.2));
    CHECK(pct->percent_mark);

    auto pm = board::parse_metric_value("12.3±0.4");
    REQUIRE(pm.has_value());
    CHECK(pm->value == doctest::Approx(12.3));
    REQUIRE(pm->sigma.has_value());
    CHECK(*pm->sigma == doctest::Approx(0.4));

    auto arrow = board::parse_metric_value("0.9376↑");
    REQUIRE(arrow.has_value());
    CHECK(arrow->value == doctest::Approx(0.9376));

    CHECK_FALSE(board::parse_metric_value("-").has_value());
    CHECK_FALSE(board::parse_metric_value("N/A").has_value());
    CHECK_FALSE(board::parse_metric_value("").has_value());
    CHECK_FALSE(board::parse_metric_value("TBD").has_value());
}

TEST_CASE("unify: 50% and 0.5 become identical after normalization") {
    auto digests = std::vector<DigestRecord>{
        make_digest("P1", "LA", {{"Dice", "50%"}}),
        make_digest("P2", "LA", {{"Dice", "0.5"}}),
    };
    auto result = board::unify_metrics(board::build_quintuples(digests), "LA", metric_config());
    REQUIRE(result.board.columns.size() == 1);
    REQUIRE(result.board.rows.size() == 2);
    CHECK(*result.board.rows[0].values[0] == doctest::Approx(0.5));
    CHECK(*result.board.rows[1].values[0] == doctest::Approx(0.5));
}

TEST_CASE("unify: SRCC and srcc-with-arrow share one higher-better column") {
    auto digests = std::vector<DigestRecord>{
        make_digest("P1", "LIVE", {{"SRCC", "0.91"}}),
        make_digest("P2", "LIVE", {{"srcc↑", "0.93"}}),
    };
    auto result = board::unify_metrics(board::build_quintuples(digests), "LIVE", metric_config());
    REQUIRE(result.board.columns.size() == 1);
    CHECK(result.board.columns[0].direction == Direction::higher_better);
    CHECK(result.board.columns[0].aliases.size() == 2);
}

TEST_CASE("unify: planted alias variants cluster per the manifest (oracle)") {
    // 12 quintuples with Dice/DSC and HD/95HD/HD95 variants; the manifest says
    // two columns: dice-group and hd-group
    std::vector<DigestRecord> digests;
    const char* dice_names[] = {"Dice", "DSC", "Dice", "DSC", "Dice", "Dice",
                                "DSC",  "Dice", "DSC", "Dice", "Dice", "DSC"};
    const char* hd_names[] = {"HD", "95HD", "HD95", "95HD", "HD", "95HD",
                              "HD95", "HD", "95HD", "HD95", "HD", "95HD"};
    for (int i = 0; i < 12; ++i) {
        digests.push_back(make_digest(
            "P" + std::to_string(i), "LA",
            {{dice_names[i], "0.9"}, {hd_names[i], "6.1"}},
            Date{2024, 1, 1 + i}));
    }
    auto result = board::unify_metrics(board::build_quintuples(digests), "LA", metric_config());
    REQUIRE(result.board.columns.size() == 2);

    std::map<std::string, std::set<std::string>> clusters;
    for (const auto& col : result.board.columns) {
        for (const auto& alias : col.aliases) clusters[col.canonical_name].insert(alias);
    }
    CHECK(clusters.at("Dice") == std::set<std::string>{"Dice", "DSC"});
    CHECK(clusters.at("HD") == std::set<std::string>{"HD", "95HD", "HD95"});
    CHECK(result.board.columns[0].direction == Direction::higher_better);
    CHECK(result.board.columns[1].direction == Direction::lower_better);
}

TEST_CASE("unify: no two columns share an alias after unification (property)") {
    std::mt19937 rng(43);
    const std::vector<std::string> pool = {"Dice", "DSC",  "HD",   "95HD", "HD95", "EM",
                                           "ExactMatch",   "SRCC", "PLCC", "F1",   "Acc",
                                           "Accuracy",     "IoU",  "Jaccard"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<DigestRecord> digests;
        int n = 2 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<std::string, std::string>> core;
            int m = 1 + static_cast<int>(rng() % 5);
            for (int j = 0; j < m; ++j) {
                core.emplace_back(pool[rng() % pool.size()],
                                  text::format_double((rng() % 1000) / 1000.0));
            }
            digests.push_back(make_digest("P" + std::to_string(i), "DS", std::move(core)));
        }
        auto result = board::unify_metrics(board::build_quintuples(digests), "DS", metric_config());
        std::set<std::string> seen;
        for (const auto& col : result.board.columns) {
            for (const auto& alias : col.aliases) {
                auto norm = board::normalize_metric_name(alias);
                CHECK(seen.insert(norm).second);
            }
        }
        result.board.check_invariants();
    }
}

TEST_CASE("prune: 13 of 20 missing drops, 12 of 20 missing stays (strict 60% rule)") {
    std::vector<DigestRecord> digests;
    for (int i = 0; i < 20; ++i) {
        std::vector<std::pair<std::string, std::string>> core = {
            {"Dice", text::format_double(0.8 + i * 0.001)}};
        if (i < 7) core.emplace_back("Jaccard", "0.8");   // 13 missing -> pruned
        if (i < 8) core.emplace_back("95HD", "6.5");      // 12 missing -> kept
        digests.push_back(make_digest("P" + std::to_string(i), "LA", std::move(core)));
    }
    auto b = board_from(board::build_quintuples(digests));
    auto pruned = board::prune_sparse_columns(b);
    std::set<std::string> names;
    for (const auto& c : pruned.columns) names.insert(c.canonical_name);
    CHECK(names == std::set<std::string>{"Dice", "95HD"});
}

TEST_CASE("prune: 5-row board keeps a column that a 20-row board drops") {
    // 2 missing of 5 (40%) stays; 13 of 20 (65%) goes
    std::vector<DigestRecord> small;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::pair<std::string, std::string>> core = {{"Dice", "0.9"}};
        if (i < 3) core.emplace_back("RMSE", "4.1");
        small.push_back(make_digest("S" + std::to_string(i), "LIVE", std::move(core)));
    }
    auto small_board = board::prune_sparse_columns(board_from(board::build_quintuples(small), "LIVE"));
    CHECK(small_board.columns.size() == 2);

    std::vector<DigestRecord> large;
    for (int i = 0; i < 20; ++i) {
        std::vector<std::pair<std::string, std::string>> core = {{"Dice", "0.9"}};
        if (i < 7) core.emplace_back("RMSE", "4.1");
        large.push_back(make_digest("L" + std::to_string(i), "LIVE", std::move(core)));
    }
    auto large_board = board::prune_sparse_columns(board_from(board::build_quintuples(large), "LIVE"));
    CHECK(large_board.columns.size() == 1);
    CHECK(large_board.columns[0].canonical_name == "Dice");
}

TEST_CASE("prune always retains the densest column") {
    std::vector<DigestRecord> digests;
    for (int i = 0; i < 10; ++i) {
        std::vector<std::pair<std::string, std::string>> core;
        if (i < 2) core.emplace_back("A", "0.5");
        if (i < 1) core.emplace_back("B", "0.5");
        if (core.empty()) core.emplace_back("A", "-");  // placeholder, stays missing
        digests.push_back(make_digest("P" + std::to_string(i), "DS", std::move(core)));
    }
    std::vector<std::string> warnings;
    auto pruned = board::prune_sparse_columns(board_from(board::build_quintuples(digests), "DS"),
                                              &warnings);
    REQUIRE(pruned.columns.size() == 1);
    CHECK(pruned.columns[0].canonical_name == "A");
    CHECK(warnings.size() == 1);
}

TEST_CASE("prune is idempotent (property)") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        auto b = random_board(rng);
        auto once = board::prune_sparse_columns(b);
        auto twice = board::prune_sparse_columns(once);
        CHECK(once.to_json() == twice.to_json());
    }
}

TEST_CASE("rank_rows: higher_better descends, lower_better ascends") {
    auto digests = std::vector<DigestRecord>{
        make_digest("A", "LA", {{"Dice", "0.91"}}),
        make_digest("B", "LA", {{"Dice", "0.95"}}),
        make_digest("C", "LA", {{"Dice", "0.93"}}),
    };
    auto b = board::rank_rows(board_from(board::build_quintuples(digests)), "Dice");
    CHECK(b.rows[0].title == "B");
    CHECK(b.rows[1].title == "C");
    CHECK(b.rows[2].title == "A");

    auto hd = std::vector<DigestRecord>{
        make_digest("X", "LA", {{"HD", "7.1"}}),
        make_digest("Y", "LA", {{"HD", "5.2"}}),
    };
    auto hb = board::rank_rows(board_from(board::build_quintuples(hd)), "HD");
    CHECK(hb.rows[0].title == "Y");
    CHECK(hb.rows[1].title == "X");
}

TEST_CASE("rank_rows: unknown metric raises") {
    auto digests = std::vector<DigestRecord>{make_digest("A", "LA", {{"Dice", "0.91"}})};
    try {
        board::rank_rows(board_from(board::build_quintuples(digests)), "BLEU");
        FAIL("expected UnknownMetric");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_metric);
    }
}

TEST_CASE("rank_rows equals a brute-force stable sort on a 20-row randomized board (oracle)") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<DigestRecord> digests;
        for (int i = 0; i < 20; ++i) {
            std::vector<std::pair<std::string, std::string>> core;
            if (rng() % 5 != 0) {
                // coarse values force ties
                core.emplace_back("Dice", text::format_double((rng() % 8) / 10.0));
            }
            Date d{2024, 1 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 28)};
            digests.push_back(make_digest("P" + std::to_string(i), "LA", std::move(core), d));
        }
        auto b = board_from(board::build_quintuples(digests));
        auto ranked = board::rank_rows(b, "Dice");

        auto expected = b.rows;
        std::stable_sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
            if (x.values[0].has_value() != y.values[0].has_value()) return x.values[0].has_value();
            if (x.values[0] && y.values[0] && *x.values[0] != *y.values[0]) {
                return *x.values[0] > *y.values[0];
            }
            if (x.published != y.published) return x.published > y.published;
            return x.title < y.title;
        });
        REQUIRE(ranked.rows.size() == expected.size());
        for (size_t i = 0; i < expected.size(); ++i) {
            CHECK(ranked.rows[i].title == expected[i].title);
            CHECK(ranked.rows[i].rank == static_cast<int>(i) + 1);
        }
    }
}

TEST_CASE("rank_rows preserves the row multiset (property)") {
    std::mt19937 rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        auto b = random_board(rng);
        auto primary = board::pick_primary_metric(b);
        auto ranked = board::rank_rows(b, primary);
        auto names = [](const LeaderboardTable& t) {
            std::multiset<std::string> s;
            for (const auto& r : t.rows) s.insert(r.title);
            return s;
        };
        CHECK(names(b) == names(ranked));
        ranked.check_invariants();
    }
}

TEST_CASE("pick_primary_metric: fewest missing, ties by column order") {
    auto digests = std::vector<DigestRecord>{
        make_digest("A", "LA", {{"Dice", "0.9"}, {"ASD", "2.0"}}),
        make_digest("B", "LA", {{"ASD", "1.8"}}),
    };
    auto b = board_from(board::build_quintuples(digests));
    CHECK(board::pick_primary_metric(b) == "ASD");  // 0 missing beats 1 missing
}

TEST_CASE("truncate_rows enforces the items cap L") {
    std::vector<DigestRecord> digests;
    for (int i = 0; i < 8; ++i) {
        digests.push_back(make_digest("P" + std::to_string(i), "LA", {{"Dice", "0.9"}}));
    }
    auto b = board::truncate_rows(board_from(board::build_quintuples(digests)), 5);
    CHECK(b.rows.size() == 5);
    CHECK(b.rows.back().rank == 5);
}

TEST_CASE("render_markdown: empty board renders the header only") {
    LeaderboardTable b;
    b.dataset = "LA";
    auto md = board::render_markdown(b);
    auto lines = text::split_lines(md);
    // header + rule (+ trailing empty от final newline)
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "| No. | Title | Experimental Setting |");
    CHECK(lines[1].find("---") != std::string::npos);
}

TEST_CASE("render_markdown: one-row board is a three-line table") {
    auto digests = std::vector<DigestRecord>{make_digest("Solo", "LA", {{"Dice", "0.91"}})};
    auto md = board::render_markdown(board_from(board::build_quintuples(digests)));
    auto lines = text::split_lines(md);
    REQUIRE(lines.size() == 4);  // header, rule, row, trailing empty
    CHECK(lines[3].empty());
    CHECK(lines[2].find("| 1 | Solo |") == 0);
    CHECK(lines[2].find("0.91") != std::string::npos);
}

TEST_CASE("markdown round-trip recovers cell values exactly (property)") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        auto b = random_board(rng);
        auto md = board::render_markdown(b);
        auto parsed = board::parse_markdown(md);

        REQUIRE(parsed.header.size() == b.columns.size() + 3);
        REQUIRE(parsed.rows.size() == b.rows.size());
        for (size_t r = 0; r < b.rows.size(); ++r) {
            CHECK(parsed.rows[r][0] == std::to_string(b.rows[r].rank));
            CHECK(parsed.rows[r][1] == b.rows[r].title);  // pipes unescaped
            for (size_t c = 0; c < b.columns.size(); ++c) {
                const auto& cell = parsed.rows[r][3 + c];
                if (b.rows[r].values[c]) {
                    CHECK(std::stod(cell) == *b.rows[r].values[c]);  // exact round-trip
                } else {
                    CHECK(cell == "-");
                }
            }
        }
    }
}

TEST_CASE("render_markdown is deterministic byte output") {
    std::mt19937 rng(67);
    auto b = random_board(rng);
    CHECK(board::render_markdown(b) == board::render_markdown(b));
}

TEST_CASE("board JSON round-trips with full fidelity") {
    std::mt19937 rng(71);
    auto b = random_board(rng);
    auto doc = b.to_json();
    auto back = LeaderboardTable::from_json(doc);
    CHECK(back.to_json() == doc);
}

TEST_CASE("conflicting values for one title and metric keep the first and log") {
    auto digests = std::vector<DigestRecord>{
        make_digest("P", "LA", {{"Dice", "0.91"}, {"DSC", "0.99"}}),
    };
    auto result = board::unify_metrics(board::build_quintuples(digests), "LA", metric_config());
    REQUIRE(result.board.columns.size() == 1);
    CHECK(*result.board.rows[0].values[0] == doctest::Approx(0.91));
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("ConflictingValues") != std::string::npos);
}

namespace {

board::LeaderboardTable golden_hotpotqa_board() {
    board::LeaderboardTable b;
    b.dataset = "HotpotQA";
    board::MetricColumn em;
    em.canonical_name = "EM";
    em.aliases = {"EM"};
    em.direction = Direction::higher_better;
    board::MetricColumn f1;
    f1.canonical_name = "F1";
    f1.aliases = {"F1"};
    f1.direction = Direction::higher_better;
    b.columns = {em, f1};

    struct Entry {
        const char* title;
        const char* setting;
        double em;
        double f1;
    };
    const Entry entries[] = {
        {"Beam Retrieval", "DeBERTa-large, fine-tuning", 72.69, 85.04},
        {"MDR + Reranker", "RoBERTa-base, fine-tuning", 62.3, 75.3},
        {"HopRetriever", "BERT-large, fine-tuning", 60.83, 73.93},
        {"PathRetriever", "BERT-wwm, fine-tuning", 60.04, 72.96},
        {"QFE", "RNN encoder, supervised", 53.7, 68.7},
    };
    int rank = 1;
    for (const auto& e : entries) {
        board::Row r;
        r.rank = rank++;
        r.title = e.title;
        r.setting_summary = e.setting;
        r.published = Date{2024, 1, r.rank};
        r.values = {e.em, e.f1};
        r.sigmas = {std::nullopt, std::nullopt};
        b.rows.push_back(std::move(r));
    }
    b.check_invariants();
    return b;
}

}  // namespace

TEST_CASE("render_markdown matches the checked-in golden board byte for byte") {
    auto md = board::render_markdown(golden_hotpotqa_board());
    auto golden = testutil::read_file(testutil::fixture_dir() / "golden_board.md");
    CHECK(md == golden);
}

TEST_CASE("the five-row example board reconstructs from scripted digests") {
    // one quintuple per digest, unique titles, five rows total
    struct Entry {
        const char* title;
        const char* em;
        const char* f1;
        Date published;
    };
    const Entry entries[] = {
        {"Beam Retrieval", "72.69", "85.04", {2024, 1, 2}},
        {"MDR + Reranker", "62.3", "75.3", {2024, 1, 3}},
        {"HopRetriever", "60.83", "73.93", {2024, 1, 4}},
        {"PathRetriever", "60.04", "72.96", {2024, 1, 5}},
        {"QFE", "53.7", "68.7", {2024, 1, 6}},
    };
    std::vector<DigestRecord> digests;
    for (const auto& e : entries) {
        digests.push_back(
            make_digest(e.title, "HotpotQA", {{"EM", e.em}, {"F1", e.f1}}, e.published));
    }
    auto quintuples = board::build_quintuples(digests);
    REQUIRE(quintuples.size() == 5);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(quintuples[i].title == entries[i].title);
        CHECK(quintuples[i].dataset == "HotpotQA");
        CHECK(quintuples[i].metrics_raw.size() == 2);
    }
    auto b = board::rank_rows(board_from(quintuples, "HotpotQA"), "EM");
    CHECK(b.rows[0].title == "Beam Retrieval");
    CHECK(b.items() == 5);
}
