#include "league/board.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

namespace league::board {

using Json = nlohmann::ordered_json;

// ---- value parsing -------------------------------------------------------------

std::optional<ParsedValue> parse_metric_value(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    bool percent = false;
    for (size_t i = 0; i < raw.size();) {
        // strip arrow glyphs and significance stars, note percent signs
        if (raw.compare(i, 3, "↑") == 0 || raw.compare(i, 3, "↓") == 0) {
            i += 3;
            continue;
        }
        char c = raw[i];
        if (c == '%') {
            percent = true;
            ++i;
            continue;
        }
        if (c == '*' || c == '$') {
            ++i;
            continue;
        }
        s.push_back(c);
        ++i;
    }
    s = text::trim(s);
    if (s.empty() || s == "-" || s == "--" || s == "–" || s == "—") return std::nullopt;
    std::string lowered = text::lower(s);
    if (lowered == "n/a" || lowered == "na" || lowered == "none" || lowered == "null") {
        return std::nullopt;
    }

    std::string main_part = s;
    std::optional<double> sigma;
    size_t pm = s.find("±");
    if (pm == std::string::npos) {
        size_t ascii_pm = s.find("+-");
        if (ascii_pm != std::string::npos) pm = ascii_pm;
    }
    if (pm != std::string::npos) {
        main_part = text::trim(s.substr(0, pm));
        std::string tail = text::trim(s.substr(pm + (s.compare(pm, 2, "+-") == 0 ? 2 : 3)));
        char* end = nullptr;
        double sv = std::strtod(tail.c_str(), &end);
        if (end != tail.c_str()) sigma = sv;
    }

    char* end = nullptr;
    double v = std::strtod(main_part.c_str(), &end);
    if (end == main_part.c_str()) return std::nullopt;
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end && *end != '\0') return std::nullopt;  // trailing junk: not a number

    ParsedValue out;
    out.value = v;
    out.sigma = sigma;
    out.percent_mark = percent;
    return out;
}

std::string normalize_metric_name(std::string_view name) {
    std::string out;
    for (char c : std::string(name)) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

// ---- metric config ---------------------------------------------------------------

MetricConfig MetricConfig::builtin() {
    MetricConfig c;
    c.alias_groups = {
        {"hd", "95hd", "hd95", "hausdorffdistance", "95hausdorffdistance"},
        {"dice", "dsc", "dicescore", "dicecoefficient"},
        {"em", "exactmatch"},
        {"jaccard", "iou"},
        {"asd", "averagesurfacedistance"},
        {"acc", "accuracy"},
        {"srcc", "srocc", "spearman"},
        {"plcc", "pearson"},
    };
    c.higher_better = {"accuracy",  "acc",  "f1",  "em",      "dice", "dsc",  "srcc",
                       "plcc",      "auc",  "bleu", "rouge",  "rougel", "recall",
                       "precision", "miou", "iou",  "jaccard", "psnr", "ssim", "map",
                       "ndcg",      "mrr",  "hits"};
    c.lower_better = {"hd",  "95hd", "hd95", "asd", "rmse", "mae",
                      "mse", "perplexity", "ppl",  "fid", "wer",  "cer"};
    return c;
}

MetricConfig MetricConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::config_error, "cannot open metric config " + path.string());
    Json doc = Json::parse(in, nullptr, true, true);
    MetricConfig c;
    for (const auto& group : doc.value("alias_groups", Json::array())) {
        std::vector<std::string> g;
        for (const auto& name : group) g.push_back(normalize_metric_name(name.get<std::string>()));
        if (!g.empty()) c.alias_groups.push_back(std::move(g));
    }
    for (const auto& name : doc.value("higher_better", Json::array())) {
        c.higher_better.push_back(normalize_metric_name(name.get<std::string>()));
    }
    for (const auto& name : doc.value("lower_better", Json::array())) {
        c.lower_better.push_back(normalize_metric_name(name.get<std::string>()));
    }
    return c;
}

// ---- board invariants -------------------------------------------------------------

void LeaderboardTable::check_invariants() const {
    std::unordered_map<std::string, size_t> alias_home;
    for (size_t i = 0; i < columns.size(); ++i) {
        for (const auto& alias : columns[i].aliases) {
            std::string norm = normalize_metric_name(alias);
            auto [it, inserted] = alias_home.emplace(norm, i);
            require(inserted || it->second == i, ErrorCode::integrity_error,
                    "alias '" + alias + "' appears in two columns");
        }
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        require(rows[i].rank == static_cast<int>(i) + 1, ErrorCode::integrity_error,
                "ranks are not contiguous 1..n");
        require(rows[i].values.size() == columns.size(), ErrorCode::integrity_error,
                "row value count does not match column count");
    }
}

// ---- census ----------------------------------------------------------------------

DatasetCensus census_datasets(std::span<const DatasetMention> mentions, int k) {
    require(k >= 1, ErrorCode::precondition, "k must be >= 1");
    require(!mentions.empty(), ErrorCode::empty_input, "no dataset mentions to census");

    std::map<std::string, std::set<std::string>> papers_by_dataset;
    for (const auto& m : mentions) {
        papers_by_dataset[m.dataset].insert(m.paper_id);  // a paper counts once per dataset
    }
    DatasetCensus census;
    census.k = k;
    for (const auto& [dataset, papers] : papers_by_dataset) {
        census.counts.emplace_back(dataset, static_cast<int>(papers.size()));
    }
    std::sort(census.counts.begin(), census.counts.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // tie -> lexicographic
    });
    size_t take = std::min<size_t>(static_cast<size_t>(k), census.counts.size());
    for (size_t i = 0; i < take; ++i) census.selected.push_back(census.counts[i].first);
    return census;
}

DatasetCensus census_from_digests(const std::vector<DigestRecord>& digests, int k) {
    std::vector<DatasetMention> mentions;
    mentions.reserve(digests.size());
    for (const auto& d : digests) {
        const std::string& id = d.paper_id.empty() ? d.digest.title : d.paper_id;
        mentions.push_back({id, d.digest.dataset});
    }
    return census_datasets(mentions, k);
}

// ---- quintuples -------------------------------------------------------------------

std::vector<Quintuple> build_quintuples(const std::vector<DigestRecord>& digests_for_dataset) {
    std::vector<Quintuple> out;
    std::unordered_map<std::string, size_t> by_title;
    for (const auto& rec : digests_for_dataset) {
        Quintuple q;
        q.title = rec.digest.title;
        q.dataset = rec.digest.dataset;
        q.metrics_raw = rec.digest.core_results;
        q.settings.model_size = rec.digest.model_size;
        q.settings.training_strategy = rec.digest.training_strategy;
        q.settings.hyperparameters = rec.digest.hyperparameters;
        q.source.paper_id = rec.paper_id;
        q.source.published = rec.published;
        q.source.github = rec.digest.github;

        auto it = by_title.find(q.title);
        if (it == by_title.end()) {
            by_title[q.title] = out.size();
            out.push_back(std::move(q));
        } else if (q.source.published > out[it->second].source.published) {
            out[it->second] = std::move(q);  // same title: keep the later revision
        }
    }
    return out;
}

// ---- unify ------------------------------------------------------------------------

namespace {

std::string strip_arrows(std::string_view name) {
    std::string out;
    for (size_t i = 0; i < name.size();) {
        if (name.compare(i, 3, "↑") == 0 || name.compare(i, 3, "↓") == 0) {
            i += 3;
            continue;
        }
        out.push_back(name[i]);
        ++i;
    }
    return text::trim(out);
}

std::string make_setting_summary(const Quintuple::Settings& settings) {
    std::string joined = settings.model_size;
    if (!settings.training_strategy.empty()) {
        if (!joined.empty()) joined += ", ";
        joined += settings.training_strategy;
    }
    // concise and non-descriptive: cap at eight words
    std::istringstream ss(joined);
    std::string word;
    std::string out;
    int words = 0;
    while (ss >> word && words < 8) {
        if (words) out += " ";
        out += word;
        ++words;
    }
    return out;
}

enum class Rep { percent, ratio, absolute };

Rep representation_of(const ParsedValue& v) {
    if (v.percent_mark) return Rep::percent;
    if (v.value >= 0.0 && v.value <= 1.0) return Rep::ratio;
    return Rep::absolute;
}

}  // namespace

UnifyResult unify_metrics(const std::vector<Quintuple>& quintuples, const std::string& dataset,
                          const MetricConfig& config) {
    UnifyResult result;

    std::unordered_map<std::string, std::string> group_of;  // normalized alias -> group key
    for (const auto& group : config.alias_groups) {
        for (const auto& alias : group) group_of[alias] = group.front();
    }
    std::unordered_set<std::string> up(config.higher_better.begin(), config.higher_better.end());
    std::unordered_set<std::string> down(config.lower_better.begin(), config.lower_better.end());

    auto group_key = [&](const std::string& normalized) {
        auto it = group_of.find(normalized);
        return it == group_of.end() ? normalized : it->second;
    };

    struct Cell {
        size_t row;
        ParsedValue value;
    };
    struct ColumnDraft {
        MetricColumn column;
        std::vector<Cell> cells;
        bool arrow_up = false;
        bool arrow_down = false;
    };
    std::vector<ColumnDraft> drafts;
    std::unordered_map<std::string, size_t> column_of;  // group key -> draft index

    for (size_t row = 0; row < quintuples.size(); ++row) {
        std::unordered_set<std::string> seen_this_row;
        for (const auto& [raw_name, raw_value] : quintuples[row].metrics_raw) {
            std::string norm = normalize_metric_name(raw_name);
            if (norm.empty()) continue;
            std::string key = group_key(norm);

            size_t idx;
            if (auto it = column_of.find(key); it != column_of.end()) {
                idx = it->second;
            } else {
                idx = drafts.size();
                column_of[key] = idx;
                ColumnDraft d;
                d.column.canonical_name = strip_arrows(raw_name);
                drafts.push_back(std::move(d));
            }
            auto& draft = drafts[idx];
            if (std::find(draft.column.aliases.begin(), draft.column.aliases.end(), raw_name) ==
                draft.column.aliases.end()) {
                draft.column.aliases.push_back(raw_name);
            }
            if (raw_name.find("↑") != std::string::npos) draft.arrow_up = true;
            if (raw_name.find("↓") != std::string::npos) draft.arrow_down = true;

            auto parsed = parse_metric_value(raw_value);
            if (!parsed) continue;
            if (!seen_this_row.insert(key).second) {
                // same title, same canonical metric, second value: keep the first
                const Cell& kept = *std::find_if(draft.cells.rbegin(), draft.cells.rend(),
                                                 [&](const Cell& c) { return c.row == row; });
                if (kept.value.value != parsed->value) {
                    result.warnings.push_back("ConflictingValues: '" + quintuples[row].title +
                                              "' reports both " +
                                              text::format_double(kept.value.value) + " and " +
                                              text::format_double(parsed->value) + " for " +
                                              draft.column.canonical_name);
                }
                continue;
            }
            draft.cells.push_back({row, *parsed});
        }
    }

    // per-column unit election and direction inference
    for (auto& draft : drafts) {
        int n_percent = 0;
        int n_ratio = 0;
        int n_absolute = 0;
        for (const auto& cell : draft.cells) {
            switch (representation_of(cell.value)) {
                case Rep::percent: ++n_percent; break;
                case Rep::ratio: ++n_ratio; break;
                case Rep::absolute: ++n_absolute; break;
            }
        }
        Unit unit = Unit::absolute;
        int best = n_absolute;
        // ties prefer ratio, then percent
        if (n_percent >= best && n_percent > 0) {
            unit = Unit::percent;
            best = n_percent;
        }
        if (n_ratio >= best && n_ratio > 0) {
            unit = Unit::ratio;
            best = n_ratio;
        }
        draft.column.unit = unit;

        for (auto& cell : draft.cells) {
            Rep rep = representation_of(cell.value);
            if (unit == Unit::ratio) {
                if (rep == Rep::percent || (rep == Rep::absolute && cell.value.value <= 100.0)) {
                    cell.value.value /= 100.0;
                    if (cell.value.sigma) *cell.value.sigma /= 100.0;
                }
            } else if (unit == Unit::percent) {
                if (rep == Rep::ratio) {
                    cell.value.value *= 100.0;
                    if (cell.value.sigma) *cell.value.sigma *= 100.0;
                }
            }
        }

        std::string norm = normalize_metric_name(draft.column.canonical_name);
        std::string key = group_key(norm);
        if (draft.arrow_up && !draft.arrow_down) {
            draft.column.direction = Direction::higher_better;
        } else if (draft.arrow_down && !draft.arrow_up) {
            draft.column.direction = Direction::lower_better;
        } else if (up.count(norm) || up.count(key)) {
            draft.column.direction = Direction::higher_better;
        } else if (down.count(norm) || down.count(key)) {
            draft.column.direction = Direction::lower_better;
        } else {
            draft.column.direction = Direction::unknown;
            draft.column.direction_flagged = true;
        }
    }

    LeaderboardTable board;
    board.dataset = dataset;
    for (auto& draft : drafts) board.columns.push_back(draft.column);
    board.rows.reserve(quintuples.size());
    for (size_t row = 0; row < quintuples.size(); ++row) {
        Row r;
        r.rank = static_cast<int>(row) + 1;
        r.title = quintuples[row].title;
        r.setting_summary = make_setting_summary(quintuples[row].settings);
        r.published = quintuples[row].source.published;
        r.paper_id = quintuples[row].source.paper_id;
        r.github = quintuples[row].source.github;
        r.values.assign(board.columns.size(), std::nullopt);
        r.sigmas.assign(board.columns.size(), std::nullopt);
        board.rows.push_back(std::move(r));
    }
    for (size_t ci = 0; ci < drafts.size(); ++ci) {
        for (const auto& cell : drafts[ci].cells) {
            board.rows[cell.row].values[ci] = cell.value.value;
            board.rows[cell.row].sigmas[ci] = cell.value.sigma;
        }
    }
    board.check_invariants();
    result.columns = board.columns;
    result.board = std::move(board);
    return result;
}

// ---- pruning / ranking ---------------------------------------------------------------

namespace {

size_t missing_count(const LeaderboardTable& board, size_t column) {
    size_t missing = 0;
    for (const auto& row : board.rows) {
        if (!row.values[column]) ++missing;
    }
    return missing;
}

LeaderboardTable drop_columns(LeaderboardTable board, const std::vector<bool>& keep) {
    std::vector<MetricColumn> columns;
    for (size_t i = 0; i < board.columns.size(); ++i) {
        if (keep[i]) columns.push_back(std::move(board.columns[i]));
    }
    for (auto& row : board.rows) {
        std::vector<std::optional<double>> values;
        std::vector<std::optional<double>> sigmas;
        for (size_t i = 0; i < keep.size(); ++i) {
            if (keep[i]) {
                values.push_back(row.values[i]);
                sigmas.push_back(row.sigmas[i]);
            }
        }
        row.values = std::move(values);
        row.sigmas = std::move(sigmas);
    }
    board.columns = std::move(columns);
    return board;
}

}  // namespace

LeaderboardTable prune_sparse_columns(LeaderboardTable board, std::vector<std::string>* warnings) {
    if (board.columns.empty() || board.rows.empty()) return board;
    const double total = static_cast<double>(board.rows.size());

    std::vector<bool> keep(board.columns.size(), true);
    size_t kept = 0;
    for (size_t i = 0; i < board.columns.size(); ++i) {
        double missing_fraction = static_cast<double>(missing_count(board, i)) / total;
        keep[i] = !(missing_fraction > 0.6);  // strictly more than 60% missing is discarded
        if (keep[i]) ++kept;
    }
    if (kept == 0) {
        size_t densest = 0;
        size_t best_missing = missing_count(board, 0);
        for (size_t i = 1; i < board.columns.size(); ++i) {
            size_t m = missing_count(board, i);
            if (m < best_missing) {
                best_missing = m;
                densest = i;
            }
        }
        keep[densest] = true;
        if (warnings) {
            warnings->push_back("all columns exceed the 60% missing threshold; keeping densest '" +
                                board.columns[densest].canonical_name + "'");
        }
    }
    board = drop_columns(std::move(board), keep);
    board.check_invariants();
    return board;
}

std::string pick_primary_metric(const LeaderboardTable& board) {
    require(!board.columns.empty(), ErrorCode::empty_input, "board has no columns");
    size_t best = 0;
    size_t best_missing = missing_count(board, 0);
    for (size_t i = 1; i < board.columns.size(); ++i) {
        size_t m = missing_count(board, i);
        if (m < best_missing) {
            best_missing = m;
            best = i;
        }
    }
    return board.columns[best].canonical_name;
}

LeaderboardTable rank_rows(LeaderboardTable board, const std::string& primary_metric) {
    size_t column = board.columns.size();
    for (size_t i = 0; i < board.columns.size(); ++i) {
        if (board.columns[i].canonical_name == primary_metric) {
            column = i;
            break;
        }
    }
    require(column < board.columns.size(), ErrorCode::unknown_metric,
            "'" + primary_metric + "' is not a retained column");

    const bool lower_better = board.columns[column].direction == Direction::lower_better;
    std::stable_sort(board.rows.begin(), board.rows.end(), [&](const Row& a, const Row& b) {
        const auto& av = a.values[column];
        const auto& bv = b.values[column];
        if (av.has_value() != bv.has_value()) return av.has_value();  // missing sinks
        if (av && bv && *av != *bv) return lower_better ? *av < *bv : *av > *bv;
        if (a.published != b.published) return a.published > b.published;  // newer first
        return a.title < b.title;
    });
    for (size_t i = 0; i < board.rows.size(); ++i) board.rows[i].rank = static_cast<int>(i) + 1;
    board.check_invariants();
    return board;
}

LeaderboardTable truncate_rows(LeaderboardTable board, int items) {
    require(items >= 1, ErrorCode::precondition, "items must be >= 1");
    if (static_cast<int>(board.rows.size()) > items) {
        board.rows.resize(static_cast<size_t>(items));
    }
    board.check_invariants();
    return board;
}

// ---- markdown ---------------------------------------------------------------------------

namespace {

std::string escape_cell(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n' || c == '\r') out += ' ';
        else out.push_back(c);
    }
    return out;
}

}  // namespace

std::string render_markdown(const LeaderboardTable& board) {
    std::ostringstream out;
    out << "| No. | Title | Experimental Setting |";
    for (const auto& col : board.columns) {
        out << " " << escape_cell(col.canonical_name);
        if (col.direction_flagged) out << " (?)";
        out << " |";
    }
    out << "\n|";
    for (size_t i = 0; i < board.columns.size() + 3; ++i) out << " --- |";
    out << "\n";
    for (const auto& row : board.rows) {
        out << "| " << row.rank << " | " << escape_cell(row.title) << " | "
            << escape_cell(row.setting_summary) << " |";
        for (size_t c = 0; c < board.columns.size(); ++c) {
            out << " " << (row.values[c] ? escape_cell(text::format_double(*row.values[c])) : "-")
                << " |";
        }
        out << "\n";
    }
    return out.str();
}

MarkdownTable parse_markdown(const std::string& markdown) {
    MarkdownTable table;
    auto parse_row = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string current;
        bool started = false;
        for (size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (c == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
                current.push_back('|');
                ++i;
                continue;
            }
            if (c == '|') {
                if (started) cells.push_back(text::trim(current));
                current.clear();
                started = true;
                continue;
            }
            current.push_back(c);
        }
        return cells;
    };

    bool header_done = false;
    for (const auto& line : text::split_lines(markdown)) {
        std::string t = text::trim(line);
        if (t.empty() || t[0] != '|') continue;
        auto cells = parse_row(t);
        if (cells.empty()) continue;
        bool is_rule = std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
            return !c.empty() && c.find_first_not_of("-: ") == std::string::npos;
        });
        if (is_rule) continue;
        if (!header_done) {
            table.header = cells;
            header_done = true;
        } else {
            table.rows.push_back(cells);
        }
    }
    return table;
}

// ---- serialization -----------------------------------------------------------------------

namespace {

std::string direction_name(Direction d) {
    switch (d) {
        case Direction::higher_better: return "higher_better";
        case Direction::lower_better: return "lower_better";
        case Direction::unknown: return "unknown";
    }
    return "unknown";
}

Direction direction_from(const std::string& s) {
    if (s == "higher_better") return Direction::higher_better;
    if (s == "lower_better") return Direction::lower_better;
    return Direction::unknown;
}

std::string unit_name(Unit u) {
    switch (u) {
        case Unit::ratio: return "ratio";
        case Unit::percent: return "percent";
        case Unit::absolute: return "absolute";
    }
    return "absolute";
}

Unit unit_from(const std::string& s) {
    if (s == "ratio") return Unit::ratio;
    if (s == "percent") return Unit::percent;
    return Unit::absolute;
}

}  // namespace

Json LeaderboardTable::to_json() const {
    Json doc = Json::object();
    doc["dataset"] = dataset;
    Json cols = Json::array();
    for (const auto& c : columns) {
        Json col = Json::object();
        col["canonical_name"] = c.canonical_name;
        col["aliases"] = c.aliases;
        col["direction"] = direction_name(c.direction);
        col["unit"] = unit_name(c.unit);
        col["direction_flagged"] = c.direction_flagged;
        cols.push_back(std::move(col));
    }
    doc["columns"] = std::move(cols);
    Json rows_doc = Json::array();
    for (const auto& r : rows) {
        Json row = Json::object();
        row["rank"] = r.rank;
        row["title"] = r.title;
        row["setting_summary"] = r.setting_summary;
        row["published"] = r.published.to_string();
        row["paper_id"] = r.paper_id;
        row["github"] = r.github;
        Json values = Json::array();
        Json sigmas = Json::array();
        for (size_t i = 0; i < r.values.size(); ++i) {
            values.push_back(r.values[i] ? Json(*r.values[i]) : Json(nullptr));
            sigmas.push_back(r.sigmas[i] ? Json(*r.sigmas[i]) : Json(nullptr));
        }
        row["values"] = std::move(values);
        row["sigmas"] = std::move(sigmas);
        rows_doc.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows_doc);
    doc["items"] = static_cast<int>(rows.size());
    return doc;
}

LeaderboardTable LeaderboardTable::from_json(const Json& doc) {
    LeaderboardTable board;
    board.dataset = doc.at("dataset").get<std::string>();
    for (const auto& col : doc.at("columns")) {
        MetricColumn c;
        c.canonical_name = col.at("canonical_name").get<std::string>();
        c.aliases = col.at("aliases").get<std::vector<std::string>>();
        c.direction = direction_from(col.at("direction").get<std::string>());
        c.unit = unit_from(col.at("unit").get<std::string>());
        c.direction_flagged = col.value("direction_flagged", false);
        board.columns.push_back(std::move(c));
    }
    for (const auto& row : doc.at("rows")) {
        Row r;
        r.rank = row.at("rank").get<int>();
        r.title = row.at("title").get<std::string>();
        r.setting_summary = row.at("setting_summary").get<std::string>();
        r.published = Date::parse(row.at("published").get<std::string>());
        r.paper_id = row.value("paper_id", "");
        r.github = row.value("github", "");
        for (const auto& v : row.at("values")) {
            r.values.push_back(v.is_null() ? std::optional<double>{} : v.get<double>());
        }
        for (const auto& v : row.at("sigmas")) {
            r.sigmas.push_back(v.is_null() ? std::optional<double>{} : v.get<double>());
        }
        board.rows.push_back(std::move(r));
    }
    board.check_invariants();
    return board;
}

}  // namespace league::board
