#include "league/quality.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

namespace league::quality {

using Json = nlohmann::ordered_json;

Json QualityReport::to_json() const {
    Json doc = Json::object();
    doc["coverage"] = coverage;
    doc["latest"] = latest;
    doc["structure"] = structure;
    doc["multiaspect"] = multiaspect;
    doc["p_used"] = p_used;
    doc["p_total"] = p_total;
    doc["p_new"] = p_new;
    return doc;
}

double score_coverage(long long p_used, long long p_total) {
    require(p_total >= 1, ErrorCode::zero_total, "p_total must be >= 1");
    require(p_used >= 0 && p_used <= p_total, ErrorCode::precondition,
            "p_used must lie in [0, p_total]");
    return 5.0 * static_cast<double>(p_used) / static_cast<double>(p_total);
}

double score_latest(long long p_new, long long p_total) {
    require(p_total >= 1, ErrorCode::zero_total, "p_total must be >= 1");
    require(p_new >= 0 && p_new <= p_total, ErrorCode::precondition,
            "p_new must lie in [0, p_total]");
    return 5.0 * static_cast<double>(p_new) / static_cast<double>(p_total);
}

int score_structure(const board::LeaderboardTable& board, llm::Gateway& judge,
                    const prompts::PromptLibrary& prompts, const std::string& variant_tag) {
    llm::ChatRequest request = judge.make_request();
    request.system_prompt = prompts.get("structure_rubric");
    request.user_prompt = prompts.render(
        "structure_rubric_user",
        {{"LEADERBOARD", board::render_markdown(board)}, {"VARIANT", variant_tag}});

    std::string correction;
    for (int attempt = 0; attempt < 2; ++attempt) {
        llm::ChatRequest round = request;
        round.user_prompt += correction;
        auto completion = judge.complete(round);
        try {
            Json doc = llm::parse_json_payload(completion.text, {"score"});
            const Json& raw = doc["score"];
            int score = -1;
            if (raw.is_number_integer()) {
                score = raw.get<int>();
            } else if (raw.is_string()) {
                try {
                    score = std::stoi(raw.get<std::string>());
                } catch (...) {
                    score = -1;
                }
            }
            if (score >= 1 && score <= 5) return score;
            correction = "\n\nThe score must be an integer between 1 and 5. Return only JSON"
                         " {\"score\": n, \"rationale\": \"...\"}.";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_json_found && e.code() != ErrorCode::missing_keys) throw;
            correction = "\n\nReturn only JSON {\"score\": n, \"rationale\": \"...\"} with n in 1..5.";
        }
    }
    raise(ErrorCode::provider_error, "judge returned no usable structure score after re-ask");
}

double score_multiaspect(const std::vector<QualityReport>& reports) {
    require(!reports.empty(), ErrorCode::empty_input, "no reports to average");
    double sum = 0.0;
    for (const auto& r : reports) sum += r.coverage + r.latest + r.structure;
    return sum / (3.0 * static_cast<double>(reports.size()));
}

// ---- refinement --------------------------------------------------------------

namespace {

// multiset of (title, value) pairs over surviving rows must never change
std::vector<std::pair<std::string, double>> value_multiset(const board::LeaderboardTable& b) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& row : b.rows) {
        for (const auto& v : row.values) {
            if (v) out.emplace_back(row.title, *v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool apply_one_edit(board::LeaderboardTable& b, const Json& edit, std::string* why) {
    const std::string op = edit.value("op", "");
    if (op == "rename_column") {
        const std::string from = edit.value("from", "");
        const std::string to = edit.value("to", "");
        if (to.empty()) {
            *why = "rename_column without a target name";
            return false;
        }
        for (auto& col : b.columns) {
            if (col.canonical_name == from) {
                col.canonical_name = to;
                if (std::find(col.aliases.begin(), col.aliases.end(), to) == col.aliases.end()) {
                    col.aliases.push_back(to);
                }
                return true;
            }
        }
        *why = "rename_column: no column named '" + from + "'";
        return false;
    }
    if (op == "merge_columns") {
        const std::string into = edit.value("into", "");
        const std::string from = edit.value("from", "");
        size_t into_idx = b.columns.size();
        size_t from_idx = b.columns.size();
        for (size_t i = 0; i < b.columns.size(); ++i) {
            if (b.columns[i].canonical_name == into) into_idx = i;
            else if (b.columns[i].canonical_name == from) from_idx = i;
        }
        if (into_idx >= b.columns.size() || from_idx >= b.columns.size()) {
            *why = "merge_columns: unknown column";
            return false;
        }
        for (auto& row : b.rows) {
            if (row.values[from_idx]) {
                if (row.values[into_idx] &&
                    *row.values[into_idx] != *row.values[from_idx]) {
                    *why = "merge_columns would overwrite conflicting values";
                    return false;
                }
            }
        }
        for (auto& row : b.rows) {
            if (row.values[from_idx] && !row.values[into_idx]) {
                row.values[into_idx] = row.values[from_idx];
                row.sigmas[into_idx] = row.sigmas[from_idx];
            }
            row.values.erase(row.values.begin() + static_cast<long>(from_idx));
            row.sigmas.erase(row.sigmas.begin() + static_cast<long>(from_idx));
        }
        auto& into_col = b.columns[into_idx];
        for (const auto& alias : b.columns[from_idx].aliases) {
            if (std::find(into_col.aliases.begin(), into_col.aliases.end(), alias) ==
                into_col.aliases.end()) {
                into_col.aliases.push_back(alias);
            }
        }
        b.columns.erase(b.columns.begin() + static_cast<long>(from_idx));
        return true;
    }
    if (op == "drop_row") {
        const std::string title = edit.value("title", "");
        auto it = std::find_if(b.rows.begin(), b.rows.end(),
                               [&](const board::Row& r) { return r.title == title; });
        if (it == b.rows.end()) {
            *why = "drop_row: no row titled '" + title + "'";
            return false;
        }
        b.rows.erase(it);
        for (size_t i = 0; i < b.rows.size(); ++i) b.rows[i].rank = static_cast<int>(i) + 1;
        return true;
    }
    *why = "forbidden edit class '" + op + "'";
    return false;
}

}  // namespace

board::LeaderboardTable apply_edits(board::LeaderboardTable board, const Json& edits,
                                    std::vector<std::string>* rejected) {
    if (!edits.is_array()) return board;
    for (const auto& edit : edits) {
        board::LeaderboardTable candidate = board;
        std::string why;
        bool dropped_row = edit.value("op", "") == "drop_row";
        auto before = value_multiset(board);
        if (!apply_one_edit(candidate, edit, &why)) {
            if (rejected) rejected->push_back(why + " (edit: " + edit.dump() + ")");
            continue;
        }
        try {
            candidate.check_invariants();
        } catch (const Error& e) {
            if (rejected) rejected->push_back(std::string(e.what()) + " (edit: " + edit.dump() + ")");
            continue;
        }
        if (!dropped_row && value_multiset(candidate) != before) {
            if (rejected) {
                rejected->push_back("edit would alter row result values (edit: " + edit.dump() +
                                    ")");
            }
            continue;
        }
        board = std::move(candidate);
    }
    return board;
}

board::LeaderboardTable refine_board(board::LeaderboardTable board, llm::Gateway& judge,
                                     const prompts::PromptLibrary& prompts,
                                     const std::string& variant_tag,
                                     std::vector<std::string>* rejected) {
    llm::ChatRequest request = judge.make_request();
    request.system_prompt = prompts.render(
        "refine_board", {{"CONSTRUCTION RULES", prompts.get("construct_board")}});
    request.user_prompt = prompts.render(
        "refine_board_user",
        {{"LEADERBOARD", board::render_markdown(board)}, {"VARIANT", variant_tag}});

    Json doc;
    try {
        doc = llm::complete_json(judge, request, {"edits"});
    } catch (const Error& e) {
        if (e.code() == ErrorCode::no_json_found || e.code() == ErrorCode::missing_keys) {
            if (rejected) rejected->push_back("judge returned no edit list; board kept as-is");
            return board;
        }
        throw;
    }
    return apply_edits(std::move(board), doc["edits"], rejected);
}

const Candidate& select_best(const CandidateSet& set) {
    require(!set.candidates.empty(), ErrorCode::empty_set, "candidate set is empty");
    size_t best = 0;
    for (size_t i = 1; i < set.candidates.size(); ++i) {
        const auto& challenger = set.candidates[i].report;
        const auto& incumbent = set.candidates[best].report;
        if (challenger.multiaspect > incumbent.multiaspect ||
            (challenger.multiaspect == incumbent.multiaspect &&
             challenger.coverage > incumbent.coverage)) {
            best = i;  // strict improvement only: ties keep the earlier index
        }
    }
    return set.candidates[best];
}

// ---- timing model ---------------------------------------------------------------

void TimingModelParams::validate() const {
    require(t_r >= 0 && t_b >= 0 && t_f >= 0 && t_e >= 0 && t_c >= 0, ErrorCode::precondition,
            "timing components must be nonnegative");
    require(n_filtered <= n_retrieved, ErrorCode::precondition,
            "n_filtered cannot exceed n_retrieved");
}

double estimate_manual_time(const TimingModelParams& params) {
    params.validate();
    return params.t_r + params.t_b + params.t_f + params.t_e + params.t_c;
}

TimingModelParams apply_topic_scaling(TimingModelParams params) {
    params.validate();
    require(params.n_filtered > 0, ErrorCode::zero_filtered,
            "cannot scale browse/filter times with n_filtered = 0");
    const double factor = static_cast<double>(params.items) *
                          static_cast<double>(params.n_retrieved) /
                          static_cast<double>(params.n_filtered);
    params.t_b *= factor;
    params.t_f *= factor;
    return params;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() == ys.size(), ErrorCode::degenerate_input, "length mismatch");
    require(xs.size() >= 2, ErrorCode::degenerate_input, "need at least two points");
    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    require(sxx > 0.0 && syy > 0.0, ErrorCode::degenerate_input, "zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace league::quality
