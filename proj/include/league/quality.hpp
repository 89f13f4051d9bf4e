#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "league/board.hpp"
#include "league/llm.hpp"
#include "league/prompts.hpp"

namespace league::quality {

struct QualityReport {
    double coverage = 0.0;    // 5 * p_used / p_total
    double latest = 0.0;      // 5 * p_new / p_total
    double structure = 0.0;   // rubric-judged integer in [1,5]
    double multiaspect = 0.0;
    long long p_used = 0;
    long long p_total = 0;
    long long p_new = 0;

    nlohmann::ordered_json to_json() const;
};

double score_coverage(long long p_used, long long p_total);
double score_latest(long long p_new, long long p_total);

// Judge prompt embeds the five-level rubric; out-of-range or unparseable
// scores get one re-ask, then error (never silently defaulted).
int score_structure(const board::LeaderboardTable& board, llm::Gateway& judge,
                    const prompts::PromptLibrary& prompts, const std::string& variant_tag = "");

// Sum of coverage+latest+structure over the reports, divided by 3N.
double score_multiaspect(const std::vector<QualityReport>& reports);

// Judge proposes a constrained edit list (merge_columns / drop_row /
// rename_column). Edits are applied only if every board invariant still
// holds; row result values are never altered.
board::LeaderboardTable refine_board(board::LeaderboardTable board, llm::Gateway& judge,
                                     const prompts::PromptLibrary& prompts,
                                     const std::string& variant_tag = "",
                                     std::vector<std::string>* rejected = nullptr);

// Applies one parsed edit document (exposed for tests).
board::LeaderboardTable apply_edits(board::LeaderboardTable board,
                                    const nlohmann::ordered_json& edits,
                                    std::vector<std::string>* rejected = nullptr);

struct Candidate {
    board::LeaderboardTable board;
    QualityReport report;
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    int iters = 0;
};

// Maximal multiaspect; ties by higher coverage then earlier index.
const Candidate& select_best(const CandidateSet& set);

struct TimingModelParams {
    double t_r = 0.0;  // search
    double t_b = 0.0;  // browse
    double t_f = 0.0;  // filter
    double t_e = 0.0;  // extract
    double t_c = 0.0;  // construct
    long long items = 0;        // leaderboard length L
    long long n_retrieved = 0;
    long long n_filtered = 0;

    void validate() const;
};

// T_manual = t_r + t_b + t_f + t_e + t_c (t_b and t_f already scaled).
double estimate_manual_time(const TimingModelParams& params);

// Scales t_b and t_f by L * n_retrieved / n_filtered; ZeroFiltered when
// n_filtered == 0.
TimingModelParams apply_topic_scaling(TimingModelParams params);

// Sample Pearson correlation coefficient.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace league::quality
