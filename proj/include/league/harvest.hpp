#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "league/archive.hpp"
#include "league/date.hpp"
#include "league/errors.hpp"

namespace league::harvest {

enum class SourceKind { arxiv, fixture_dir };
enum class FetchStatus { pending, fetched, failed };

struct SourceQuery {
    std::string topic;
    Date cutoff_date{};
    int max_results = 100;
    SourceKind source_kind = SourceKind::fixture_dir;
    std::filesystem::path fixture_dir;

    void validate() const;
};

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract_text;
    Date published{};
    double relevance = 0.0;
    std::optional<std::string> latex_bundle;
    FetchStatus fetch_status = FetchStatus::pending;
    std::string fail_reason;

    // plumbing: where to fetch from and what the archive contained
    SourceKind origin = SourceKind::fixture_dir;
    std::filesystem::path fixture_path;
    std::vector<archive::Member> source_files;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

// Live transport: one in-flight request, fixed inter-request delay, three
// retries with doubled backoff.
class LiveTransport : public HttpTransport {
public:
    struct Options {
        double inter_request_delay_s = 3.0;
        int retries = 3;
        double first_backoff_s = 3.0;
        std::function<void(double)> sleeper;  // injectable for tests
    };
    LiveTransport() : LiveTransport(Options{}) {}
    explicit LiveTransport(Options options);
    HttpResponse get(const std::string& url) override;

private:
    Options options_;
    std::mutex mu_;
    bool first_request_ = true;
};

// Replays responses from a cassette directory: <sha256(url)>.body files,
// optional .status sidecar (defaults to 200). Missing cassette -> SourceUnreachable.
class ReplayTransport : public HttpTransport {
public:
    explicit ReplayTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}
    HttpResponse get(const std::string& url) override;

    static std::filesystem::path cassette_path(const std::filesystem::path& dir,
                                               const std::string& url);

private:
    std::filesystem::path dir_;
};

// arXiv API endpoints; templates documented in the README.
std::string arxiv_query_url(const std::string& topic, int max_results);
std::string arxiv_source_url(const std::string& paper_id);

// Atom feed -> metadata-only records (exposed for replay tests).
std::vector<PaperRecord> parse_atom_feed(const std::string& xml);

// Fixture file front matter: ID:/TITLE:/DATE:/ABSTRACT: lines, then the LaTeX body.
PaperRecord parse_fixture_file(const std::filesystem::path& path);

std::vector<PaperRecord> search_papers(const SourceQuery& query,
                                       HttpTransport* transport = nullptr);

std::vector<PaperRecord> filter_by_date(const std::vector<PaperRecord>& papers, Date cutoff);

// Deterministic lexical score: matched distinct topic tokens over total
// distinct topic tokens, title and abstract treated identically.
double score_relevance(const PaperRecord& paper, const std::string& topic);

std::vector<PaperRecord> filter_by_relevance(const std::vector<PaperRecord>& papers,
                                             const std::string& topic, double threshold);

// Downloads and unpacks the LaTeX source; on failure the record is retained
// with fetch_status=failed and a reason, never dropped.
PaperRecord fetch_source(PaperRecord paper, HttpTransport* transport = nullptr);

// Concatenates .tex members in archive order (the latex_bundle contract).
std::string bundle_from_members(const std::vector<archive::Member>& members);

}  // namespace league::harvest
