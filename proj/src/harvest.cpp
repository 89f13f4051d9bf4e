#include "league/harvest.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "league/text.hpp"

namespace league::harvest {

void SourceQuery::validate() const {
    require(!text::trim(topic).empty(), ErrorCode::precondition, "topic is empty");
    require(max_results >= 1, ErrorCode::precondition, "max_results must be >= 1");
    if (source_kind == SourceKind::fixture_dir) {
        require(std::filesystem::is_directory(fixture_dir), ErrorCode::precondition,
                "fixture_dir does not exist: " + fixture_dir.string());
    }
}

// ---- transports --------------------------------------------------------------

LiveTransport::LiveTransport(Options options) : options_(std::move(options)) {
    if (!options_.sleeper) {
        options_.sleeper = [](double s) {
            std::this_thread::sleep_for(std::chrono::duration<double>(s));
        };
    }
}

HttpResponse LiveTransport::get(const std::string& url) {
    std::lock_guard lock(mu_);  // one in-flight request to the live source
    auto scheme_end = url.find("://");
    require(scheme_end != std::string::npos, ErrorCode::precondition, "bad URL " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    std::string last_error;
    double backoff = options_.first_backoff_s;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            options_.sleeper(backoff);
            backoff *= 2;
        } else if (!first_request_) {
            options_.sleeper(options_.inter_request_delay_s);
        }
        first_request_ = false;

        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        auto res = client.Get(path);
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        return {res->status, res->body};
    }
    raise(ErrorCode::source_unreachable, "GET " + url + " failed after retries: " + last_error);
}

std::filesystem::path ReplayTransport::cassette_path(const std::filesystem::path& dir,
                                                     const std::string& url) {
    return dir / (text::sha256_hex(url).substr(0, 24) + ".body");
}

HttpResponse ReplayTransport::get(const std::string& url) {
    auto path = cassette_path(dir_, url);
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        raise(ErrorCode::source_unreachable, "no cassette for " + url + " at " + path.string());
    }
    std::ostringstream body;
    body << in.rdbuf();
    int status = 200;
    std::ifstream st(path.string() + ".status");
    if (st.good()) st >> status;
    return {status, body.str()};
}

// ---- arXiv ------------------------------------------------------------------

namespace {

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string tag_content(std::string_view entry, std::string_view tag) {
    std::string open = "<" + std::string(tag);
    size_t pos = entry.find(open);
    if (pos == std::string_view::npos) return "";
    size_t content_start = entry.find('>', pos);
    if (content_start == std::string_view::npos) return "";
    ++content_start;
    std::string close = "</" + std::string(tag) + ">";
    size_t end = entry.find(close, content_start);
    if (end == std::string_view::npos) return "";
    return text::xml_unescape(
        text::collapse_whitespace(entry.substr(content_start, end - content_start)));
}

}  // namespace

std::string arxiv_query_url(const std::string& topic, int max_results) {
    return "https://export.arxiv.org/api/query?search_query=all:%22" + url_encode(topic) +
           "%22&start=0&max_results=" + std::to_string(max_results) +
           "&sortBy=submittedDate&sortOrder=descending";
}

std::string arxiv_source_url(const std::string& paper_id) {
    return "https://export.arxiv.org/e-print/" + url_encode(paper_id);
}

std::vector<PaperRecord> parse_atom_feed(const std::string& xml) {
    require(xml.find("<feed") != std::string::npos, ErrorCode::malformed_response,
            "payload is not an Atom feed");
    std::vector<PaperRecord> records;
    size_t pos = 0;
    while (true) {
        size_t start = xml.find("<entry>", pos);
        if (start == std::string::npos) break;
        size_t end = xml.find("</entry>", start);
        if (end == std::string::npos) {
            raise(ErrorCode::malformed_response, "unterminated <entry>");
        }
        std::string_view entry(xml.data() + start, end - start);

        PaperRecord r;
        std::string id_url = tag_content(entry, "id");
        size_t abs = id_url.rfind("/abs/");
        r.paper_id = abs == std::string::npos ? id_url : id_url.substr(abs + 5);
        r.title = tag_content(entry, "title");
        r.abstract_text = tag_content(entry, "summary");
        std::string published = tag_content(entry, "published");
        if (r.paper_id.empty() || r.title.empty() || published.empty()) {
            raise(ErrorCode::malformed_response, "entry missing id/title/published");
        }
        r.published = Date::parse(published);
        r.origin = SourceKind::arxiv;
        records.push_back(std::move(r));
        pos = end + 8;
    }
    return records;
}

// ---- fixtures -----------------------------------------------------------------

PaperRecord parse_fixture_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io_error, "cannot open fixture " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();

    PaperRecord r;
    r.origin = SourceKind::fixture_dir;
    r.fixture_path = path;

    size_t offset = 0;
    auto lines = text::split_lines(content);
    size_t consumed_lines = 0;
    for (const auto& line : lines) {
        std::string t = text::trim(line);
        bool matched = true;
        if (t.rfind("ID:", 0) == 0) r.paper_id = text::trim(t.substr(3));
        else if (t.rfind("TITLE:", 0) == 0) r.title = text::trim(t.substr(6));
        else if (t.rfind("DATE:", 0) == 0) r.published = Date::parse(text::trim(t.substr(5)));
        else if (t.rfind("ABSTRACT:", 0) == 0) r.abstract_text = text::trim(t.substr(9));
        else matched = false;
        if (!matched) break;
        offset += line.size() + 1;
        ++consumed_lines;
    }
    require(!r.paper_id.empty() && !r.title.empty() && r.published.valid(),
            ErrorCode::malformed_response,
            "fixture " + path.string() + " lacks ID/TITLE/DATE front matter");
    // one optional separating blank line
    if (consumed_lines < lines.size() && text::trim(lines[consumed_lines]).empty()) {
        offset += lines[consumed_lines].size() + 1;
    }
    if (offset > content.size()) offset = content.size();
    r.source_files.push_back({r.paper_id + ".tex", content.substr(offset)});
    return r;
}

// ---- operations ----------------------------------------------------------------

std::vector<PaperRecord> search_papers(const SourceQuery& query, HttpTransport* transport) {
    query.validate();
    std::vector<PaperRecord> records;

    if (query.source_kind == SourceKind::fixture_dir) {
        for (const auto& entry : std::filesystem::directory_iterator(query.fixture_dir)) {
            if (!entry.is_regular_file()) continue;
            records.push_back(parse_fixture_file(entry.path()));
        }
        std::sort(records.begin(), records.end(),
                  [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
    } else {
        require(transport != nullptr, ErrorCode::precondition, "live search needs a transport");
        auto response = transport->get(arxiv_query_url(query.topic, query.max_results));
        if (response.status != 200) {
            raise(ErrorCode::source_unreachable,
                  "search returned HTTP " + std::to_string(response.status));
        }
        records = parse_atom_feed(response.body);
    }

    std::unordered_set<std::string> seen;
    std::vector<PaperRecord> unique;
    for (auto& r : records) {
        if (seen.insert(r.paper_id).second) unique.push_back(std::move(r));
    }
    if (static_cast<int>(unique.size()) > query.max_results) {
        unique.resize(static_cast<size_t>(query.max_results));
    }
    for (auto& r : unique) {
        r.fetch_status = FetchStatus::pending;
        r.latex_bundle.reset();
        if (r.origin == SourceKind::arxiv) r.source_files.clear();
    }
    return unique;
}

std::vector<PaperRecord> filter_by_date(const std::vector<PaperRecord>& papers, Date cutoff) {
    std::vector<PaperRecord> kept;
    kept.reserve(papers.size());
    for (const auto& p : papers) {
        require(p.published.valid(), ErrorCode::precondition,
                "record " + p.paper_id + " lacks a published date");
        if (p.published >= cutoff) kept.push_back(p);
    }
    return kept;
}

double score_relevance(const PaperRecord& paper, const std::string& topic) {
    require(!paper.title.empty(), ErrorCode::precondition, "record lacks title");
    auto topic_tokens = text::distinct_tokens(topic);
    if (topic_tokens.empty()) return 0.0;

    std::unordered_set<std::string> doc;
    for (auto& t : text::tokenize(paper.title)) doc.insert(std::move(t));
    for (auto& t : text::tokenize(paper.abstract_text)) doc.insert(std::move(t));

    size_t matched = 0;
    for (const auto& t : topic_tokens) {
        if (doc.count(t)) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(topic_tokens.size());
}

std::vector<PaperRecord> filter_by_relevance(const std::vector<PaperRecord>& papers,
                                             const std::string& topic, double threshold) {
    require(threshold >= 0.0 && threshold <= 1.0, ErrorCode::precondition,
            "threshold outside [0,1]");
    std::vector<PaperRecord> kept;
    for (const auto& p : papers) {
        double score = score_relevance(p, topic);
        if (score >= threshold) {
            kept.push_back(p);
            kept.back().relevance = score;
        }
    }
    return kept;
}

std::string bundle_from_members(const std::vector<archive::Member>& members) {
    std::string bundle;
    for (const auto& m : members) {
        if (m.name.size() >= 4 && m.name.substr(m.name.size() - 4) == ".tex") {
            bundle += m.data;
        }
    }
    return bundle;
}

PaperRecord fetch_source(PaperRecord paper, HttpTransport* transport) {
    require(paper.fetch_status == FetchStatus::pending, ErrorCode::precondition,
            "fetch_source needs a pending record");

    auto fail = [&](ErrorCode code, const std::string& why) {
        paper.fetch_status = FetchStatus::failed;
        paper.fail_reason = std::string(error_code_name(code)) + ": " + why;
        return paper;
    };

    if (paper.origin == SourceKind::fixture_dir) {
        // fixture body was captured at search time
        if (paper.source_files.empty()) return fail(ErrorCode::archive_unavailable, "no fixture body");
        paper.latex_bundle = bundle_from_members(paper.source_files);
        paper.fetch_status = FetchStatus::fetched;
        return paper;
    }

    require(transport != nullptr, ErrorCode::precondition, "live fetch needs a transport");
    std::string bytes;
    try {
        auto response = transport->get(arxiv_source_url(paper.paper_id));
        if (response.status != 200) {
            return fail(ErrorCode::archive_unavailable, "HTTP " + std::to_string(response.status));
        }
        bytes = std::move(response.body);
    } catch (const Error& e) {
        return fail(ErrorCode::archive_unavailable, e.what());
    }

    try {
        if (archive::looks_gzip(bytes)) bytes = archive::gunzip(bytes);
    } catch (const Error& e) {
        return fail(ErrorCode::archive_unavailable, e.what());
    }
    if (archive::looks_pdf(bytes)) {
        return fail(ErrorCode::archive_not_latex, "source archive is a PDF");
    }

    std::vector<archive::Member> members;
    if (archive::looks_tar(bytes)) {
        members = archive::read_tar(bytes);
    } else {
        // a gzipped single .tex file is a common arXiv source layout
        members.push_back({paper.paper_id + ".tex", std::move(bytes)});
    }

    std::string bundle = bundle_from_members(members);
    if (bundle.empty()) {
        return fail(ErrorCode::archive_not_latex, "archive has no .tex member");
    }
    paper.source_files = std::move(members);
    paper.latex_bundle = std::move(bundle);
    paper.fetch_status = FetchStatus::fetched;
    return paper;
}

}  // namespace league::harvest
