#include "league/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

#include <httplib.h>

namespace league::llm {

using json = nlohmann::ordered_json;

void ChatRequest::validate() const {
    require(max_output_tokens >= 1, ErrorCode::precondition, "max_output_tokens must be >= 1");
    require(temperature >= 0.0 && temperature <= 2.0, ErrorCode::precondition,
            "temperature outside [0,2]");
}

std::string ChatRequest::fingerprint() const {
    std::string canonical;
    canonical.reserve(system_prompt.size() + user_prompt.size() + 64);
    canonical += model_name;
    canonical += '\x1f';
    canonical += text::format_double(temperature);
    canonical += '\x1f';
    canonical += system_prompt;
    canonical += '\x1f';
    canonical += user_prompt;
    return text::sha256_hex(canonical);
}

void ProviderProfile::validate() const {
    require(price_in_per_million >= 0 && price_out_per_million >= 0, ErrorCode::precondition,
            "prices must be >= 0");
    require(max_concurrent >= 1, ErrorCode::precondition, "max_concurrent must be >= 1");
    if (kind == ProviderKind::live_http) {
        require(!endpoint.empty(), ErrorCode::config_error, "live provider needs an endpoint");
    }
}

void UsageLedger::append(UsageEntry entry) {
    std::lock_guard lock(mu_);
    total_input_ += entry.input_tokens;
    total_output_ += entry.output_tokens;
    entries_.push_back(std::move(entry));
}

long long UsageLedger::total_input() const {
    std::lock_guard lock(mu_);
    return total_input_;
}

long long UsageLedger::total_output() const {
    std::lock_guard lock(mu_);
    return total_output_;
}

size_t UsageLedger::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::vector<UsageEntry> UsageLedger::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

bool UsageLedger::audit() const {
    std::lock_guard lock(mu_);
    long long in = 0;
    long long out = 0;
    for (const auto& e : entries_) {
        if (e.wall_time < 0) return false;
        in += e.input_tokens;
        out += e.output_tokens;
    }
    return in == total_input_ && out == total_output_;
}

// ---- scripted mock ----------------------------------------------------------

ScriptedMockProvider ScriptedMockProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::io_error, "cannot open mock script " + path.string());
    json doc = json::parse(in, nullptr, true, true);
    return from_json(doc);
}

ScriptedMockProvider ScriptedMockProvider::from_json(const json& doc) {
    require(doc.is_array(), ErrorCode::config_error, "mock script must be a JSON array");
    ScriptedMockProvider p;
    for (const auto& item : doc) {
        Entry e;
        const auto& match = item.at("match");
        if (match.contains("fingerprint")) e.fingerprint = match["fingerprint"].get<std::string>();
        if (match.contains("prompt_regex")) e.prompt_regex = match["prompt_regex"].get<std::string>();
        require(e.fingerprint.has_value() || e.prompt_regex.has_value(), ErrorCode::config_error,
                "mock entry needs fingerprint or prompt_regex");
        if (item["response"].is_string()) {
            e.response = item["response"].get<std::string>();
        } else {
            e.response = item["response"].dump();
        }
        if (item.contains("input_tokens")) e.input_tokens = item["input_tokens"].get<long long>();
        if (item.contains("output_tokens")) e.output_tokens = item["output_tokens"].get<long long>();
        p.entries_.push_back(std::move(e));
    }
    return p;
}

void ScriptedMockProvider::add_fingerprint_entry(const std::string& fingerprint,
                                                 const std::string& response,
                                                 std::optional<long long> in_tokens,
                                                 std::optional<long long> out_tokens) {
    entries_.push_back(Entry{fingerprint, std::nullopt, response, in_tokens, out_tokens});
}

void ScriptedMockProvider::add_regex_entry(const std::string& pattern, const std::string& response,
                                           std::optional<long long> in_tokens,
                                           std::optional<long long> out_tokens) {
    entries_.push_back(Entry{std::nullopt, pattern, response, in_tokens, out_tokens});
}

Completion ScriptedMockProvider::complete(const ChatRequest& request) {
    ++calls_;
    const std::string fp = request.fingerprint();
    const std::string prompt_text = request.system_prompt + "\n" + request.user_prompt;

    const Entry* hit = nullptr;
    for (const auto& e : entries_) {
        if (e.fingerprint && *e.fingerprint == fp) {
            hit = &e;
            break;
        }
    }
    if (!hit) {
        for (const auto& e : entries_) {
            if (!e.prompt_regex) continue;
            std::regex re(*e.prompt_regex);
            if (std::regex_search(prompt_text, re)) {
                hit = &e;
                break;
            }
        }
    }
    if (!hit) {
        raise(ErrorCode::script_miss,
              "no script entry for fingerprint " + fp.substr(0, 12) + "... and no regex fallback");
    }
    Completion c;
    c.text = hit->response;
    c.input_tokens = hit->input_tokens.value_or(text::count_tokens(prompt_text));
    c.output_tokens = hit->output_tokens.value_or(text::count_tokens(hit->response));
    return c;
}

// ---- live provider ----------------------------------------------------------

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    require(scheme_end != std::string::npos, ErrorCode::config_error, "bad endpoint URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

LiveHttpProvider::LiveHttpProvider(ProviderProfile profile) : profile_(std::move(profile)) {
    profile_.validate();
}

Completion LiveHttpProvider::complete(const ChatRequest& request) {
    json body = {
        {"model", request.model_name.empty() ? profile_.model_name : request.model_name},
        {"messages",
         json::array({{{"role", "system"}, {"content", request.system_prompt}},
                      {{"role", "user"}, {"content", request.user_prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output_tokens},
    };
    const std::string payload = body.dump();

    auto [origin, path] = split_url(profile_.endpoint);
    const char* key = std::getenv(profile_.api_key_env.c_str());

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::seconds(1LL << (attempt - 1)));
        }
        ++calls_;
        httplib::Client client(origin);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            raise(ErrorCode::provider_error,
                  "provider returned " + std::to_string(res->status) + ": " + res->body);
        }
        json doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
            raise(ErrorCode::provider_error, "malformed completion payload");
        }
        Completion c;
        c.text = doc["choices"][0]["message"]["content"].get<std::string>();
        if (doc.contains("usage")) {
            c.input_tokens = doc["usage"].value("prompt_tokens", 0LL);
            c.output_tokens = doc["usage"].value("completion_tokens", 0LL);
        } else {
            c.input_tokens = text::count_tokens(request.system_prompt) +
                             text::count_tokens(request.user_prompt);
            c.output_tokens = text::count_tokens(c.text);
        }
        return c;
    }
    raise(ErrorCode::provider_error, "exhausted retries: " + last_error);
}

// ---- gateway ----------------------------------------------------------------

Completion Gateway::complete(const ChatRequest& request) {
    request.validate();
    long long prompt_tokens =
        text::count_tokens(request.system_prompt) + text::count_tokens(request.user_prompt);
    if (prompt_tokens > profile_.max_input_tokens) {
        raise(ErrorCode::context_overflow,
              "prompt of " + std::to_string(prompt_tokens) + " tokens exceeds cap of " +
                  std::to_string(profile_.max_input_tokens));
    }
    auto start = std::chrono::steady_clock::now();
    Completion c = provider_.complete(request);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    UsageEntry entry;
    entry.fingerprint = request.fingerprint();
    entry.input_tokens = c.input_tokens;
    entry.output_tokens = c.output_tokens;
    entry.model_name = request.model_name.empty() ? profile_.model_name : request.model_name;
    entry.wall_time = elapsed;
    ledger_.append(std::move(entry));
    return c;
}

// ---- JSON payload extraction --------------------------------------------------

json parse_json_payload(const std::string& text, const std::vector<std::string>& required_keys) {
    for (size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        size_t end = std::string::npos;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    end = i;
                    break;
                }
            }
        }
        if (end == std::string::npos) continue;
        json doc = json::parse(text.substr(start, end - start + 1), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) continue;

        std::vector<std::string> missing;
        for (const auto& key : required_keys) {
            if (!doc.contains(key)) missing.push_back(key);
        }
        if (!missing.empty()) {
            std::string list;
            for (const auto& k : missing) {
                if (!list.empty()) list += ", ";
                list += k;
            }
            raise(ErrorCode::missing_keys, "payload lacks required keys: " + list);
        }
        return doc;
    }
    raise(ErrorCode::no_json_found, "no well-formed JSON object in response");
}

json complete_json(Gateway& gateway, ChatRequest request,
                   const std::vector<std::string>& required_keys) {
    Completion first = gateway.complete(request);
    try {
        return parse_json_payload(first.text, required_keys);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::no_json_found && e.code() != ErrorCode::missing_keys) throw;
    }
    request.user_prompt +=
        "\n\nYour previous reply could not be parsed. Return only a JSON object with all required "
        "keys and no surrounding text.";
    Completion second = gateway.complete(request);
    return parse_json_payload(second.text, required_keys);
}

// ---- cost -------------------------------------------------------------------

std::string CostEstimate::display() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%03lld", milli_units / 1000,
                  milli_units >= 0 ? milli_units % 1000 : -(milli_units % 1000));
    return buf;
}

CostEstimate estimate_cost(const UsageLedger& ledger, const ProviderProfile& profile) {
    // prices in micro-units per million tokens keep the sum in integers:
    // tokens * price_micro is cost scaled by 1e12.
    const long long price_in_micro = std::llround(profile.price_in_per_million * 1e6);
    const long long price_out_micro = std::llround(profile.price_out_per_million * 1e6);

    __int128 scaled = 0;
    for (const auto& e : ledger.entries()) {
        scaled += static_cast<__int128>(e.input_tokens) * price_in_micro;
        scaled += static_cast<__int128>(e.output_tokens) * price_out_micro;
    }
    // round half-up to milli-units (three display decimals)
    __int128 milli = (scaled + 500'000'000LL) / 1'000'000'000LL;
    CostEstimate est;
    est.milli_units = static_cast<long long>(milli);
    return est;
}

}  // namespace league::llm
