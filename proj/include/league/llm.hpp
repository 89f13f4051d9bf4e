#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "league/errors.hpp"

namespace league::llm {

struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    std::string model_name;
    double temperature = 0.3;
    long long max_output_tokens = 4096;

    // Pure function of (prompts, model, temperature).
    std::string fingerprint() const;
    void validate() const;
};

struct UsageEntry {
    std::string fingerprint;
    long long input_tokens = 0;
    long long output_tokens = 0;
    std::string model_name;
    double wall_time = 0.0;  // seconds
};

class UsageLedger {
public:
    void append(UsageEntry entry);
    long long total_input() const;
    long long total_output() const;
    size_t size() const;
    std::vector<UsageEntry> entries() const;

    // Recomputes totals from entries and compares with the running sums.
    bool audit() const;

private:
    mutable std::mutex mu_;
    std::vector<UsageEntry> entries_;
    long long total_input_ = 0;
    long long total_output_ = 0;
};

enum class ProviderKind { live_http, scripted_mock };

struct ProviderProfile {
    ProviderKind kind = ProviderKind::scripted_mock;
    std::string endpoint;  // live only, e.g. https://api.example.com/v1/chat/completions
    std::string model_name;
    double price_in_per_million = 0.0;
    double price_out_per_million = 0.0;
    int max_concurrent = 1;
    long long max_input_tokens = 128000;
    double temperature = 0.3;  // extraction default; 0.7 is the sampling-style alternative
    long long max_output_tokens = 4096;
    std::string api_key_env = "LEAGUE_API_KEY";

    void validate() const;
};

struct Completion {
    std::string text;
    long long input_tokens = 0;
    long long output_tokens = 0;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual Completion complete(const ChatRequest& request) = 0;
    // Number of actual upstream invocations (mock lookups count too).
    virtual long long upstream_calls() const = 0;
};

// Deterministic stand-in keyed by request fingerprint, with an optional
// regex-on-prompt fallback table. Script format: a JSON array of
//   {"match": {"fingerprint": ...} | {"prompt_regex": ...},
//    "response": ..., "input_tokens"?: int, "output_tokens"?: int}
class ScriptedMockProvider : public Provider {
public:
    static ScriptedMockProvider from_file(const std::filesystem::path& path);
    static ScriptedMockProvider from_json(const nlohmann::ordered_json& doc);
    ScriptedMockProvider() = default;

    void add_fingerprint_entry(const std::string& fingerprint, const std::string& response,
                               std::optional<long long> in_tokens = std::nullopt,
                               std::optional<long long> out_tokens = std::nullopt);
    void add_regex_entry(const std::string& pattern, const std::string& response,
                         std::optional<long long> in_tokens = std::nullopt,
                         std::optional<long long> out_tokens = std::nullopt);

    Completion complete(const ChatRequest& request) override;
    long long upstream_calls() const override { return calls_; }

private:
    struct Entry {
        std::optional<std::string> fingerprint;
        std::optional<std::string> prompt_regex;
        std::string response;
        std::optional<long long> input_tokens;
        std::optional<long long> output_tokens;
    };
    std::vector<Entry> entries_;
    long long calls_ = 0;
};

// JSON-over-HTTPS chat-completion client (messages array in, choices[0] out).
// Retries transport failures and 5xx with 1s/2s/4s backoff.
class LiveHttpProvider : public Provider {
public:
    explicit LiveHttpProvider(ProviderProfile profile);
    Completion complete(const ChatRequest& request) override;
    long long upstream_calls() const override { return calls_; }

private:
    ProviderProfile profile_;
    long long calls_ = 0;
};

// Front door: input-cap enforcement plus the usage ledger.
class Gateway {
public:
    Gateway(Provider& provider, ProviderProfile profile, UsageLedger& ledger)
        : provider_(provider), profile_(std::move(profile)), ledger_(ledger) {}

    Completion complete(const ChatRequest& request);

    // Request seeded with the profile's model, temperature, and output cap.
    ChatRequest make_request() const {
        ChatRequest r;
        r.model_name = profile_.model_name;
        r.temperature = profile_.temperature;
        r.max_output_tokens = profile_.max_output_tokens;
        return r;
    }

    const ProviderProfile& profile() const { return profile_; }
    UsageLedger& ledger() { return ledger_; }

private:
    Provider& provider_;
    ProviderProfile profile_;
    UsageLedger& ledger_;
};

// Extracts the first well-formed JSON object in `text` (code fences and
// surrounding prose tolerated) and verifies the required keys.
nlohmann::ordered_json parse_json_payload(const std::string& text,
                                  const std::vector<std::string>& required_keys);

// complete + parse_json_payload with exactly one re-ask appending a
// "return only JSON" instruction on shape failures.
nlohmann::ordered_json complete_json(Gateway& gateway, ChatRequest request,
                             const std::vector<std::string>& required_keys);

struct CostEstimate {
    long long milli_units = 0;  // currency * 1000, rounded half-up

    double value() const { return static_cast<double>(milli_units) / 1000.0; }
    std::string display() const;
};

// input_tokens * price_in/1e6 + output_tokens * price_out/1e6, exact integer
// arithmetic internally, rounded to 3 decimals for display.
CostEstimate estimate_cost(const UsageLedger& ledger, const ProviderProfile& profile);

}  // namespace league::llm
