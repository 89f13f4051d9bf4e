#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "league/llm.hpp"

using namespace league;
using Json = nlohmann::ordered_json;

namespace {

llm::ProviderProfile mock_profile() {
    llm::ProviderProfile p;
    p.kind = llm::ProviderKind::scripted_mock;
    p.model_name = "gpt-4o";
    p.price_in_per_million = 2.5;
    p.price_out_per_million = 10.0;
    return p;
}

}  // namespace

TEST_CASE("scripted mock returns the exact scripted text for a fingerprint") {
    llm::ChatRequest req;
    req.system_prompt = "sys";
    req.user_prompt = "user";
    req.model_name = "gpt-4o";

    llm::ScriptedMockProvider mock;
    mock.add_fingerprint_entry(req.fingerprint(), "{\"ok\":true}");

    llm::UsageLedger ledger;
    llm::Gateway gateway(mock, mock_profile(), ledger);
    auto completion = gateway.complete(req);
    CHECK(completion.text == "{\"ok\":true}");
    CHECK(ledger.size() == 1);
    CHECK(mock.upstream_calls() == 1);
}

TEST_CASE("fingerprint is a pure function of prompts, model, and temperature") {
    llm::ChatRequest a;
    a.system_prompt = "s";
    a.user_prompt = "u";
    a.model_name = "m";
    a.temperature = 0.3;
    llm::ChatRequest b = a;
    CHECK(a.fingerprint() == b.fingerprint());
    b.temperature = 0.7;
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.user_prompt = "u2";
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.max_output_tokens = 99;  // not part of the fingerprint
    CHECK(a.fingerprint() == b.fingerprint());
}

TEST_CASE("prompt over the input cap raises ContextOverflow") {
    llm::ChatRequest req;
    req.model_name = "gpt-4o";
    req.user_prompt.reserve(200000 * 4);
    for (int i = 0; i < 200000; ++i) req.user_prompt += "tok ";

    llm::ScriptedMockProvider mock;
    llm::UsageLedger ledger;
    auto profile = mock_profile();
    profile.max_input_tokens = 128000;
    llm::Gateway gateway(mock, profile, ledger);
    try {
        gateway.complete(req);
        FAIL("expected ContextOverflow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::context_overflow);
    }
    CHECK(ledger.size() == 0);
}

TEST_CASE("mock without entry and without fallback raises ScriptMiss") {
    llm::ChatRequest req;
    req.user_prompt = "nothing matches";
    llm::ScriptedMockProvider mock;
    mock.add_regex_entry("only this", "resp");
    llm::UsageLedger ledger;
    llm::Gateway gateway(mock, mock_profile(), ledger);
    try {
        gateway.complete(req);
        FAIL("expected ScriptMiss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::script_miss);
    }
}

TEST_CASE("regex fallback matches on prompt text") {
    llm::ChatRequest req;
    req.system_prompt = "classify the table";
    req.user_prompt = "Caption: Ablation study.";
    llm::ScriptedMockProvider mock;
    mock.add_regex_entry("Ablation study", "ablation", 7, 1);
    llm::UsageLedger ledger;
    llm::Gateway gateway(mock, mock_profile(), ledger);
    auto completion = gateway.complete(req);
    CHECK(completion.text == "ablation");
    CHECK(completion.input_tokens == 7);
    CHECK(completion.output_tokens == 1);
}

TEST_CASE("parse_json_payload tolerates code fences and prose") {
    auto doc = llm::parse_json_payload("```json\n{\"a\":1}\n```", {"a"});
    CHECK(doc["a"] == 1);

    auto doc2 = llm::parse_json_payload("Sure! Here is the result: {\"a\": {\"b\": [1,2]}} done",
                                        {"a"});
    CHECK(doc2["a"]["b"][1] == 2);
}

TEST_CASE("parse_json_payload failure modes") {
    try {
        llm::parse_json_payload("no braces here", {});
        FAIL("expected NoJsonFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_json_found);
    }
    try {
        llm::parse_json_payload("{\"a\":1}", {"a", "b", "c"});
        FAIL("expected MissingKeys");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_keys);
        CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
}

TEST_CASE("parse_json_payload handles the full extraction schema") {
    Json doc = Json::object();
    doc["title"] = "RichIQA";
    doc["number of tables"] = 2;
    doc["classification of tables"] = {{"0", "main-result/comparison"}, {"1", "ablation"}};
    doc["selected table's index"] = 0;
    doc["metrics"] = "SRCC, PLCC";
    doc["selected table's metrics"] = "SRCC, PLCC";
    doc["selected table's core results"] = {{"SRCC", 0.9383}, {"PLCC", 0.95}};
    doc["selected table's settings (model & size)"] = "RichIQA";
    doc["selected table's settings (training strategy)"] = "supervised";
    doc["selected table's settings (hyperparameter selection)"] = Json::object();
    doc["github"] = "";

    std::string text = "```json\n" + doc.dump(2) + "\n```";
    auto parsed = llm::parse_json_payload(text, {"selected table's core results"});
    CHECK(parsed["selected table's core results"]["SRCC"] == 0.9383);
}

TEST_CASE("parse-render round-trip on documents (property)") {
    std::mt19937 rng(17);
    for (int i = 0; i < 200; ++i) {
        Json doc = Json::object();
        int fields = 1 + static_cast<int>(rng() % 6);
        for (int f = 0; f < fields; ++f) {
            std::string key = "k" + std::to_string(f);
            switch (rng() % 4) {
                case 0: doc[key] = static_cast<long long>(rng()); break;
                case 1: doc[key] = "value with \"quotes\" and {braces}"; break;
                case 2: doc[key] = Json::array({1, 2, 3}); break;
                default: doc[key] = Json{{"nested", true}}; break;
            }
        }
        std::string rendered = "prefix text " + doc.dump() + " suffix";
        auto parsed = llm::parse_json_payload(rendered, {});
        CHECK(parsed == doc);
    }
}

TEST_CASE("ledger totals are exact and audited") {
    llm::UsageLedger ledger;
    long long expect_in = 0;
    long long expect_out = 0;
    std::mt19937 rng(5);
    for (int i = 0; i < 500; ++i) {
        llm::UsageEntry e;
        e.input_tokens = static_cast<long long>(rng() % 100000);
        e.output_tokens = static_cast<long long>(rng() % 5000);
        e.wall_time = 0.001 * static_cast<double>(rng() % 1000);
        expect_in += e.input_tokens;
        expect_out += e.output_tokens;
        ledger.append(e);
    }
    CHECK(ledger.total_input() == expect_in);
    CHECK(ledger.total_output() == expect_out);
    CHECK(ledger.audit());
}

TEST_CASE("estimate_cost reproduces the pinned ledger figure") {
    // 834,700 input + 8,900 output at (2.5, 10.0) per million
    llm::UsageLedger ledger;
    llm::UsageEntry e;
    e.input_tokens = 834700;
    e.output_tokens = 8900;
    ledger.append(e);
    auto cost = llm::estimate_cost(ledger, mock_profile());
    CHECK(cost.display() == "2.176");
    CHECK(cost.value() == doctest::Approx(2.176).epsilon(1e-12));
}

TEST_CASE("estimate_cost: zero tokens cost zero") {
    llm::UsageLedger ledger;
    auto cost = llm::estimate_cost(ledger, mock_profile());
    CHECK(cost.milli_units == 0);
    CHECK(cost.display() == "0.000");
}

TEST_CASE("estimate_cost matches an independent recomputation (oracle)") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        llm::UsageLedger ledger;
        long long total_in = 0;
        long long total_out = 0;
        int entries = 1 + static_cast<int>(rng() % 20);
        for (int i = 0; i < entries; ++i) {
            llm::UsageEntry e;
            e.input_tokens = static_cast<long long>(rng() % 1000000);
            e.output_tokens = static_cast<long long>(rng() % 50000);
            total_in += e.input_tokens;
            total_out += e.output_tokens;
            ledger.append(e);
        }
        auto profile = mock_profile();
        // spreadsheet-style: exact integer micro-unit arithmetic
        long long price_in_micro = 2500000;
        long long price_out_micro = 10000000;
        __int128 scaled = static_cast<__int128>(total_in) * price_in_micro +
                          static_cast<__int128>(total_out) * price_out_micro;
        long long expected_milli = static_cast<long long>((scaled + 500000000) / 1000000000);
        CHECK(llm::estimate_cost(ledger, profile).milli_units == expected_milli);
    }
}

TEST_CASE("complete_json re-asks exactly once on shape failures") {
    llm::ChatRequest req;
    req.system_prompt = "s";
    req.user_prompt = "give me json";
    req.model_name = "m";

    llm::ScriptedMockProvider mock;
    // first call: garbage; the re-ask (longer prompt) matches the second entry
    mock.add_fingerprint_entry(req.fingerprint(), "not json at all");
    mock.add_regex_entry("Return only a JSON object", "{\"x\": 42}");

    llm::UsageLedger ledger;
    llm::Gateway gateway(mock, mock_profile(), ledger);
    auto doc = llm::complete_json(gateway, req, {"x"});
    CHECK(doc["x"] == 42);
    CHECK(ledger.size() == 2);
}
