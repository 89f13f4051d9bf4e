#include "league/cache.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "league/text.hpp"

namespace league::run {

using Json = nlohmann::ordered_json;

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    require(!ec, ErrorCode::io_error, "cannot create cache dir " + dir_.string());
}

std::string Cache::key_of(const std::string& stage, const std::string& canonical_inputs) {
    return text::sha256_hex(stage + '\x1f' + canonical_inputs);
}

std::filesystem::path Cache::path_for(const std::string& stage, const std::string& key,
                                      const std::string& ext) const {
    return dir_ / stage / (key + "." + ext);
}

std::optional<std::string> Cache::get(const std::string& stage, const std::string& key) const {
    std::lock_guard lock(mu_);
    for (const char* ext : {"json", "bin"}) {
        auto path = path_for(stage, key, ext);
        std::ifstream in(path, std::ios::binary);
        if (!in.good()) continue;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return std::nullopt;
}

void Cache::put(const std::string& stage, const std::string& key, const std::string& payload,
                const std::string& ext) {
    std::lock_guard lock(mu_);
    auto path = path_for(stage, key, ext);

    std::ifstream existing(path, std::ios::binary);
    if (existing.good()) {
        std::ostringstream old;
        old << existing.rdbuf();
        if (old.str() == payload) return;  // idempotent put
        raise(ErrorCode::integrity_error,
              "cache key " + key.substr(0, 12) + "... in stage '" + stage +
                  "' already holds a different payload");
    }

    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    require(!ec, ErrorCode::io_error, "cannot create " + path.parent_path().string());

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::io_error, "cannot write " + tmp.string());
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCode::io_error, "cannot finalize " + path.string());
}

llm::Completion CachingProvider::complete(const llm::ChatRequest& request) {
    const std::string key = request.fingerprint();
    if (auto hit = cache_.get("llm", key)) {
        Json doc = Json::parse(*hit);
        llm::Completion c;
        c.text = doc.at("text").get<std::string>();
        c.input_tokens = doc.at("input_tokens").get<long long>();
        c.output_tokens = doc.at("output_tokens").get<long long>();
        return c;
    }
    llm::Completion c = inner_.complete(request);
    Json doc = Json::object();
    doc["text"] = c.text;
    doc["input_tokens"] = c.input_tokens;
    doc["output_tokens"] = c.output_tokens;
    cache_.put("llm", key, doc.dump(2));
    return c;
}

}  // namespace league::run
