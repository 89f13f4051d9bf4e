#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "league/llm.hpp"

namespace league::run {

// Content-addressed, write-once pipeline cache.
// Layout: cache_dir/<stage>/<hash>.<ext>
class Cache {
public:
    explicit Cache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& stage, const std::string& key) const;

    // Write-once: storing a different payload under an existing key is an
    // integrity error; storing the identical payload is a no-op.
    void put(const std::string& stage, const std::string& key, const std::string& payload,
             const std::string& ext = "json");

    // key = sha256(stage \x1f canonical_inputs)
    static std::string key_of(const std::string& stage, const std::string& canonical_inputs);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& stage, const std::string& key,
                                   const std::string& ext) const;
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

// Provider wrapper that replays completions (text and token counts) from the
// cache; only misses reach the inner provider.
class CachingProvider : public llm::Provider {
public:
    CachingProvider(llm::Provider& inner, Cache& cache) : inner_(inner), cache_(cache) {}

    llm::Completion complete(const llm::ChatRequest& request) override;
    long long upstream_calls() const override { return inner_.upstream_calls(); }

private:
    llm::Provider& inner_;
    Cache& cache_;
};

}  // namespace league::run
