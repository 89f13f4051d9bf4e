#include "league/prompts.hpp"

#include <fstream>
#include <sstream>

#include "league/errors.hpp"

namespace league::prompts {

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
    require(std::filesystem::is_directory(dir), ErrorCode::config_error,
            "prompt directory not found: " + dir.string());
    PromptLibrary lib;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        lib.prompts_[entry.path().stem().string()] = ss.str();
    }
    require(!lib.prompts_.empty(), ErrorCode::config_error,
            "no prompt assets in " + dir.string());
    return lib;
}

const std::string& PromptLibrary::get(const std::string& name) const {
    auto it = prompts_.find(name);
    require(it != prompts_.end(), ErrorCode::config_error, "unknown prompt asset: " + name);
    return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& slots) const {
    return substitute(get(name), slots);
}

std::string substitute(std::string text, const std::map<std::string, std::string>& slots) {
    for (const auto& [key, value] : slots) {
        const std::string token = "[" + key + "]";
        size_t pos = 0;
        while ((pos = text.find(token, pos)) != std::string::npos) {
            text.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return text;
}

}  // namespace league::prompts
