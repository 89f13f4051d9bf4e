#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace league::prompts {

// Versioned prompt assets. Placeholders use the [NAME] convention, e.g.
// [SPECIFIED DATASET], [ARTICLE], [EXAMPLE JSON].
class PromptLibrary {
public:
    static PromptLibrary load(const std::filesystem::path& dir);

    const std::string& get(const std::string& name) const;
    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& slots) const;

    bool has(const std::string& name) const { return prompts_.count(name) > 0; }

private:
    std::map<std::string, std::string> prompts_;
};

std::string substitute(std::string text, const std::map<std::string, std::string>& slots);

}  // namespace league::prompts
