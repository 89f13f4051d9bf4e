#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "league/archive.hpp"

namespace league::latex {

enum class SectionLevel { section, subsection, subsubsection };

// One sectioning unit. `body` is the raw LaTeX from the start of the heading
// command up to the next sectioning command, so bodies partition the text
// after the first such command and concatenating them reconstructs it.
struct Section {
    std::string heading;
    SectionLevel level = SectionLevel::section;
    std::string body;
    size_t span_begin = 0;
    size_t span_end = 0;
};

struct TableBlock {
    int index_in_paper = 0;
    std::string raw_env;   // verbatim \begin{table...}...\end{...} slice of the bundle
    std::string caption;   // markup-stripped innermost \caption
    std::vector<std::vector<std::string>> grid;  // rectangular after multicolumn expansion
    std::string description;  // nearby prose referencing the table, possibly empty
    std::string label;
    size_t env_begin = 0;  // offset of raw_env within the bundle
};

// Splits on \section/\subsection/\subsubsection (starred variants included).
// Throws NoSections when the bundle has no sectioning command.
std::vector<Section> split_sections(const std::string& bundle);

// Keeps sections whose heading matches the experiment lexicon
// (experiment / evaluation / results / empirical study, case-insensitive
// substring). Falls back to all sections when nothing matches.
std::vector<Section> select_experiment_sections(const std::vector<Section>& sections);

// One block per table/table* environment in document order, skipping
// commented-out environments. Unbalanced environments are skipped and
// reported through `warnings`.
std::vector<TableBlock> extract_tables(const std::string& bundle,
                                       const std::vector<Section>& sections,
                                       std::vector<std::string>* warnings = nullptr);

// Removes formatting wrappers keeping the argument text, drops \cite/\ref,
// strips math delimiters, maps \% -> % and arrow macros to glyphs, collapses
// whitespace. Idempotent.
std::string strip_latex_markup(std::string_view cell);

// Resolves \input/\include against the file set (each file expanded at most
// once), starting from the main file; unreferenced .tex members are appended
// in archive order. Single-member sets pass through unchanged.
std::string assemble_bundle(const std::vector<archive::Member>& files);

// True where the character sits inside a % comment (escaped \% honored).
std::vector<bool> comment_mask(std::string_view bundle);

}  // namespace league::latex
