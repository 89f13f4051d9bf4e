#include "league/latex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "league/errors.hpp"
#include "league/text.hpp"

namespace league::latex {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)); }

// Position one past the matching close brace; `pos` must sit on '{'.
// Returns npos when unbalanced.
size_t skip_group(std::string_view s, size_t pos) {
    if (pos >= s.size() || s[pos] != '{') return std::string_view::npos;
    int depth = 0;
    for (size_t i = pos; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            ++i;  // escaped char, including \{ and \}
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

size_t skip_optional_bracket(std::string_view s, size_t pos) {
    if (pos < s.size() && s[pos] == '[') {
        size_t close = s.find(']', pos);
        if (close != std::string_view::npos) return close + 1;
    }
    return pos;
}

std::string group_content(std::string_view s, size_t open, size_t past_close) {
    return std::string(s.substr(open + 1, past_close - open - 2));
}

}  // namespace

std::vector<bool> comment_mask(std::string_view bundle) {
    std::vector<bool> mask(bundle.size(), false);
    bool in_comment = false;
    for (size_t i = 0; i < bundle.size(); ++i) {
        char c = bundle[i];
        if (in_comment) {
            if (c == '\n') {
                in_comment = false;
                continue;  // the newline itself stays visible
            }
            mask[i] = true;
            continue;
        }
        if (c == '\\' && i + 1 < bundle.size()) {
            ++i;  // \% and friends never open a comment
            continue;
        }
        if (c == '%') {
            in_comment = true;
            mask[i] = true;
        }
    }
    return mask;
}

namespace {

// Copy of the bundle with comment characters blanked to spaces; offsets are
// preserved so slices map back to the verbatim source.
std::string blank_comments(std::string_view bundle) {
    auto mask = comment_mask(bundle);
    std::string out(bundle);
    for (size_t i = 0; i < out.size(); ++i) {
        if (mask[i]) out[i] = ' ';
    }
    return out;
}

struct EnvToken {
    size_t pos = 0;        // offset of the backslash
    size_t end = 0;        // one past the closing brace of the env name
    std::string name;
    bool opening = false;
};

std::optional<EnvToken> read_env_token(std::string_view s, size_t pos) {
    EnvToken t;
    t.pos = pos;
    std::string_view rest = s.substr(pos);
    if (rest.starts_with("\\begin")) {
        t.opening = true;
        pos += 6;
    } else if (rest.starts_with("\\end")) {
        t.opening = false;
        pos += 4;
    } else {
        return std::nullopt;
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    size_t past = skip_group(s, pos);
    if (past == std::string_view::npos) return std::nullopt;
    t.name = text::trim(group_content(s, pos, past));
    t.end = past;
    return t;
}

const std::set<std::string, std::less<>> kTabularEnvs = {"tabular", "tabular*", "tabularx"};

}  // namespace

std::vector<Section> split_sections(const std::string& bundle) {
    require(!bundle.empty(), ErrorCode::precondition, "empty bundle");
    std::string blanked = blank_comments(bundle);

    struct Cmd {
        size_t pos;
        SectionLevel level;
        std::string heading;
    };
    static const std::array<std::pair<std::string_view, SectionLevel>, 3> kLevels = {{
        {"\\subsubsection", SectionLevel::subsubsection},
        {"\\subsection", SectionLevel::subsection},
        {"\\section", SectionLevel::section},
    }};

    std::vector<Cmd> cmds;
    for (size_t i = 0; i < blanked.size(); ++i) {
        if (blanked[i] != '\\') continue;
        for (const auto& [kw, level] : kLevels) {
            if (blanked.compare(i, kw.size(), kw) != 0) continue;
            size_t p = i + kw.size();
            if (p < blanked.size() && is_letter(blanked[p])) break;  // longer command name
            if (p < blanked.size() && blanked[p] == '*') ++p;
            p = skip_optional_bracket(blanked, p);
            while (p < blanked.size() && std::isspace(static_cast<unsigned char>(blanked[p]))) ++p;
            size_t past = skip_group(blanked, p);
            if (past == std::string_view::npos) break;
            std::string heading = strip_latex_markup(group_content(blanked, p, past));
            if (!heading.empty()) {
                cmds.push_back({i, level, std::move(heading)});
                i = past - 1;
            }
            break;
        }
    }
    if (cmds.empty()) raise(ErrorCode::no_sections, "no sectioning command in bundle");

    std::vector<Section> sections;
    sections.reserve(cmds.size());
    for (size_t k = 0; k < cmds.size(); ++k) {
        size_t begin = cmds[k].pos;
        size_t end = (k + 1 < cmds.size()) ? cmds[k + 1].pos : bundle.size();
        Section s;
        s.heading = cmds[k].heading;
        s.level = cmds[k].level;
        s.span_begin = begin;
        s.span_end = end;
        s.body = bundle.substr(begin, end - begin);
        sections.push_back(std::move(s));
    }
    return sections;
}

std::vector<Section> select_experiment_sections(const std::vector<Section>& sections) {
    static const std::array<std::string_view, 4> kLexicon = {"experiment", "evaluation", "results",
                                                             "empirical study"};
    std::vector<Section> matched;
    for (const auto& s : sections) {
        for (auto word : kLexicon) {
            if (text::contains_ci(s.heading, word)) {
                matched.push_back(s);
                break;
            }
        }
    }
    if (matched.empty()) return sections;  // documented fallback
    return matched;
}

namespace {

// ---- tabular grid parsing -------------------------------------------------

struct RawRow {
    std::vector<std::string> cells;
    bool had_separator = false;  // row contained at least one '&'
};

std::vector<RawRow> split_tabular_rows(std::string_view content) {
    std::vector<RawRow> rows;
    RawRow row;
    size_t cell_start = 0;
    int brace = 0;
    int env = 0;

    auto flush_cell = [&](size_t end_pos) {
        row.cells.emplace_back(content.substr(cell_start, end_pos - cell_start));
    };
    auto flush_row = [&](size_t end_pos, size_t next_start) {
        flush_cell(end_pos);
        rows.push_back(std::move(row));
        row = RawRow{};
        cell_start = next_start;
    };

    for (size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (c == '\\') {
            if (i + 1 < content.size() && content[i + 1] == '\\') {
                if (brace == 0 && env == 0) {
                    size_t next = i + 2;
                    if (next < content.size() && content[next] == '*') ++next;
                    next = skip_optional_bracket(content, next);
                    flush_row(i, next);
                    i = next - 1;
                } else {
                    ++i;
                }
                continue;
            }
            if (auto tok = read_env_token(content, i)) {
                env += tok->opening ? 1 : -1;
                i = tok->end - 1;
                continue;
            }
            size_t j = i + 1;
            if (j < content.size() && !is_letter(content[j])) {
                ++i;  // escaped symbol such as \& or \%
                continue;
            }
            while (j < content.size() && is_letter(content[j])) ++j;
            i = j - 1;
            continue;
        }
        if (c == '{') ++brace;
        else if (c == '}') --brace;
        else if (c == '&' && brace == 0 && env == 0) {
            flush_cell(i);
            row.had_separator = true;
            cell_start = i + 1;
        }
    }
    if (cell_start < content.size() || !row.cells.empty()) {
        flush_cell(content.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

// Expands \multicolumn{n}{fmt}{content} into n cells.
std::vector<std::string> expand_multicolumn(const std::string& raw_cell) {
    std::string t = text::trim(raw_cell);
    size_t pos = t.find("\\multicolumn");
    if (pos != 0) return {raw_cell};
    size_t p = 12;
    while (p < t.size() && std::isspace(static_cast<unsigned char>(t[p]))) ++p;
    size_t g1 = skip_group(t, p);
    if (g1 == std::string::npos) return {raw_cell};
    int span = 1;
    try {
        span = std::max(1, std::stoi(group_content(t, p, g1)));
    } catch (...) {
        return {raw_cell};
    }
    size_t g2 = skip_group(t, g1);
    if (g2 == std::string::npos) return {raw_cell};
    size_t g3 = skip_group(t, g2);
    if (g3 == std::string::npos) return {raw_cell};
    std::vector<std::string> cells;
    cells.push_back(group_content(t, g2, g3) + t.substr(g3));
    for (int i = 1; i < span; ++i) cells.emplace_back();
    return cells;
}

std::vector<std::vector<std::string>> parse_grid(std::string_view table_env) {
    // Locate the first tabular-ish environment, descending through wrappers.
    size_t open = std::string_view::npos;
    std::string env_name;
    for (size_t i = 0; i < table_env.size(); ++i) {
        if (table_env[i] != '\\') continue;
        auto tok = read_env_token(table_env, i);
        if (tok && tok->opening && kTabularEnvs.count(tok->name)) {
            open = tok->end;
            env_name = tok->name;
            break;
        }
    }
    if (open == std::string_view::npos) return {};

    // Skip the environment arguments: tabular [pos]{cols},
    // tabular*/tabularx {width}[pos]{cols}.
    size_t p = open;
    while (p < table_env.size() && std::isspace(static_cast<unsigned char>(table_env[p]))) ++p;
    int brace_groups = (env_name == "tabular") ? 1 : 2;
    for (int g = 0; g < brace_groups; ++g) {
        p = skip_optional_bracket(table_env, p);
        while (p < table_env.size() && std::isspace(static_cast<unsigned char>(table_env[p]))) ++p;
        size_t past = skip_group(table_env, p);
        if (past == std::string_view::npos) break;
        p = past;
    }

    // Find the matching \end, honoring nested same-name environments.
    int depth = 1;
    size_t body_end = table_env.size();
    for (size_t i = p; i < table_env.size(); ++i) {
        if (table_env[i] != '\\') continue;
        auto tok = read_env_token(table_env, i);
        if (!tok || tok->name != env_name) continue;
        depth += tok->opening ? 1 : -1;
        if (depth == 0) {
            body_end = tok->pos;
            break;
        }
        i = tok->end - 1;
    }

    std::vector<std::vector<std::string>> grid;
    for (auto& raw : split_tabular_rows(table_env.substr(p, body_end - p))) {
        std::vector<std::string> cells;
        for (auto& c : raw.cells) {
            for (auto& expanded : expand_multicolumn(c)) {
                cells.push_back(strip_latex_markup(expanded));
            }
        }
        bool all_empty = std::all_of(cells.begin(), cells.end(),
                                     [](const std::string& c) { return c.empty(); });
        if (all_empty) continue;  // rule-only or spacing rows
        grid.push_back(std::move(cells));
    }
    size_t width = 0;
    for (auto& r : grid) width = std::max(width, r.size());
    for (auto& r : grid) r.resize(width);
    return grid;
}

// ---- caption / label ------------------------------------------------------

std::string find_caption(std::string_view table_env) {
    // Innermost caption: the one at the greatest environment nesting depth.
    std::string best;
    int best_depth = -1;
    int depth = 0;
    for (size_t i = 0; i < table_env.size(); ++i) {
        if (table_env[i] != '\\') continue;
        if (auto tok = read_env_token(table_env, i)) {
            depth += tok->opening ? 1 : -1;
            i = tok->end - 1;
            continue;
        }
        if (table_env.compare(i, 8, "\\caption") == 0) {
            size_t q = i + 8;
            if (q < table_env.size() && is_letter(table_env[q])) continue;  // \captionof etc.
            if (q < table_env.size() && table_env[q] == '*') ++q;
            q = skip_optional_bracket(table_env, q);
            while (q < table_env.size() && std::isspace(static_cast<unsigned char>(table_env[q]))) ++q;
            size_t past = skip_group(table_env, q);
            if (past == std::string_view::npos) continue;
            if (depth > best_depth) {
                best_depth = depth;
                best = group_content(table_env, q, past);
            }
            i = past - 1;
        }
    }
    return strip_latex_markup(best);
}

std::string find_label(std::string_view table_env) {
    size_t pos = table_env.find("\\label");
    while (pos != std::string_view::npos) {
        size_t q = pos + 6;
        if (q < table_env.size() && !is_letter(table_env[q])) {
            while (q < table_env.size() && std::isspace(static_cast<unsigned char>(table_env[q]))) ++q;
            size_t past = skip_group(table_env, q);
            if (past != std::string_view::npos) {
                return text::trim(group_content(table_env, q, past));
            }
        }
        pos = table_env.find("\\label", pos + 1);
    }
    return "";
}

// ---- descriptions ----------------------------------------------------------

struct Paragraph {
    size_t begin;
    size_t end;
};

std::vector<Paragraph> split_paragraphs(std::string_view s, size_t base) {
    std::vector<Paragraph> out;
    size_t start = 0;
    size_t i = 0;
    auto flush = [&](size_t end) {
        if (end > start) out.push_back({base + start, base + end});
    };
    while (i < s.size()) {
        // a blank line (possibly with spaces) separates paragraphs
        if (s[i] == '\n') {
            size_t j = i + 1;
            while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
            if (j < s.size() && s[j] == '\n') {
                flush(i);
                while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
                start = j;
                i = j;
                continue;
            }
        }
        ++i;
    }
    flush(s.size());
    return out;
}

bool references_label(std::string_view paragraph, const std::string& label) {
    if (label.empty()) return false;
    std::string needle = "{" + label + "}";
    size_t pos = paragraph.find(needle);
    while (pos != std::string_view::npos) {
        // require a macro whose name ends in "ref" right before the brace
        size_t r = pos;
        while (r > 0 && is_letter(paragraph[r - 1])) --r;
        if (r > 0 && paragraph[r - 1] == '\\') {
            std::string_view name = paragraph.substr(r, pos - r);
            if (name.size() >= 3 && name.substr(name.size() - 3) == "ref") return true;
        }
        pos = paragraph.find(needle, pos + 1);
    }
    return false;
}

}  // namespace

std::vector<TableBlock> extract_tables(const std::string& bundle,
                                       const std::vector<Section>& sections,
                                       std::vector<std::string>* warnings) {
    std::string blanked = blank_comments(bundle);

    struct EnvSpan {
        size_t begin;
        size_t end;
    };
    std::vector<EnvSpan> spans;
    for (size_t i = 0; i < blanked.size(); ++i) {
        if (blanked[i] != '\\') continue;
        auto tok = read_env_token(blanked, i);
        if (!tok || !tok->opening || (tok->name != "table" && tok->name != "table*")) continue;

        int depth = 1;
        size_t close_end = std::string::npos;
        for (size_t j = tok->end; j < blanked.size(); ++j) {
            if (blanked[j] != '\\') continue;
            auto inner = read_env_token(blanked, j);
            if (!inner || inner->name != tok->name) continue;
            depth += inner->opening ? 1 : -1;
            j = inner->end - 1;
            if (depth == 0) {
                close_end = inner->end;
                break;
            }
        }
        if (close_end == std::string::npos) {
            if (warnings) {
                warnings->push_back("UnbalancedEnvironment: \\begin{" + tok->name +
                                    "} at offset " + std::to_string(i) + " has no matching \\end");
            }
            i = tok->end - 1;
            continue;
        }
        spans.push_back({i, close_end});
        i = close_end - 1;
    }

    std::vector<TableBlock> blocks;
    blocks.reserve(spans.size());
    for (size_t k = 0; k < spans.size(); ++k) {
        const auto& span = spans[k];
        std::string_view env_blanked = std::string_view(blanked).substr(span.begin, span.end - span.begin);

        TableBlock b;
        b.index_in_paper = static_cast<int>(k);
        b.raw_env = bundle.substr(span.begin, span.end - span.begin);
        b.env_begin = span.begin;
        b.caption = find_caption(env_blanked);
        b.label = find_label(env_blanked);
        b.grid = parse_grid(env_blanked);

        // D_i: paragraphs in the same section that \ref this table's label,
        // else the paragraph immediately after the environment.
        std::string desc;
        const Section* home = nullptr;
        for (const auto& s : sections) {
            if (span.begin >= s.span_begin && span.begin < s.span_end) {
                home = &s;
                break;
            }
        }
        if (home && !b.label.empty()) {
            auto paragraphs = split_paragraphs(
                std::string_view(blanked).substr(home->span_begin, home->span_end - home->span_begin),
                home->span_begin);
            std::string joined;
            for (const auto& p : paragraphs) {
                if (p.begin < span.end && p.end > span.begin) continue;  // the table itself
                std::string_view para = std::string_view(blanked).substr(p.begin, p.end - p.begin);
                if (references_label(para, b.label)) {
                    if (!joined.empty()) joined += " ";
                    joined += strip_latex_markup(para);
                }
            }
            desc = joined;
        }
        if (desc.empty()) {
            std::string_view after = std::string_view(blanked).substr(span.end);
            size_t lead = 0;
            while (lead < after.size() && std::isspace(static_cast<unsigned char>(after[lead]))) ++lead;
            after = after.substr(lead);
            if (!after.starts_with("\\begin{table") && !after.starts_with("\\section") &&
                !after.starts_with("\\subsection") && !after.starts_with("\\end{document}")) {
                size_t stop = after.size();
                for (size_t i = 0; i + 1 < after.size(); ++i) {
                    if (after[i] == '\n') {
                        size_t j = i + 1;
                        while (j < after.size() && (after[j] == ' ' || after[j] == '\t')) ++j;
                        if (j < after.size() && after[j] == '\n') {
                            stop = i;
                            break;
                        }
                    }
                }
                desc = strip_latex_markup(after.substr(0, stop));
            }
        }
        b.description = desc;
        blocks.push_back(std::move(b));
    }
    return blocks;
}

namespace {

const std::unordered_map<std::string_view, std::string_view> kSymbolMacros = {
    {"uparrow", "↑"},   {"downarrow", "↓"}, {"rightarrow", "→"},
    {"leftarrow", "←"}, {"pm", "±"},        {"mp", "∓"},
    {"times", "×"},     {"cdot", "·"},      {"approx", "≈"},
    {"sim", "~"},            {"le", "≤"},        {"leq", "≤"},
    {"ge", "≥"},        {"geq", "≥"},       {"checkmark", "✓"},
    {"dagger", "†"},    {"dag", "†"},       {"ddagger", "‡"},
    {"ddag", "‡"},      {"ast", "*"},            {"star", "*"},
    {"infty", "∞"},     {"degree", "°"},    {"prime", "′"},
    {"colon", ":"},          {"slash", "/"},
};

// Macro name -> number of leading brace groups to discard before the kept one.
// {name, discard, keep_last}: keep_last=false drops the whole invocation.
struct MacroRule {
    int discard_groups;
    bool keep_last;
};

const std::unordered_map<std::string_view, MacroRule> kArgMacros = {
    // formatting wrappers: keep the argument
    {"textbf", {0, true}},     {"textit", {0, true}},    {"texttt", {0, true}},
    {"textrm", {0, true}},     {"textsc", {0, true}},    {"textsf", {0, true}},
    {"textup", {0, true}},     {"textmd", {0, true}},    {"textnormal", {0, true}},
    {"emph", {0, true}},       {"underline", {0, true}}, {"uline", {0, true}},
    {"mbox", {0, true}},       {"hbox", {0, true}},      {"text", {0, true}},
    {"mathrm", {0, true}},     {"mathbf", {0, true}},    {"mathit", {0, true}},
    {"mathsf", {0, true}},     {"mathcal", {0, true}},   {"bm", {0, true}},
    {"boldsymbol", {0, true}}, {"url", {0, true}},       {"href", {1, true}},
    {"textsuperscript", {0, true}},                      {"textsubscript", {0, true}},
    {"resizebox", {2, true}},  {"scalebox", {1, true}},  {"raisebox", {1, true}},
    {"makecell", {0, true}},   {"shortstack", {0, true}},{"parbox", {1, true}},
    {"multirow", {2, true}},   {"multicolumn", {2, true}},
    // reference and markup noise: drop entirely
    {"cite", {0, false}},      {"citep", {0, false}},    {"citet", {0, false}},
    {"citealp", {0, false}},   {"citeauthor", {0, false}},{"citeyear", {0, false}},
    {"ref", {0, false}},       {"eqref", {0, false}},    {"autoref", {0, false}},
    {"cref", {0, false}},      {"Cref", {0, false}},     {"pageref", {0, false}},
    {"label", {0, false}},     {"vspace", {0, false}},   {"hspace", {0, false}},
    {"includegraphics", {0, false}},                     {"graphicspath", {0, false}},
    {"rowcolor", {0, false}},  {"cellcolor", {0, false}},{"textcolor", {1, true}},
    {"color", {0, false}},     {"arrayrulecolor", {0, false}},
    {"cline", {0, false}},     {"cmidrule", {0, false}}, {"specialrule", {2, false}},
    {"phantom", {0, false}},   {"hphantom", {0, false}}, {"vphantom", {0, false}},
    {"setlength", {1, false}}, {"renewcommand", {1, false}},
    {"newcommand", {1, false}},{"caption", {0, false}},  {"captionof", {1, false}},
    {"footnote", {0, false}},  {"tnote", {0, false}},    {"fontsize", {1, false}},
};

const std::unordered_set<std::string_view> kBareMacros = {
    "toprule",     "midrule",      "bottomrule", "hline",       "addlinespace",
    "centering",   "raggedright",  "raggedleft", "small",       "footnotesize",
    "scriptsize",  "tiny",         "normalsize", "large",       "Large",
    "LARGE",       "huge",         "Huge",       "itshape",     "bfseries",
    "ttfamily",    "rmfamily",     "sffamily",   "upshape",     "mdseries",
    "normalfont",  "relax",        "noindent",   "arraybackslash", "scriptstyle",
    "displaystyle","textstyle",    "boldmath",   "unboldmath",  "strut",
    "medskip",     "smallskip",    "bigskip",    "quad",        "qquad",
    "hfill",       "vfill",        "linewidth",  "textwidth",   "columnwidth",
    "arraystretch","tabcolsep",    "left",       "right",       "limits",
};

}  // namespace

std::string strip_latex_markup(std::string_view cell) {
    std::string out;
    out.reserve(cell.size());
    bool math = false;

    // Expands into `out`; nested groups handled by the main loop since braces
    // are simply dropped.
    for (size_t i = 0; i < cell.size();) {
        char c = cell[i];
        if (c == '\\') {
            if (i + 1 >= cell.size()) break;
            char n = cell[i + 1];
            if (!is_letter(n)) {
                // escaped symbol or control
                switch (n) {
                    case '%': out.push_back('%'); break;
                    case '&': out.push_back('&'); break;
                    case '_': out.push_back('_'); break;
                    case '#': out.push_back('#'); break;
                    case '\\': out.push_back(' '); break;  // line break inside a cell
                    case '(': case ')': case '[': case ']':
                        math = (n == '(' || n == '[');
                        break;
                    case ',': case ';': case ':': case '!': case ' ':
                        out.push_back(' ');
                        break;
                    default: break;  // \{ \} \$ and the rest are dropped
                }
                i += 2;
                continue;
            }
            size_t j = i + 1;
            while (j < cell.size() && is_letter(cell[j])) ++j;
            std::string_view name = cell.substr(i + 1, j - i - 1);
            if (j < cell.size() && cell[j] == '*') ++j;

            if (auto sym = kSymbolMacros.find(name); sym != kSymbolMacros.end()) {
                out.append(sym->second);
                i = j;
                continue;
            }
            if (name == "begin" || name == "end") {
                size_t p = j;
                while (p < cell.size() && std::isspace(static_cast<unsigned char>(cell[p]))) ++p;
                size_t past = skip_group(cell, p);
                if (past == std::string_view::npos) {
                    i = j;
                    continue;
                }
                std::string env = text::trim(group_content(cell, p, past));
                i = past;
                if (name == "begin" && kTabularEnvs.count(env)) {
                    // discard the tabular arguments so column specs do not leak
                    size_t q = skip_optional_bracket(cell, i);
                    int groups = (env == "tabular") ? 1 : 2;
                    for (int g = 0; g < groups; ++g) {
                        while (q < cell.size() && std::isspace(static_cast<unsigned char>(cell[q]))) ++q;
                        size_t gp = skip_group(cell, q);
                        if (gp == std::string_view::npos) break;
                        q = skip_optional_bracket(cell, gp);
                    }
                    i = q;
                }
                continue;
            }
            if (auto rule = kArgMacros.find(name); rule != kArgMacros.end()) {
                size_t p = skip_optional_bracket(cell, j);
                while (p < cell.size() && std::isspace(static_cast<unsigned char>(cell[p]))) ++p;
                bool ok = true;
                for (int g = 0; g < rule->second.discard_groups; ++g) {
                    size_t past = skip_group(cell, p);
                    if (past == std::string_view::npos) {
                        ok = false;
                        break;
                    }
                    p = skip_optional_bracket(cell, past);
                    while (p < cell.size() && std::isspace(static_cast<unsigned char>(cell[p]))) ++p;
                }
                if (!ok) {
                    i = j;
                    continue;
                }
                size_t past = skip_group(cell, p);
                if (past == std::string_view::npos) {
                    i = j;
                    continue;
                }
                if (rule->second.keep_last) {
                    out.append(strip_latex_markup(group_content(cell, p, past)));
                }
                i = past;
                continue;
            }
            if (kBareMacros.count(name)) {
                out.push_back(' ');
                i = j;
                continue;
            }
            // Unknown macro: drop the name (and one optional [..]), keep any
            // brace-group argument text.
            i = skip_optional_bracket(cell, j);
            continue;
        }
        if (c == '$') {
            math = !math;
            ++i;
            continue;
        }
        if (c == '{' || c == '}') {
            ++i;
            continue;
        }
        if (c == '~') {
            out.push_back(' ');
            ++i;
            continue;
        }
        if ((c == '^' || c == '_') && math) {
            ++i;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return text::collapse_whitespace(text::trim(out));
}

std::string assemble_bundle(const std::vector<archive::Member>& files) {
    if (files.empty()) return "";
    if (files.size() == 1) return files[0].data;

    auto is_tex = [](const std::string& name) {
        return name.size() >= 4 && name.substr(name.size() - 4) == ".tex";
    };

    size_t main_idx = files.size();
    for (size_t i = 0; i < files.size(); ++i) {
        if (files[i].data.find("\\documentclass") != std::string::npos ||
            files[i].data.find("\\begin{document}") != std::string::npos) {
            main_idx = i;
            break;
        }
    }
    if (main_idx == files.size()) {
        for (size_t i = 0; i < files.size(); ++i) {
            if (is_tex(files[i].name)) {
                main_idx = i;
                break;
            }
        }
    }
    if (main_idx == files.size()) main_idx = 0;

    std::map<std::string, size_t> by_name;
    for (size_t i = 0; i < files.size(); ++i) by_name[files[i].name] = i;

    std::set<size_t> visited;
    visited.insert(main_idx);

    auto resolve = [&](const std::string& target) -> std::optional<size_t> {
        for (const auto& candidate : {target, target + ".tex"}) {
            if (auto it = by_name.find(candidate); it != by_name.end()) return it->second;
            // match by path suffix (archives often nest under a directory)
            for (const auto& [name, idx] : by_name) {
                if (name.size() > candidate.size() &&
                    name.compare(name.size() - candidate.size() - 1, candidate.size() + 1,
                                 "/" + candidate) == 0) {
                    return idx;
                }
            }
        }
        return std::nullopt;
    };

    std::function<std::string(const std::string&)> expand = [&](const std::string& source) {
        std::string blanked = blank_comments(source);
        std::string out;
        out.reserve(source.size());
        size_t last = 0;
        for (size_t i = 0; i < blanked.size(); ++i) {
            if (blanked[i] != '\\') continue;
            std::string_view rest = std::string_view(blanked).substr(i);
            size_t name_len = 0;
            if (rest.starts_with("\\input")) name_len = 6;
            else if (rest.starts_with("\\include") && !rest.starts_with("\\includegraphics")) name_len = 8;
            if (name_len == 0) continue;
            size_t p = i + name_len;
            if (p < blanked.size() && is_letter(blanked[p])) continue;
            while (p < blanked.size() && std::isspace(static_cast<unsigned char>(blanked[p]))) ++p;
            size_t past = skip_group(blanked, p);
            if (past == std::string_view::npos) continue;
            std::string target = text::trim(group_content(blanked, p, past));
            auto idx = resolve(target);
            if (idx && !visited.count(*idx)) {
                visited.insert(*idx);
                out.append(source, last, i - last);
                out.append(expand(files[*idx].data));
                last = past;
            }
            i = past - 1;
        }
        out.append(source, last, source.size() - last);
        return out;
    };

    std::string bundle = expand(files[main_idx].data);
    for (size_t i = 0; i < files.size(); ++i) {
        if (visited.count(i) || !is_tex(files[i].name)) continue;
        bundle += "\n";
        bundle += files[i].data;
    }
    return bundle;
}

}  // namespace league::latex
