#include "mill/prompts.hpp"

#include <cctype>
#include <fstream>

#include <json.hpp>

#include "mill/errors.hpp"
#include "mill/util.hpp"

namespace mill {
namespace {

struct KindInfo {
    PromptKind kind;
    std::string_view name;
    bool shots;
    bool prf;
};

constexpr KindInfo kKinds[] = {
    {PromptKind::QQD, "qqd", false, false},
    {PromptKind::Query2Term, "query2term", false, false},
    {PromptKind::Query2TermFS, "query2term-fs", true, false},
    {PromptKind::Query2TermPRF, "query2term-prf", false, true},
    {PromptKind::Query2Doc, "query2doc", false, false},
    {PromptKind::Query2DocFS, "query2doc-fs", true, false},
    {PromptKind::Query2DocPRF, "query2doc-prf", false, true},
    {PromptKind::CoT, "cot", false, false},
    {PromptKind::CoTPRF, "cot-prf", false, true},
};

const KindInfo& info(PromptKind kind) {
    for (const KindInfo& k : kKinds)
        if (k.kind == kind) return k;
    throw argument_error("unknown prompt kind");
}

// Few-shot block: "query:"/cue pairs under a Context: header.
std::string shots_block(const std::vector<FewShotExample>& shots, std::string_view cue) {
    std::string out = "Context:\n";
    for (const FewShotExample& s : shots) {
        out += "query: " + s.query + "\n";
        out += std::string(cue) + " " + s.completion + "\n";
    }
    return out;
}

std::string prf_block(const std::vector<std::string>& prf_docs) {
    std::string out = "Context:\n";
    for (const std::string& doc : prf_docs) out += doc + "\n";
    return out;
}

std::string with_context(std::string_view head, std::string block, const std::string& query,
                         std::string_view tail_cue) {
    std::string out(head);
    out += "\n\n";
    out += block;
    out += "\nquery: " + query + "\n";
    out += tail_cue;
    return out;
}

}  // namespace

std::string_view prompt_kind_name(PromptKind kind) { return info(kind).name; }

PromptKind prompt_kind_from_name(std::string_view name) {
    for (const KindInfo& k : kKinds)
        if (k.name == name) return k.kind;
    throw argument_error("unknown prompt kind: " + std::string(name));
}

bool prompt_kind_needs_shots(PromptKind kind) { return info(kind).shots; }
bool prompt_kind_needs_prf(PromptKind kind) { return info(kind).prf; }

std::string build_prompt(PromptKind kind, const std::string& query,
                         const std::vector<FewShotExample>& shots,
                         const std::vector<std::string>& prf_docs) {
    if (prompt_kind_needs_shots(kind) && shots.size() != 3)
        throw argument_error(std::string(prompt_kind_name(kind)) +
                             ": exactly 3 few-shot examples required, got " +
                             std::to_string(shots.size()));
    if (prompt_kind_needs_prf(kind) && prf_docs.size() != 3)
        throw argument_error(std::string(prompt_kind_name(kind)) +
                             ": exactly 3 PRF documents required, got " +
                             std::to_string(prf_docs.size()));

    switch (kind) {
        case PromptKind::QQD:
            return "what sub-queries should be searched to answer the following query: " +
                   query +
                   ". Please generate the sub-queries and write passages to answer these "
                   "generated queries.";
        case PromptKind::Query2Term:
            return "Write some keywords for the given query: " + query;
        case PromptKind::Query2TermFS:
            return with_context("Write some keywords for the given query:",
                                shots_block(shots, "keywords:"), query, "keywords:");
        case PromptKind::Query2TermPRF:
            return with_context("Write some keywords for the given query:",
                                prf_block(prf_docs), query, "keywords:");
        case PromptKind::Query2Doc:
            return "Write a passage answer the following query: " + query;
        case PromptKind::Query2DocFS:
            return with_context("Write a passage answer the following query:",
                                shots_block(shots, "passage:"), query, "passage:");
        case PromptKind::Query2DocPRF:
            return with_context("Write a passage answer the following query:",
                                prf_block(prf_docs), query, "passage:");
        case PromptKind::CoT:
            return "Answer the following query: " + query +
                   "\nGive the rationale before answering.";
        case PromptKind::CoTPRF:
            return with_context("Answer the following query:", prf_block(prf_docs), query,
                                "Give the rationale before answering.");
    }
    throw argument_error("unknown prompt kind");
}

std::vector<std::pair<std::string, std::string>> parse_qqd(const std::string& completion) {
    // Marker: a run of digits followed by '.', preceded by start-of-text or
    // whitespace and followed by whitespace or end-of-text.
    std::vector<std::pair<size_t, size_t>> markers;  // (start, end-after-dot)
    for (size_t i = 0; i < completion.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(completion[i]))) continue;
        if (i > 0 && !std::isspace(static_cast<unsigned char>(completion[i - 1]))) continue;
        size_t j = i;
        while (j < completion.size() && std::isdigit(static_cast<unsigned char>(completion[j])))
            ++j;
        if (j >= completion.size() || completion[j] != '.') continue;
        if (j + 1 < completion.size() &&
            !std::isspace(static_cast<unsigned char>(completion[j + 1])))
            continue;
        markers.emplace_back(i, j + 1);
        i = j;
    }

    std::vector<std::string> items;
    if (markers.empty()) {
        items.push_back(trim(completion));
    } else {
        for (size_t m = 0; m < markers.size(); ++m) {
            size_t begin = markers[m].second;
            size_t end = m + 1 < markers.size() ? markers[m + 1].first : completion.size();
            items.push_back(trim(completion.substr(begin, end - begin)));
        }
    }

    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::string& item : items) {
        size_t q = item.find('?');
        if (q == std::string::npos) {
            pairs.emplace_back(std::move(item), "");
        } else {
            pairs.emplace_back(trim(item.substr(0, q + 1)), trim(item.substr(q + 1)));
        }
    }
    return pairs;
}

std::vector<FewShotExample> default_shots(PromptKind kind) {
    // Neutral bundled examples; not taken from any benchmark.
    if (kind == PromptKind::Query2TermFS)
        return {
            {"how do plants make food", "photosynthesis chlorophyll sunlight glucose"},
            {"capital city of france", "paris france capital seine"},
            {"why is the sky blue", "rayleigh scattering sunlight wavelength atmosphere"},
        };
    return {
        {"how do plants make food",
         "Plants make food through photosynthesis, converting sunlight, water, and carbon "
         "dioxide into glucose inside chloroplasts."},
        {"capital city of france",
         "The capital city of France is Paris, located on the Seine river and serving as the "
         "country's political and cultural center."},
        {"why is the sky blue",
         "The sky appears blue because air molecules scatter shorter blue wavelengths of "
         "sunlight more strongly than longer red wavelengths."},
    };
}

std::vector<FewShotExample> load_shots(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open shots file: " + path.string());
    std::vector<FewShotExample> shots;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("query") || !record.contains("completion"))
            throw data_error("bad shots record at line " + std::to_string(line_no) + " in " +
                             path.string());
        shots.push_back(FewShotExample{record["query"].get<std::string>(),
                                       record["completion"].get<std::string>()});
    }
    return shots;
}

}  // namespace mill
