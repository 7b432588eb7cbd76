#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mill {

enum class PromptKind {
    QQD,
    Query2Term,
    Query2TermFS,
    Query2TermPRF,
    Query2Doc,
    Query2DocFS,
    Query2DocPRF,
    CoT,
    CoTPRF,
};

inline constexpr PromptKind kAllPromptKinds[] = {
    PromptKind::QQD,          PromptKind::Query2Term,   PromptKind::Query2TermFS,
    PromptKind::Query2TermPRF, PromptKind::Query2Doc,   PromptKind::Query2DocFS,
    PromptKind::Query2DocPRF, PromptKind::CoT,          PromptKind::CoTPRF,
};

std::string_view prompt_kind_name(PromptKind kind);
PromptKind prompt_kind_from_name(std::string_view name);

bool prompt_kind_needs_shots(PromptKind kind);
bool prompt_kind_needs_prf(PromptKind kind);

struct FewShotExample {
    std::string query;
    std::string completion;  // keywords or a passage, depending on the kind
};

/// Builds the prompt for `kind` with the query substituted verbatim.
/// Few-shot kinds require exactly 3 shots; PRF kinds exactly 3 documents.
std::string build_prompt(PromptKind kind, const std::string& query,
                         const std::vector<FewShotExample>& shots = {},
                         const std::vector<std::string>& prf_docs = {});

/// Best-effort split of a sub-query/passage completion into
/// (sub-query, passage) pairs. Items are delimited by leading "digit."
/// markers; within an item the first sentence ending in '?' is the
/// sub-query. Display-only: the pipeline embeds whole completions.
std::vector<std::pair<std::string, std::string>> parse_qqd(const std::string& completion);

/// Neutral bundled few-shot defaults (not tuned for any corpus).
std::vector<FewShotExample> default_shots(PromptKind kind);

/// Shots file: JSONL records {"query": ..., "completion": ...}.
std::vector<FewShotExample> load_shots(const std::filesystem::path& path);

}  // namespace mill
