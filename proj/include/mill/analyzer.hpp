#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mill {

/// Text-analysis chain shared by indexing and query processing:
/// lowercase -> split on non-alphanumerics -> stopword filter -> Porter stem.
/// Each stage can be toggled; the split always happens.
struct AnalyzerConfig {
    bool lowercase = true;
    bool remove_stopwords = true;
    bool stem = true;
};

/// Tokenizes `text` under `config`. Pure and deterministic; empty input
/// yields an empty stream.
std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& config);

/// Porter stemmer (classic algorithm, reference-implementation behavior).
/// Expects a lowercase word; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string word);

bool is_stopword(std::string_view token);

/// Digest of the full analyzer configuration, embedded in serialized indexes
/// so query-time analysis provably matches index-time analysis.
std::uint64_t analyzer_hash(const AnalyzerConfig& config);

}  // namespace mill
