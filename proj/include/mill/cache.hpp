#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include <json.hpp>

namespace mill {

/// Append-only JSONL key/value store used as the write-through cache for
/// generation and embedding backends. Duplicate keys resolve last-writer-wins
/// at load. Reads are concurrent; appends are serialized.
class JsonlKvCache {
public:
    /// Opens (and loads) the cache file; the file is created lazily on the
    /// first put. An empty path makes the cache memory-only.
    explicit JsonlKvCache(std::filesystem::path path);

    std::optional<nlohmann::json> get(const std::string& key) const;
    void put(const std::string& key, nlohmann::json entry);
    size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, nlohmann::json> entries_;
};

}  // namespace mill
