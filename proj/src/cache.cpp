#include "mill/cache.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "mill/errors.hpp"

namespace mill {
namespace {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

JsonlKvCache::JsonlKvCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    if (!in) throw data_error("cannot open cache file: " + path_.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.is_object() || !entry.contains("key")) {
            std::cerr << "warning: ignoring bad cache line " << line_no << " in "
                      << path_.string() << "\n";
            continue;
        }
        entries_[entry["key"].get<std::string>()] = std::move(entry);
    }
}

std::optional<nlohmann::json> JsonlKvCache::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void JsonlKvCache::put(const std::string& key, nlohmann::json entry) {
    entry["key"] = key;
    entry["timestamp"] = utc_timestamp();
    std::lock_guard lock(mutex_);
    if (!path_.empty()) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        std::ofstream out(path_, std::ios::app);
        if (!out) throw data_error("cannot append to cache file: " + path_.string());
        out << entry.dump() << "\n";
        out.flush();
    }
    entries_[key] = std::move(entry);
}

size_t JsonlKvCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace mill
