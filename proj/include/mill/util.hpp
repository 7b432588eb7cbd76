#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mill {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// FNV-1a 64-bit over raw bytes, optionally chained from a previous digest.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffset) {
    for (unsigned char c : bytes) {
        state ^= c;
        state *= kFnvPrime;
    }
    return state;
}

/// Incremental digest over a sequence of fields. A separator byte is fed
/// between fields so that ("ab","c") and ("a","bc") hash differently.
class DigestBuilder {
public:
    DigestBuilder& field(std::string_view s) {
        state_ = fnv1a64(s, state_);
        state_ ^= 0x1f;
        state_ *= kFnvPrime;
        return *this;
    }
    DigestBuilder& field(double v);
    DigestBuilder& field(std::int64_t v);
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = kFnvOffset;
};

std::string to_hex(std::uint64_t v);

std::string lowercase(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Formats a double with enough digits to round-trip (used by run files and
/// provenance where byte determinism matters).
std::string format_double(double v, int precision = 6);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

}  // namespace mill
