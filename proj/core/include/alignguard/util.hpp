#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alignguard/json.hpp"

namespace alignguard {

using Json = nlohmann::json;

// SHA-256 of `data`, lowercase hex.
std::string sha256_hex(std::string_view data);

// First 16 hex characters of sha256_hex; the project's content-id scheme.
std::string short_hash(std::string_view data);

std::string read_file(const std::filesystem::path& path);
std::optional<std::string> read_file_if_exists(const std::filesystem::path& path);

// Write via a temp file in the same directory followed by rename, so
// readers never observe a partially written document.
void atomic_write_file(const std::filesystem::path& path, std::string_view data);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// Loading and re-dumping a canonical document reproduces it byte for byte.
std::string canonical_dump(const Json& doc);

Json parse_json(std::string_view text, const std::string& what);
Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& doc);

// Minimal unified diff (no context collapsing) between two texts.
// Empty result means the inputs are identical.
std::string unified_diff(const std::string& before, const std::string& after,
                         const std::string& before_name = "a",
                         const std::string& after_name = "b");

// Lines added by a unified diff (the "+" payload, excluding headers).
std::vector<std::string> diff_added_lines(const std::string& diff);

std::vector<std::string> split_lines(const std::string& text);
std::string join_lines(const std::vector<std::string>& lines);

bool starts_with(std::string_view s, std::string_view prefix);
std::string to_lower(std::string s);
std::string trim(std::string_view s);

// Identifier-like tokens immediately followed by '(' — call names in a
// source fragment. Dotted paths are reduced to their last segment.
std::vector<std::string> called_names(const std::string& source);

// Compare dotted numeric version strings segment by segment
// ("2.10" > "2.9"); non-numeric segments compare lexicographically.
int compare_versions(const std::string& a, const std::string& b);

// Deterministic Fisher-Yates shuffle driven by a splitmix64 stream so
// results are identical across platforms and standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform value in [0, bound) via rejection sampling; bound > 0.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

template <typename T>
void deterministic_shuffle(std::vector<T>& items, DeterministicRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::uint64_t fnv1a64(std::string_view data);

}  // namespace alignguard
