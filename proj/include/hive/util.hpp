#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hive::util {

// FNV-1a, 64 bit. Used for prompt/fixture keying and content digests.
std::uint64_t fnv1a64(std::string_view data);

// fnv1a64 rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

std::string to_lower(std::string_view s);

// Collapse runs of whitespace to single spaces and trim the ends.
std::string collapse_ws(std::string_view s);

std::string trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);
bool contains_ci(std::string_view haystack, std::string_view needle);
bool equals_ci(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);

// Whole file -> string. Throws hive::Error if unreadable.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

// Render a double with exactly two decimals ("0.74", "6.40").
std::string two_decimals(double v);

// Tiny deterministic PRNG (xorshift64*) for property-test generators.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi] inclusive.
  int range(int lo, int hi);
  bool chance(double p);

 private:
  std::uint64_t state_;
};

}  // namespace hive::util
