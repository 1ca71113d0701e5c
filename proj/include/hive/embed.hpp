#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hive::embed {

// Pluggable text embedder. Implementations must be deterministic for the
// same input; vectors from the same embedder must share a dimensionality.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

// Offline default: character trigrams of the lowercased text hashed into a
// fixed-width count vector, L2-normalized. Strings shorter than three
// characters contribute a single gram (the whole string).
class TrigramEmbedder : public TextEmbedder {
 public:
  static constexpr std::size_t kDims = 512;
  std::vector<double> embed(std::string_view text) const override;
};

// dot(a,b) / (|a||b|); 0.0 when either norm is zero. Sizes must match.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hive::embed
