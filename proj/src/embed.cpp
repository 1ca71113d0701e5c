#include "hive/embed.hpp"

#include <cmath>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::embed {

std::vector<double> TrigramEmbedder::embed(std::string_view text) const {
  std::vector<double> v(kDims, 0.0);
  std::string low = util::to_lower(text);
  if (low.empty()) return v;
  if (low.size() < 3) {
    v[util::fnv1a64(low) % kDims] += 1.0;
  } else {
    for (std::size_t i = 0; i + 3 <= low.size(); ++i)
      v[util::fnv1a64(std::string_view(low).substr(i, 3)) % kDims] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error("cosine: dimensionality mismatch " + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace hive::embed
