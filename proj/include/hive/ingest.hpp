#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hive/ckg.hpp"
#include "hive/embed.hpp"
#include "hive/exec.hpp"
#include "hive/prompts.hpp"
#include "hive/provider.hpp"

namespace hive::ingest {

// A model card: front-matter header (model_id, license, size_bytes, tasks,
// arxiv_ids) between "---" lines, then a markdown body.
struct ModelCard {
  std::string model_id;
  std::string markdown;  // body after the front matter
  std::vector<std::string> declared_tasks;
  std::optional<std::string> license;
  std::optional<std::int64_t> size_bytes;
  std::vector<std::string> arxiv_ids;  // each "dddd.dddd(d)" or longer prefix
};

// Throws ParseError on missing front matter, empty model_id, or malformed
// arxiv ids.
ModelCard parse_model_card(const std::string& text);
ModelCard load_model_card(const std::string& path);

struct CodeBlock {
  std::optional<std::string> language_hint;
  std::string text;  // contiguous substring of the card markdown
  std::size_t source_offset = 0;
};

const std::vector<std::string>& default_snippet_keywords();

// Fenced blocks whose body, or any of the 3 lines above the opening fence,
// contains a keyword (case-insensitive). Document order; offsets strictly
// increasing.
std::vector<CodeBlock> extract_code_blocks(
    const ModelCard& card,
    const std::vector<std::string>& keywords = default_snippet_keywords());

// Sends the snippet-extraction prompt over the concatenated blocks, parses
// the fenced function from the reply, and derives a spec from its signature
// (every parameter must carry a default). One repair retry on a malformed
// reply, then SpecParseError; transport failures raise ProviderError.
exec::ExecutionSpec synthesize_execution_spec(const std::vector<CodeBlock>& blocks,
                                              const std::string& model_id,
                                              provider::TextCompletion& provider,
                                              const prompts::PromptLibrary& lib);

struct PwcRecord {
  std::string arxiv_id;
  std::string model_variant;
  std::string benchmark;
  std::string metric;
  double value = 0.0;
};

// Line-delimited JSON; '#' comments; value must be finite.
std::vector<PwcRecord> load_pwc_records(const std::string& path);

// Results whose arxiv id appears on the card and whose variant matches the
// final path segment of the card's model id (case-insensitive, ignoring
// non-alphanumerics). Direction comes from the metric-name convention.
std::vector<ckg::BenchmarkResult> align_benchmarks(
    const ModelCard& card, const std::vector<PwcRecord>& records);

struct TaxonomyNode {
  std::string label;
  std::vector<TaxonomyNode> children;
};

struct Taxonomy {
  std::vector<TaxonomyNode> roots;

  std::size_t node_count() const;
  std::size_t max_depth() const;  // root = depth 1; 0 when empty
};

// JSON file {"roots": [{"label": ..., "children": [...]}]}.
Taxonomy load_taxonomy(const std::string& path);

// Sequentially folds tasks into the seed: similarity >= 0.9 to some label
// means already covered (skip); in [0.8, 0.9) the task is inserted under the
// argmax label (pre-order tie break); below 0.8 it is irrelevant (skip).
// Inserted nodes are candidates for later tasks.
Taxonomy build_taxonomy(const Taxonomy& seed, const std::vector<std::string>& tasks,
                        const embed::TextEmbedder& embedder);

// Labels of all nodes at depth <= level, pre-order, deduplicated.
std::vector<std::string> flatten_taxonomy(const Taxonomy& t, int level = 3);

// Triples for one card: task support, license, size, organization (the id
// prefix), snippet ref when the card yields code blocks, and reified
// benchmark results.
std::vector<ckg::Triple> card_to_triples(const ModelCard& card,
                                         const std::vector<ckg::BenchmarkResult>& results,
                                         bool has_snippet);

// Full corpus -> graph. Cards in the given order; validation at the end.
ckg::CapabilityGraph build_graph(const std::vector<ModelCard>& cards,
                                 const std::vector<PwcRecord>& pwc);

}  // namespace hive::ingest
