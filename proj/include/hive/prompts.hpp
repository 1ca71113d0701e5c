#pragma once

#include <map>
#include <string>
#include <vector>

namespace hive::prompts {

// Prompt templates shipped as files; placeholders are literal "{name}"
// tokens. Texts are pinned by checksum tests, so edits are deliberate acts.
class PromptLibrary {
 public:
  static constexpr const char* kSnippetExtraction = "snippet_extraction";
  static constexpr const char* kParsing = "parsing_rephrasing";
  static constexpr const char* kDomainClassification = "domain_classification";
  static constexpr const char* kActionSelection = "action_selection";

  // Loads "<dir>/<name>.txt" for each template name. Throws on missing files.
  explicit PromptLibrary(const std::string& dir);

  const std::string& raw(const std::string& name) const;
  std::string fill(const std::string& name,
                   const std::map<std::string, std::string>& slots) const;

  static const std::vector<std::string>& template_names();

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace hive::prompts
