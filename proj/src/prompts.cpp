#include "hive/prompts.hpp"

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::prompts {

const std::vector<std::string>& PromptLibrary::template_names() {
  static const std::vector<std::string> names = {
      kSnippetExtraction, kParsing, kDomainClassification, kActionSelection};
  return names;
}

PromptLibrary::PromptLibrary(const std::string& dir) {
  for (const std::string& name : template_names())
    templates_[name] = util::read_file(dir + "/" + name + ".txt");
}

const std::string& PromptLibrary::raw(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw Error("unknown prompt template: " + name);
  return it->second;
}

std::string PromptLibrary::fill(const std::string& name,
                                const std::map<std::string, std::string>& slots) const {
  std::string out = raw(name);
  for (const auto& [key, value] : slots) {
    const std::string token = "{" + key + "}";
    std::size_t pos = 0;
    bool found = false;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      out.replace(pos, token.size(), value);
      pos += value.size();
      found = true;
    }
    if (!found) throw Error("template " + name + " has no placeholder " + token);
  }
  return out;
}

}  // namespace hive::prompts
