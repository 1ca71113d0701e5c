#pragma once

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hive::provider {

struct GenerationParams {
  double temperature = 0.0;
  int max_tokens = 512;
};

// Text-completion transport. complete() either returns the raw reply text or
// throws ProviderError; retry/fallback policy belongs to the callers.
class TextCompletion {
 public:
  virtual ~TextCompletion() = default;
  virtual std::string complete(const std::string& prompt,
                               const GenerationParams& params = {}) = 0;
};

// POSTs {prompt, temperature, max_tokens} as JSON and expects {"text": ...}.
// Bearer token is attached when non-empty.
class HttpProvider : public TextCompletion {
 public:
  HttpProvider(std::string url, std::string token = "");
  std::string complete(const std::string& prompt,
                       const GenerationParams& params) override;

 private:
  std::string url_, token_;
};

// Offline stub: replies live in a directory of "<fnv1a64-hex>.txt" files
// keyed by the checksum of the exact prompt. A missing file is a transport
// failure (ProviderError), which the callers' fallbacks absorb.
class FixtureProvider : public TextCompletion {
 public:
  explicit FixtureProvider(std::string dir);
  std::string complete(const std::string& prompt,
                       const GenerationParams& params) override;

 private:
  std::string dir_;
};

// Test double: hands out queued replies in order; records every prompt.
class ScriptedProvider : public TextCompletion {
 public:
  explicit ScriptedProvider(std::vector<std::string> replies);
  std::string complete(const std::string& prompt,
                       const GenerationParams& params) override;
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::deque<std::string> replies_;
  std::vector<std::string> prompts_;
};

// Pass-through wrapper that records (prompt, reply) pairs; used to derive
// checksum-keyed fixture files from scripted pipeline runs.
class RecordingProvider : public TextCompletion {
 public:
  explicit RecordingProvider(TextCompletion& inner) : inner_(inner) {}
  std::string complete(const std::string& prompt,
                       const GenerationParams& params) override;
  const std::vector<std::pair<std::string, std::string>>& exchanges() const {
    return exchanges_;
  }

 private:
  TextCompletion& inner_;
  std::vector<std::pair<std::string, std::string>> exchanges_;
};

}  // namespace hive::provider
