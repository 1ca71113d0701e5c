#include "hive/provider.hpp"

#include <json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include "hive/errors.hpp"
#include "hive/util.hpp"

namespace hive::provider {

namespace {

// "http://host:port/path" -> (base, path)
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpProvider::HttpProvider(std::string url, std::string token)
    : url_(std::move(url)), token_(std::move(token)) {}

std::string HttpProvider::complete(const std::string& prompt,
                                   const GenerationParams& params) {
  auto [base, path] = split_url(url_);
  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  nlohmann::json body = {{"prompt", prompt},
                         {"temperature", params.temperature},
                         {"max_tokens", params.max_tokens}};
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res)
    throw ProviderError("provider transport failure: " +
                        httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderError("provider returned HTTP " + std::to_string(res->status));
  try {
    nlohmann::json j = nlohmann::json::parse(res->body);
    return j.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("provider reply is not {\"text\": ...}: ") +
                        e.what());
  }
}

FixtureProvider::FixtureProvider(std::string dir) : dir_(std::move(dir)) {}

std::string FixtureProvider::complete(const std::string& prompt,
                                      const GenerationParams&) {
  std::string path = dir_ + "/" + util::fnv1a64_hex(prompt) + ".txt";
  if (!util::file_exists(path))
    throw ProviderError("no canned reply for prompt checksum " +
                        util::fnv1a64_hex(prompt));
  return util::read_file(path);
}

ScriptedProvider::ScriptedProvider(std::vector<std::string> replies)
    : replies_(replies.begin(), replies.end()) {}

std::string ScriptedProvider::complete(const std::string& prompt,
                                       const GenerationParams&) {
  prompts_.push_back(prompt);
  if (replies_.empty()) throw ProviderError("scripted provider ran out of replies");
  std::string reply = replies_.front();
  replies_.pop_front();
  return reply;
}

std::string RecordingProvider::complete(const std::string& prompt,
                                        const GenerationParams& params) {
  std::string reply = inner_.complete(prompt, params);
  exchanges_.emplace_back(prompt, reply);
  return reply;
}

}  // namespace hive::provider
