#pragma once

#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "gist/judge.hpp"

namespace gist::judge {

// Wire transport for a chat-completion-style endpoint. Implementations POST
// {model, messages, temperature, top_p, max_tokens} and return the raw
// response body, throwing TransportError on failure.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post_chat(const JudgeRequest& request) = 0;
};

// Reads the endpoint URL and credential from GISTBENCH_ENDPOINT_URL and
// GISTBENCH_API_KEY.
class HttpTransport : public Transport {
 public:
  HttpTransport();
  explicit HttpTransport(std::string endpoint_url, std::string api_key);
  std::string post_chat(const JudgeRequest& request) override;

 private:
  std::string endpoint_url_;
  std::string api_key_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{200};  // doubled per attempt, no jitter
};

// Content-addressed response cache around a transport. Identical requests
// never reach the endpoint twice, within a run (in-flight deduplication) or
// across runs sharing a cache directory. Cached responses are byte-identical
// to the originals.
class CachedEndpoint {
 public:
  CachedEndpoint(std::string client_id, std::shared_ptr<Transport> transport,
                 std::filesystem::path cache_dir, RetryPolicy retry = {});

  JudgeResponse call(const JudgeRequest& request);

  const std::string& client_id() const { return client_id_; }
  std::size_t transport_calls() const;

 private:
  JudgeResponse invoke_with_retries(const JudgeRequest& request);

  std::string client_id_;
  std::shared_ptr<Transport> transport_;
  std::filesystem::path cache_dir_;
  RetryPolicy retry_;

  std::mutex mutex_;
  std::map<std::uint64_t, std::shared_future<JudgeResponse>> in_flight_;
  std::size_t transport_calls_ = 0;
};

// Judge backed by a remote endpoint through a CachedEndpoint. Prompt
// templates are fixed in this translation unit and hashed into the manifest.
class RemoteJudge : public Judge {
 public:
  RemoteJudge(std::string model_id, std::shared_ptr<Transport> transport,
              std::filesystem::path cache_dir, int max_tokens = 512,
              RetryPolicy retry = {});

  const std::string& id() const override { return model_id_; }

  bool relevance(const std::string& interest_text, const std::string& object_text,
                 const std::string& engagement_label) override;
  std::vector<std::string> retrieve(const std::string& interest_text, std::size_t n,
                                    std::span<const Candidate> candidates) override;
  bool overlap(const std::string& interest_a, const std::string& interest_b) override;
  std::vector<std::optional<std::string>> map_categories(
      std::span<const std::string> interest_texts,
      std::span<const std::string> category_names) override;

  CachedEndpoint& endpoint() { return endpoint_; }

 private:
  std::string ask(const std::string& system_text, const std::string& user_text);

  std::string model_id_;
  int max_tokens_;
  CachedEndpoint endpoint_;
};

// Hash of all remote prompt templates, recorded in the run manifest.
std::uint64_t prompt_template_hash();

// Extracts generated text from a chat-completion response body.
std::string parse_chat_completion(const std::string& body);

}  // namespace gist::judge
