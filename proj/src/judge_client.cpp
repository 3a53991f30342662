#include "gist/judge_client.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"
#include "gist/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace gist::judge {

namespace {

constexpr const char* kSystemText =
    "You are an expert in content analysis and user interest understanding. "
    "Follow the output format exactly.";

constexpr const char* kRelevanceTemplate =
    "Predicted interest: {interest}\n"
    "Engagement type: {engagement}\n"
    "Content description: {object}\n\n"
    "Is this content genuinely relevant to the predicted interest? "
    "Answer with a single word: yes or no.";

constexpr const char* kRetrieveTemplate =
    "Predicted interest: {interest}\n\n"
    "Candidate objects:\n{candidates}\n"
    "Identify exactly {n} objects that most likely led to the inference of "
    "this interest. Output only comma-separated video identifiers.";

constexpr const char* kOverlapTemplate =
    "Interest A: {a}\n"
    "Interest B: {b}\n\n"
    "Do these two interests semantically overlap (refer to the same "
    "underlying interest)? Answer with a single word: yes or no.";

constexpr const char* kMapTemplate =
    "Category list:\n{categories}\n"
    "Interests:\n{interests}\n"
    "Classify each interest into exactly one category from the list. "
    "Output one line per interest in the form \"<index>. <category name>\", "
    "copying the category name verbatim.";

void replace_all(std::string& text, std::string_view needle, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string env_or(const char* name, const char* fallback) {
  const char* value = std::getenv(name);
  return value ? value : fallback;
}

}  // namespace

std::uint64_t prompt_template_hash() {
  std::uint64_t h = fnv1a64(kSystemText);
  for (const char* t : {kRelevanceTemplate, kRetrieveTemplate, kOverlapTemplate,
                        kMapTemplate}) {
    h = fnv1a64(t, h);
  }
  return h;
}

std::string parse_chat_completion(const std::string& body) {
  Json doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw TransportError("endpoint returned malformed JSON");
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception&) {
    throw TransportError("endpoint response missing choices[0].message.content");
  }
}

HttpTransport::HttpTransport()
    : HttpTransport(env_or("GISTBENCH_ENDPOINT_URL", ""),
                    env_or("GISTBENCH_API_KEY", "")) {}

HttpTransport::HttpTransport(std::string endpoint_url, std::string api_key)
    : endpoint_url_(std::move(endpoint_url)), api_key_(std::move(api_key)) {
  if (endpoint_url_.empty()) {
    throw ConfigError("remote judge requires GISTBENCH_ENDPOINT_URL");
  }
}

std::string HttpTransport::post_chat(const JudgeRequest& request) {
  // Split "scheme://host[:port]/path".
  std::size_t path_start = endpoint_url_.find('/', endpoint_url_.find("//") + 2);
  std::string base = path_start == std::string::npos
                         ? endpoint_url_
                         : endpoint_url_.substr(0, path_start);
  std::string path = path_start == std::string::npos
                         ? "/v1/chat/completions"
                         : endpoint_url_.substr(path_start);

  Json payload = {
      {"model", request.model_id},
      {"messages",
       {{{"role", "system"}, {"content", request.system_text}},
        {{"role", "user"}, {"content", request.user_text}}}},
      {"temperature", request.temperature},
      {"top_p", request.top_p},
      {"max_tokens", request.max_tokens},
  };

  httplib::Client client(base);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  httplib::Result result = client.Post(path, headers, payload.dump(),
                                       "application/json");
  if (!result) {
    throw TransportError("POST " + endpoint_url_ + " failed: " +
                         httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw TransportError("POST " + endpoint_url_ + " returned status " +
                         std::to_string(result->status));
  }
  return result->body;
}

CachedEndpoint::CachedEndpoint(std::string client_id,
                               std::shared_ptr<Transport> transport,
                               std::filesystem::path cache_dir, RetryPolicy retry)
    : client_id_(std::move(client_id)),
      transport_(std::move(transport)),
      cache_dir_(std::move(cache_dir)),
      retry_(retry) {
  std::filesystem::create_directories(cache_dir_);
}

std::size_t CachedEndpoint::transport_calls() const {
  return transport_calls_;
}

JudgeResponse CachedEndpoint::invoke_with_retries(const JudgeRequest& request) {
  std::chrono::milliseconds delay = retry_.base_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      JudgeResponse response;
      response.text = parse_chat_completion(transport_->post_chat(request));
      return response;
    } catch (const TransportError&) {
      if (attempt >= retry_.attempts) throw;
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
}

JudgeResponse CachedEndpoint::call(const JudgeRequest& request) {
  const std::uint64_t key = request_key(client_id_, request);
  const std::filesystem::path cache_file = cache_dir_ / (hex16(key) + ".json");

  std::shared_future<JudgeResponse> future;
  std::promise<JudgeResponse> promise;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (std::filesystem::exists(cache_file)) {
      Json doc = Json::parse(read_text_file(cache_file));
      JudgeResponse response;
      response.text = doc.at("text").get<std::string>();
      response.cache_hit = true;
      return response;
    }
    auto it = in_flight_.find(key);
    if (it != in_flight_.end()) {
      future = it->second;
    } else {
      owner = true;
      future = promise.get_future().share();
      in_flight_.emplace(key, future);
      ++transport_calls_;
    }
  }

  if (!owner) {
    JudgeResponse response = future.get();  // rethrows the owner's failure
    response.cache_hit = true;
    return response;
  }

  try {
    JudgeResponse response = invoke_with_retries(request);
    Json doc = {{"key", hex16(key)}, {"text", response.text}};
    write_text_file(cache_file, doc.dump());
    promise.set_value(response);
    std::lock_guard<std::mutex> lock(mutex_);
    in_flight_.erase(key);
    return response;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard<std::mutex> lock(mutex_);
    in_flight_.erase(key);
    throw;
  }
}

RemoteJudge::RemoteJudge(std::string model_id, std::shared_ptr<Transport> transport,
                         std::filesystem::path cache_dir, int max_tokens,
                         RetryPolicy retry)
    : model_id_(std::move(model_id)),
      max_tokens_(max_tokens),
      endpoint_(model_id_, std::move(transport), std::move(cache_dir), retry) {}

std::string RemoteJudge::ask(const std::string& system_text,
                             const std::string& user_text) {
  JudgeRequest request;
  request.model_id = model_id_;
  request.system_text = system_text;
  request.user_text = user_text;
  request.max_tokens = max_tokens_;
  return endpoint_.call(request).text;
}

bool RemoteJudge::relevance(const std::string& interest_text,
                            const std::string& object_text,
                            const std::string& engagement_label) {
  std::string prompt = kRelevanceTemplate;
  replace_all(prompt, "{interest}", interest_text);
  replace_all(prompt, "{engagement}", engagement_label);
  replace_all(prompt, "{object}", object_text);

  const std::string answer = normalize_text(trim(ask(kSystemText, prompt)));
  if (answer.rfind("yes", 0) == 0) return true;
  if (answer.rfind("no", 0) == 0) return false;
  throw JudgeProtocolError("relevance answer is not yes/no: " + answer);
}

std::vector<std::string> RemoteJudge::retrieve(const std::string& interest_text,
                                               std::size_t n,
                                               std::span<const Candidate> candidates) {
  std::ostringstream listing;
  for (const Candidate& c : candidates) {
    listing << c.label << ": " << c.text << "\n";
  }
  std::string prompt = kRetrieveTemplate;
  replace_all(prompt, "{interest}", interest_text);
  replace_all(prompt, "{candidates}", listing.str());
  replace_all(prompt, "{n}", std::to_string(n));

  const std::string answer = ask(kSystemText, prompt);

  // Keep the first n valid distinct labels; extras are ignored and shortfalls
  // stay short (missing picks score as misses).
  std::set<std::string> valid;
  for (const Candidate& c : candidates) valid.insert(c.label);
  std::vector<std::string> picks;
  std::set<std::string> seen;
  std::string token;
  std::istringstream ss(answer);
  while (std::getline(ss, token, ',') && picks.size() < n) {
    std::string label = trim(token);
    if (valid.count(label) && seen.insert(label).second) picks.push_back(label);
  }
  if (picks.empty()) {
    throw JudgeProtocolError("no valid labels in retrieval answer: " + answer);
  }
  return picks;
}

bool RemoteJudge::overlap(const std::string& interest_a,
                          const std::string& interest_b) {
  std::string prompt = kOverlapTemplate;
  replace_all(prompt, "{a}", interest_a);
  replace_all(prompt, "{b}", interest_b);
  const std::string answer = normalize_text(trim(ask(kSystemText, prompt)));
  if (answer.rfind("yes", 0) == 0) return true;
  if (answer.rfind("no", 0) == 0) return false;
  throw JudgeProtocolError("overlap answer is not yes/no: " + answer);
}

std::vector<std::optional<std::string>> RemoteJudge::map_categories(
    std::span<const std::string> interest_texts,
    std::span<const std::string> category_names) {
  std::ostringstream categories;
  for (const std::string& name : category_names) categories << "- " << name << "\n";
  std::ostringstream interests;
  for (std::size_t i = 0; i < interest_texts.size(); ++i) {
    interests << i << ". " << interest_texts[i] << "\n";
  }
  std::string prompt = kMapTemplate;
  replace_all(prompt, "{categories}", categories.str());
  replace_all(prompt, "{interests}", interests.str());

  const std::string answer = ask(kSystemText, prompt);

  std::vector<std::optional<std::string>> out(interest_texts.size());
  std::string line;
  std::istringstream ss(answer);
  while (std::getline(ss, line)) {
    line = trim(line);
    std::size_t dot = line.find('.');
    if (dot == std::string::npos) continue;
    std::size_t index = 0;
    try {
      index = std::stoul(line.substr(0, dot));
    } catch (const std::exception&) {
      continue;
    }
    if (index >= out.size()) continue;
    std::string name = trim(line.substr(dot + 1));
    if (std::find(category_names.begin(), category_names.end(), name) !=
        category_names.end()) {
      out[index] = std::move(name);
    }
  }
  return out;
}

}  // namespace gist::judge
