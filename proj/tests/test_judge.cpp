#include "gist/judge.hpp"
#include "gist/judge_client.hpp"

#include "gist/errors.hpp"
#include "gist/io.hpp"
#include "gist/text.hpp"

#include <algorithm>

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

using namespace gist;
using namespace gist::judge;

namespace {

// Transport stub that counts invocations and replies with a fixed text.
class StubTransport : public Transport {
 public:
  explicit StubTransport(std::string reply) : reply_(std::move(reply)) {}

  std::string post_chat(const JudgeRequest&) override {
    ++calls;
    if (fail_times > 0) {
      --fail_times;
      throw TransportError("stub failure");
    }
    Json body = {{"choices", {{{"message", {{"content", reply_}}}}}}};
    return body.dump();
  }

  std::atomic<int> calls{0};
  int fail_times = 0;

 private:
  std::string reply_;
};

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("mock relevance on the worked pairs") {
  MockJudge mock;
  CHECK(mock.relevance("NBA Basketball Highlights",
                       "#NBA #LeBron LeBron's game-winning dunk vs Celtics",
                       "like"));
  CHECK(mock.relevance("NBA Basketball Highlights",
                       "#NBAPlayoffs Conference finals recap", "watch_long"));
  CHECK_FALSE(mock.relevance("Italian Cooking Recipes",
                             "stock market crash analysis", "watch_long"));
}

TEST_CASE("mock agrees with the hand-labeled relevance fixtures on >= 90%") {
  MockJudge mock;
  std::ifstream in(std::filesystem::path(GIST_FIXTURE_DIR) / "relevance_pairs.tsv");
  REQUIRE(in.good());
  std::string line;
  int total = 0, agree = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = line.find('\t', tab1 + 1);
    REQUIRE(tab2 != std::string::npos);
    const std::string interest = line.substr(0, tab1);
    const std::string object = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const bool label = line.substr(tab2 + 1) == "1";
    ++total;
    if (mock.relevance(interest, object, "") == label) ++agree;
  }
  CHECK(total == 30);
  CHECK(static_cast<double>(agree) / total >= 0.9);
}

TEST_CASE("mock retrieve picks by token overlap with index tie-break") {
  MockJudge mock;
  std::vector<Candidate> candidates = {{"v0", "cat grooming"},
                                       {"v1", "NBA dunk compilation"}};
  CHECK(mock.retrieve("NBA Basketball", 1, candidates) ==
        std::vector<std::string>{"v1"});

  std::vector<Candidate> same = {{"v0", "same text"}, {"v1", "same text"},
                                 {"v2", "same text"}};
  CHECK(mock.retrieve("anything same", 2, same) ==
        std::vector<std::string>{"v0", "v1"});
}

TEST_CASE("mock retrieve equals a brute-force rescore on a 50-candidate set") {
  MockJudge mock;
  const std::string interest = "street food tours";
  std::vector<Candidate> candidates;
  for (int i = 0; i < 46; ++i) {
    candidates.push_back({"video_" + std::to_string(i),
                          "distractor zxq" + std::to_string(i)});
  }
  candidates.push_back({"video_46", "street food market walk"});
  candidates.push_back({"video_47", "late night food stalls"});
  candidates.push_back({"video_48", "street musicians"});
  candidates.push_back({"video_49", "walking tours of old towns"});

  auto scored = [&](const Candidate& c) {
    return shared_token_count(content_tokens(interest), content_tokens(c.text));
  };
  // Brute force: stable sort by (score desc, index asc), take 4.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = scored(candidates[a]), sb = scored(candidates[b]);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  std::vector<std::string> expected;
  for (std::size_t i = 0; i < 4; ++i) expected.push_back(candidates[order[i]].label);

  CHECK(mock.retrieve(interest, 4, candidates) == expected);
}

TEST_CASE("mock category mapping prefers exact token sets") {
  MockJudge mock;
  std::vector<std::string> names = {"History", "Art History", "Basketball",
                                    "Cute Cats", "Cute Dogs"};
  std::vector<std::string> texts = {"history", "cute cats", "basketball drills",
                                    "quantum blobs"};
  auto mapped = mock.map_categories(texts, names);
  REQUIRE(mapped.size() == 4);
  CHECK(*mapped[0] == "History");       // jaccard beats Art History
  CHECK(*mapped[1] == "Cute Cats");     // 2 shared beats 1
  CHECK(*mapped[2] == "Basketball");
  CHECK_FALSE(mapped[3].has_value());   // no shared token anywhere
}

TEST_CASE("scripted judge consumes queues then falls back") {
  ScriptedJudge scripted;
  scripted.queue_relevance(false);
  CHECK_FALSE(scripted.relevance("nba", "nba clip", ""));
  CHECK(scripted.relevance("nba", "nba clip", ""));  // fallback = mock
}

TEST_CASE("cached endpoint caches across calls and runs") {
  const auto dir = fresh_dir("gist_cache_test");
  auto transport = std::make_shared<StubTransport>("yes");
  CachedEndpoint endpoint("judge-x", transport, dir);

  JudgeRequest request;
  request.model_id = "judge-x";
  request.user_text = "ping";

  JudgeResponse first = endpoint.call(request);
  CHECK_FALSE(first.cache_hit);
  JudgeResponse second = endpoint.call(request);
  CHECK(second.cache_hit);
  CHECK(second.text == first.text);
  CHECK(transport->calls == 1);

  // A fresh endpoint over the same directory still hits the cache.
  CachedEndpoint again("judge-x", transport, dir);
  CHECK(again.call(request).cache_hit);
  CHECK(transport->calls == 1);

  // Clearing the cache forces re-invocation.
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  CachedEndpoint cleared("judge-x", transport, dir);
  CHECK_FALSE(cleared.call(request).cache_hit);
  CHECK(transport->calls == 2);
}

TEST_CASE("100 concurrent identical requests invoke the endpoint once") {
  const auto dir = fresh_dir("gist_cache_concurrent");
  auto transport = std::make_shared<StubTransport>("no");
  CachedEndpoint endpoint("judge-x", transport, dir);

  JudgeRequest request;
  request.user_text = "same";

  std::vector<std::thread> threads;
  std::atomic<int> hits{0};
  for (int i = 0; i < 100; ++i) {
    threads.emplace_back([&] {
      if (endpoint.call(request).cache_hit) ++hits;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(transport->calls == 1);
  CHECK(hits == 99);
  CHECK(endpoint.transport_calls() == 1);
}

TEST_CASE("transport retries then surfaces the failure") {
  const auto dir = fresh_dir("gist_cache_retry");
  auto transport = std::make_shared<StubTransport>("yes");
  transport->fail_times = 2;
  RetryPolicy retry;
  retry.attempts = 3;
  retry.base_delay = std::chrono::milliseconds(1);
  CachedEndpoint endpoint("judge-x", transport, dir, retry);
  JudgeRequest request;
  request.user_text = "flaky";
  CHECK(endpoint.call(request).text == "yes");
  CHECK(transport->calls == 3);

  transport->fail_times = 5;
  request.user_text = "always-fails";
  CHECK_THROWS_AS(endpoint.call(request), TransportError);
}

TEST_CASE("remote judge protocol parsing") {
  const auto dir = fresh_dir("gist_remote_judge");
  SUBCASE("relevance yes/no") {
    RemoteJudge judge("judge-x", std::make_shared<StubTransport>("Yes, clearly."),
                      dir);
    CHECK(judge.relevance("a", "b", "like"));
  }
  SUBCASE("relevance protocol error") {
    RemoteJudge judge("judge-x", std::make_shared<StubTransport>("maybe?"), dir);
    CHECK_THROWS_AS(judge.relevance("a", "b", "like"), JudgeProtocolError);
  }
  SUBCASE("retrieve keeps first n valid distinct labels") {
    RemoteJudge judge("judge-x",
                      std::make_shared<StubTransport>(
                          "video_1, video_9, video_1, video_0, video_2"),
                      dir);
    std::vector<Candidate> candidates;
    for (int i = 0; i < 4; ++i) {
      candidates.push_back({"video_" + std::to_string(i), "text"});
    }
    CHECK(judge.retrieve("x", 2, candidates) ==
          std::vector<std::string>{"video_1", "video_0"});
  }
  SUBCASE("retrieve shortfall stays short") {
    RemoteJudge judge("judge-x", std::make_shared<StubTransport>("video_3"), dir);
    std::vector<Candidate> candidates;
    for (int i = 0; i < 5; ++i) {
      candidates.push_back({"video_" + std::to_string(i), "text"});
    }
    CHECK(judge.retrieve("x", 3, candidates) == std::vector<std::string>{"video_3"});
  }
  SUBCASE("retrieve with zero valid labels is a protocol error") {
    RemoteJudge judge("judge-x",
                      std::make_shared<StubTransport>("none of these match"), dir);
    std::vector<Candidate> candidates = {{"video_0", "text"}};
    CHECK_THROWS_AS(judge.retrieve("x", 1, candidates), JudgeProtocolError);
  }
  SUBCASE("category mapping validates against the list") {
    RemoteJudge judge("judge-x",
                      std::make_shared<StubTransport>("0. Basketball\n1. Nonsense"),
                      dir);
    std::vector<std::string> texts = {"nba", "xyz"};
    std::vector<std::string> names = {"Basketball", "Baseball"};
    auto mapped = judge.map_categories(texts, names);
    CHECK(*mapped[0] == "Basketball");
    CHECK_FALSE(mapped[1].has_value());
  }
}
