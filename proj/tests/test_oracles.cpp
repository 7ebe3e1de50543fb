#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scarlet/oracles.hpp"
#include "scarlet/prompts.hpp"

using namespace scarlet;
using nlohmann::json;

namespace {

/// httplib server on an ephemeral loopback port, stopped on destruction.
class LocalServer {
 public:
  explicit LocalServer(const std::function<void(httplib::Server&)>& routes) {
    routes(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpOptions fast_options() {
  HttpOptions o;
  o.initial_backoff = std::chrono::milliseconds(5);
  o.timeout = std::chrono::seconds(5);
  return o;
}

std::vector<Passage> passages(std::initializer_list<const char*> texts) {
  std::vector<Passage> out;
  int i = 0;
  for (auto t : texts) out.push_back(make_passage("p" + std::to_string(++i), t));
  return out;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("linear mock is additive and its noise is a pure function of v") {
  LinearMockSpec spec{1.0, {2.0, -1.0, 0.5}, {{1, 3, 4.0}}, 0.0, 0};
  std::vector<int> v{1, 0, 1};
  CHECK(mock_linear_score(spec, v) == doctest::Approx(1.0 + 2.0 + 0.5 + 4.0));
  std::vector<int> short_v{1, 0};
  CHECK_THROWS_AS(mock_linear_score(spec, short_v), Error);

  spec.noise_sigma = 0.3;
  spec.seed = 11;
  double a = mock_linear_score(spec, v);
  CHECK(a == mock_linear_score(spec, v));
  CHECK(a != doctest::Approx(7.5).epsilon(1e-12));

  LinearMockSpec bad{0.0, {1.0, 1.0}, {{1, 1, 1.0}}, 0.0, 0};
  CHECK_THROWS_AS(validate(bad), Error);
  bad.interactions = {{1, 3, 1.0}};
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("linear mock scorer maps passage ids to coordinates") {
  LinearMockSpec spec{0.0, {1.0, 10.0, 100.0}, {}, 0.0, 0};
  LinearMockScorer scorer(spec, {"a", "b", "c"});
  std::vector<Passage> ctx{make_passage("c", "z"), make_passage("a", "x")};
  auto t = make_target({}, "ans");
  CHECK(scorer.score_ground_truth(ctx, {}, t) == std::vector<double>{101.0});
  std::vector<Passage> stranger{make_passage("q", "z")};
  CHECK_THROWS_AS(scorer.score_ground_truth(stranger, {}, t), Error);
  CHECK_THROWS_AS(LinearMockScorer(spec, {"a", "b"}), Error);
}

TEST_CASE("overlap scorer rewards covered tokens") {
  OverlapScorer scorer;
  auto ctx = passages({"The capital is Velmora.", "Rivers flow."});
  auto t = make_target({}, "Velmora city");
  auto s = scorer.score_ground_truth(ctx, {}, t);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(-0.1));
  CHECK(s[1] == doctest::Approx(-5.0));
  CHECK(scorer.score_ground_truth({}, {}, t) == std::vector<double>{-5.0, -5.0});
}

TEST_CASE("mock generator answers each template") {
  MockGenerator gen(3);
  TaskSpec task{"nq", "Answer the question.", "Retrieve passages.", "Who?", "Someone"};
  auto ctx = passages({"Velmora lies on the Arin River.", "The festival is held in Dunmarch."});

  auto synth = gen.generate(prompts::render_synthesis(ctx, task), 0.5, 512);
  auto [input, output] = prompts::parse_synthesis_reply(synth);
  CHECK(input.find("what") != std::string::npos);
  CHECK_FALSE(output.empty());
  CHECK(synth == gen.generate(prompts::render_synthesis(ctx, task), 0.5, 512));

  SyntheticExample good{"nq", input, output, "c", FilterVerdict::unfiltered};
  CHECK(prompts::parse_filter_reply(gen.generate(prompts::render_filter(good, ctx, task), 0.5,
                                                 512)) == prompts::FilterReply::yes);
  SyntheticExample bad{"nq", input, "Atlantis", "c", FilterVerdict::unfiltered};
  CHECK(prompts::parse_filter_reply(gen.generate(prompts::render_filter(bad, ctx, task), 0.5,
                                                 512)) == prompts::FilterReply::no);

  SyntheticExample ex{"nq", "Where is the festival?", "Dunmarch", "c", FilterVerdict::kept};
  auto noise = prompts::parse_noise_reply(gen.generate(prompts::render_noise(ex, ctx), 0.5, 512));
  REQUIRE(noise.has_value());
  CHECK(noise->find("Dunmarch") == std::string::npos);
  CHECK(noise->find("festival") != std::string::npos);

  auto rank = gen.generate(prompts::render_rank(ctx, "Which festival is in Dunmarch?"), 0.5, 512);
  CHECK(prompts::parse_rank_line(rank, 2) == std::vector<std::size_t>{2, 1});

  CHECK(gen.generate("hello", 0.5, 512).empty());
}

TEST_CASE("http scorer posts the wire body and reads token scores") {
  json seen;
  std::string auth;
  LocalServer server([&](httplib::Server& s) {
    s.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(R"({"token_scores": [-0.5, -1.25]})", "application/json");
    });
  });
  auto opts = fast_options();
  opts.bearer_token = "secret";
  HttpScorer scorer(server.url("/score"), opts);
  auto ctx = passages({"alpha", "beta"});
  QueryText q{std::nullopt, "who?", "who?"};
  auto scores = scorer.score_ground_truth(ctx, q, make_target(q, "two tokens"));
  CHECK(scores == std::vector<double>{-0.5, -1.25});
  CHECK(seen["context"] == json::array({"alpha", "beta"}));
  CHECK(seen["query"] == "who?");
  CHECK(seen["target"] == "two tokens");
  CHECK(auth == "Bearer secret");
}

TEST_CASE("http retries transient failures then reports OracleUnavailable") {
  std::atomic<int> calls{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/busy", [&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 503;
    });
    s.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
      if (++calls <= 2) {
        res.status = 429;
        return;
      }
      res.set_content(R"({"text": "ok"})", "application/json");
    });
    s.Post("/denied", [&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 401;
    });
  });

  try {
    http_generate(server.url("/busy"), "p", 0.5, 16, fast_options());
    FAIL("expected OracleUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OracleUnavailable);
  }
  CHECK(calls == 3);

  calls = 0;
  CHECK(http_generate(server.url("/flaky"), "p", 0.5, 16, fast_options()) == "ok");
  CHECK(calls == 3);

  calls = 0;
  CHECK_THROWS_AS(http_generate(server.url("/denied"), "p", 0.5, 16, fast_options()), Error);
  CHECK(calls == 1);
}

TEST_CASE("http reports protocol errors on malformed replies") {
  LocalServer server([&](httplib::Server& s) {
    s.Post("/missing", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"scores": [1]})", "application/json");
    });
    s.Post("/empty", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"token_scores": []})", "application/json");
    });
    s.Post("/text", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"token_scores": ["x"]})", "application/json");
    });
    s.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "text/plain");
    });
  });
  std::vector<std::string> ctx{"a"};
  for (auto path : {"/missing", "/empty", "/text", "/garbage"}) {
    CAPTURE(path);
    try {
      http_score(server.url(path), ctx, "q", "t", fast_options());
      FAIL("expected ProtocolError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ProtocolError);
    }
  }
}

TEST_CASE("http generate defaults and input checks") {
  json seen;
  LocalServer server([&](httplib::Server& s) {
    s.Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      res.set_content(R"({"text": "reply"})", "application/json");
    });
  });
  CHECK(http_generate(server.url("/gen"), "prompt") == "reply");
  CHECK(seen["temperature"] == 0.5);
  CHECK(seen["max_tokens"] == 512);
  CHECK(seen["prompt"] == "prompt");

  try {
    http_generate("http://127.0.0.1:1/never", "");
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
}

TEST_CASE("unreachable endpoint is OracleUnavailable") {
  auto opts = fast_options();
  opts.timeout = std::chrono::seconds(1);
  try {
    // Port 1 on loopback refuses connections.
    http_generate("http://127.0.0.1:1/gen", "p", 0.5, 8, opts);
    FAIL("expected OracleUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OracleUnavailable);
  }
}

TEST_CASE("split_url") {
  CHECK(split_url("http://h:8/a/b") == std::pair<std::string, std::string>{"http://h:8", "/a/b"});
  CHECK(split_url("https://h").second == "/");
  CHECK_THROWS_AS(split_url("h/a"), Error);
}

}  // TEST_SUITE
