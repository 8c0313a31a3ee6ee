#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "fake_server.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace aeroqa::embed {
namespace {

using nlohmann::json;

double dot(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(Hashed, UnitNormAndDeterministic) {
  const auto v = embed_hashed("Landing gear collapsed");
  EXPECT_EQ(v.size(), kDefaultDim);
  EXPECT_NEAR(std::sqrt(dot(v, v)), 1.0, 1e-9);
  EXPECT_EQ(v, embed_hashed("Landing gear collapsed"));
}

TEST(Hashed, EmptyTextIsZero) {
  const auto v = embed_hashed("   ");
  EXPECT_EQ(norm(v), 0.0);
  EXPECT_EQ(cosine(v, embed_hashed("x")), 0.0);
}

TEST(Hashed, CaseAndWhitespaceInsensitive) {
  EXPECT_EQ(embed_hashed("Fuel  Exhaustion"), embed_hashed("fuel exhaustion"));
}

TEST(Hashed, RelatedTextScoresHigher) {
  const auto a = embed_hashed("landing gear");
  EXPECT_GT(cosine(a, embed_hashed("landing gear collapsed")), cosine(a, embed_hashed("fuel exhaustion")));
}

TEST(Hashed, DependsOnlyOnNgramMultiset) {
  // Padded trigrams of both: " aa", "aaa", "aab", "aba", "baa", "aa ".
  EXPECT_EQ(embed_hashed("aaabaa"), embed_hashed("aabaaa"));
  EXPECT_NE(embed_hashed("aaabaa"), embed_hashed("aaaaba"));
}

TEST(Hashed, ProviderValidatesParameters) {
  EXPECT_THROW(HashedNgramProvider(4, 3), ValidationError);
  EXPECT_THROW(HashedNgramProvider(16, 1), ValidationError);
  HashedNgramProvider p(16, 2);
  const std::vector<std::string> texts{"a", "b"};
  const auto vs = p.embed(texts);
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_EQ(vs[0], embed_hashed("a", 16, 2));
}

TEST(Cosine, Properties) {
  const Vector u{1, 0, 0};
  const Vector v{0, 1, 0};
  EXPECT_EQ(cosine(u, u), 1.0);
  EXPECT_EQ(cosine(u, v), 0.0);
  EXPECT_THROW(cosine(u, Vector{1, 0}), ValidationError);
  testing::Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = embed_hashed(testing::random_sentence(rng, 3));
    const auto b = embed_hashed(testing::random_sentence(rng, 3));
    Vector a2 = a;
    for (auto& x : a2) x *= 2.0;
    EXPECT_NEAR(cosine(a2, b), cosine(a, b), 1e-12);
    EXPECT_EQ(cosine(a, b), cosine(b, a));
    EXPECT_LE(std::abs(cosine(a, b)), 1.0);
    EXPECT_EQ(cosine(a, a), 1.0);
  }
}

TEST(FileBacked, LoadsAndFallsBack) {
  const auto p = parse_vectors("fuel\t0.5 0.25 0.125 0 0 0 0 1\nwing\t1 0 0 0 0 0 0 0\n");
  EXPECT_EQ(p->entries(), 2u);
  EXPECT_EQ(p->dim(), 8u);
  const std::vector<std::string> texts{"fuel", "wing", "missing"};
  const auto vs = p->embed(texts);
  EXPECT_EQ(vs[0], (Vector{0.5, 0.25, 0.125, 0, 0, 0, 0, 1}));
  EXPECT_EQ(vs[1], (Vector{1, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(vs[2], embed_hashed("missing", 8));
  EXPECT_NEAR(norm(vs[2]), 1.0, 1e-9);
}

TEST(FileBacked, RaggedFileNamesLine) {
  try {
    parse_vectors("a\t1 2 3\nb\t1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_vectors("a\t1 x 3\n"), ParseError);
}

TEST(FileBacked, LoadFromDisk) {
  testing::TempDir dir;
  testing::write_file(dir.path() / "v.tsv", "a\t1 2 3 4 5 6 7 8\n");
  EXPECT_EQ(load_vectors(dir.path() / "v.tsv")->entries(), 1u);
}

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("http://localhost:9000/models/");
  EXPECT_EQ(e.origin, "http://localhost:9000");
  EXPECT_EQ(e.base_path, "/models");
  EXPECT_THROW(Endpoint::parse("ftp://x"), ConfigError);
  EXPECT_THROW(Endpoint::parse(""), ConfigError);
}

// Serves /embed with hashed vectors; `mutate` may corrupt the response.
struct EmbedServer {
  testing::FakeServer fake;
  std::atomic<int> calls{0};
  std::function<void(json&)> mutate = [](json&) {};
  json last_request;

  EmbedServer() {
    fake.server().Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_request = json::parse(req.body);
      json vectors = json::array();
      for (const auto& t : last_request.at("texts")) vectors.push_back(embed_hashed(t.get<std::string>(), 16));
      json body = {{"dim", 16}, {"vectors", vectors}};
      mutate(body);
      res.set_content(body.dump(), "application/json");
    });
    fake.start();
  }
  Endpoint endpoint() const { return Endpoint::parse(fake.url()); }
};

TEST(Remote, EmptyInputMakesNoCall) {
  EmbedServer s;
  EXPECT_TRUE(embed_remote({}, s.endpoint()).empty());
  EXPECT_EQ(s.calls, 0);
}

TEST(Remote, VectorsInOrder) {
  EmbedServer s;
  const std::vector<std::string> texts{"one", "two", "three"};
  const auto vs = embed_remote(texts, s.endpoint());
  ASSERT_EQ(vs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(vs[i], embed_hashed(texts[i], 16));
  EXPECT_EQ(s.last_request, (json{{"texts", texts}}));
}

TEST(Remote, ProtocolViolations) {
  EmbedServer s;
  const std::vector<std::string> texts{"one", "two"};
  s.mutate = [](json& b) { b["vectors"].erase(1); };
  EXPECT_THROW(embed_remote(texts, s.endpoint()), RemoteError);
  s.mutate = [](json& b) { b["vectors"][1].push_back(0.0); };
  EXPECT_THROW(embed_remote(texts, s.endpoint()), RemoteError);
  s.mutate = [](json& b) { b["dim"] = 8; };
  EXPECT_THROW(embed_remote(texts, s.endpoint()), RemoteError);
  s.mutate = [](json& b) { b["vectors"][0][0] = "x"; };
  EXPECT_THROW(embed_remote(texts, s.endpoint()), RemoteError);
  s.mutate = [](json& b) { b = json::object(); };
  EXPECT_THROW(embed_remote(texts, s.endpoint()), RemoteError);
}

TEST(Remote, NonFiniteComponent) {
  testing::FakeServer fake;
  fake.server().Post("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim": 2, "vectors": [[1e999, 0]]})", "application/json");
  });
  fake.start();
  const std::vector<std::string> texts{"x"};
  EXPECT_THROW(embed_remote(texts, Endpoint::parse(fake.url())), RemoteError);
}

TEST(Remote, HttpErrorAndUnreachable) {
  testing::FakeServer fake;
  fake.server().Post("/embed", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  fake.start();
  const std::vector<std::string> texts{"x"};
  EXPECT_THROW(embed_remote(texts, Endpoint::parse(fake.url())), RemoteError);

  int port = 0;
  {
    testing::FakeServer gone;
    gone.start();
    port = gone.port();
  }
  auto ep = Endpoint::parse("http://127.0.0.1:" + std::to_string(port));
  ep.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(embed_remote(texts, ep), RemoteError);
}

TEST(Remote, BasePathIsPrefixed) {
  testing::FakeServer fake;
  fake.server().Post("/m/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim": 2, "vectors": [[1, 0]]})", "application/json");
  });
  fake.start();
  const std::vector<std::string> texts{"x"};
  EXPECT_EQ(embed_remote(texts, Endpoint::parse(fake.url() + "/m")).size(), 1u);
}

TEST(Fallback, UsesFallbackOnRemoteError) {
  EmbedServer s;
  s.mutate = [](json& b) { b["vectors"] = json::array(); };
  const FallbackProvider p(std::make_shared<RemoteProvider>(s.endpoint()),
                           std::make_shared<HashedNgramProvider>());
  const std::vector<std::string> texts{"fuel"};
  EXPECT_EQ(p.embed(texts)[0], embed_hashed("fuel"));
  s.mutate = [](json&) {};
  EXPECT_EQ(p.embed(texts)[0], embed_hashed("fuel", 16));
}

}  // namespace
}  // namespace aeroqa::embed
