#include "aeroqa/embeddings.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "aeroqa/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aeroqa::embed {
namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // Final avalanche so that low bits (bucket) and the top bit (sign) are
  // not correlated.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

std::string normalize(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c) != 0) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

}  // namespace

Vector Provider::embed_one(std::string_view text) const {
  const std::string one(text);
  auto out = embed(std::span<const std::string>(&one, 1));
  return std::move(out.front());
}

Vector embed_hashed(std::string_view text, std::size_t dim, std::size_t n) {
  Vector v(dim, 0.0);
  const auto norm_text = normalize(text);
  if (norm_text.empty()) return v;
  const std::string padded = " " + norm_text + " ";
  const auto add = [&](std::string_view gram) {
    const auto h = fnv1a(gram);
    v[h % dim] += (h >> 63) != 0 ? -1.0 : 1.0;
  };
  if (padded.size() < n) {
    add(padded);
  } else {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) add(std::string_view(padded).substr(i, n));
  }
  const double len = norm(v);
  if (len > 0.0) {
    for (auto& x : v) x /= len;
  }
  return v;
}

HashedNgramProvider::HashedNgramProvider(std::size_t dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim < 8) throw ValidationError("hashed embedding dim must be >= 8");
  if (n < 2) throw ValidationError("hashed embedding n-gram size must be >= 2");
}

std::vector<Vector> HashedNgramProvider::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_hashed(t, dim_, n_));
  return out;
}

std::string HashedNgramProvider::name() const {
  return "hashed(dim=" + std::to_string(dim_) + ",n=" + std::to_string(n_) + ")";
}

FileBackedProvider::FileBackedProvider(std::unordered_map<std::string, Vector> table,
                                       std::size_t dim)
    : table_(std::move(table)), dim_(dim) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
}

std::vector<Vector> FileBackedProvider::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (auto it = table_.find(t); it != table_.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(embed_hashed(t, dim_, kDefaultNgram));
    }
  }
  return out;
}

std::shared_ptr<FileBackedProvider> parse_vectors(std::string_view content) {
  std::unordered_map<std::string, Vector> table;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("missing TAB separator", line_no);
    Vector v;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || !std::isfinite(x)) throw ParseError("bad vector component", line_no);
      v.push_back(x);
      p = next;
    }
    if (v.empty()) throw ParseError("empty vector", line_no);
    if (dim == 0) dim = v.size();
    if (v.size() != dim) {
      throw ParseError("ragged vector: expected " + std::to_string(dim) + " components, got " +
                           std::to_string(v.size()),
                       line_no);
    }
    table[line.substr(0, tab)] = std::move(v);
  }
  if (dim == 0) throw ParseError("vector file has no entries");
  return std::make_shared<FileBackedProvider>(std::move(table), dim);
}

std::shared_ptr<FileBackedProvider> load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vectors file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_vectors(buf.str());
}

Endpoint Endpoint::parse(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) {
    throw ConfigError("endpoint must start with http:// : " + std::string(url));
  }
  const auto rest = url.substr(scheme.size());
  const auto slash = rest.find('/');
  const auto authority = rest.substr(0, slash);
  if (authority.empty()) throw ConfigError("endpoint has no host: " + std::string(url));
  Endpoint ep;
  ep.origin = std::string(scheme) + std::string(authority);
  if (slash != std::string_view::npos) {
    ep.base_path = std::string(rest.substr(slash));
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  }
  return ep;
}

std::vector<Vector> embed_remote(std::span<const std::string> texts, const Endpoint& endpoint) {
  if (texts.empty()) return {};
  httplib::Client cli(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());

  const json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = cli.Post(endpoint.base_path + "/embed", body.dump(), "application/json");
  if (!res) {
    throw RemoteError("POST " + endpoint.url() + "/embed failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw RemoteError("POST " + endpoint.url() + "/embed returned HTTP " + std::to_string(res->status));
  }

  std::vector<Vector> out;
  try {
    const auto doc = json::parse(res->body);
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto& vectors = doc.at("vectors");
    if (!vectors.is_array() || vectors.size() != texts.size()) {
      throw RemoteError("/embed returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
    }
    for (const auto& row : vectors) {
      auto v = row.get<Vector>();
      if (v.size() != dim || dim == 0) {
        throw RemoteError("/embed vector has " + std::to_string(v.size()) +
                          " components, declared dim " + std::to_string(dim));
      }
      for (double x : v) {
        if (!std::isfinite(x)) throw RemoteError("/embed returned a non-finite component");
      }
      out.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw RemoteError(std::string("/embed response is not valid: ") + e.what());
  }
  return out;
}

std::vector<Vector> RemoteProvider::embed(std::span<const std::string> texts) const {
  return embed_remote(texts, endpoint_);
}

FallbackProvider::FallbackProvider(std::shared_ptr<const Provider> primary,
                                   std::shared_ptr<const Provider> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {
  if (!primary_ || !fallback_) throw ValidationError("fallback provider needs two providers");
}

std::vector<Vector> FallbackProvider::embed(std::span<const std::string> texts) const {
  try {
    return primary_->embed(texts);
  } catch (const RemoteError& e) {
    spdlog::warn("embedding provider {} failed ({}); using {}", primary_->name(), e.what(),
                 fallback_->name());
    return fallback_->embed(texts);
  }
}

std::string FallbackProvider::name() const {
  return primary_->name() + "|" + fallback_->name();
}

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine of vectors with dims " + std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  // sqrt(uu * uu) == uu exactly, so identical vectors give exactly 1.
  const double c = dot / std::sqrt(uu * vv);
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

double euclidean(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw ValidationError("distance between vectors of different dims");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
  return std::sqrt(s);
}

}  // namespace aeroqa::embed
