#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aeroqa::embed {

using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultDim = 256;
inline constexpr std::size_t kDefaultNgram = 3;

// Text -> fixed-length vector. Implementations are immutable after
// construction and safe to call concurrently.
class Provider {
 public:
  virtual ~Provider() = default;

  // Output dimension, or 0 when only known after the first response.
  virtual std::size_t dim() const = 0;

  // One vector per input, order preserved. Batching a whole computation in
  // a single call guarantees the vectors are mutually comparable.
  virtual std::vector<Vector> embed(std::span<const std::string> texts) const = 0;

  virtual std::string name() const = 0;

  Vector embed_one(std::string_view text) const;
};

// Signed feature hashing of the character n-gram multiset of the
// lowercased, whitespace-collapsed text padded with one space on each side,
// then L2 normalized. Text that is empty after normalization maps to the
// zero vector.
Vector embed_hashed(std::string_view text, std::size_t dim = kDefaultDim,
                    std::size_t n = kDefaultNgram);

class HashedNgramProvider final : public Provider {
 public:
  // Throws ValidationError unless dim >= 8 and n >= 2.
  explicit HashedNgramProvider(std::size_t dim = kDefaultDim, std::size_t n = kDefaultNgram);

  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;
  std::string name() const override;

 private:
  std::size_t dim_;
  std::size_t n_;
};

// Lookup table loaded from `text<TAB>v1 v2 ... vd` lines. Misses fall back
// to hashed n-gram vectors of the same dimension.
class FileBackedProvider final : public Provider {
 public:
  FileBackedProvider(std::unordered_map<std::string, Vector> table, std::size_t dim);

  std::size_t dim() const override { return dim_; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;
  std::string name() const override { return "file"; }

  std::size_t entries() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, Vector> table_;
  std::size_t dim_;
};

// Throws ParseError (with line number) on ragged or non-numeric rows.
std::shared_ptr<FileBackedProvider> parse_vectors(std::string_view content);
std::shared_ptr<FileBackedProvider> load_vectors(const std::filesystem::path& path);

// `http://host:port[/base]`.
struct Endpoint {
  std::string origin;     // scheme://host:port
  std::string base_path;  // "" or "/prefix" without trailing slash
  std::chrono::milliseconds timeout{5000};

  // Throws ConfigError on anything but http://host[:port][/path].
  static Endpoint parse(std::string_view url);
  std::string url() const { return origin + base_path; }
};

// POST {base}/embed with {"texts": [...]}; expects {"dim": d, "vectors": [...]}.
// Throws RemoteError on transport failure, non-200 status, wrong vector
// count, ragged or mismatched dimension, or non-finite components.
std::vector<Vector> embed_remote(std::span<const std::string> texts, const Endpoint& endpoint);

class RemoteProvider final : public Provider {
 public:
  explicit RemoteProvider(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::size_t dim() const override { return 0; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;
  std::string name() const override { return "remote:" + endpoint_.url(); }

 private:
  Endpoint endpoint_;
};

// Tries `primary` per batch; on RemoteError logs a warning and answers the
// whole batch from `fallback`.
class FallbackProvider final : public Provider {
 public:
  FallbackProvider(std::shared_ptr<const Provider> primary,
                   std::shared_ptr<const Provider> fallback);

  std::size_t dim() const override { return primary_->dim(); }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;
  std::string name() const override;

 private:
  std::shared_ptr<const Provider> primary_;
  std::shared_ptr<const Provider> fallback_;
};

// dot(u, v) / (|u| |v|); 0 when either norm is 0. Throws ValidationError on
// a dimension mismatch.
double cosine(const Vector& u, const Vector& v);
double euclidean(const Vector& u, const Vector& v);
double norm(const Vector& v);

}  // namespace aeroqa::embed
