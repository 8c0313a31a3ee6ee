#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aeroqa::embed {
class Provider;
}

namespace aeroqa::ontology {

// Occurrence taxonomy with a single root. Nodes are stored in pre-order so
// index 0 is the root and children appear in file order.
class TaxonomyTree {
 public:
  struct Node {
    std::string label;
    std::size_t parent = 0;  // root points at itself
    std::size_t depth = 0;
    std::vector<std::size_t> children;
  };

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const Node& root() const { return nodes_.front(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool is_leaf(std::size_t i) const { return nodes_.at(i).children.empty(); }

  // Labels from the root down to node `i`.
  std::vector<std::string> path_to(std::size_t i) const;

 private:
  friend TaxonomyTree load_taxonomy(std::string_view text);
  std::vector<Node> nodes_;
};

// One label per line, two spaces of indentation per level. Blank lines and
// lines starting with '#' are skipped. Throws ParseError on a depth jump of
// more than one level, odd indentation, tabs, or a second root.
TaxonomyTree load_taxonomy(std::string_view text);

struct RootToLeafPath {
  std::vector<std::string> labels;

  // Labels joined with " / ".
  std::string render() const;
  const std::string& leaf() const { return labels.back(); }

  friend bool operator==(const RootToLeafPath&, const RootToLeafPath&) = default;
};

// One path per leaf, depth-first.
std::vector<RootToLeafPath> enumerate_paths(const TaxonomyTree& tree);

enum class MappingMethod { EmbeddingDistance, KeywordMatch };

struct MappingResult {
  std::string event;
  RootToLeafPath path;
  double score = 0.0;  // distance (lower is better) or Jaccard (higher is better)
  MappingMethod method = MappingMethod::KeywordMatch;
};

// Path whose rendered text lies nearest the event in embedding space
// (Euclidean). Ties go to the lexicographically smaller rendering, so the
// result does not depend on the order of `paths`.
MappingResult map_event_embedding(std::string_view event,
                                  std::span<const RootToLeafPath> paths,
                                  const embed::Provider& provider);

// Every node is scored by the Jaccard overlap between the event's content
// tokens and the node label's. An internal winner resolves to its
// best-scoring descendant leaf (first listed on ties). Ties between nodes
// go to the lexicographically smallest rendered path. Throws NoMentionError
// when the event has no content tokens.
MappingResult map_event_keywords(std::string_view event, const TaxonomyTree& tree);

struct TermScore {
  std::vector<std::string> term;
  double score = 0.0;
  std::size_t frequency = 0;

  std::string text() const;
};

using Document = std::vector<std::string>;

// tf(t,d) * ln(N / df(t)) with raw counts; each term reports its best
// document. Sorted by score desc, then term. Throws ValidationError on an
// empty corpus.
std::vector<TermScore> tfidf(std::span<const Document> corpus);

// C-value over contiguous n-grams, 2 <= n <= max_n:
//   log2|a| * f(a)                                 if a is not nested
//   log2|a| * (f(a) - sum_{b in T(a)} f(b) / |T(a)|) otherwise
// where T(a) is the set of longer candidates containing a. Sorted by score
// desc, then term. Throws ValidationError when max_n < 2.
std::vector<TermScore> cvalue(std::span<const Document> corpus, std::size_t max_n = 4);

}  // namespace aeroqa::ontology
