#include "aeroqa/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"

namespace aeroqa::ontology {
namespace {

constexpr double kDistanceTieEps = 1e-12;

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

bool by_score_then_term(const TermScore& a, const TermScore& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.term < b.term;
}

}  // namespace

std::vector<std::string> TaxonomyTree::path_to(std::size_t i) const {
  std::vector<std::string> labels;
  while (true) {
    labels.push_back(nodes_.at(i).label);
    if (i == 0) break;
    i = nodes_[i].parent;
  }
  std::reverse(labels.begin(), labels.end());
  return labels;
}

TaxonomyTree load_taxonomy(std::string_view text) {
  TaxonomyTree tree;
  std::vector<std::size_t> stack;  // open ancestors by depth
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t indent = 0;
    while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) {
      if (line[indent] == '\t') throw ParseError("tab in indentation", line_no);
      ++indent;
    }
    const auto label = text::trim(line.substr(indent));
    if (label.empty() || label.front() == '#') continue;
    if (indent % 2 != 0) throw ParseError("indentation is not a multiple of two spaces", line_no);
    const std::size_t depth = indent / 2;

    if (tree.nodes_.empty()) {
      if (depth != 0) throw ParseError("first label must be the root (no indentation)", line_no);
      tree.nodes_.push_back({label, 0, 0, {}});
      stack.assign(1, 0);
      continue;
    }
    if (depth == 0) throw ParseError("second root '" + label + "'", line_no);
    if (depth > stack.size()) {
      throw ParseError("indentation jumps more than one level at '" + label + "'", line_no);
    }
    stack.resize(depth);
    const auto parent = stack.back();
    const auto id = tree.nodes_.size();
    tree.nodes_.push_back({label, parent, depth, {}});
    tree.nodes_[parent].children.push_back(id);
    stack.push_back(id);
  }
  if (tree.nodes_.empty()) throw ParseError("taxonomy is empty");
  return tree;
}

std::string RootToLeafPath::render() const { return join(labels, " / "); }

std::vector<RootToLeafPath> enumerate_paths(const TaxonomyTree& tree) {
  std::vector<RootToLeafPath> out;
  // Nodes are stored in pre-order, which is depth-first order.
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.is_leaf(i)) out.push_back({tree.path_to(i)});
  }
  return out;
}

MappingResult map_event_embedding(std::string_view event,
                                  std::span<const RootToLeafPath> paths,
                                  const embed::Provider& provider) {
  if (paths.empty()) throw ValidationError("no taxonomy paths to map onto");
  std::vector<std::string> texts;
  texts.reserve(paths.size() + 1);
  texts.emplace_back(event);
  for (const auto& p : paths) texts.push_back(p.render());
  const auto vecs = provider.embed(texts);

  std::vector<double> dist(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) dist[i] = embed::euclidean(vecs[0], vecs[i + 1]);
  const double min_dist = *std::min_element(dist.begin(), dist.end());
  // Distances within rounding noise of the minimum count as ties.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (dist[i] > min_dist + kDistanceTieEps) continue;
    if (!best || texts[i + 1] < texts[*best + 1]) best = i;
  }
  return {std::string(event), paths[*best], dist[*best], MappingMethod::EmbeddingDistance};
}

MappingResult map_event_keywords(std::string_view event, const TaxonomyTree& tree) {
  const auto event_tokens = text::content_tokens(event);
  if (event_tokens.empty()) {
    throw NoMentionError("event '" + std::string(event) + "' has no content tokens");
  }
  std::vector<double> scores(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    scores[i] = text::jaccard(event_tokens, text::content_tokens(tree.node(i).label));
  }

  // Leaf with the highest score below `i`, earliest in pre-order on ties.
  const auto resolve_leaf = [&](std::size_t i) {
    std::size_t best = i;
    bool found = false;
    std::vector<std::size_t> pending{i};
    while (!pending.empty()) {
      const auto n = pending.back();
      pending.pop_back();
      const auto& kids = tree.node(n).children;
      if (kids.empty()) {
        if (!found || scores[n] > scores[best] || (scores[n] == scores[best] && n < best)) {
          best = n;
          found = true;
        }
      }
      for (auto c = kids.rbegin(); c != kids.rend(); ++c) pending.push_back(*c);
    }
    return best;
  };

  const double top = *std::max_element(scores.begin(), scores.end());
  std::optional<RootToLeafPath> winner;
  std::string winner_text;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (scores[i] != top) continue;
    RootToLeafPath path{tree.path_to(resolve_leaf(i))};
    auto rendered = path.render();
    if (!winner || rendered < winner_text) {
      winner = std::move(path);
      winner_text = std::move(rendered);
    }
  }
  return {std::string(event), *winner, top, MappingMethod::KeywordMatch};
}

std::string TermScore::text() const { return join(term, " "); }

std::vector<TermScore> tfidf(std::span<const Document> corpus) {
  if (corpus.empty()) throw ValidationError("tf-idf needs at least one document");
  const double n_docs = static_cast<double>(corpus.size());

  std::map<std::string, std::size_t> df;
  std::map<std::string, std::size_t> total;
  std::vector<std::map<std::string, std::size_t>> tf(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& t : corpus[d]) ++tf[d][t];
    for (const auto& [t, count] : tf[d]) {
      ++df[t];
      total[t] += count;
    }
  }

  std::vector<TermScore> out;
  out.reserve(df.size());
  for (const auto& [term, dfreq] : df) {
    const double idf = std::log(n_docs / static_cast<double>(dfreq));
    double best = 0.0;
    for (const auto& doc : tf) {
      if (auto it = doc.find(term); it != doc.end()) {
        best = std::max(best, static_cast<double>(it->second) * idf);
      }
    }
    out.push_back({{term}, best, total[term]});
  }
  std::sort(out.begin(), out.end(), by_score_then_term);
  return out;
}

std::vector<TermScore> cvalue(std::span<const Document> corpus, std::size_t max_n) {
  if (max_n < 2) throw ValidationError("C-value needs max_n >= 2");
  using Gram = std::vector<std::string>;
  std::map<Gram, std::size_t> freq;
  for (const auto& doc : corpus) {
    for (std::size_t n = 2; n <= max_n; ++n) {
      for (std::size_t i = 0; i + n <= doc.size(); ++i) {
        ++freq[Gram(doc.begin() + static_cast<std::ptrdiff_t>(i),
                    doc.begin() + static_cast<std::ptrdiff_t>(i + n))];
      }
    }
  }

  // T(a): longer candidates that contain a as a contiguous run.
  std::map<Gram, std::set<Gram>> containers;
  for (const auto& [b, fb] : freq) {
    for (std::size_t n = 2; n < b.size(); ++n) {
      for (std::size_t i = 0; i + n <= b.size(); ++i) {
        Gram a(b.begin() + static_cast<std::ptrdiff_t>(i),
               b.begin() + static_cast<std::ptrdiff_t>(i + n));
        containers[std::move(a)].insert(b);
      }
    }
  }

  std::vector<TermScore> out;
  out.reserve(freq.size());
  for (const auto& [a, fa] : freq) {
    const double weight = std::log2(static_cast<double>(a.size()));
    double score = weight * static_cast<double>(fa);
    if (auto it = containers.find(a); it != containers.end() && !it->second.empty()) {
      double sum = 0.0;
      for (const auto& b : it->second) sum += static_cast<double>(freq.at(b));
      score = weight * (static_cast<double>(fa) - sum / static_cast<double>(it->second.size()));
    }
    out.push_back({a, score, fa});
  }
  std::sort(out.begin(), out.end(), by_score_then_term);
  return out;
}

}  // namespace aeroqa::ontology
