#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aeroqa/sparql.hpp"
#include "aeroqa/triplestore.hpp"

namespace aeroqa::embed {
class Provider;
}

// Question -> SPARQL translation: classify, extract mentions, link them to
// KG terms, generate and validate candidate triples, rank, build the query.
namespace aeroqa::nl2sparql {

enum class QuestionType { List, Boolean, Count };

std::string_view to_string(QuestionType t) noexcept;

// Count phrases ("how many", "number of", "count of") win; then a leading
// auxiliary verb makes a Boolean; everything else is a List. Throws
// ValidationError on a blank question.
QuestionType classify_question(std::string_view question);

enum class MentionKind { EntityLike, RelationLike };

struct Mention {
  std::string surface;  // exact substring of the question
  std::size_t start = 0;  // token range [start, end) over text::split_words
  std::size_t end = 0;
  MentionKind kind = MentionKind::EntityLike;
  // Built from a run of capitalized or numeric tokens.
  bool compound = false;

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const Mention&, const Mention&) = default;
};

// Capitalized/numeric runs become single compound EntityLike mentions. The
// remaining non-stopword tokens form segments, and every 1..4-gram inside a
// segment is a candidate; n-grams containing a verb-like token are
// RelationLike. Throws NoMentionError if nothing survives.
std::vector<Mention> extract_mentions(std::string_view question);

enum class TermRole { Entity, Relation };

struct LinkCandidate {
  Mention mention;
  kg::Term term;
  std::string label;  // the surface form that matched
  double similarity = 0.0;
  TermRole role = TermRole::Entity;
};

struct LinkConfig {
  double threshold = 0.6;
  std::size_t top = 3;
};

// Labelled instances and the rel:/data: predicates of `graph`. Each
// predicate is reachable through every contiguous sub-phrase of its split
// local name holding a content word ("isOperatedBy" -> "operated by",
// "operated", ...).
struct Vocabulary {
  struct Entry {
    kg::Term term;
    std::string surface;
  };
  std::vector<Entry> entities;
  std::vector<Entry> relations;  // one entry per surface
};

Vocabulary build_vocabulary(const kg::Graph& graph);

// "isCausedByAircraftIssue" -> {"is", "caused", "by", "aircraft", "issue"}.
std::vector<std::string> split_identifier(std::string_view local);

// Compound mentions match entity labels, RelationLike mentions match
// relation surfaces, and plain noun n-grams match both. A term's similarity
// is its best surface cosine. Per mention, the `top` terms at or above the
// threshold survive, sorted by similarity desc then IRI. Everything is
// embedded in one batch.
std::vector<LinkCandidate> link(std::span<const Mention> mentions, const Vocabulary& vocab,
                                const embed::Provider& provider, const LinkConfig& config = {});

// Keeps a non-overlapping set of mentions, choosing greedily by best
// similarity, then length, then position; every candidate of a kept mention
// is returned.
std::vector<LinkCandidate> resolve_tiling(std::span<const LinkCandidate> candidates);

struct CandidateTriple {
  std::vector<sparql::TriplePattern> patterns;  // one, or a two-pattern conjunction on ?x
  std::string verbalization;
  bool valid = false;
  double rank_score = 0.0;

  bool has_variable() const;
};

// (e, r, ?x), (?x, r, e), (e1, r, e2) and the conjunctions
// {(?x, r1, e1), (?x, r2, e2)}, each probed with ASK. Only valid ones are
// returned, in generation order.
std::vector<CandidateTriple> generate_triples(std::span<const LinkCandidate> entities,
                                              std::span<const LinkCandidate> relations,
                                              const kg::Graph& graph);

// Labels (or local names) for terms, split relation names, "?x" for the
// variable; conjunctions joined by " and ".
std::string verbalize(std::span<const sparql::TriplePattern> patterns, const kg::Graph& graph);

// Jaccard of content tokens against the question; stable order by score
// desc, shorter verbalization, then verbalization text.
std::vector<CandidateTriple> rank_triples(std::vector<CandidateTriple> candidates,
                                          std::string_view question);

// The query for the first usable ranked triple (List and Count need a
// variable). nullopt means abstain.
std::optional<sparql::Query> build_query(QuestionType type, std::span<const CandidateTriple> ranked,
                                         const kg::PrefixMap& prefixes);
std::optional<std::string> construct_query(QuestionType type,
                                           std::span<const CandidateTriple> ranked,
                                           const kg::PrefixMap& prefixes);

struct KgqaConfig {
  LinkConfig link;
  // Result cap for List questions.
  std::size_t max_answers = 10;
};

struct TranslationResult {
  QuestionType qtype = QuestionType::List;
  std::string query_text;  // empty on abstention
  std::vector<CandidateTriple> triples_used;  // ranked, valid
  std::vector<std::string> answers;
};

// Runs the pipeline. List answers come from the ranked candidates in order
// (executor order within each), deduplicated; Count gives the count of the
// constructed query; Boolean gives "Yes" when a valid triple exists.
// Abstains with no answers when nothing links or no triple validates.
TranslationResult translate(std::string_view question, const kg::Graph& graph,
                            const Vocabulary& vocab, const embed::Provider& provider,
                            const KgqaConfig& config = {});

std::vector<std::string> kgqa_answer(std::string_view question, const kg::Graph& graph,
                                     const embed::Provider& provider,
                                     const KgqaConfig& config = {});

// Label triple text, or the IRI local name; literals verbatim.
std::string display(const kg::Term& term, const kg::Graph& graph);

}  // namespace aeroqa::nl2sparql
