#include "aeroqa/nl2sparql.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

#include "aeroqa/embeddings.hpp"
#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"

namespace aeroqa::nl2sparql {
namespace {

constexpr std::string_view kVar = "x";

bool contains_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_verb_like(const std::string& lower) {
  static const std::unordered_set<std::string> verbs = {
      "occur",   "occurs",  "involve", "involves",    "operate", "operates", "fly",
      "flies",   "flew",    "flown",   "crash",       "crashes", "cause",    "causes",
      "manufacture", "manufactures", "make", "makes", "made",  "build",    "built",
      "own",     "owns",    "happen",  "happens",     "land",    "lands",    "take",
      "took",    "taken",   "suffer",  "suffers",     "hold",    "holds",    "held",
      "sustain", "sustains", "note",   "notes",       "lose",    "lost",     "hit"};
  if (verbs.contains(lower)) return true;
  if (lower.size() > 4 && lower.ends_with("ed")) return true;
  return lower.size() > 5 && lower.ends_with("ing");
}

sparql::TriplePattern pattern(sparql::PatternTerm s, const kg::Term& p, sparql::PatternTerm o) {
  return {std::move(s), p, std::move(o)};
}

sparql::Variable var() { return sparql::Variable{std::string(kVar)}; }

bool ask(const kg::Graph& graph, const std::vector<sparql::TriplePattern>& patterns) {
  bool found = false;
  sparql::for_each_solution(graph, patterns, [&](const sparql::Solution&) {
    found = true;
    return false;
  });
  return found;
}

bool same_span(const Mention& a, const Mention& b) { return a.start == b.start && a.end == b.end; }

}  // namespace

std::string_view to_string(QuestionType t) noexcept {
  switch (t) {
    case QuestionType::List: return "List";
    case QuestionType::Boolean: return "Boolean";
    case QuestionType::Count: return "Count";
  }
  return "List";
}

QuestionType classify_question(std::string_view question) {
  const auto tokens = text::tokenize(question);
  if (tokens.empty()) throw ValidationError("question is empty");
  std::string joined;
  for (const auto& t : tokens) {
    joined += ' ';
    joined += t;
  }
  joined += ' ';
  for (const auto* phrase : {" how many ", " number of ", " count of "}) {
    if (joined.find(phrase) != std::string::npos) return QuestionType::Count;
  }
  static const std::set<std::string, std::less<>> aux = {
      "is", "are", "was", "were", "do", "does", "did", "can", "could", "has", "have", "had"};
  if (aux.contains(tokens.front())) return QuestionType::Boolean;
  return QuestionType::List;
}

std::vector<Mention> extract_mentions(std::string_view question) {
  const auto words = text::split_words(question);
  const auto n = words.size();
  std::vector<std::string> lower(n);
  std::vector<bool> stop(n);
  std::vector<bool> entity(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = text::to_lower(words[i].text);
    stop[i] = text::is_stopword(lower[i]);
    const bool capital = std::isupper(static_cast<unsigned char>(words[i].text.front())) != 0;
    entity[i] = !stop[i] && (capital || contains_digit(words[i].text));
  }

  const auto surface = [&](std::size_t a, std::size_t b) {
    return std::string(question.substr(words[a].begin, words[b - 1].end - words[a].begin));
  };

  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < n) {
    if (entity[i]) {
      auto j = i;
      while (j < n && entity[j]) ++j;
      out.push_back({surface(i, j), i, j, MentionKind::EntityLike, true});
      i = j;
      continue;
    }
    if (stop[i]) {
      ++i;
      continue;
    }
    auto j = i;
    while (j < n && !stop[j] && !entity[j]) ++j;
    for (std::size_t a = i; a < j; ++a) {
      for (std::size_t len = 1; len <= 4 && a + len <= j; ++len) {
        bool verb = false;
        for (std::size_t t = a; t < a + len; ++t) verb = verb || is_verb_like(lower[t]);
        out.push_back({surface(a, a + len), a, a + len,
                       verb ? MentionKind::RelationLike : MentionKind::EntityLike, false});
      }
    }
    i = j;
  }
  if (out.empty()) throw NoMentionError("no content words in question");
  std::stable_sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  return out;
}

std::vector<std::string> split_identifier(std::string_view local) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(text::to_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto c = static_cast<unsigned char>(local[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const auto prev = static_cast<unsigned char>(cur.back());
      const bool lower_to_upper = std::islower(prev) && std::isupper(c);
      const bool digit_edge = (std::isdigit(prev) != 0) != (std::isdigit(c) != 0);
      // "ABCDef" splits as "ABC" "Def".
      const bool acronym_end = std::isupper(prev) && std::isupper(c) && i + 1 < local.size() &&
                               std::islower(static_cast<unsigned char>(local[i + 1]));
      if (lower_to_upper || digit_edge || acronym_end) flush();
    }
    cur += static_cast<char>(c);
  }
  flush();
  return out;
}

Vocabulary build_vocabulary(const kg::Graph& graph) {
  Vocabulary vocab;
  std::set<kg::Term> seen_entities;
  std::set<kg::Term> seen_relations;
  const auto& label = kg::kLabel;
  for (const auto& t : graph.triples()) {
    const auto& pred = t.predicate.value();
    if (pred == label) {
      if (t.subject.value().starts_with(kg::kInstNs) && t.object.is_literal() &&
          seen_entities.insert(t.subject).second) {
        vocab.entities.push_back({t.subject, t.object.value()});
      }
      continue;
    }
    if (!pred.starts_with(kg::kRelNs) && !pred.starts_with(kg::kDataNs)) continue;
    if (!seen_relations.insert(t.predicate).second) continue;
    const auto words = split_identifier(kg::local_name(pred));
    std::set<std::string> surfaces;
    for (std::size_t a = 0; a < words.size(); ++a) {
      for (std::size_t b = a + 1; b <= words.size(); ++b) {
        bool content = false;
        std::string phrase;
        for (std::size_t k = a; k < b; ++k) {
          content = content || !text::is_stopword(words[k]);
          if (!phrase.empty()) phrase += ' ';
          phrase += words[k];
        }
        if (content && surfaces.insert(phrase).second) {
          vocab.relations.push_back({t.predicate, phrase});
        }
      }
    }
  }
  return vocab;
}

std::vector<LinkCandidate> link(std::span<const Mention> mentions, const Vocabulary& vocab,
                                const embed::Provider& provider, const LinkConfig& config) {
  if (mentions.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(mentions.size() + vocab.entities.size() + vocab.relations.size());
  for (const auto& m : mentions) texts.push_back(m.surface);
  for (const auto& e : vocab.entities) texts.push_back(e.surface);
  for (const auto& r : vocab.relations) texts.push_back(r.surface);
  const auto vectors = provider.embed(texts);
  const auto entity_base = mentions.size();
  const auto relation_base = entity_base + vocab.entities.size();

  std::vector<LinkCandidate> out;
  for (std::size_t mi = 0; mi < mentions.size(); ++mi) {
    const auto& m = mentions[mi];
    struct Best {
      double sim;
      std::string surface;
      TermRole role;
    };
    std::map<kg::Term, Best> best;
    const auto consider = [&](const std::vector<Vocabulary::Entry>& entries, std::size_t base,
                              TermRole role) {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const double sim = embed::cosine(vectors[mi], vectors[base + i]);
        auto [it, inserted] = best.try_emplace(entries[i].term, Best{sim, entries[i].surface, role});
        if (!inserted && sim > it->second.sim) it->second = {sim, entries[i].surface, role};
      }
    };
    const bool entities = m.kind == MentionKind::EntityLike;
    const bool relations = m.kind == MentionKind::RelationLike || !m.compound;
    if (entities) consider(vocab.entities, entity_base, TermRole::Entity);
    if (relations) consider(vocab.relations, relation_base, TermRole::Relation);

    std::vector<LinkCandidate> cands;
    for (auto& [term, b] : best) {
      if (b.sim >= config.threshold) cands.push_back({m, term, b.surface, b.sim, b.role});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const LinkCandidate& a, const LinkCandidate& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.term.value() < b.term.value();
    });
    if (cands.size() > config.top) cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(config.top), cands.end());
    out.insert(out.end(), cands.begin(), cands.end());
  }
  return out;
}

std::vector<LinkCandidate> resolve_tiling(std::span<const LinkCandidate> candidates) {
  struct Group {
    Mention mention;
    double best;
  };
  std::vector<Group> groups;
  for (const auto& c : candidates) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return same_span(g.mention, c.mention); });
    if (it == groups.end()) {
      groups.push_back({c.mention, c.similarity});
    } else {
      it->best = std::max(it->best, c.similarity);
    }
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (a.best != b.best) return a.best > b.best;
    if (a.mention.length() != b.mention.length()) return a.mention.length() > b.mention.length();
    return a.mention.start < b.mention.start;
  });
  std::vector<Mention> kept;
  for (const auto& g : groups) {
    const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Mention& k) {
      return g.mention.start < k.end && k.start < g.mention.end;
    });
    if (!overlaps) kept.push_back(g.mention);
  }
  std::vector<LinkCandidate> out;
  for (const auto& c : candidates) {
    if (std::any_of(kept.begin(), kept.end(), [&](const Mention& k) { return same_span(k, c.mention); })) {
      out.push_back(c);
    }
  }
  return out;
}

bool CandidateTriple::has_variable() const {
  return std::any_of(patterns.begin(), patterns.end(),
                     [](const sparql::TriplePattern& p) { return sparql::has_variable(p); });
}

std::string display(const kg::Term& term, const kg::Graph& graph) {
  if (term.is_literal()) return term.value();
  if (auto l = graph.label(term)) return *l;
  return kg::local_name(term.value());
}

std::string verbalize(std::span<const sparql::TriplePattern> patterns, const kg::Graph& graph) {
  const auto word = [&](const sparql::PatternTerm& t, bool predicate) -> std::string {
    if (const auto* v = std::get_if<sparql::Variable>(&t)) return "?" + v->name;
    const auto& term = std::get<kg::Term>(t);
    if (!predicate) return display(term, graph);
    std::string out;
    for (const auto& w : split_identifier(kg::local_name(term.value()))) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  };
  std::string out;
  for (const auto& p : patterns) {
    if (!out.empty()) out += " and ";
    out += word(p.subject, false) + " " + word(p.predicate, true) + " " + word(p.object, false);
  }
  return out;
}

std::vector<CandidateTriple> generate_triples(std::span<const LinkCandidate> entities,
                                              std::span<const LinkCandidate> relations,
                                              const kg::Graph& graph) {
  // Distinct terms, first occurrence wins.
  const auto distinct = [](std::span<const LinkCandidate> in) {
    std::vector<const LinkCandidate*> out;
    for (const auto& c : in) {
      if (std::none_of(out.begin(), out.end(), [&](const LinkCandidate* o) { return o->term == c.term; })) {
        out.push_back(&c);
      }
    }
    return out;
  };
  const auto es = distinct(entities);
  const auto rs = distinct(relations);

  std::vector<CandidateTriple> out;
  std::vector<std::vector<sparql::TriplePattern>> seen;
  const auto probe = [&](std::vector<sparql::TriplePattern> patterns) {
    if (std::find(seen.begin(), seen.end(), patterns) != seen.end()) return;
    seen.push_back(patterns);
    if (!ask(graph, patterns)) return;
    CandidateTriple c;
    c.verbalization = verbalize(patterns, graph);
    c.patterns = std::move(patterns);
    c.valid = true;
    out.push_back(std::move(c));
  };

  for (const auto* e : es) {
    for (const auto* r : rs) {
      probe({pattern(e->term, r->term, var())});
      probe({pattern(var(), r->term, e->term)});
    }
  }
  for (const auto* e1 : es) {
    for (const auto* e2 : es) {
      if (e1->term == e2->term || same_span(e1->mention, e2->mention)) continue;
      for (const auto* r : rs) probe({pattern(e1->term, r->term, e2->term)});
    }
  }
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      if (same_span(es[i]->mention, es[j]->mention)) continue;
      for (const auto* r1 : rs) {
        for (const auto* r2 : rs) {
          probe({pattern(var(), r1->term, es[i]->term), pattern(var(), r2->term, es[j]->term)});
        }
      }
    }
  }
  return out;
}

std::vector<CandidateTriple> rank_triples(std::vector<CandidateTriple> candidates,
                                          std::string_view question) {
  const auto q = text::content_tokens(question);
  for (auto& c : candidates) c.rank_score = text::jaccard(q, text::content_tokens(c.verbalization));
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateTriple& a, const CandidateTriple& b) {
                     if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
                     if (a.verbalization.size() != b.verbalization.size()) {
                       return a.verbalization.size() < b.verbalization.size();
                     }
                     return a.verbalization < b.verbalization;
                   });
  return candidates;
}

std::optional<sparql::Query> build_query(QuestionType type, std::span<const CandidateTriple> ranked,
                                         const kg::PrefixMap& prefixes) {
  for (const auto& c : ranked) {
    if (type != QuestionType::Boolean && !c.has_variable()) continue;
    sparql::Query q;
    q.patterns = c.patterns;
    q.prefixes = prefixes;
    switch (type) {
      case QuestionType::Boolean: q.kind = sparql::QueryKind::Ask; break;
      case QuestionType::List:
        q.kind = sparql::QueryKind::SelectDistinct;
        q.projection = std::string(kVar);
        break;
      case QuestionType::Count:
        q.kind = sparql::QueryKind::Count;
        q.projection = std::string(kVar);
        break;
    }
    sparql::validate(q);
    return q;
  }
  return std::nullopt;
}

std::optional<std::string> construct_query(QuestionType type,
                                           std::span<const CandidateTriple> ranked,
                                           const kg::PrefixMap& prefixes) {
  auto q = build_query(type, ranked, prefixes);
  if (!q) return std::nullopt;
  return sparql::to_string(*q);
}

TranslationResult translate(std::string_view question, const kg::Graph& graph,
                            const Vocabulary& vocab, const embed::Provider& provider,
                            const KgqaConfig& config) {
  TranslationResult result;
  result.qtype = classify_question(question);

  std::vector<Mention> mentions;
  try {
    mentions = extract_mentions(question);
  } catch (const NoMentionError&) {
    return result;
  }
  const auto linked = resolve_tiling(link(mentions, vocab, provider, config.link));
  std::vector<LinkCandidate> entities;
  std::vector<LinkCandidate> relations;
  for (const auto& c : linked) (c.role == TermRole::Entity ? entities : relations).push_back(c);

  result.triples_used = rank_triples(generate_triples(entities, relations, graph), question);
  const auto query = build_query(result.qtype, result.triples_used, graph.prefixes());
  if (!query) return result;
  result.query_text = sparql::to_string(*query);

  const auto answer = sparql::execute(graph, *query);
  switch (result.qtype) {
    case QuestionType::Boolean:
      if (answer.as_bool()) result.answers.push_back("Yes");
      break;
    case QuestionType::Count:
      result.answers.push_back(std::to_string(answer.as_count()));
      break;
    case QuestionType::List: {
      std::unordered_set<std::string> seen;
      for (const auto& c : result.triples_used) {
        if (!c.has_variable()) continue;
        sparql::Query q = *query;
        q.patterns = c.patterns;
        const auto rows = sparql::execute(graph, q);
        for (const auto& term : rows.as_terms()) {
          if (result.answers.size() >= config.max_answers) break;
          auto text = display(term, graph);
          if (seen.insert(text).second) result.answers.push_back(std::move(text));
        }
        if (result.answers.size() >= config.max_answers) break;
      }
      break;
    }
  }
  return result;
}

std::vector<std::string> kgqa_answer(std::string_view question, const kg::Graph& graph,
                                     const embed::Provider& provider, const KgqaConfig& config) {
  return translate(question, graph, build_vocabulary(graph), provider, config).answers;
}

}  // namespace aeroqa::nl2sparql
