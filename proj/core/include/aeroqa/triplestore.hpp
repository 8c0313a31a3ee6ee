#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace aeroqa::kg {

// Namespace convention shared by ingestion, statistics and the question
// pipeline. IRIs are stored as absolute strings in an `avi:` scheme.
inline constexpr std::string_view kClassNs = "avi:class/";
inline constexpr std::string_view kInstNs = "avi:inst/";
inline constexpr std::string_view kRelNs = "avi:rel/";
inline constexpr std::string_view kDataNs = "avi:data/";
inline constexpr std::string_view kLabel = "avi:label";
inline constexpr std::string_view kType = "avi:type";
inline constexpr std::string_view kSubClassOf = "avi:subClassOf";

using PrefixMap = std::map<std::string, std::string, std::less<>>;

// `inst:`, `rel:`, `class:`, `data:` and `avi:` bound to the namespaces above.
const PrefixMap& default_prefixes();

// An RDF node: either an IRI or a plain literal.
class Term {
 public:
  enum class Kind : std::uint8_t { Iri, Literal };

  // Throws ValidationError for an empty IRI or one containing whitespace
  // or any of <>"{}|^`\.
  static Term iri(std::string value);
  static Term literal(std::string value);

  Kind kind() const noexcept { return kind_; }
  bool is_iri() const noexcept { return kind_ == Kind::Iri; }
  bool is_literal() const noexcept { return kind_ == Kind::Literal; }
  const std::string& value() const noexcept { return value_; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(Kind kind, std::string value) : kind_(kind), value_(std::move(value)) {}

  Kind kind_ = Kind::Iri;
  std::string value_;
};

bool is_valid_iri(std::string_view iri) noexcept;

// `<iri>` or `"escaped literal"`.
std::string to_ntriples(const Term& term);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.value()) ^
           (t.is_literal() ? 0x9e3779b97f4a7c15ULL : 0ULL);
  }
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

// Subject and predicate must be IRIs.
void validate(const Triple& t);

// Whitespace runs become `_`; bytes outside [A-Za-z0-9_-] are %XX encoded.
std::string mint_local_name(std::string_view label);
Term mint_iri(std::string_view ns, std::string_view label);

// Text after the last '/', '#' or ':' of an IRI, percent-decoded.
std::string local_name(std::string_view iri);

// Set of triples with positional indexes. Iteration order is insertion
// order, which makes query results deterministic for a given load order.
class Graph {
 public:
  using TermId = std::uint32_t;
  using TripleIndex = std::uint32_t;

  Graph();

  // Returns false when the triple was already present.
  bool insert(const Triple& t);
  bool contains(const Triple& t) const;

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  Triple triple(TripleIndex i) const;
  std::vector<Triple> triples() const;

  // Term interning. `find` returns nullopt for terms absent from the graph.
  std::optional<TermId> find(const Term& t) const;
  const Term& term(TermId id) const { return terms_[id]; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  // Id triple (s, p, o) for position-level matching.
  const std::array<TermId, 3>& ids(TripleIndex i) const { return triples_[i]; }

  // Triples whose given position (0 = s, 1 = p, 2 = o) equals `id`,
  // in insertion order.
  std::span<const TripleIndex> with(int position, TermId id) const;

  // The avi:label literal attached to `subject`, if any.
  std::optional<std::string> label(const Term& subject) const;

  const PrefixMap& prefixes() const noexcept { return prefixes_; }
  void set_prefix(std::string prefix, std::string base);

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  struct KeyHash {
    std::size_t operator()(const std::array<TermId, 3>& k) const noexcept;
  };

  TermId intern(const Term& t);

  std::vector<Term> terms_;
  std::unordered_map<Term, TermId, TermHash> term_ids_;
  std::vector<std::array<TermId, 3>> triples_;
  std::unordered_set<std::array<TermId, 3>, KeyHash> members_;
  std::array<std::unordered_map<TermId, std::vector<TripleIndex>>, 3> index_;
  PrefixMap prefixes_;
};

// Value-semantic insertion.
Graph insert_triple(Graph graph, const Triple& t);

// Line format: `<iri> <iri> (<iri>|"literal") .`, `#` comments, blank lines.
Graph parse_ntlines(std::string_view text);

// Sorted, one triple per line, each terminated by " .\n".
std::string serialize(const Graph& graph);

struct NamespaceConfig {
  std::string class_ns{kClassNs};
  std::string inst_ns{kInstNs};
  std::string rel_ns{kRelNs};
  std::string data_ns{kDataNs};
};

// Counts shaped like an ontology editor's summary panel.
struct KgStats {
  std::size_t entity_classes = 0;
  std::size_t individuals = 0;
  std::size_t object_properties = 0;
  std::size_t data_properties = 0;
  std::size_t axioms = 0;

  friend bool operator==(const KgStats&, const KgStats&) = default;
};

// Classes and individuals are distinct IRIs in their namespace appearing in
// any position; properties are distinct predicates; axioms = triple count.
KgStats stats(const Graph& graph, const NamespaceConfig& ns = {});

}  // namespace aeroqa::kg
