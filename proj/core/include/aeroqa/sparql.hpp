#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aeroqa/triplestore.hpp"

// Parser and executor for the SPARQL subset the question pipeline emits:
//
//   PREFIX p: <iri> ...
//   ASK WHERE { bgp }
//   SELECT DISTINCT ?v WHERE { bgp }
//   SELECT (COUNT(DISTINCT ?v) AS ?c) WHERE { bgp }
//
// where bgp is one to four dot-separated triple patterns. Keywords are
// case-insensitive and WHERE is optional.
namespace aeroqa::sparql {

inline constexpr std::size_t kMaxPatterns = 4;

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<kg::Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class QueryKind { Ask, SelectDistinct, Count };

struct Query {
  QueryKind kind = QueryKind::Ask;
  std::string projection;               // SelectDistinct / Count variable
  std::string count_alias = "count";    // Count only
  std::vector<TriplePattern> patterns;  // IRIs fully expanded
  kg::PrefixMap prefixes;

  // Prefix maps are presentation; equality is on the query itself.
  friend bool operator==(const Query& a, const Query& b) {
    return a.kind == b.kind && a.projection == b.projection &&
           a.count_alias == b.count_alias && a.patterns == b.patterns;
  }
};

bool is_valid_variable_name(std::string_view name) noexcept;
bool has_variable(const TriplePattern& p) noexcept;
bool mentions(const TriplePattern& p, std::string_view var) noexcept;

// Throws ValidationError: empty or oversized pattern list, bad variable
// names, literal subjects/predicates, projection absent from the patterns.
void validate(const Query& q);

// Throws ParseError naming the offending token.
Query parse(std::string_view text);

// Canonical text with PREFIX lines for every prefix it uses. Reparses to
// an equal Query.
std::string to_string(const Query& q);
std::string to_string(const PatternTerm& t, const kg::PrefixMap& prefixes);

struct QueryResult {
  std::variant<bool, std::vector<kg::Term>, std::size_t> value;

  bool as_bool() const { return std::get<bool>(value); }
  const std::vector<kg::Term>& as_terms() const {
    return std::get<std::vector<kg::Term>>(value);
  }
  std::size_t as_count() const { return std::get<std::size_t>(value); }
};

// Conjunctive matching, patterns joined left to right over the graph's
// positional indexes. SelectDistinct keeps first-derivation order.
QueryResult execute(const kg::Graph& graph, const Query& q);

// Every solution mapping, in derivation order. Variables are keyed by
// name. The callback returns false to stop early.
using Solution = std::vector<std::pair<std::string, kg::Term>>;
void for_each_solution(const kg::Graph& graph,
                       const std::vector<TriplePattern>& patterns,
                       const std::function<bool(const Solution&)>& visit);

}  // namespace aeroqa::sparql
