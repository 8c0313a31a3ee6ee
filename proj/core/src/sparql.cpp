#include "aeroqa/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "aeroqa/error.hpp"

namespace aeroqa::sparql {
namespace {

enum class Tok { Word, Var, Iri, Literal, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_local_char(char c) { return is_name_char(c) || c == '-' || c == '%'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto fail = [&](const std::string& msg) -> void {
    throw ParseError(msg + " at offset " + std::to_string(i));
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == '.' || c == '*' ||
        c == ',' || c == ';') {
      out.push_back({Tok::Punct, std::string(1, c), start});
      ++i;
    } else if (c == '<') {
      const auto close = s.find('>', i + 1);
      if (close == std::string_view::npos) fail("unterminated IRI");
      out.push_back({Tok::Iri, std::string(s.substr(i + 1, close - i - 1)), start});
      i = close + 1;
    } else if (c == '?' || c == '$') {
      ++i;
      while (i < s.size() && is_name_char(s[i])) ++i;
      out.push_back({Tok::Var, std::string(s.substr(start + 1, i - start - 1)), start});
    } else if (c == '"') {
      ++i;
      std::string value;
      while (true) {
        if (i >= s.size()) fail("unterminated literal");
        const char d = s[i++];
        if (d == '"') break;
        if (d != '\\') {
          value += d;
          continue;
        }
        if (i >= s.size()) fail("dangling escape");
        switch (s[i++]) {
          case '\\': value += '\\'; break;
          case '"': value += '"'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 't': value += '\t'; break;
          default: fail("unknown escape in literal");
        }
      }
      out.push_back({Tok::Literal, std::move(value), start});
    } else if (is_name_char(c) || c == ':') {
      while (i < s.size() && is_name_char(s[i])) ++i;
      if (i < s.size() && s[i] == ':') {
        ++i;
        while (i < s.size() && is_local_char(s[i])) ++i;
      }
      out.push_back({Tok::Word, std::string(s.substr(start, i - start)), start});
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Var: return "'?" + t.text + "'";
    case Tok::Iri: return "'<" + t.text + ">'";
    case Tok::Literal: return "literal \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Query run() {
    Query q;
    q.prefixes.clear();
    while (is_keyword("PREFIX")) {
      ++pos_;
      const auto& name = cur();
      if (name.kind != Tok::Word || name.text.empty() || name.text.back() != ':') {
        fail("expected prefix name ending in ':'", name);
      }
      const auto prefix = name.text.substr(0, name.text.size() - 1);
      ++pos_;
      if (cur().kind != Tok::Iri) fail("expected IRI after PREFIX " + name.text, cur());
      if (!kg::is_valid_iri(cur().text)) fail("invalid prefix IRI", cur());
      q.prefixes[prefix] = cur().text;
      ++pos_;
    }
    prefixes_ = &q.prefixes;

    if (is_keyword("ASK")) {
      ++pos_;
      q.kind = QueryKind::Ask;
    } else if (is_keyword("SELECT")) {
      ++pos_;
      if (is_keyword("DISTINCT")) {
        ++pos_;
        q.kind = QueryKind::SelectDistinct;
        q.projection = expect_var();
      } else if (is_punct("(")) {
        ++pos_;
        expect_keyword("COUNT");
        expect_punct("(");
        expect_keyword("DISTINCT");
        q.kind = QueryKind::Count;
        q.projection = expect_var();
        expect_punct(")");
        expect_keyword("AS");
        q.count_alias = expect_var();
        expect_punct(")");
      } else {
        fail("unsupported SELECT form (expected DISTINCT or (COUNT(DISTINCT ?v) AS ?c))",
             cur());
      }
    } else {
      fail("expected ASK or SELECT", cur());
    }

    if (is_keyword("WHERE")) ++pos_;
    expect_punct("{");
    while (true) {
      if (is_punct("}")) {
        if (q.patterns.empty()) fail("empty graph pattern", cur());
        break;
      }
      if (q.patterns.size() == kMaxPatterns) {
        fail("more than " + std::to_string(kMaxPatterns) + " triple patterns", cur());
      }
      q.patterns.push_back(parse_pattern());
      if (is_punct(".")) {
        ++pos_;
        continue;
      }
      if (!is_punct("}")) fail("expected '.' or '}' after triple pattern", cur());
    }
    ++pos_;
    if (cur().kind != Tok::End) fail("unsupported clause after graph pattern", cur());

    try {
      validate(q);
    } catch (const ValidationError& e) {
      throw ParseError(e.what());
    }
    return q;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg + ", found " + describe(at) + " at offset " +
                     std::to_string(at.offset));
  }

  bool is_keyword(std::string_view kw) const {
    return cur().kind == Tok::Word && upper(cur().text) == kw;
  }
  bool is_punct(std::string_view p) const {
    return cur().kind == Tok::Punct && cur().text == p;
  }
  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail("expected " + std::string(kw), cur());
    ++pos_;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'", cur());
    ++pos_;
  }
  std::string expect_var() {
    if (cur().kind != Tok::Var) fail("expected variable", cur());
    if (!is_valid_variable_name(cur().text)) fail("invalid variable name", cur());
    return toks_[pos_++].text;
  }

  PatternTerm parse_node(int position) {
    const auto& t = cur();
    switch (t.kind) {
      case Tok::Var:
        if (!is_valid_variable_name(t.text)) fail("invalid variable name", t);
        ++pos_;
        return Variable{t.text};
      case Tok::Iri:
        if (!kg::is_valid_iri(t.text)) fail("invalid IRI", t);
        ++pos_;
        return kg::Term::iri(t.text);
      case Tok::Literal:
        if (position != 2) fail("literal allowed only in object position", t);
        ++pos_;
        return kg::Term::literal(t.text);
      case Tok::Word: {
        const auto colon = t.text.find(':');
        if (colon == std::string::npos) fail("triple pattern needs 3 terms", t);
        const auto prefix = t.text.substr(0, colon);
        const auto it = prefixes_->find(prefix);
        if (it == prefixes_->end()) fail("unknown prefix '" + prefix + ":'", t);
        ++pos_;
        return kg::Term::iri(it->second + t.text.substr(colon + 1));
      }
      default:
        fail("triple pattern needs 3 terms", t);
    }
  }

  TriplePattern parse_pattern() {
    TriplePattern p{parse_node(0), parse_node(1), parse_node(2)};
    return p;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const kg::PrefixMap* prefixes_ = nullptr;
};

struct Slot {
  bool is_var = false;
  std::uint32_t value = 0;  // variable slot or TermId
};

// Patterns lowered to term ids and variable slots. `satisfiable` is false
// when a constant term does not occur in the graph at all.
struct Compiled {
  std::vector<std::array<Slot, 3>> patterns;
  std::vector<std::string> var_names;
  bool satisfiable = true;
};

Compiled compile(const kg::Graph& g, const std::vector<TriplePattern>& patterns) {
  Compiled c;
  std::unordered_map<std::string, std::uint32_t> slots;
  for (const auto& p : patterns) {
    std::array<Slot, 3> row{};
    const PatternTerm* parts[3] = {&p.subject, &p.predicate, &p.object};
    for (int pos = 0; pos < 3; ++pos) {
      if (const auto* v = std::get_if<Variable>(parts[pos])) {
        auto [it, inserted] = slots.emplace(v->name, static_cast<std::uint32_t>(c.var_names.size()));
        if (inserted) c.var_names.push_back(v->name);
        row[pos] = {true, it->second};
      } else {
        const auto id = g.find(std::get<kg::Term>(*parts[pos]));
        if (!id) c.satisfiable = false;
        row[pos] = {false, id.value_or(0)};
      }
    }
    c.patterns.push_back(row);
  }
  return c;
}

class Matcher {
 public:
  using Visit = std::function<bool(const std::vector<std::optional<kg::Graph::TermId>>&)>;

  Matcher(const kg::Graph& g, const Compiled& c, Visit visit)
      : g_(g), c_(c), visit_(std::move(visit)), bind_(c.var_names.size()) {}

  void run() {
    if (c_.satisfiable) step(0);
  }

 private:
  // Returns false once the visitor asked to stop.
  bool step(std::size_t pi) {
    if (pi == c_.patterns.size()) return visit_(bind_);
    const auto& row = c_.patterns[pi];

    std::optional<std::span<const kg::Graph::TripleIndex>> best;
    for (int pos = 0; pos < 3; ++pos) {
      const auto id = resolved(row[pos]);
      if (!id) continue;
      auto list = g_.with(pos, *id);
      if (!best || list.size() < best->size()) best = list;
    }

    if (best) {
      for (auto ti : *best) {
        if (!try_triple(pi, row, ti)) return false;
      }
    } else {
      for (kg::Graph::TripleIndex ti = 0; ti < g_.size(); ++ti) {
        if (!try_triple(pi, row, ti)) return false;
      }
    }
    return true;
  }

  std::optional<kg::Graph::TermId> resolved(const Slot& s) const {
    if (!s.is_var) return s.value;
    return bind_[s.value];
  }

  bool try_triple(std::size_t pi, const std::array<Slot, 3>& row,
                  kg::Graph::TripleIndex ti) {
    const auto& ids = g_.ids(ti);
    std::array<bool, 3> newly{};
    bool ok = true;
    for (int pos = 0; pos < 3 && ok; ++pos) {
      const auto& s = row[pos];
      if (!s.is_var) {
        ok = s.value == ids[pos];
      } else if (bind_[s.value]) {
        ok = *bind_[s.value] == ids[pos];
      } else {
        bind_[s.value] = ids[pos];
        newly[pos] = true;
      }
    }
    bool keep_going = true;
    if (ok) keep_going = step(pi + 1);
    for (int pos = 0; pos < 3; ++pos) {
      if (newly[pos]) bind_[row[pos].value].reset();
    }
    return keep_going;
  }

  const kg::Graph& g_;
  const Compiled& c_;
  Visit visit_;
  std::vector<std::optional<kg::Graph::TermId>> bind_;
};

bool compactable_local(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_local_char);
}

// Longest matching prefix base whose remainder is a legal local name.
std::optional<std::pair<std::string, std::string>> compact(
    const std::string& iri, const kg::PrefixMap& prefixes) {
  std::optional<std::pair<std::string, std::string>> best;
  std::size_t best_len = 0;
  for (const auto& [name, base] : prefixes) {
    if (iri.size() <= base.size() || iri.compare(0, base.size(), base) != 0) continue;
    const auto local = iri.substr(base.size());
    if (!compactable_local(local)) continue;
    if (!best || base.size() > best_len) {
      best = std::make_pair(name, local);
      best_len = base.size();
    }
  }
  return best;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

bool is_valid_variable_name(std::string_view name) noexcept {
  return !name.empty() && std::all_of(name.begin(), name.end(), is_name_char);
}

bool has_variable(const TriplePattern& p) noexcept {
  return std::holds_alternative<Variable>(p.subject) ||
         std::holds_alternative<Variable>(p.predicate) ||
         std::holds_alternative<Variable>(p.object);
}

bool mentions(const TriplePattern& p, std::string_view var) noexcept {
  for (const auto* part : {&p.subject, &p.predicate, &p.object}) {
    if (const auto* v = std::get_if<Variable>(part); v && v->name == var) return true;
  }
  return false;
}

void validate(const Query& q) {
  if (q.patterns.empty()) throw ValidationError("query has no triple patterns");
  if (q.patterns.size() > kMaxPatterns) {
    throw ValidationError("query has " + std::to_string(q.patterns.size()) +
                          " patterns, limit is " + std::to_string(kMaxPatterns));
  }
  for (const auto& p : q.patterns) {
    for (const auto* part : {&p.subject, &p.predicate, &p.object}) {
      if (const auto* v = std::get_if<Variable>(part); v && !is_valid_variable_name(v->name)) {
        throw ValidationError("invalid variable name '?" + v->name + "'");
      }
    }
    if (const auto* t = std::get_if<kg::Term>(&p.subject); t && !t->is_iri()) {
      throw ValidationError("literal in subject position");
    }
    if (const auto* t = std::get_if<kg::Term>(&p.predicate); t && !t->is_iri()) {
      throw ValidationError("literal in predicate position");
    }
  }
  if (q.kind != QueryKind::Ask) {
    if (!is_valid_variable_name(q.projection)) {
      throw ValidationError("invalid projection variable '?" + q.projection + "'");
    }
    const bool used = std::any_of(q.patterns.begin(), q.patterns.end(),
                                  [&](const auto& p) { return mentions(p, q.projection); });
    if (!used) {
      throw ValidationError("projection variable ?" + q.projection +
                            " does not occur in the graph pattern");
    }
  }
}

Query parse(std::string_view text) { return Parser(text).run(); }

std::string to_string(const PatternTerm& t, const kg::PrefixMap& prefixes) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
  const auto& term = std::get<kg::Term>(t);
  if (term.is_literal()) return "\"" + escape_literal(term.value()) + "\"";
  if (auto c = compact(term.value(), prefixes)) return c->first + ":" + c->second;
  return "<" + term.value() + ">";
}

std::string to_string(const Query& q) {
  std::set<std::string> used;
  for (const auto& p : q.patterns) {
    for (const auto* part : {&p.subject, &p.predicate, &p.object}) {
      const auto* t = std::get_if<kg::Term>(part);
      if (!t || !t->is_iri()) continue;
      if (auto c = compact(t->value(), q.prefixes)) used.insert(c->first);
    }
  }
  std::string out;
  for (const auto& name : used) {
    out += "PREFIX " + name + ": <" + q.prefixes.at(name) + ">\n";
  }
  switch (q.kind) {
    case QueryKind::Ask: out += "ASK"; break;
    case QueryKind::SelectDistinct: out += "SELECT DISTINCT ?" + q.projection; break;
    case QueryKind::Count:
      out += "SELECT (COUNT(DISTINCT ?" + q.projection + ") AS ?" + q.count_alias + ")";
      break;
  }
  out += " WHERE { ";
  for (std::size_t i = 0; i < q.patterns.size(); ++i) {
    const auto& p = q.patterns[i];
    if (i > 0) out += " . ";
    out += to_string(p.subject, q.prefixes) + " " + to_string(p.predicate, q.prefixes) +
           " " + to_string(p.object, q.prefixes);
  }
  out += " }";
  return out;
}

QueryResult execute(const kg::Graph& graph, const Query& q) {
  validate(q);
  const auto compiled = compile(graph, q.patterns);

  if (q.kind == QueryKind::Ask) {
    bool found = false;
    Matcher(graph, compiled, [&](const auto&) {
      found = true;
      return false;
    }).run();
    return {found};
  }

  const auto slot_it = std::find(compiled.var_names.begin(), compiled.var_names.end(), q.projection);
  const auto slot = static_cast<std::size_t>(slot_it - compiled.var_names.begin());
  std::vector<kg::Graph::TermId> order;
  std::unordered_set<kg::Graph::TermId> seen;
  Matcher(graph, compiled, [&](const auto& bind) {
    const auto id = *bind[slot];
    if (seen.insert(id).second) order.push_back(id);
    return true;
  }).run();

  if (q.kind == QueryKind::Count) return {order.size()};
  std::vector<kg::Term> terms;
  terms.reserve(order.size());
  for (auto id : order) terms.push_back(graph.term(id));
  return {std::move(terms)};
}

void for_each_solution(const kg::Graph& graph,
                       const std::vector<TriplePattern>& patterns,
                       const std::function<bool(const Solution&)>& visit) {
  const auto compiled = compile(graph, patterns);
  Matcher(graph, compiled, [&](const auto& bind) {
    Solution sol;
    for (std::size_t i = 0; i < bind.size(); ++i) {
      sol.emplace_back(compiled.var_names[i], graph.term(*bind[i]));
    }
    return visit(sol);
  }).run();
}

}  // namespace aeroqa::sparql
