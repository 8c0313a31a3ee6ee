#include "aeroqa/triplestore.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "aeroqa/error.hpp"

namespace aeroqa::kg {
namespace {

constexpr std::string_view kHex = "0123456789ABCDEF";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
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

// Cursor over one line of the persistence format.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  Triple parse() {
    Term s = parse_iri("subject");
    Term p = parse_iri("predicate");
    skip_ws();
    Term o = peek() == '"' ? parse_literal() : parse_iri("object");
    skip_ws();
    if (peek() != '.') fail("expected '.' after object");
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing content after '.'");
    return Triple{std::move(s), std::move(p), std::move(o)};
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_no_);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Term parse_iri(const char* what) {
    skip_ws();
    if (peek() != '<') fail(std::string("expected '<' starting ") + what);
    const auto close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail(std::string("unterminated IRI in ") + what);
    std::string value(s_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    if (!is_valid_iri(value)) fail("invalid IRI <" + value + ">");
    return Term::iri(std::move(value));
  }

  Term parse_literal() {
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        value += c;
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape in literal");
      switch (s_[pos_++]) {
        case '\\': value += '\\'; break;
        case '"': value += '"'; break;
        case 'n': value += '\n'; break;
        case 'r': value += '\r'; break;
        case 't': value += '\t'; break;
        default: fail("unknown escape in literal");
      }
    }
    return Term::literal(std::move(value));
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

const PrefixMap& default_prefixes() {
  static const PrefixMap prefixes = {
      {"avi", "avi:"},
      {"class", std::string(kClassNs)},
      {"data", std::string(kDataNs)},
      {"inst", std::string(kInstNs)},
      {"rel", std::string(kRelNs)},
  };
  return prefixes;
}

bool is_valid_iri(std::string_view iri) noexcept {
  if (iri.empty()) return false;
  for (unsigned char c : iri) {
    if (std::isspace(c) != 0 || c < 0x20) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}':
      case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

Term Term::iri(std::string value) {
  if (!is_valid_iri(value)) {
    throw ValidationError("invalid IRI '" + value + "'");
  }
  return Term(Kind::Iri, std::move(value));
}

Term Term::literal(std::string value) { return Term(Kind::Literal, std::move(value)); }

std::string to_ntriples(const Term& term) {
  if (term.is_iri()) return "<" + term.value() + ">";
  return "\"" + escape_literal(term.value()) + "\"";
}

void validate(const Triple& t) {
  if (!t.subject.is_iri()) {
    throw ValidationError("triple subject must be an IRI, got literal \"" +
                          t.subject.value() + "\"");
  }
  if (!t.predicate.is_iri()) {
    throw ValidationError("triple predicate must be an IRI, got literal \"" +
                          t.predicate.value() + "\"");
  }
}

std::string mint_local_name(std::string_view label) {
  std::string out;
  bool in_space = false;
  for (unsigned char c : label) {
    if (std::isspace(c) != 0) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += '_';
    in_space = false;
    if (std::isalnum(c) != 0 || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

Term mint_iri(std::string_view ns, std::string_view label) {
  const auto local = mint_local_name(label);
  if (local.empty()) throw ValidationError("cannot mint an IRI from an empty label");
  return Term::iri(std::string(ns) + local);
}

std::string local_name(std::string_view iri) {
  const auto cut = iri.find_last_of("/#:");
  const auto raw = cut == std::string_view::npos ? iri : iri.substr(cut + 1);
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '%' && i + 2 < raw.size()) {
      const int hi = hex_value(raw[i + 1]);
      const int lo = hex_value(raw[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += raw[i];
  }
  return out;
}

Graph::Graph() : prefixes_(default_prefixes()) {}

std::size_t Graph::KeyHash::operator()(const std::array<TermId, 3>& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto id : k) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Graph::TermId Graph::intern(const Term& t) {
  if (auto it = term_ids_.find(t); it != term_ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(t);
  term_ids_.emplace(t, id);
  return id;
}

bool Graph::insert(const Triple& t) {
  validate(t);
  std::array<TermId, 3> key{intern(t.subject), intern(t.predicate), intern(t.object)};
  if (!members_.insert(key).second) return false;
  const auto idx = static_cast<TripleIndex>(triples_.size());
  triples_.push_back(key);
  for (int pos = 0; pos < 3; ++pos) index_[pos][key[pos]].push_back(idx);
  return true;
}

bool Graph::contains(const Triple& t) const {
  const auto s = find(t.subject);
  const auto p = find(t.predicate);
  const auto o = find(t.object);
  if (!s || !p || !o) return false;
  return members_.contains({*s, *p, *o});
}

Triple Graph::triple(TripleIndex i) const {
  const auto& k = triples_[i];
  return Triple{terms_[k[0]], terms_[k[1]], terms_[k[2]]};
}

std::vector<Triple> Graph::triples() const {
  std::vector<Triple> out;
  out.reserve(triples_.size());
  for (TripleIndex i = 0; i < triples_.size(); ++i) out.push_back(triple(i));
  return out;
}

std::optional<Graph::TermId> Graph::find(const Term& t) const {
  if (auto it = term_ids_.find(t); it != term_ids_.end()) return it->second;
  return std::nullopt;
}

std::span<const Graph::TripleIndex> Graph::with(int position, TermId id) const {
  const auto& idx = index_[position];
  if (auto it = idx.find(id); it != idx.end()) return it->second;
  return {};
}

std::optional<std::string> Graph::label(const Term& subject) const {
  const auto s = find(subject);
  const auto p = find(Term::iri(std::string(kLabel)));
  if (!s || !p) return std::nullopt;
  for (auto i : with(0, *s)) {
    const auto& k = triples_[i];
    if (k[1] == *p && terms_[k[2]].is_literal()) return terms_[k[2]].value();
  }
  return std::nullopt;
}

void Graph::set_prefix(std::string prefix, std::string base) {
  if (!is_valid_iri(base)) throw ValidationError("invalid prefix base <" + base + ">");
  prefixes_[std::move(prefix)] = std::move(base);
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.size() != b.size()) return false;
  for (Graph::TripleIndex i = 0; i < a.size(); ++i) {
    if (!b.contains(a.triple(i))) return false;
  }
  return true;
}

Graph insert_triple(Graph graph, const Triple& t) {
  graph.insert(t);
  return graph;
}

Graph parse_ntlines(std::string_view text) {
  Graph g;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = 0;
    while (first < line.size() && (line[first] == ' ' || line[first] == '\t')) ++first;
    if (first < line.size() && line[first] != '#') {
      g.insert(LineParser(line, line_no).parse());
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return g;
}

std::string serialize(const Graph& graph) {
  std::vector<std::string> lines;
  lines.reserve(graph.size());
  for (Graph::TripleIndex i = 0; i < graph.size(); ++i) {
    const auto t = graph.triple(i);
    lines.push_back(to_ntriples(t.subject) + " " + to_ntriples(t.predicate) + " " +
                    to_ntriples(t.object) + " .");
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

KgStats stats(const Graph& graph, const NamespaceConfig& ns) {
  std::set<std::string_view> classes;
  std::set<std::string_view> individuals;
  std::set<std::string_view> object_props;
  std::set<std::string_view> data_props;
  const auto starts = [](std::string_view s, std::string_view p) {
    return s.size() > p.size() && s.substr(0, p.size()) == p;
  };
  for (Graph::TripleIndex i = 0; i < graph.size(); ++i) {
    const auto& ids = graph.ids(i);
    for (int pos = 0; pos < 3; ++pos) {
      const auto& t = graph.term(ids[pos]);
      if (!t.is_iri()) continue;
      const std::string_view v = t.value();
      if (starts(v, ns.class_ns)) classes.insert(v);
      if (starts(v, ns.inst_ns)) individuals.insert(v);
      if (pos == 1 && starts(v, ns.rel_ns)) object_props.insert(v);
      if (pos == 1 && starts(v, ns.data_ns)) data_props.insert(v);
    }
  }
  return KgStats{classes.size(), individuals.size(), object_props.size(),
                 data_props.size(), graph.size()};
}

}  // namespace aeroqa::kg
