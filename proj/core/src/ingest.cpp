#include "aeroqa/ingest.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/regex.hpp>

#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"
#include "json.hpp"

namespace aeroqa::ingest {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_heading(std::string_view line, std::string& heading) {
  const auto t = text::trim(line);
  if (t.size() < 4 || t.compare(0, 2, "==") != 0 || t.compare(t.size() - 2, 2, "==") != 0) {
    return false;
  }
  heading = text::trim(std::string_view(t).substr(2, t.size() - 4));
  return !heading.empty();
}

// `{name}` placeholders in a template.
std::vector<std::string> placeholders(const std::string& tmpl) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = tmpl.find('{', i)) != std::string::npos) {
    const auto close = tmpl.find('}', i);
    if (close == std::string::npos) throw ConfigError("unterminated '{' in template '" + tmpl + "'");
    out.push_back(tmpl.substr(i + 1, close - i - 1));
    i = close + 1;
  }
  return out;
}

std::vector<std::string> named_groups(const std::string& re) {
  static const boost::regex group_re(R"(\(\?<([A-Za-z_][A-Za-z0-9_]*)>)");
  std::vector<std::string> out;
  for (boost::sregex_iterator it(re.begin(), re.end(), group_re), end; it != end; ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

void check_term_template(const std::string& tmpl, const char* role, bool allow_literal,
                         bool allow_inst) {
  if (tmpl.empty()) throw ConfigError(std::string(role) + " template is empty");
  const bool ok = starts_with(tmpl, "class:") || starts_with(tmpl, "rel:") ||
                  starts_with(tmpl, "data:") || starts_with(tmpl, "avi:") ||
                  (starts_with(tmpl, "<") && tmpl.back() == '>') ||
                  (allow_inst && starts_with(tmpl, "inst:")) ||
                  (allow_literal && starts_with(tmpl, "lit:"));
  if (!ok) {
    throw ConfigError(std::string(role) + " template '" + tmpl + "' has no valid term prefix");
  }
}

}  // namespace

std::string Finding::render() const {
  return reason.empty() ? category + ": " + cause : category + ": " + cause + " - " + reason;
}

ReportRecord parse_report(std::string_view text) {
  enum class State { Header, Findings, Narrative };
  ReportRecord rec;
  State state = State::Header;
  std::string paragraph;

  const auto flush = [&] {
    if (!paragraph.empty()) rec.narrative.back().paragraphs.push_back(std::move(paragraph));
    paragraph.clear();
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto line = text::trim(raw);

    std::string heading;
    if (is_heading(line, heading)) {
      if (state == State::Narrative) flush();
      state = State::Narrative;
      rec.narrative.push_back({heading, {}});
      continue;
    }

    switch (state) {
      case State::Header: {
        if (line.empty()) break;
        if (line == "FINDINGS") {
          state = State::Findings;
          break;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("expected 'Key: Value' header", line_no);
        auto key = text::trim(std::string_view(line).substr(0, colon));
        auto value = text::trim(std::string_view(line).substr(colon + 1));
        if (key.empty()) throw ParseError("empty header key", line_no);
        if (!rec.fields.emplace(key, value).second) {
          throw ParseError("duplicate header '" + key + "'", line_no);
        }
        break;
      }
      case State::Findings: {
        if (line.empty()) break;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
          throw ParseError("expected 'Category: Cause - Reason' finding", line_no);
        }
        Finding f;
        f.category = text::trim(std::string_view(line).substr(0, colon));
        const auto rest = std::string_view(line).substr(colon + 1);
        const auto dash = rest.find(" - ");
        if (dash == std::string_view::npos) {
          f.cause = text::trim(rest);
        } else {
          f.cause = text::trim(rest.substr(0, dash));
          f.reason = text::trim(rest.substr(dash + 3));
        }
        if (f.category.empty() || f.cause.empty()) {
          throw ParseError("finding needs a category and a cause", line_no);
        }
        rec.findings.push_back(std::move(f));
        break;
      }
      case State::Narrative: {
        if (line.empty()) {
          flush();
        } else {
          if (!paragraph.empty()) paragraph += ' ';
          paragraph += line;
        }
        break;
      }
    }
  }
  if (state == State::Narrative) flush();

  const auto it = rec.fields.find(std::string(kAccidentNumberKey));
  if (it == rec.fields.end() || it->second.empty()) {
    throw ParseError("report has no 'Accident Number' header");
  }
  rec.accident_number = it->second;
  return rec;
}

std::vector<Passage> extract_passages(const ReportRecord& record) {
  std::vector<Passage> out;
  for (const auto& section : record.narrative) {
    for (const auto& p : section.paragraphs) {
      out.push_back({section.heading, p, record.accident_number});
    }
  }
  return out;
}

std::string export_passages(std::span<const Passage> passages, PassageFormat format) {
  const auto to_obj = [](const Passage& p) {
    ordered_json o;
    o["heading"] = p.heading;
    o["text"] = p.text;
    o["report_id"] = p.report_id;
    return o;
  };
  if (format == PassageFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : passages) arr.push_back(to_obj(p));
    return arr.dump(2);
  }
  std::string out;
  for (const auto& p : passages) {
    out += to_obj(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<Passage> import_passages(std::string_view content) {
  const auto from_obj = [](const ordered_json& o) {
    return Passage{o.at("heading").get<std::string>(), o.at("text").get<std::string>(),
                   o.at("report_id").get<std::string>()};
  };
  std::vector<Passage> out;
  std::size_t first = 0;
  while (first < content.size() && std::isspace(static_cast<unsigned char>(content[first]))) ++first;
  try {
    if (first < content.size() && content[first] == '[') {
      for (const auto& o : ordered_json::parse(content)) out.push_back(from_obj(o));
      return out;
    }
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
      auto end = content.find('\n', start);
      if (end == std::string_view::npos) end = content.size();
      const auto line = text::trim(content.substr(start, end - start));
      start = end + 1;
      ++line_no;
      if (line.empty()) continue;
      try {
        out.push_back(from_obj(ordered_json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad passage object: ") + e.what(), line_no);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad passages file: ") + e.what());
  }
  return out;
}

struct ExtractionPattern::Compiled {
  boost::regex re;
};

ExtractionPattern::ExtractionPattern(Spec spec) : spec_(std::move(spec)) {
  const auto& sel = spec_.selector;
  if (sel != "finding" && sel != "narrative" && !(starts_with(sel, "field:") && sel.size() > 6)) {
    throw ConfigError("unknown selector '" + sel + "'");
  }
  compiled_ = std::make_unique<Compiled>();
  try {
    compiled_->re = boost::regex(spec_.regex, boost::regex::perl);
  } catch (const boost::regex_error& e) {
    throw ConfigError("regex '" + spec_.regex + "' does not compile: " + e.what());
  }
  groups_ = named_groups(spec_.regex);

  check_term_template(spec_.subject, "subject", false, true);
  check_term_template(spec_.predicate, "predicate", false, false);
  check_term_template(spec_.object, "object", true, true);

  const std::set<std::string> known(groups_.begin(), groups_.end());
  for (const auto* tmpl : {&spec_.subject, &spec_.predicate, &spec_.object}) {
    for (const auto& name : placeholders(*tmpl)) {
      if (name != "accident" && !known.contains(name)) {
        throw ConfigError("template '" + *tmpl + "' references undefined group '" + name + "'");
      }
    }
  }
}

ExtractionPattern::~ExtractionPattern() = default;
ExtractionPattern::ExtractionPattern(ExtractionPattern&&) noexcept = default;
ExtractionPattern& ExtractionPattern::operator=(ExtractionPattern&&) noexcept = default;

ExtractionPattern::ExtractionPattern(const ExtractionPattern& other)
    : spec_(other.spec_),
      groups_(other.groups_),
      compiled_(std::make_unique<Compiled>(*other.compiled_)) {}

ExtractionPattern& ExtractionPattern::operator=(const ExtractionPattern& other) {
  if (this != &other) *this = ExtractionPattern(other);
  return *this;
}

std::vector<std::string> ExtractionPattern::select(const ReportRecord& record) const {
  std::vector<std::string> out;
  if (spec_.selector == "finding") {
    for (const auto& f : record.findings) out.push_back(f.render());
  } else if (spec_.selector == "narrative") {
    for (const auto& s : record.narrative) {
      out.insert(out.end(), s.paragraphs.begin(), s.paragraphs.end());
    }
  } else {
    const auto key = spec_.selector.substr(6);
    if (auto it = record.fields.find(key); it != record.fields.end()) out.push_back(it->second);
  }
  return out;
}

void ExtractionPattern::apply(std::string_view input, const std::string& accident_number,
                              std::vector<kg::Triple>& out) const {
  const std::string s(input);
  for (boost::sregex_iterator it(s.begin(), s.end(), compiled_->re), end; it != end; ++it) {
    const auto& m = *it;
    bool usable = true;
    const auto fill = [&](const std::string& tmpl) {
      std::string result;
      std::size_t i = 0;
      while (i < tmpl.size()) {
        if (tmpl[i] != '{') {
          result += tmpl[i++];
          continue;
        }
        const auto close = tmpl.find('}', i);
        const auto name = tmpl.substr(i + 1, close - i - 1);
        std::string value =
            name == "accident" ? accident_number : text::trim(m[name].matched ? m[name].str() : "");
        if (value.empty()) usable = false;
        result += value;
        i = close + 1;
      }
      return result;
    };

    const auto subject = fill(spec_.subject);
    const auto predicate = fill(spec_.predicate);
    const auto object = fill(spec_.object);
    if (!usable) continue;

    std::vector<kg::Triple> extra;
    const auto resolve = [&](const std::string& t) -> kg::Term {
      if (starts_with(t, "inst:")) {
        const auto label = text::trim(std::string_view(t).substr(5));
        auto iri = kg::mint_iri(kg::kInstNs, label);
        extra.push_back({iri, kg::Term::iri(std::string(kg::kLabel)), kg::Term::literal(label)});
        return iri;
      }
      if (starts_with(t, "class:")) return kg::mint_iri(kg::kClassNs, t.substr(6));
      if (starts_with(t, "rel:")) return kg::mint_iri(kg::kRelNs, t.substr(4));
      if (starts_with(t, "data:")) return kg::mint_iri(kg::kDataNs, t.substr(5));
      if (starts_with(t, "lit:")) return kg::Term::literal(t.substr(4));
      if (starts_with(t, "<")) return kg::Term::iri(t.substr(1, t.size() - 2));
      return kg::Term::iri(t);  // avi:...
    };

    kg::Triple triple{resolve(subject), resolve(predicate), resolve(object)};
    const kg::Term type = kg::Term::iri(std::string(kg::kType));
    if (!spec_.subject_class.empty()) {
      extra.push_back({triple.subject, type, kg::mint_iri(kg::kClassNs, spec_.subject_class)});
    }
    if (!spec_.object_class.empty() && triple.object.is_iri()) {
      extra.push_back({triple.object, type, kg::mint_iri(kg::kClassNs, spec_.object_class)});
    }
    out.push_back(std::move(triple));
    out.insert(out.end(), extra.begin(), extra.end());
  }
}

std::vector<ExtractionPattern> parse_patterns(std::string_view json_text) {
  std::vector<ExtractionPattern> out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pattern file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("pattern file must be a JSON array");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& o = doc[i];
    try {
      ExtractionPattern::Spec spec{
          o.at("selector").get<std::string>(), o.at("regex").get<std::string>(),
          o.at("subject").get<std::string>(),  o.at("predicate").get<std::string>(),
          o.at("object").get<std::string>(),   o.value("subject_class", std::string{}),
          o.value("object_class", std::string{})};
      out.emplace_back(std::move(spec));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("pattern " + std::to_string(i) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("pattern " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ExtractionPattern> load_patterns(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open pattern file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_patterns(buf.str());
}

std::vector<kg::Triple> extract_triples(const ReportRecord& record,
                                        std::span<const ExtractionPattern> patterns) {
  std::vector<kg::Triple> out;
  for (const auto& p : patterns) {
    for (const auto& part : p.select(record)) p.apply(part, record.accident_number, out);
  }
  return out;
}

}  // namespace aeroqa::ingest
