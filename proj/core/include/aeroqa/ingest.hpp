#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aeroqa/triplestore.hpp"

namespace aeroqa::ingest {

struct Finding {
  std::string category;  // "Aircraft Issue"
  std::string cause;     // "Directional control"
  std::string reason;    // "Not attained", may be empty

  // "Category: Cause - Reason", or "Category: Cause" when reason is empty.
  std::string render() const;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct Section {
  std::string heading;
  std::vector<std::string> paragraphs;
};

struct ReportRecord {
  std::string accident_number;
  std::map<std::string, std::string> fields;  // header lines, incl. Accident Number
  std::vector<Finding> findings;
  std::vector<Section> narrative;
};

inline constexpr std::string_view kAccidentNumberKey = "Accident Number";

// Report layout:
//
//   Key: Value                         header lines
//   FINDINGS                           optional block of
//   Category: Cause - Reason           finding rows (first " - " splits)
//   == Heading ==                      narrative sections; paragraphs are
//   paragraph text ...                 separated by blank lines
//
// Throws ParseError with a line number; a missing Accident Number header is
// an error.
ReportRecord parse_report(std::string_view text);

struct Passage {
  std::string heading;
  std::string text;
  std::string report_id;

  friend bool operator==(const Passage&, const Passage&) = default;
};

// One passage per narrative paragraph, in document order.
std::vector<Passage> extract_passages(const ReportRecord& record);

enum class PassageFormat { Json, Jsonl };

std::string export_passages(std::span<const Passage> passages, PassageFormat format);

// Accepts either format (a leading '[' selects Json). Throws ParseError.
std::vector<Passage> import_passages(std::string_view content);

// Declarative extraction rule. `selector` is "field:<Key>", "finding" (rows
// rendered as "Category: Cause - Reason") or "narrative" (each paragraph).
// Templates substitute {group} from the regex's named groups and
// {accident}, then resolve by prefix:
//   inst:<label>  minted instance IRI (plus an avi:label triple)
//   class:<name>  rel:<name>  data:<name>   namespace IRIs
//   lit:<text>    literal (object only)
//   <iri>         verbatim IRI
// subject_class / object_class, when set, add avi:type triples.
class ExtractionPattern {
 public:
  struct Spec {
    std::string selector;
    std::string regex;
    std::string subject;
    std::string predicate;
    std::string object;
    std::string subject_class;
    std::string object_class;
  };

  // Throws ConfigError on a bad selector, a regex that does not compile, a
  // template naming an undefined group, or a malformed term prefix.
  explicit ExtractionPattern(Spec spec);
  ~ExtractionPattern();
  ExtractionPattern(const ExtractionPattern&);
  ExtractionPattern& operator=(const ExtractionPattern&);
  ExtractionPattern(ExtractionPattern&&) noexcept;
  ExtractionPattern& operator=(ExtractionPattern&&) noexcept;

  const Spec& spec() const noexcept { return spec_; }
  const std::vector<std::string>& groups() const noexcept { return groups_; }

  // Texts of `record` this pattern reads.
  std::vector<std::string> select(const ReportRecord& record) const;

  // Appends the triples produced by every match in `text`.
  void apply(std::string_view text, const std::string& accident_number,
             std::vector<kg::Triple>& out) const;

 private:
  struct Compiled;
  Spec spec_;
  std::vector<std::string> groups_;
  std::unique_ptr<Compiled> compiled_;
};

// JSON array of {selector, regex, subject, predicate, object
// [, subject_class, object_class]}.
std::vector<ExtractionPattern> parse_patterns(std::string_view json_text);
std::vector<ExtractionPattern> load_patterns(const std::filesystem::path& path);

// Patterns applied in order, matches in order.
std::vector<kg::Triple> extract_triples(const ReportRecord& record,
                                        std::span<const ExtractionPattern> patterns);

}  // namespace aeroqa::ingest
