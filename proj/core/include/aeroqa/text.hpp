#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Shared preprocessing: tokenization, stopword removal and a light
// suffix-stripping lemmatizer. Ontology term extraction, BM25 indexing,
// the question pipeline and the fallback reader all go through here so
// their vocabularies agree.
namespace aeroqa::text {

// A word with its byte range in the source string. `text` keeps the
// original casing.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Words are maximal runs of ASCII alphanumerics or non-ASCII bytes.
std::vector<Token> split_words(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

// Lowercased words, nothing dropped.
std::vector<std::string> tokenize(std::string_view text);

// Expects a lowercased word.
bool is_stopword(std::string_view word);

// -ies/-s plural stripping, -ing/-ed stripping with undoubling, final -e.
std::string lemmatize(std::string_view word);

// tokenize + drop stopwords + lemmatize.
std::vector<std::string> content_tokens(std::string_view text);

// Jaccard overlap of the two token sets; 0 when both are empty.
double jaccard(const std::vector<std::string>& a,
               const std::vector<std::string>& b);

}  // namespace aeroqa::text
