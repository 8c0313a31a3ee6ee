#include "aeroqa/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

namespace aeroqa::text {
namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a",       "about",    "above",  "after",   "again",  "against",
      "all",     "also",     "am",     "an",      "and",    "any",
      "are",     "as",       "at",     "be",      "because", "been",
      "before",  "being",    "below",  "between", "both",   "but",
      "by",      "can",      "could",  "describe", "did",   "do",
      "does",    "doing",    "down",   "during",  "each",   "either",
      "few",     "for",      "from",   "further", "give",   "had",
      "has",     "have",     "having", "he",      "her",    "here",
      "hers",    "him",      "his",    "how",     "i",      "if",
      "in",      "into",     "is",     "it",      "its",    "itself",
      "just",    "list",     "many",   "may",     "me",     "might",
      "more",    "most",     "much",   "must",    "my",     "no",
      "nor",     "not",      "of",     "off",     "on",     "once",
      "only",    "or",       "other",  "our",     "out",    "over",
      "own",     "please",   "same",   "shall",   "she",    "should",
      "show",    "so",       "some",   "such",    "tell",   "than",
      "that",    "the",      "their",  "them",    "then",   "there",
      "these",   "they",     "this",   "those",   "through", "to",
      "too",     "under",    "until",  "up",      "us",     "very",
      "was",     "we",       "were",   "what",    "when",   "where",
      "which",   "while",    "who",    "whom",    "whose",  "why",
      "will",    "with",     "would",  "you",     "your",
  };
  return words;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

std::vector<Token> split_words(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t begin = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > begin) out.push_back({std::string(text.substr(begin, i - begin)), begin, i});
  }
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string trim(std::string_view text) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : split_words(text)) out.push_back(to_lower(tok.text));
  return out;
}

bool is_stopword(std::string_view word) { return stopwords().contains(word); }

std::string lemmatize(std::string_view word) {
  std::string w(word);
  if (w.size() > 4 && ends_with(w, "ies")) {
    w.replace(w.size() - 3, 3, "y");
  } else if (ends_with(w, "sses")) {
    w.erase(w.size() - 2);
  } else if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") &&
             !ends_with(w, "us") && !ends_with(w, "is")) {
    w.pop_back();
  }

  bool stripped = false;
  if (w.size() >= 6 && ends_with(w, "ing")) {
    w.erase(w.size() - 3);
    stripped = true;
  } else if (w.size() >= 5 && ends_with(w, "ed")) {
    w.erase(w.size() - 2);
    stripped = true;
  }
  if (stripped && w.size() >= 2) {
    const char last = w.back();
    if (last == w[w.size() - 2] && !is_vowel(last) && last != 'l' &&
        last != 's' && last != 'z') {
      w.pop_back();
    }
  }
  if (w.size() > 3 && w.back() == 'e') w.pop_back();
  return w;
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& word : tokenize(text)) {
    if (is_stopword(word)) continue;
    out.push_back(lemmatize(word));
  }
  return out;
}

double jaccard(const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  return static_cast<double>(shared) /
         static_cast<double>(sa.size() + sb.size() - shared);
}

}  // namespace aeroqa::text
