#include "aeroqa/fusion.hpp"

#include <unordered_set>

#include "aeroqa/error.hpp"
#include "aeroqa/text.hpp"

namespace aeroqa::fusion {

std::string_view to_string(Source s) noexcept { return s == Source::Kg ? "KG" : "DL"; }

std::vector<std::string> SystemResponse::answers() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.text);
  return out;
}

std::vector<std::string> SystemResponse::passage_texts() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.passage_text());
  return out;
}

SystemResponse fuse(std::span<const std::string> kg, std::span<const reader::DlqaAnswer> dl,
                    const FusionPolicy& policy) {
  if (policy.per_module_quota > policy.total_slots) {
    throw ValidationError("per-module quota exceeds the number of slots");
  }
  SystemResponse out;
  std::unordered_set<std::string> seen;
  const auto admit = [&](const std::string& text) {
    return !policy.dedupe || seen.insert(text::to_lower(text::trim(text))).second;
  };

  std::size_t taken_kg = 0;
  for (const auto& a : kg) {
    if (taken_kg >= policy.per_module_quota) break;
    if (!admit(a)) continue;
    out.items.push_back({a, Source::Kg, std::nullopt, 1.0});
    ++taken_kg;
  }
  for (const auto& a : dl) {
    if (out.items.size() >= policy.total_slots) break;
    if (!admit(a.text)) continue;
    out.items.push_back({a.text, Source::Dl, a.passage, a.score});
  }
  return out;
}

}  // namespace aeroqa::fusion
