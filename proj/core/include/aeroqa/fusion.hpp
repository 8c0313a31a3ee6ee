#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aeroqa/ingest.hpp"
#include "aeroqa/reader.hpp"

namespace aeroqa::fusion {

enum class Source { Kg, Dl };

std::string_view to_string(Source s) noexcept;

struct ResponseItem {
  std::string text;
  Source source = Source::Kg;
  std::optional<ingest::Passage> passage;  // Dl only
  double score = 0.0;

  // KG answers stand in as their own passage.
  const std::string& passage_text() const { return passage ? passage->text : text; }
};

struct SystemResponse {
  std::vector<ResponseItem> items;

  bool empty() const noexcept { return items.empty(); }
  std::vector<std::string> answers() const;
  std::vector<std::string> passage_texts() const;
};

struct FusionPolicy {
  std::size_t total_slots = 10;
  std::size_t per_module_quota = 5;
  bool dedupe = true;
};

// Up to per_module_quota KG answers, then DL answers until total_slots are
// filled, so a KG shortfall is absorbed by DL. With dedupe on, an answer
// equal to an earlier one after trimming and lowercasing is skipped and the
// next one is tried. Throws ValidationError if the quota exceeds the slots.
SystemResponse fuse(std::span<const std::string> kg, std::span<const reader::DlqaAnswer> dl,
                    const FusionPolicy& policy = {});

}  // namespace aeroqa::fusion
