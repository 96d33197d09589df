#include "hadv/kdao.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hadv/editdist.hpp"
#include "hadv/numeric.hpp"

namespace hadv {

namespace {

std::string ascii_lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::vector<std::string> lowered(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  out.reserve(keywords.size());
  for (const std::string& k : keywords) out.push_back(ascii_lower_copy(k));
  return out;
}

bool any_match(std::string_view lowered_text,
               const std::vector<std::string>& lowered_keywords) {
  return std::any_of(lowered_keywords.begin(), lowered_keywords.end(),
                     [&](const std::string& k) {
                       return contains(lowered_text, k);
                     });
}

// At least two distinct keyword strings each occurring somewhere.
bool pair_match(std::string_view lowered_text,
                const std::vector<std::string>& lowered_keywords) {
  std::size_t found = 0;
  for (const std::string& k : lowered_keywords) {
    if (contains(lowered_text, k) && ++found >= 2) return true;
  }
  return false;
}

// Transforms warn when the edit load relative to the source exceeds the
// usual working threshold; such outputs are no longer near their source.
constexpr double kDeltaWarnThreshold = 0.25;

void warn_if_far(const Sample& source, std::size_t edits,
                 std::size_t ref_len) {
  if (ref_len == 0) return;
  const double delta =
      static_cast<double>(edits) / static_cast<double>(ref_len);
  if (delta >= kDeltaWarnThreshold) {
    std::cerr << "warning: transform of '" << source.id << "' moved delta to "
              << delta << " (>= " << kDeltaWarnThreshold << ")\n";
  }
}

}  // namespace

void KdaoConfig::validate() const {
  if (trigger_keywords.empty() || entity_keywords.empty()) {
    throw SemanticError("keyword sets must be non-empty");
  }
  std::vector<std::string> all = lowered(trigger_keywords);
  const std::vector<std::string> entities = lowered(entity_keywords);
  all.insert(all.end(), entities.begin(), entities.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].empty()) {
      throw SemanticError("keywords must be non-empty");
    }
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i != j && contains(all[j], all[i])) {
        throw SemanticError("keyword '" + all[i] +
                            "' is a substring of keyword '" + all[j] + "'");
      }
    }
  }
  if (min_words > max_words) {
    throw SemanticError("min_words must not exceed max_words");
  }
}

std::string kdao_label(std::string_view text, const KdaoConfig& config) {
  const std::string low = ascii_lower_copy(text);
  const std::vector<std::string> triggers = lowered(config.trigger_keywords);
  const std::vector<std::string> entities = lowered(config.entity_keywords);
  bool positive;
  if (config.rule == KdaoRule::kPairOnEntities) {
    positive = any_match(low, triggers) && pair_match(low, entities);
  } else {
    positive = pair_match(low, triggers) && any_match(low, entities);
  }
  return positive ? kPositiveLabel : kNegativeLabel;
}

Sample make_adversarial_negative(const Sample& sample, Rng& rng,
                                 const KdaoConfig& config) {
  config.validate();
  if (kdao_label(sample.text, config) != kPositiveLabel) {
    throw SemanticError("sample '" + sample.id +
                        "' is not Positive; cannot make it adversarial");
  }
  std::vector<std::string> words = tokenize(sample.text).tokens;
  const std::vector<std::string> triggers = lowered(config.trigger_keywords);
  const std::vector<std::string> entities = lowered(config.entity_keywords);

  std::vector<std::string> pool;
  for (const std::string& w : words) {
    const std::string low = ascii_lower_copy(w);
    if (!any_match(low, triggers) && !any_match(low, entities)) {
      pool.push_back(w);
    }
  }
  if (pool.empty()) {
    throw SemanticError("sample '" + sample.id +
                        "' has no non-keyword words to substitute in");
  }

  // Fair coin: strip the trigger side or the entity side.
  const std::vector<std::string>& chosen =
      rng.below(2) == 0 ? triggers : entities;
  std::size_t replaced = 0;
  for (std::string& w : words) {
    if (any_match(ascii_lower_copy(w), chosen)) {
      w = pool[static_cast<std::size_t>(rng.below(pool.size()))];
      ++replaced;
    }
  }

  Sample out;
  out.id = sample.id + "@adv";
  out.text = join_words(words);
  out.label = kNegativeLabel;
  out.source_id = sample.id;
  out.transform = Transform::kAdversarial;
  if (kdao_label(out.text, config) != kNegativeLabel) {
    throw InternalError("adversarial transform of '" + sample.id +
                        "' failed to flip the label");
  }
  warn_if_far(sample, replaced, words.size());
  return out;
}

Sample make_adversarial_positive(const Sample& sample, Rng& rng,
                                 const KdaoConfig& config) {
  config.validate();
  if (kdao_label(sample.text, config) != kNegativeLabel) {
    throw SemanticError("sample '" + sample.id +
                        "' is not Negative; cannot make it adversarial");
  }
  std::vector<std::string> words = tokenize(sample.text).tokens;
  if (words.empty()) {
    throw SemanticError("sample '" + sample.id +
                        "' has no words to insert around");
  }
  const std::size_t source_len = words.size();

  const std::string trigger =
      config.trigger_keywords[rng.below(config.trigger_keywords.size())];
  const std::size_t first =
      static_cast<std::size_t>(rng.below(config.entity_keywords.size()));
  std::size_t second =
      static_cast<std::size_t>(rng.below(config.entity_keywords.size() - 1));
  if (second >= first) ++second;

  const auto insert_word = [&](const std::string& w) {
    const std::size_t pos =
        static_cast<std::size_t>(rng.below(words.size() + 1));
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), w);
  };
  insert_word(trigger);
  insert_word(config.entity_keywords[first]);
  insert_word(config.entity_keywords[second]);

  Sample out;
  out.id = sample.id + "@adv";
  out.text = join_words(words);
  out.label = kPositiveLabel;
  out.source_id = sample.id;
  out.transform = Transform::kAdversarial;
  if (kdao_label(out.text, config) != kPositiveLabel) {
    throw InternalError("adversarial transform of '" + sample.id +
                        "' failed to flip the label");
  }
  warn_if_far(sample, 3, source_len);
  return out;
}

Sample make_affable(const Sample& sample, Rng& rng,
                    const KdaoConfig& config) {
  std::vector<std::string> words = tokenize(sample.text).tokens;
  if (words.size() < 2) {
    throw SemanticError("sample '" + sample.id +
                        "' is too short for an affable copy");
  }
  const std::size_t source_len = words.size();
  const std::string source_label = kdao_label(sample.text, config);

  for (int step = 0; step < 3; ++step) {
    const std::string copy =
        words[static_cast<std::size_t>(rng.below(words.size()))];
    const std::size_t pos =
        static_cast<std::size_t>(rng.below(words.size() + 1));
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), copy);
  }

  Sample out;
  out.id = sample.id + "@aff";
  out.text = join_words(words);
  out.label = sample.label;
  out.source_id = sample.id;
  out.transform = Transform::kAffable;
  if (kdao_label(out.text, config) != source_label) {
    throw InternalError("affable transform of '" + sample.id +
                        "' changed the task label");
  }
  warn_if_far(sample, 3, source_len);
  return out;
}

std::vector<RawDoc> load_raw_corpus(const std::filesystem::path& path,
                                    RawFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<RawDoc> docs;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    if (format == RawFormat::kJsonl) {
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(row);
      } catch (const nlohmann::json::exception& e) {
        throw IoError("line " + std::to_string(line) + ": " + e.what());
      }
      if (!parsed.is_object() || !parsed.contains("id") ||
          !parsed["id"].is_string() || !parsed.contains("text") ||
          !parsed["text"].is_string()) {
        throw IoError("line " + std::to_string(line) +
                      ": expected {\"id\": string, \"text\": string}");
      }
      docs.push_back(RawDoc{parsed["id"].get<std::string>(),
                            parsed["text"].get<std::string>()});
    } else {
      char id[16];
      std::snprintf(id, sizeof(id), "doc-%06zu", docs.size() + 1);
      docs.push_back(RawDoc{id, row});
    }
  }
  return docs;
}

Dataset build_kdao_dataset(const std::vector<RawDoc>& corpus, std::size_t n,
                           double pos_rate, const KdaoConfig& config,
                           Rng& rng) {
  config.validate();
  if (pos_rate < 0.0 || pos_rate > 1.0) {
    throw SemanticError("positive rate must be in [0, 1]");
  }
  std::vector<const RawDoc*> positives;
  std::vector<const RawDoc*> negatives;
  for (const RawDoc& doc : corpus) {
    const std::size_t wc = tokenize(doc.text).size();
    if (wc < config.min_words || wc > config.max_words) continue;
    if (kdao_label(doc.text, config) == kPositiveLabel) {
      positives.push_back(&doc);
    } else {
      negatives.push_back(&doc);
    }
  }
  const std::size_t need_pos = static_cast<std::size_t>(
      round_half_to_even(static_cast<double>(n) * pos_rate));
  if (need_pos > n) {
    throw SemanticError("positive rate rounds above the dataset size");
  }
  const std::size_t need_neg = n - need_pos;
  if (positives.size() < need_pos || negatives.size() < need_neg) {
    throw InfeasibleError(
        "corpus too small after filtering: need " + std::to_string(need_pos) +
        " positives and " + std::to_string(need_neg) + " negatives, have " +
        std::to_string(positives.size()) + " and " +
        std::to_string(negatives.size()));
  }
  rng.shuffle(positives);
  rng.shuffle(negatives);

  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < need_pos; ++i) {
    samples.push_back(
        Sample{positives[i]->id, positives[i]->text, kPositiveLabel});
  }
  for (std::size_t i = 0; i < need_neg; ++i) {
    samples.push_back(
        Sample{negatives[i]->id, negatives[i]->text, kNegativeLabel});
  }
  rng.shuffle(samples);
  return Dataset::from_samples(std::move(samples), kPositiveLabel);
}

}  // namespace hadv
