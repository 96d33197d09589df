#include "hadv/relgen.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hadv/kdao.hpp"  // canonical P/N label strings

namespace hadv {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Whole-token occurrences: the match may touch punctuation but not letters,
// digits, or bytes of a longer word.
std::vector<std::size_t> occurrences(const std::string& text,
                                     const std::string& entity) {
  std::vector<std::size_t> spans;
  std::size_t from = 0;
  while (true) {
    const std::size_t at = text.find(entity, from);
    if (at == std::string::npos) break;
    const bool left_ok = at == 0 || !is_word_char(text[at - 1]);
    const std::size_t end = at + entity.size();
    const bool right_ok = end >= text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok) spans.push_back(at);
    from = at + 1;
  }
  return spans;
}

}  // namespace

bool AnnotatedText::is_positive(const EntityPair& pair) const {
  return std::find(positive_pairs.begin(), positive_pairs.end(), pair) !=
         positive_pairs.end();
}

void AnnotatedText::validate() const {
  if (id.empty()) throw IoError("annotated text with empty id");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].empty()) {
      throw IoError("record '" + id + "': empty entity name");
    }
    for (std::size_t j = 0; j < entities.size(); ++j) {
      if (i == j) continue;
      if (entities[i] == entities[j]) {
        throw IoError("record '" + id + "': duplicate entity '" +
                      entities[i] + "'");
      }
      if (entities[j].find(entities[i]) != std::string::npos) {
        throw IoError("record '" + id + "': entity '" + entities[i] +
                      "' overlaps entity '" + entities[j] + "'");
      }
    }
  }
  // Every entity must occur, and occurrences of different entities must not
  // overlap in the text (possible with multi-word entity names).
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const std::string& e : entities) {
    const auto occ = occurrences(text, e);
    if (occ.empty()) {
      throw IoError("record '" + id + "': entity '" + e +
                    "' not found in text");
    }
    for (const std::size_t at : occ) spans.emplace_back(at, at + e.size());
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw IoError("record '" + id + "': entity occurrences overlap");
    }
  }
  for (const EntityPair& p : positive_pairs) {
    if (p.a == p.b) {
      throw IoError("record '" + id + "': positive pair repeats '" + p.a +
                    "'");
    }
    for (const std::string& name : {p.a, p.b}) {
      if (std::find(entities.begin(), entities.end(), name) ==
          entities.end()) {
        throw IoError("record '" + id + "': positive pair names unknown '" +
                      name + "'");
      }
    }
  }
}

std::string insert_markers(const AnnotatedText& annotated,
                           const std::string& a, const std::string& b) {
  if (a == b) {
    throw SemanticError("record '" + annotated.id +
                        "': marker pair needs two distinct entities");
  }
  for (const std::string& name : {a, b}) {
    if (std::find(annotated.entities.begin(), annotated.entities.end(),
                  name) == annotated.entities.end()) {
      throw SemanticError("record '" + annotated.id + "': unknown entity '" +
                          name + "'");
    }
  }
  const auto occ_a = occurrences(annotated.text, a);
  const auto occ_b = occurrences(annotated.text, b);
  if (occ_a.empty() || occ_b.empty()) {
    throw SemanticError("record '" + annotated.id +
                        "': entity not found in text");
  }
  // The earlier first mention becomes MARKER-A.
  const bool a_first = occ_a.front() <= occ_b.front();
  struct Patch {
    std::size_t at;
    std::size_t len;
    const char* marker;
  };
  std::vector<Patch> patches;
  for (const std::size_t at : occ_a) {
    patches.push_back(Patch{at, a.size(), a_first ? "MARKER-A" : "MARKER-B"});
  }
  for (const std::size_t at : occ_b) {
    patches.push_back(Patch{at, b.size(), a_first ? "MARKER-B" : "MARKER-A"});
  }
  std::sort(patches.begin(), patches.end(),
            [](const Patch& x, const Patch& y) { return x.at < y.at; });
  std::string out;
  out.reserve(annotated.text.size());
  std::size_t from = 0;
  for (const Patch& p : patches) {
    out += annotated.text.substr(from, p.at - from);
    out += p.marker;
    from = p.at + p.len;
  }
  out += annotated.text.substr(from);
  return out;
}

std::vector<Sample> enumerate_pair_samples(const AnnotatedText& annotated) {
  annotated.validate();
  std::vector<Sample> out;
  if (annotated.entities.size() < 2) {
    std::cerr << "warning: record '" << annotated.id
              << "' has fewer than two entities; nothing to enumerate\n";
    return out;
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < annotated.entities.size(); ++i) {
    for (std::size_t j = i + 1; j < annotated.entities.size(); ++j) {
      const EntityPair pair =
          EntityPair::make(annotated.entities[i], annotated.entities[j]);
      Sample s;
      s.id = annotated.id + "#p" + std::to_string(index++);
      s.text = insert_markers(annotated, annotated.entities[i],
                              annotated.entities[j]);
      s.label = annotated.is_positive(pair) ? kPositiveLabel : kNegativeLabel;
      s.source_id = annotated.id;
      s.transform = Transform::kMarkerPair;
      out.push_back(std::move(s));
    }
  }
  return out;
}

Sample shuffle_marker_adversarial(const AnnotatedText& annotated,
                                  const EntityPair& positive_pair, Rng& rng) {
  annotated.validate();
  if (!annotated.is_positive(positive_pair)) {
    throw SemanticError("record '" + annotated.id + "': pair (" +
                        positive_pair.a + ", " + positive_pair.b +
                        ") is not a positive pair");
  }
  if (annotated.entities.size() < 3) {
    throw SemanticError("record '" + annotated.id +
                        "': no entity outside the positive pair to shuffle "
                        "a marker onto");
  }
  // Candidate pairs: every non-relation pair. Each shares at most one
  // entity with the positive pair by construction.
  std::vector<std::pair<std::size_t, EntityPair>> candidates;
  std::size_t index = 0;
  for (std::size_t i = 0; i < annotated.entities.size(); ++i) {
    for (std::size_t j = i + 1; j < annotated.entities.size(); ++j) {
      const EntityPair pair =
          EntityPair::make(annotated.entities[i], annotated.entities[j]);
      if (!annotated.is_positive(pair)) {
        candidates.emplace_back(index, pair);
      }
      ++index;
    }
  }
  if (candidates.empty()) {
    throw SemanticError("record '" + annotated.id +
                        "': every entity pair carries the relation; no "
                        "adversarial pair available");
  }
  const auto& [pair_index, pair] =
      candidates[static_cast<std::size_t>(rng.below(candidates.size()))];

  Sample s;
  s.id = annotated.id + "#adv" + std::to_string(pair_index);
  s.text = insert_markers(annotated, pair.a, pair.b);
  s.label = kNegativeLabel;
  s.source_id = annotated.id;
  s.transform = Transform::kAdversarial;
  return s;
}

std::vector<AnnotatedText> load_annotated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<AnnotatedText> out;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(row);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("line " + std::to_string(line) + ": " + e.what());
    }
    AnnotatedText rec;
    try {
      rec.id = parsed.at("id").get<std::string>();
      rec.text = parsed.at("text").get<std::string>();
      for (const auto& e : parsed.at("entities")) {
        rec.entities.push_back(e.get<std::string>());
      }
      if (parsed.contains("positive_pairs")) {
        for (const auto& p : parsed["positive_pairs"]) {
          if (!p.is_array() || p.size() != 2) {
            throw IoError("positive_pairs entries must be two-element arrays");
          }
          rec.positive_pairs.push_back(EntityPair::make(
              p[0].get<std::string>(), p[1].get<std::string>()));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError("line " + std::to_string(line) + ": " + e.what());
    }
    try {
      rec.validate();
    } catch (const IoError& e) {
      throw IoError("line " + std::to_string(line) + ": " + e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace hadv
