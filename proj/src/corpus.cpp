#include "hadv/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

namespace hadv {
namespace {

// Unicode whitespace code points recognized by the tokenizer.
bool is_space_codepoint(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
    case 0x85: case 0xa0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

// Decodes one UTF-8 code point at `i`, advancing `i` past it. Malformed
// bytes are treated as single non-space characters.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xfffd;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xfffd;
  }
  for (int k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xc0) != 0x80) {
      ++i;
      return 0xfffd;
    }
    cp = (cp << 6) | (byte(i + k) & 0x3f);
  }
  i += len;
  return cp;
}

}  // namespace

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::kAdversarial:
      return "adversarial";
    case Transform::kAffable:
      return "affable";
    case Transform::kMarkerPair:
      return "marker-pair";
    case Transform::kNone:
      break;
  }
  return "none";
}

Transform transform_from_name(std::string_view name) {
  if (name == "adversarial") return Transform::kAdversarial;
  if (name == "affable") return Transform::kAffable;
  if (name == "marker-pair") return Transform::kMarkerPair;
  if (name == "none" || name.empty()) return Transform::kNone;
  throw SemanticError("unknown transform kind: '" + std::string(name) + "'");
}

WordSequence tokenize(std::string_view text) {
  WordSequence out;
  std::size_t i = 0;
  std::size_t word_start = 0;
  bool in_word = false;
  while (i < text.size()) {
    const std::size_t here = i;
    const char32_t cp = decode_utf8(text, i);
    if (is_space_codepoint(cp)) {
      if (in_word) {
        out.tokens.emplace_back(text.substr(word_start, here - word_start));
        in_word = false;
      }
    } else if (!in_word) {
      word_start = here;
      in_word = true;
    }
  }
  if (in_word) {
    out.tokens.emplace_back(text.substr(word_start));
  }
  return out;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

Dataset Dataset::from_samples(std::vector<Sample> samples,
                              std::string positive_label) {
  if (positive_label.empty()) {
    throw SemanticError("positive label must be non-empty");
  }
  Dataset d;
  std::unordered_set<std::string_view> seen;
  seen.reserve(samples.size());
  for (const Sample& s : samples) {
    if (s.id.empty()) {
      throw IoError("sample with empty id");
    }
    if (!seen.insert(s.id).second) {
      throw IoError("duplicate sample id '" + s.id + "'");
    }
    if (s.label.empty()) {
      throw IoError("sample '" + s.id + "' has an empty label");
    }
    if (s.transform != Transform::kNone && !s.source_id.has_value()) {
      throw IoError("sample '" + s.id +
                    "' is transformed but has no source_id");
    }
    d.labels_.insert(s.label);
  }
  d.labels_.insert(positive_label);
  d.positive_label_ = std::move(positive_label);
  d.samples_ = std::move(samples);
  return d;
}

namespace {

Sample sample_from_json(const nlohmann::ordered_json& row, std::size_t line) {
  const auto require_string = [&](const char* key) -> std::string {
    if (!row.contains(key) || !row[key].is_string()) {
      throw IoError("line " + std::to_string(line) +
                    ": missing or non-string '" + key + "'");
    }
    return row[key].get<std::string>();
  };
  Sample s;
  s.id = require_string("id");
  s.text = require_string("text");
  s.label = require_string("label");
  if (row.contains("source_id") && !row["source_id"].is_null()) {
    if (!row["source_id"].is_string()) {
      throw IoError("line " + std::to_string(line) + ": bad 'source_id'");
    }
    s.source_id = row["source_id"].get<std::string>();
  }
  if (row.contains("transform") && !row["transform"].is_null()) {
    if (!row["transform"].is_string()) {
      throw IoError("line " + std::to_string(line) + ": bad 'transform'");
    }
    try {
      s.transform = transform_from_name(row["transform"].get<std::string>());
    } catch (const SemanticError& e) {
      throw IoError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  for (const auto& [key, value] : row.items()) {
    if (key == "id" || key == "text" || key == "label" ||
        key == "source_id" || key == "transform") {
      continue;
    }
    s.extra[key] = value;
  }
  return s;
}

Sample sample_from_tsv(const std::string& row, std::size_t line) {
  const auto tab1 = row.find('\t');
  const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                              : row.find('\t', tab1 + 1);
  if (tab2 == std::string::npos) {
    throw IoError("line " + std::to_string(line) +
                  ": expected id<TAB>label<TAB>text");
  }
  Sample s;
  s.id = row.substr(0, tab1);
  s.label = row.substr(tab1 + 1, tab2 - tab1 - 1);
  s.text = row.substr(tab2 + 1);
  return s;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, Format format,
                     const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<Sample> samples;
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    if (format == Format::kJsonl) {
      nlohmann::ordered_json parsed;
      try {
        parsed = nlohmann::ordered_json::parse(row);
      } catch (const nlohmann::json::exception& e) {
        throw IoError("line " + std::to_string(line) + ": " + e.what());
      }
      if (!parsed.is_object()) {
        throw IoError("line " + std::to_string(line) + ": not a JSON object");
      }
      samples.push_back(sample_from_json(parsed, line));
    } else {
      samples.push_back(sample_from_tsv(row, line));
    }
  }
  if (!samples.empty() &&
      std::none_of(samples.begin(), samples.end(), [&](const Sample& s) {
        return s.label == positive_label;
      })) {
    std::cerr << "warning: positive label '" << positive_label
              << "' never occurs in '" << path.string() << "'\n";
  }
  return Dataset::from_samples(std::move(samples), positive_label);
}

void write_dataset(const Dataset& dataset,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  for (const Sample& s : dataset.samples()) {
    nlohmann::ordered_json row;
    row["id"] = s.id;
    row["text"] = s.text;
    row["label"] = s.label;
    if (s.source_id) {
      row["source_id"] = *s.source_id;
    } else {
      row["source_id"] = nullptr;
    }
    if (s.transform != Transform::kNone) {
      row["transform"] = std::string(transform_name(s.transform));
    } else {
      row["transform"] = nullptr;
    }
    for (const auto& [key, value] : s.extra.items()) {
      row[key] = value;
    }
    out << row.dump() << '\n';
  }
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  stats.size = dataset.size();
  for (const std::string& label : dataset.labels()) {
    stats.label_counts[label] = 0;
  }
  for (const Sample& s : dataset.samples()) {
    ++stats.label_counts[s.label];
  }
  if (stats.size > 0) {
    stats.positive_rate =
        static_cast<double>(stats.label_counts[dataset.positive_label()]) /
        static_cast<double>(stats.size);
  }
  return stats;
}

nlohmann::ordered_json stats_to_json(const DatasetStats& stats) {
  nlohmann::ordered_json j;
  j["size"] = stats.size;
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [label, count] : stats.label_counts) {
    j["labels"][label] = count;
  }
  if (stats.positive_rate) {
    j["positive_rate"] = *stats.positive_rate;
  } else {
    j["positive_rate"] = nullptr;
  }
  return j;
}

}  // namespace hadv
