#include "govkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "govkit/error.hpp"

namespace govkit::repro {

namespace {

bool is_white_space(std::uint32_t c) {
  return (c >= 0x09 && c <= 0x0d) || c == 0x20 || c == 0x85 || c == 0xa0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200a) || c == 0x2028 || c == 0x2029 || c == 0x202f || c == 0x205f ||
         c == 0x3000;
}

// Length in bytes of the well-formed sequence starting at s[i], or 0.
std::size_t sequence_length(std::string_view s, std::size_t i, std::uint32_t& cp) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    cp = c;
    return 1;
  }
  std::size_t extra;
  if ((c & 0xe0) == 0xc0) {
    extra = 1;
    cp = c & 0x1f;
  } else if ((c & 0xf0) == 0xe0) {
    extra = 2;
    cp = c & 0x0f;
  } else if ((c & 0xf8) == 0xf0) {
    extra = 3;
    cp = c & 0x07;
  } else {
    return 0;
  }
  if (i + extra >= s.size()) return 0;
  for (std::size_t k = 1; k <= extra; ++k) {
    const auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xc0) != 0x80) return 0;
    cp = (cp << 6) | (cc & 0x3f);
  }
  if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
      cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
    return 0;
  }
  return extra + 1;
}

template <typename Key>
double cosine(const std::map<Key, double>& a, const std::map<Key, double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace

std::vector<std::uint32_t> decode_scalars(std::string_view text) {
  std::vector<std::uint32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::uint32_t cp = 0;
    if (auto len = sequence_length(text, i, cp)) {
      out.push_back(cp);
      i += len;
    } else {
      out.push_back(0x110000u + static_cast<unsigned char>(text[i]));
      ++i;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    std::uint32_t cp = 0;
    auto len = sequence_length(text, i, cp);
    if (len == 0) {
      current.push_back(text[i]);
      ++i;
      continue;
    }
    if (is_white_space(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(i, len));
    }
    i += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

double char_match(std::string_view a, std::string_view b) {
  const auto sa = decode_scalars(a);
  const auto sb = decode_scalars(b);
  const auto longest = std::max(sa.size(), sb.size());
  if (longest == 0) return 1.0;
  const auto shortest = std::min(sa.size(), sb.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < shortest; ++i) matches += sa[i] == sb[i];
  return static_cast<double>(matches) / static_cast<double>(longest);
}

double jaccard(std::string_view a, std::string_view b) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  const std::set<std::string> wa(ta.begin(), ta.end());
  const std::set<std::string> wb(tb.begin(), tb.end());
  if (wa.empty() && wb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& w : wa) common += wb.contains(w);
  return static_cast<double>(common) / static_cast<double>(wa.size() + wb.size() - common);
}

double tfidf_cosine(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  std::map<std::string, double> tfa, tfb;
  for (auto& t : tokenize(a)) tfa[std::move(t)] += 1;
  for (auto& t : tokenize(b)) tfb[std::move(t)] += 1;
  auto idf = [&](const std::string& term) {
    const double df = static_cast<double>(tfa.contains(term)) + static_cast<double>(tfb.contains(term));
    return std::log(3.0 / (1.0 + df)) + 1.0;
  };
  for (auto& [t, v] : tfa) v *= idf(t);
  for (auto& [t, v] : tfb) v *= idf(t);
  return cosine(tfa, tfb);
}

double ngram_cosine(std::string_view a, std::string_view b, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::domain_error, "n-gram size must be positive");
  if (a == b) return 1.0;
  auto grams = [n](std::string_view text) {
    std::map<std::vector<std::uint32_t>, double> out;
    const auto s = decode_scalars(text);
    if (s.empty()) return out;
    if (s.size() < n) {
      out[s] += 1;
      return out;
    }
    for (std::size_t i = 0; i + n <= s.size(); ++i) out[{s.begin() + i, s.begin() + i + n}] += 1;
    return out;
  };
  return cosine(grams(a), grams(b));
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::char_match: return "char_match";
    case Metric::jaccard: return "jaccard";
    case Metric::tfidf_cosine: return "tfidf_cosine";
    case Metric::ngram_cosine: return "ngram_cosine";
  }
  return "unknown";
}

Metric metric_from_string(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

double Thresholds::get(Metric metric) const {
  switch (metric) {
    case Metric::char_match: return char_match;
    case Metric::jaccard: return jaccard;
    case Metric::tfidf_cosine: return tfidf_cosine;
    case Metric::ngram_cosine: return ngram_cosine;
  }
  return 0;
}

void Thresholds::set(Metric metric, double value) {
  switch (metric) {
    case Metric::char_match: char_match = value; break;
    case Metric::jaccard: jaccard = value; break;
    case Metric::tfidf_cosine: tfidf_cosine = value; break;
    case Metric::ngram_cosine: ngram_cosine = value; break;
  }
}

double ScoreVector::get(Metric metric) const {
  switch (metric) {
    case Metric::char_match: return char_match;
    case Metric::jaccard: return jaccard;
    case Metric::tfidf_cosine: return tfidf_cosine;
    case Metric::ngram_cosine: return ngram_cosine;
  }
  return 0;
}

ScoreVector score_all(std::string_view a, std::string_view b) {
  return {char_match(a, b), jaccard(a, b), tfidf_cosine(a, b), ngram_cosine(a, b)};
}

SimilarityReport ensemble_evaluate(std::string_view a, std::string_view b, const Thresholds& thresholds) {
  SimilarityReport report{score_all(a, b), false, thresholds};
  for (auto m : kAllMetrics) {
    if (report.scores.get(m) < thresholds.get(m)) report.ensemble_flagged = true;
  }
  return report;
}

}  // namespace govkit::repro
