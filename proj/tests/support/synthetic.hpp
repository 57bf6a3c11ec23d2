#pragma once

// Synthetic Russian-like routing corpus used by the integration and
// acceptance tests. Twelve "specializations" = six keyword topics, each
// split into two variants that differ only in a non-linear marker-word
// signal: variant "a" texts contain both marker words or neither,
// variant "b" texts contain exactly one. A linear bag-of-words model can
// recover the topic but not the variant, while the attention classifier
// can learn both.

#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/rng.hpp"

namespace medroute::testsupport {

inline const std::vector<std::vector<std::string>>& topic_keywords() {
  static const std::vector<std::vector<std::string>> topics = {
      {"сердце", "давление", "пульс", "аритмия", "стенокардия", "кардио",
       "тахикардия", "ишемия"},
      {"горло", "ухо", "нос", "ангина", "гайморит", "тонзиллит", "отит",
       "насморк"},
      {"кожа", "сыпь", "зуд", "экзема", "дерматит", "псориаз", "акне",
       "покраснение"},
      {"желудок", "изжога", "гастрит", "тошнота", "печень", "кишечник",
       "язва", "вздутие"},
      {"сустав", "спина", "колено", "артрит", "остеохондроз", "позвоночник",
       "растяжение", "перелом"},
      {"голова", "мигрень", "головокружение", "невралгия", "тревога",
       "бессонница", "память", "онемение"},
  };
  return topics;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> fillers = {
      "болит",   "сильно",  "уже",     "неделю",  "помогите", "что",
      "делать",  "утром",   "вечером", "после",   "еды",      "ночью",
      "очень",   "беспокоит", "иногда", "постоянно", "второй", "день",
      "месяц",   "назад",   "врач",    "сказал",  "таблетки", "не",
      "помогают", "подскажите", "можно", "ли",     "нужно",   "срочно"};
  return fillers;
}

inline const std::string& marker_one() {
  static const std::string m = "температура";
  return m;
}

inline const std::string& marker_two() {
  static const std::string m = "слабость";
  return m;
}

inline std::string class_label(size_t topic, int variant) {
  static const std::vector<std::string> names = {
      "кардиолог",    "лор",        "дерматолог",
      "гастроэнтеролог", "травматолог", "невролог"};
  return names[topic] + (variant == 0 ? "" : "-дежурный");
}

// One text: topic keywords + fillers + the marker words dictated by the
// variant rule, word order randomized.
inline std::string make_text(SplitMix64& rng, size_t topic, int variant) {
  const auto& kw = topic_keywords()[topic];
  std::vector<std::string> words;
  size_t n_kw = 3 + rng.below(3);
  for (size_t i = 0; i < n_kw; ++i)
    words.push_back(kw[size_t(rng.below(kw.size()))]);
  size_t n_fill = 4 + rng.below(4);
  for (size_t i = 0; i < n_fill; ++i)
    words.push_back(filler_words()[size_t(rng.below(filler_words().size()))]);
  bool both = rng.below(2) == 0;
  if (variant == 0) {
    if (both) {
      words.push_back(marker_one());
      words.push_back(marker_two());
    }  // else: neither
  } else {
    words.push_back(both ? marker_one() : marker_two());
  }
  rng.shuffle(words);
  std::string text;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += words[i];
  }
  return text;
}

// Balanced corpus: `per_class` records for each of the 12 classes.
inline Dataset make_corpus(size_t per_class, uint64_t seed) {
  SplitMix64 rng(seed);
  Dataset ds;
  ds.provenance = "synthetic routing corpus";
  for (size_t topic = 0; topic < 6; ++topic) {
    for (int variant = 0; variant < 2; ++variant) {
      for (size_t i = 0; i < per_class; ++i)
        ds.records.push_back(
            {"synthetic://" + std::to_string(topic) + "/" +
                 std::to_string(variant) + "/" + std::to_string(i),
             make_text(rng, topic, variant), class_label(topic, variant)});
    }
  }
  return ds;
}

// Drops records from selected classes to create the skew the balancing
// step has to repair. `kept` maps class index (0..11) to kept count; the
// rest stay at full size.
inline Dataset inject_imbalance(const Dataset& ds,
                                const std::vector<std::pair<size_t, size_t>>&
                                    kept) {
  Dataset out;
  out.provenance = ds.provenance + " (imbalance injected)";
  std::vector<size_t> seen(12, 0);
  for (const auto& r : ds.records) {
    size_t cls = 0;
    for (size_t topic = 0; topic < 6; ++topic)
      for (int variant = 0; variant < 2; ++variant)
        if (class_label(topic, variant) == r.specialization)
          cls = topic * 2 + size_t(variant);
    size_t limit = size_t(-1);
    for (const auto& [c, n] : kept)
      if (c == cls) limit = n;
    if (seen[cls] < limit) {
      out.records.push_back(r);
      ++seen[cls];
    }
  }
  return out;
}

}  // namespace medroute::testsupport
