#pragma once

// Deterministic synthetic corpora and fixed sentence pairs shared by the
// unit and acceptance suites.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ldp/rng.hpp"

namespace testdata {

inline const std::map<std::string, std::vector<std::string>>& vocabularies() {
  static const std::map<std::string, std::vector<std::string>> vocab = {
      {"en", {"the", "of", "and", "to", "in", "is", "was", "for", "on", "with",
              "as", "his", "they", "at", "be", "this", "have", "from", "or", "by",
              "one", "had", "but", "not", "what", "all", "were", "when", "we", "there"}},
      {"sw", {"na", "ya", "wa", "kwa", "ni", "za", "katika", "la", "cha", "hii",
              "kuwa", "watu", "kazi", "leo", "sana", "nzuri", "habari", "rafiki", "maji", "shule",
              "chakula", "mtoto", "nyumba", "gari", "siku", "mwaka", "mji", "nchi", "serikali", "akasema"}},
      {"ig", {"nke", "n'ihi", "onye", "ndị", "ihe", "ụlọ", "mmadụ", "oge", "obodo", "ego",
              "nwoke", "nwanyị", "ụbọchị", "afọ", "aka", "anya", "isi", "okwu", "ezi", "ọma",
              "njem", "akwụkwọ", "ọrụ", "chi", "mmiri", "nri", "anwụ", "ikuku", "ahụ", "ùkwù"}},
      {"hi", {"है", "की", "के", "में", "नहीं", "और", "क्या", "यह", "था", "से",
              "पर", "को", "एक", "लिए", "गया", "कहा", "अपने", "हम", "आप", "करने",
              "वाले", "हुआ", "रहा", "सकता", "चाहिए", "बहुत", "कुछ", "अब", "फिर", "दिन",
              "समय", "लोग", "देश", "सरकार", "पानी", "घर", "बात", "काम", "साल", "बड़ा"}},
      {"mr", {"आहे", "आणि", "म्हणून", "त्यांनी", "केले", "होते", "तसेच", "परंतु", "मात्र", "यांच्या",
              "झाले", "असून", "येथे", "काही", "महाराष्ट्र", "पुणे", "मुंबई", "शहर", "गाव", "वेळ",
              "लोक", "म्हणजे", "आपल्या", "त्याच्या", "होती", "अनेक", "आज", "नंतर", "पहिल्या", "विविध",
              "असलेल्या", "करण्यात", "आले", "सांगितले", "दिली", "तयार", "मोठा", "नवीन", "भारतीय", "वर्षी"}},
      {"ru", {"и", "в", "не", "на", "я", "что", "он", "как", "это", "она",
              "по", "но", "они", "мы", "из", "у", "за", "был", "для", "с",
              "до", "вы", "все", "её", "его", "том", "же", "от", "бы", "когда"}},
      {"zh", {"的", "了", "在", "是", "我", "有", "和", "就", "不", "人",
              "都", "一", "上", "也", "很", "到", "说", "要", "去", "你",
              "会", "着", "没有", "看", "好", "这", "天", "来", "对", "里"}},
      {"ar", {"في", "من", "على", "أن", "إلى", "عن", "مع", "هذا", "التي", "الذي",
              "كان", "كانت", "لقد", "هناك", "بعد", "قبل", "عند", "لكن", "حيث", "كل",
              "بين", "يوم", "عام", "مدينة", "بلد", "ماء", "بيت", "عمل", "وقت", "ناس"}},
  };
  return vocab;
}

// n lines of 5..9 words sampled from the language's vocabulary. Chinese
// lines join without separators.
inline std::vector<std::string> make_corpus(const std::string& lang, std::size_t n, std::uint64_t seed) {
  const auto& words = vocabularies().at(lang);
  const std::string joiner = lang == "zh" ? "" : " ";
  ldp::Rng rng(seed ^ ldp::fnv1a(lang));
  std::vector<std::string> lines;
  lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t length = 5 + rng.below(5);
    std::string line;
    for (std::size_t w = 0; w < length; ++w) {
      if (w > 0) line += joiner;
      line += words[rng.below(words.size())];
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

// Uniform-random lowercase Latin string (no spaces).
inline std::string random_latin(std::size_t length, ldp::Rng& rng) {
  std::string out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(static_cast<char>('a' + rng.below(26)));
  return out;
}

// Twenty fixed (hypothesis, reference) pairs spanning Latin, Devanagari, Han,
// Arabic, Cyrillic and Tamil scripts, with overlap ranging from identity to
// disjoint.
inline const std::vector<std::pair<std::string, std::string>>& metric_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"the cat sat on the mat", "the cat sat on the mat"},
      {"the cat sat on mat", "the cat sat on the mat"},
      {"a quick brown fox jumps", "the quick brown fox jumps over the lazy dog"},
      {"zzzz", "qqqq"},
      {"hello world", "hello there world"},
      {"it is raining today", "it rained all day yesterday"},
      {"mwalimu anafundisha watoto shuleni leo", "mwalimu anafundisha watoto shule leo"},
      {"habari ya asubuhi rafiki", "habari za asubuhi rafiki yangu"},
      {"यह एक परीक्षा है", "यह एक कठिन परीक्षा है"},
      {"मौसम आज बहुत अच्छा है", "आज मौसम अच्छा है"},
      {"मैं घर जा रहा हूँ", "वह घर जा रही है"},
      {"你好世界", "你好世界"},
      {"我喜欢学习语言", "我喜欢学习新语言"},
      {"今天天气很好", "昨天天气不好"},
      {"الطقس جميل اليوم", "الطقس جميل جدا اليوم"},
      {"أنا أحب القراءة", "هو يحب الكتابة"},
      {"я люблю читать книги", "я люблю читать хорошие книги"},
      {"сегодня хорошая погода", "погода сегодня хорошая"},
      {"நான் தமிழ் கற்றுக்கொள்கிறேன்", "நான் தமிழ் மொழியை கற்றுக்கொள்கிறேன்"},
      {"", "a non empty reference"},
  };
  return pairs;
}

}  // namespace testdata
