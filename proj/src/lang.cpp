#include "ldp/lang.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ldp/utf8.hpp"

namespace ldp {

namespace {

struct ScriptName {
  Script script;
  std::string_view name;
};

constexpr std::array<ScriptName, 14> kScriptNames{{
    {Script::Latin, "Latin"},
    {Script::Devanagari, "Devanagari"},
    {Script::Bengali, "Bengali"},
    {Script::Tamil, "Tamil"},
    {Script::Telugu, "Telugu"},
    {Script::Kannada, "Kannada"},
    {Script::Malayalam, "Malayalam"},
    {Script::Odia, "Odia"},
    {Script::Gujarati, "Gujarati"},
    {Script::Gurmukhi, "Gurmukhi"},
    {Script::Arabic, "Arabic"},
    {Script::Han, "Han"},
    {Script::Cyrillic, "Cyrillic"},
    {Script::Other, "Other"},
}};

// Compiled classification ranges. Marks inside script-specific blocks are
// folded into Letter entries of that script: they contribute to the same
// histogram bucket as the base letter they attach to. Only script-neutral
// combining ranges need the inherit flag.
struct Range {
  char32_t lo;
  char32_t hi;
  CharClass cls;
  Script script;
  bool inherit_mark = false;
};

constexpr Script kNone = Script::Other;

constexpr Range kRanges[] = {
    {0x0009, 0x000D, CharClass::Space, kNone},
    {0x0020, 0x0020, CharClass::Space, kNone},
    {0x0021, 0x002F, CharClass::Punct, kNone},
    {0x0030, 0x0039, CharClass::Digit, kNone},
    {0x003A, 0x0040, CharClass::Punct, kNone},
    {0x0041, 0x005A, CharClass::Letter, Script::Latin},
    {0x005B, 0x0060, CharClass::Punct, kNone},
    {0x0061, 0x007A, CharClass::Letter, Script::Latin},
    {0x007B, 0x007E, CharClass::Punct, kNone},
    {0x0085, 0x0085, CharClass::Space, kNone},
    {0x00A0, 0x00A0, CharClass::Space, kNone},
    {0x00A1, 0x00A9, CharClass::Punct, kNone},
    {0x00AA, 0x00AA, CharClass::Letter, Script::Latin},
    {0x00AB, 0x00B9, CharClass::Punct, kNone},
    {0x00BA, 0x00BA, CharClass::Letter, Script::Latin},
    {0x00BB, 0x00BF, CharClass::Punct, kNone},
    {0x00C0, 0x00D6, CharClass::Letter, Script::Latin},
    {0x00D7, 0x00D7, CharClass::Punct, kNone},
    {0x00D8, 0x00F6, CharClass::Letter, Script::Latin},
    {0x00F7, 0x00F7, CharClass::Punct, kNone},
    {0x00F8, 0x02AF, CharClass::Letter, Script::Latin},
    {0x02B0, 0x02FF, CharClass::Letter, Script::Latin},
    {0x0300, 0x036F, CharClass::Mark, kNone, true},
    {0x0370, 0x03FF, CharClass::Letter, Script::Other},  // Greek
    {0x0400, 0x0482, CharClass::Letter, Script::Cyrillic},
    {0x0483, 0x0489, CharClass::Letter, Script::Cyrillic},
    {0x048A, 0x052F, CharClass::Letter, Script::Cyrillic},
    {0x0531, 0x0588, CharClass::Letter, Script::Other},  // Armenian
    {0x0589, 0x058A, CharClass::Punct, kNone},
    {0x0591, 0x05C7, CharClass::Letter, Script::Other},  // Hebrew points
    {0x05D0, 0x05F4, CharClass::Letter, Script::Other},  // Hebrew
    {0x0609, 0x060F, CharClass::Punct, kNone},
    {0x0610, 0x061A, CharClass::Letter, Script::Arabic},
    {0x061B, 0x061F, CharClass::Punct, kNone},
    {0x0620, 0x064A, CharClass::Letter, Script::Arabic},
    {0x064B, 0x065F, CharClass::Letter, Script::Arabic},
    {0x0660, 0x0669, CharClass::Digit, kNone},
    {0x066A, 0x066D, CharClass::Punct, kNone},
    {0x066E, 0x06D3, CharClass::Letter, Script::Arabic},
    {0x06D4, 0x06D4, CharClass::Punct, kNone},
    {0x06D5, 0x06DC, CharClass::Letter, Script::Arabic},
    {0x06DF, 0x06E8, CharClass::Letter, Script::Arabic},
    {0x06EA, 0x06EF, CharClass::Letter, Script::Arabic},
    {0x06F0, 0x06F9, CharClass::Digit, kNone},
    {0x06FA, 0x06FF, CharClass::Letter, Script::Arabic},
    {0x0750, 0x077F, CharClass::Letter, Script::Arabic},
    {0x08A0, 0x08FF, CharClass::Letter, Script::Arabic},
    {0x0900, 0x0963, CharClass::Letter, Script::Devanagari},
    {0x0964, 0x0965, CharClass::Punct, kNone},
    {0x0966, 0x096F, CharClass::Digit, kNone},
    {0x0970, 0x0970, CharClass::Punct, kNone},
    {0x0971, 0x097F, CharClass::Letter, Script::Devanagari},
    {0x0980, 0x09E5, CharClass::Letter, Script::Bengali},
    {0x09E6, 0x09EF, CharClass::Digit, kNone},
    {0x09F0, 0x09F1, CharClass::Letter, Script::Bengali},
    {0x09F2, 0x09FB, CharClass::Other, kNone},
    {0x09FC, 0x09FC, CharClass::Letter, Script::Bengali},
    {0x09FD, 0x09FD, CharClass::Punct, kNone},
    {0x0A00, 0x0A65, CharClass::Letter, Script::Gurmukhi},
    {0x0A66, 0x0A6F, CharClass::Digit, kNone},
    {0x0A70, 0x0A7F, CharClass::Letter, Script::Gurmukhi},
    {0x0A80, 0x0AE5, CharClass::Letter, Script::Gujarati},
    {0x0AE6, 0x0AEF, CharClass::Digit, kNone},
    {0x0AF0, 0x0AF1, CharClass::Punct, kNone},
    {0x0AF9, 0x0AFF, CharClass::Letter, Script::Gujarati},
    {0x0B00, 0x0B65, CharClass::Letter, Script::Odia},
    {0x0B66, 0x0B6F, CharClass::Digit, kNone},
    {0x0B70, 0x0B70, CharClass::Other, kNone},
    {0x0B71, 0x0B71, CharClass::Letter, Script::Odia},
    {0x0B72, 0x0B77, CharClass::Other, kNone},
    {0x0B80, 0x0BE5, CharClass::Letter, Script::Tamil},
    {0x0BE6, 0x0BEF, CharClass::Digit, kNone},
    {0x0BF0, 0x0BFF, CharClass::Other, kNone},
    {0x0C00, 0x0C65, CharClass::Letter, Script::Telugu},
    {0x0C66, 0x0C6F, CharClass::Digit, kNone},
    {0x0C70, 0x0C7F, CharClass::Other, kNone},
    {0x0C80, 0x0CE5, CharClass::Letter, Script::Kannada},
    {0x0CE6, 0x0CEF, CharClass::Digit, kNone},
    {0x0CF0, 0x0CFF, CharClass::Letter, Script::Kannada},
    {0x0D00, 0x0D57, CharClass::Letter, Script::Malayalam},
    {0x0D58, 0x0D5E, CharClass::Other, kNone},
    {0x0D5F, 0x0D65, CharClass::Letter, Script::Malayalam},
    {0x0D66, 0x0D6F, CharClass::Digit, kNone},
    {0x0D70, 0x0D79, CharClass::Other, kNone},
    {0x0D7A, 0x0D7F, CharClass::Letter, Script::Malayalam},
    {0x0D80, 0x0DE5, CharClass::Letter, Script::Other},  // Sinhala
    {0x0DE6, 0x0DEF, CharClass::Digit, kNone},
    {0x0E01, 0x0E3A, CharClass::Letter, Script::Other},  // Thai
    {0x0E40, 0x0E4E, CharClass::Letter, Script::Other},
    {0x0E4F, 0x0E4F, CharClass::Punct, kNone},
    {0x0E50, 0x0E59, CharClass::Digit, kNone},
    {0x0E5A, 0x0E5B, CharClass::Punct, kNone},
    {0x0E80, 0x0ECF, CharClass::Letter, Script::Other},  // Lao
    {0x0ED0, 0x0ED9, CharClass::Digit, kNone},
    {0x0EDC, 0x0EDF, CharClass::Letter, Script::Other},
    {0x0F00, 0x0F1F, CharClass::Letter, Script::Other},  // Tibetan
    {0x0F20, 0x0F29, CharClass::Digit, kNone},
    {0x0F40, 0x0FBC, CharClass::Letter, Script::Other},
    {0x1000, 0x103F, CharClass::Letter, Script::Other},  // Myanmar
    {0x1040, 0x1049, CharClass::Digit, kNone},
    {0x104A, 0x104F, CharClass::Punct, kNone},
    {0x1050, 0x109F, CharClass::Letter, Script::Other},
    {0x10A0, 0x10FF, CharClass::Letter, Script::Other},  // Georgian
    {0x1100, 0x11FF, CharClass::Letter, Script::Other},  // Hangul jamo
    {0x1200, 0x135A, CharClass::Letter, Script::Other},  // Ethiopic
    {0x135D, 0x135F, CharClass::Letter, Script::Other},
    {0x1360, 0x1368, CharClass::Punct, kNone},
    {0x1369, 0x137C, CharClass::Other, kNone},
    {0x13A0, 0x13F5, CharClass::Letter, Script::Other},  // Cherokee
    {0x1780, 0x17DF, CharClass::Letter, Script::Other},  // Khmer
    {0x17E0, 0x17E9, CharClass::Digit, kNone},
    {0x1820, 0x1877, CharClass::Letter, Script::Other},  // Mongolian
    {0x1AB0, 0x1AFF, CharClass::Mark, kNone, true},
    {0x1C80, 0x1C8F, CharClass::Letter, Script::Cyrillic},
    {0x1D00, 0x1DBF, CharClass::Letter, Script::Latin},
    {0x1DC0, 0x1DFF, CharClass::Mark, kNone, true},
    {0x1E00, 0x1EFF, CharClass::Letter, Script::Latin},
    {0x1F00, 0x1FFE, CharClass::Letter, Script::Other},  // Greek extended
    {0x2000, 0x200A, CharClass::Space, kNone},
    {0x200B, 0x200F, CharClass::Other, kNone},
    {0x2010, 0x2027, CharClass::Punct, kNone},
    {0x2028, 0x2029, CharClass::Space, kNone},
    {0x202F, 0x202F, CharClass::Space, kNone},
    {0x2030, 0x205E, CharClass::Punct, kNone},
    {0x205F, 0x205F, CharClass::Space, kNone},
    {0x20D0, 0x20FF, CharClass::Mark, kNone, true},
    {0x2C60, 0x2C7F, CharClass::Letter, Script::Latin},
    {0x2DE0, 0x2DFF, CharClass::Letter, Script::Cyrillic},
    {0x2E00, 0x2E7F, CharClass::Punct, kNone},
    {0x2E80, 0x2FDF, CharClass::Letter, Script::Han},  // radicals
    {0x3000, 0x3000, CharClass::Space, kNone},
    {0x3001, 0x3020, CharClass::Punct, kNone},
    {0x3021, 0x3029, CharClass::Letter, Script::Han},
    {0x3030, 0x303F, CharClass::Punct, kNone},
    {0x3041, 0x309F, CharClass::Letter, Script::Other},  // Hiragana
    {0x30A0, 0x30A0, CharClass::Punct, kNone},
    {0x30A1, 0x30FF, CharClass::Letter, Script::Other},  // Katakana
    {0x3105, 0x312F, CharClass::Letter, Script::Other},  // Bopomofo
    {0x3130, 0x318F, CharClass::Letter, Script::Other},  // Hangul compat
    {0x3400, 0x4DBF, CharClass::Letter, Script::Han},
    {0x4E00, 0x9FFF, CharClass::Letter, Script::Han},
    {0xA000, 0xA48F, CharClass::Letter, Script::Other},  // Yi
    {0xA640, 0xA69F, CharClass::Letter, Script::Cyrillic},
    {0xA722, 0xA7FF, CharClass::Letter, Script::Latin},
    {0xA8E0, 0xA8FF, CharClass::Letter, Script::Devanagari},
    {0xAB30, 0xAB6F, CharClass::Letter, Script::Latin},
    {0xAC00, 0xD7A3, CharClass::Letter, Script::Other},  // Hangul syllables
    {0xF900, 0xFAFF, CharClass::Letter, Script::Han},
    {0xFB00, 0xFB06, CharClass::Letter, Script::Latin},
    {0xFB1D, 0xFB4F, CharClass::Letter, Script::Other},  // Hebrew presentation
    {0xFB50, 0xFDFF, CharClass::Letter, Script::Arabic},
    {0xFE20, 0xFE2F, CharClass::Mark, kNone, true},
    {0xFE30, 0xFE6F, CharClass::Punct, kNone},
    {0xFE70, 0xFEFC, CharClass::Letter, Script::Arabic},
    {0xFF01, 0xFF0F, CharClass::Punct, kNone},
    {0xFF10, 0xFF19, CharClass::Digit, kNone},
    {0xFF1A, 0xFF20, CharClass::Punct, kNone},
    {0xFF21, 0xFF3A, CharClass::Letter, Script::Latin},
    {0xFF3B, 0xFF40, CharClass::Punct, kNone},
    {0xFF41, 0xFF5A, CharClass::Letter, Script::Latin},
    {0xFF5B, 0xFF65, CharClass::Punct, kNone},
    {0xFF66, 0xFFDC, CharClass::Letter, Script::Other},
    {0x20000, 0x2A6DF, CharClass::Letter, Script::Han},
};

const Range* find_range(char32_t cp) {
  const auto* begin = std::begin(kRanges);
  const auto* end = std::end(kRanges);
  const auto* it = std::upper_bound(begin, end, cp, [](char32_t v, const Range& r) { return v < r.lo; });
  if (it == begin) return nullptr;
  --it;
  return cp <= it->hi ? it : nullptr;
}

bool is_inherit_mark(char32_t cp) {
  const Range* r = find_range(cp);
  return r != nullptr && r->inherit_mark;
}

struct BuiltinEntry {
  const char* code;
  const char* english;
  const char* native;
  Script script;
  ResourceTier tier;
};

constexpr ResourceTier kHigh = ResourceTier::High;
constexpr ResourceTier kLow = ResourceTier::Low;

const BuiltinEntry kBuiltinLanguages[] = {
    {"en", "English", "English", Script::Latin, kHigh},
    {"ar", "Arabic", "العربية", Script::Arabic, kHigh},
    {"zh", "Chinese", "中文", Script::Han, kHigh},
    {"vi", "Vietnamese", "Tiếng Việt", Script::Latin, kHigh},
    {"fr", "French", "Français", Script::Latin, kHigh},
    {"es", "Spanish", "Española", Script::Latin, kHigh},
    {"pt", "Portuguese", "Português", Script::Latin, kHigh},
    {"id", "Indonesian", "Bahasa Indonesia", Script::Latin, kHigh},
    {"ru", "Russian", "Русский", Script::Cyrillic, kHigh},
    {"de", "German", "Deutsch", Script::Latin, kHigh},
    {"so", "Somali", "Soomaali", Script::Latin, kLow},
    // Indic group
    {"as", "Assamese", "অসমীয়া", Script::Bengali, kLow},
    {"or", "Oriya", "ଓଡ଼ିଆ", Script::Odia, kLow},
    {"gu", "Gujarati", "ગુજરાતી", Script::Gujarati, kLow},
    {"mr", "Marathi", "मराठी", Script::Devanagari, kLow},
    {"pa", "Panjabi", "ਪੰਜਾਬੀ", Script::Gurmukhi, kLow},
    {"kn", "Kannada", "ಕನ್ನಡ", Script::Kannada, kLow},
    {"ne", "Nepali", "नेपाली", Script::Devanagari, kLow},
    {"te", "Telugu", "తెలుగు", Script::Telugu, kLow},
    {"ml", "Malayalam", "മലയാളം", Script::Malayalam, kLow},
    {"ur", "Urdu", "اردو", Script::Arabic, kLow},
    {"ta", "Tamil", "தமிழ்", Script::Tamil, kLow},
    {"bn", "Bengali", "বাংলা", Script::Bengali, kLow},
    {"hi", "Hindi", "हिन्दी", Script::Devanagari, kLow},
    // African group
    {"tum", "Tumbuka", "Chitumbuka", Script::Latin, kLow},
    {"ki", "Kikuyu", "Gĩkũyũ", Script::Latin, kLow},
    {"bm", "Bambara", "Bamanankan", Script::Latin, kLow},
    {"ak", "Akan", "Akan", Script::Latin, kLow},
    {"ts", "Tsonga", "Xitsonga", Script::Latin, kLow},
    {"st", "Southern Sotho", "Sesotho", Script::Latin, kLow},
    {"ny", "Chewa", "Chichewa", Script::Latin, kLow},
    {"tn", "Tswana", "Setswana", Script::Latin, kLow},
    {"ln", "Lingala", "Lingála", Script::Latin, kLow},
    {"nso", "Northern Sotho", "Sepedi", Script::Latin, kLow},
    {"fon", "Fon", "Fɔngbè", Script::Latin, kLow},
    {"rn", "Rundi", "Ikirundi", Script::Latin, kLow},
    {"wo", "Wolof", "Wolof", Script::Latin, kLow},
    {"lg", "Luganda", "Luganda", Script::Latin, kLow},
    {"sn", "Shona", "chiShona", Script::Latin, kLow},
    {"zu", "Zulu", "isiZulu", Script::Latin, kLow},
    {"ig", "Igbo", "Igbo", Script::Latin, kLow},
    {"xh", "Xhosa", "isiXhosa", Script::Latin, kLow},
    {"rw", "Kinyarwanda", "Ikinyarwanda", Script::Latin, kLow},
    {"yo", "Yoruba", "Yorùbá", Script::Latin, kLow},
    {"sw", "Swahili", "Kiswahili", Script::Latin, kLow},
};

}  // namespace

std::string_view to_string(Script script) {
  for (const auto& entry : kScriptNames) {
    if (entry.script == script) return entry.name;
  }
  return "Other";
}

Script script_from_string(std::string_view name) {
  for (const auto& entry : kScriptNames) {
    if (entry.name == name) return entry.script;
  }
  throw Error("unknown script class: " + std::string(name));
}

std::string_view to_string(ResourceTier tier) { return tier == ResourceTier::High ? "high" : "low"; }

ResourceTier tier_from_string(std::string_view name) {
  if (name == "high") return ResourceTier::High;
  if (name == "low") return ResourceTier::Low;
  throw Error("unknown resource tier: " + std::string(name));
}

const std::set<Script>& all_scripts() {
  static const std::set<Script> scripts = [] {
    std::set<Script> s;
    for (const auto& entry : kScriptNames) s.insert(entry.script);
    return s;
  }();
  return scripts;
}

CharInfo classify_char(char32_t cp) {
  const Range* r = find_range(cp);
  if (r == nullptr) return {CharClass::Other, Script::Other};
  return {r->cls, r->script};
}

bool is_letter(char32_t cp) {
  const Range* r = find_range(cp);
  return r != nullptr && (r->cls == CharClass::Letter || r->cls == CharClass::Mark);
}

bool is_digit_char(char32_t cp) {
  const Range* r = find_range(cp);
  return r != nullptr && r->cls == CharClass::Digit;
}

ScriptHistogram script_histogram(std::string_view text) {
  ScriptHistogram hist;
  std::optional<Script> base_script;
  for (char32_t cp : decode_utf8(text)) {
    const CharInfo info = classify_char(cp);
    if (info.cls == CharClass::Letter) {
      ++hist.counts[info.script];
      ++hist.total;
      base_script = info.script;
    } else if (info.cls == CharClass::Mark && is_inherit_mark(cp)) {
      if (base_script) {
        ++hist.counts[*base_script];
        ++hist.total;
      }
    } else if (info.cls != CharClass::Mark) {
      base_script.reset();
    }
  }
  return hist;
}

DominantScript dominant_script(std::string_view text) {
  const ScriptHistogram hist = script_histogram(text);
  if (hist.total == 0) return AmbiguousScripts{};
  std::size_t best = 0;
  for (const auto& [script, count] : hist.counts) best = std::max(best, count);
  AmbiguousScripts at_max;
  for (const auto& [script, count] : hist.counts) {
    if (count == best) at_max.insert(script);
  }
  if (at_max.size() == 1) return *at_max.begin();
  return at_max;
}

double letter_ratio(std::string_view text, const std::set<Script>& scripts) {
  const ScriptHistogram hist = script_histogram(text);
  if (hist.total == 0) return 0.0;
  std::size_t in_set = 0;
  for (const auto& [script, count] : hist.counts) {
    if (scripts.count(script) != 0) in_set += count;
  }
  return static_cast<double>(in_set) / static_cast<double>(hist.total);
}

LanguageRegistry LanguageRegistry::builtin() {
  LanguageRegistry reg;
  for (const auto& entry : kBuiltinLanguages) {
    reg.add(LanguageSpec{entry.code, entry.english, entry.native, entry.script, entry.tier});
  }
  return reg;
}

void LanguageRegistry::add(LanguageSpec spec) {
  if (spec.code.empty()) throw Error("language code must be non-empty");
  if (spec.english_name.empty()) throw Error("english_name must be non-empty for " + spec.code);
  if (spec.native_name.empty()) spec.native_name = spec.english_name;
  const auto it = by_code_.find(spec.code);
  if (it != by_code_.end()) {
    specs_[it->second] = std::move(spec);
    return;
  }
  by_code_[spec.code] = specs_.size();
  specs_.push_back(std::move(spec));
}

void LanguageRegistry::load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open registry file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad registry record at " + path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    LanguageSpec spec;
    spec.code = record.at("code").get<std::string>();
    spec.english_name = record.at("english_name").get<std::string>();
    spec.native_name = record.value("native_name", spec.english_name);
    spec.script = script_from_string(record.at("script_class").get<std::string>());
    spec.tier = tier_from_string(record.value("resource_tier", "low"));
    add(std::move(spec));
  }
}

const LanguageSpec& LanguageRegistry::get(const std::string& code) const {
  const LanguageSpec* spec = find(code);
  if (spec == nullptr) throw UnknownLanguage(code);
  return *spec;
}

const LanguageSpec* LanguageRegistry::find(const std::string& code) const {
  const auto it = by_code_.find(code);
  return it == by_code_.end() ? nullptr : &specs_[it->second];
}

const LanguageSpec* LanguageRegistry::find_by_label(const std::string& label) const {
  for (const auto& spec : specs_) {
    if (spec.english_name == label || spec.native_name == label) return &spec;
  }
  return nullptr;
}

std::vector<std::string> LanguageRegistry::codes() const {
  std::vector<std::string> out;
  out.reserve(specs_.size());
  for (const auto& spec : specs_) out.push_back(spec.code);
  return out;
}

}  // namespace ldp
