#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ldp/errors.hpp"

namespace ldp {

enum class Script {
  Latin,
  Devanagari,
  Bengali,
  Tamil,
  Telugu,
  Kannada,
  Malayalam,
  Odia,
  Gujarati,
  Gurmukhi,
  Arabic,
  Han,
  Cyrillic,
  Other,
};

enum class ResourceTier { High, Low };

std::string_view to_string(Script script);
Script script_from_string(std::string_view name);
std::string_view to_string(ResourceTier tier);
ResourceTier tier_from_string(std::string_view name);

const std::set<Script>& all_scripts();

struct LanguageSpec {
  std::string code;
  std::string english_name;
  std::string native_name;
  Script script = Script::Other;
  ResourceTier tier = ResourceTier::Low;
};

// Registry of the languages the toolkit knows about. Ships with the 34 ROOTS
// low-resource languages, the default diverse exemplar set (ar, zh, vi, fr),
// English, and a handful of languages used in the summarization and pivot
// experiments. Extendable from a JSONL registry file.
class LanguageRegistry {
 public:
  static LanguageRegistry builtin();
  static LanguageRegistry empty() { return LanguageRegistry{}; }

  // Adds or replaces a spec. Throws Error on an empty code or english_name.
  void add(LanguageSpec spec);

  // One JSON object per line: {code, english_name, native_name, script_class,
  // resource_tier}. Existing codes are overridden.
  void load_jsonl(const std::filesystem::path& path);

  const LanguageSpec& get(const std::string& code) const;  // throws UnknownLanguage
  const LanguageSpec* find(const std::string& code) const;
  bool contains(const std::string& code) const { return find(code) != nullptr; }

  // Reverse lookup by english or native tag name, e.g. "Igbo" or "मराठी".
  const LanguageSpec* find_by_label(const std::string& label) const;

  std::vector<std::string> codes() const;  // insertion order
  std::size_t size() const { return specs_.size(); }

 private:
  std::vector<LanguageSpec> specs_;
  std::map<std::string, std::size_t> by_code_;
};

// Character classes relevant to filtering and script analysis. Letters and
// combining marks enter script histograms; everything else is excluded.
enum class CharClass { Letter, Mark, Digit, Punct, Space, Other };

struct CharInfo {
  CharClass cls = CharClass::Other;
  Script script = Script::Other;  // meaningful for Letter and Mark only
};

CharInfo classify_char(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit_char(char32_t cp);

struct ScriptHistogram {
  std::map<Script, std::size_t> counts;
  std::size_t total = 0;
};

// Counts letters per script. Combining marks count toward the script of the
// preceding base letter; marks with no base letter are ignored.
ScriptHistogram script_histogram(std::string_view text);

// The tied set when no strict maximum exists (empty when the text has no letters).
using AmbiguousScripts = std::set<Script>;
using DominantScript = std::variant<Script, AmbiguousScripts>;

DominantScript dominant_script(std::string_view text);

// (letters in the given scripts) / (all letters); 0 when the text has no letters.
double letter_ratio(std::string_view text, const std::set<Script>& scripts);

}  // namespace ldp
