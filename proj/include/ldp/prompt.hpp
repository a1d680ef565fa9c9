#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ldp/lang.hpp"

namespace ldp {

enum class TagStyle { EnglishTag, NativeTag, NoTag };

std::string_view to_string(TagStyle style);
TagStyle tag_style_from_string(std::string_view name);

enum class Provenance { Supervised, SyntheticBt, SeedTranslation };

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view name);

// One in-context demonstration pair.
struct Exemplar {
  std::string src_text;
  std::string tgt_text;
  std::string src_lang;
  std::string tgt_lang;
  Provenance provenance = Provenance::SeedTranslation;
};

// X -> English -> Y pivot demonstration.
struct PivotTriplet {
  std::string x_text;
  std::string en_text;
  std::string y_text;
  std::string x_lang;
  std::string y_lang;
};

struct DocSumExemplar {
  std::string doc;      // may contain line breaks
  std::string summary;  // single line
  std::string lang;
};

// A rendered prompt, its stop sequences, and the language the completion is
// expected to be in. Prompts always end with an open test label ("Igbo:")
// with no trailing space.
struct PromptText {
  std::string text;
  std::vector<std::string> stop;
  std::string expected_lang;
};

// Label text for a language under a tag style. NoTag is position dependent
// (Input/Output) and handled by the builders.
std::string label_for(const LanguageSpec& spec, TagStyle style);

// "<label(src)>: <src>\n<label(tgt)>: <tgt>", or Input/Output under NoTag.
std::string render_pair(const Exemplar& exemplar, TagStyle style, const LanguageRegistry& registry);

// Any-language -> pivot prompt: exemplar blocks joined by single newlines,
// then the open test block. Every exemplar must target the pivot.
PromptText build_x2e_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                            const std::string& src_lang, TagStyle style, const LanguageRegistry& registry,
                            const std::string& pivot = "en");

// Pivot -> target prompt from intra-lingual back-translation exemplars. Every
// exemplar must be pivot -> tgt_lang; a mismatch throws MixedTargetLanguage
// (an inconsistent target side is exactly the wrong-language failure the
// in-context format is designed to prevent).
PromptText build_e2x_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                            const std::string& tgt_lang, TagStyle style, const LanguageRegistry& registry,
                            const std::string& pivot = "en");

// Unchecked pair-prompt assembly for arbitrary exemplar sets (supervised
// pools, or deliberately mixed-target baselines). The test block closes with
// tgt_lang's label.
PromptText build_pair_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                             const std::string& src_lang, const std::string& tgt_lang, TagStyle style,
                             const LanguageRegistry& registry);

// X -> En -> Y prompt: three-line triplet blocks joined by blank lines, then
// the open test block ending at the pivot label. Labels are English tag
// names. The completion carries the En intermediate then the target line.
PromptText build_pivot_prompt(const std::vector<PivotTriplet>& triplets, const std::string& input,
                              const std::string& src_lang, const std::string& tgt_lang,
                              const LanguageRegistry& registry, const std::string& pivot = "en");

// Truncates at the first stop sequence and trims surrounding whitespace. A
// non-empty marker drops everything up to and including the marker first.
// An empty return value means the completion carried no usable text.
std::string parse_translation(const std::string& raw, const std::vector<std::string>& stop,
                              const std::string& marker = "");

// Splits a pivot completion at the first line starting with the target
// label; returns (en_text, y_text). Throws NoTargetSegment when the label
// never appears.
std::pair<std::string, std::string> parse_pivot_completion(const std::string& raw, const std::string& tgt_lang,
                                                           const LanguageRegistry& registry);

// "Document: ...\nSummary: ..." blocks joined by blank lines, then the open
// test block. Serves both cross-lingual and intra-lingual exemplars.
PromptText build_sum_prompt(const std::vector<DocSumExemplar>& exemplars, const std::string& doc,
                            const std::string& lang, const LanguageRegistry& registry);

// English-pivoting instruction prompt. The template must contain {language}
// and {document}; the completion carries the final native summary after the
// marker line.
PromptText build_xlt_sum_prompt(const std::string& doc, const std::string& lang,
                                const std::string& instruction_template, const LanguageRegistry& registry);

extern const std::string kXltSumTemplate;
extern const std::string kXltSumMarker;  // "Final summary:"

// Plain single-instruction summarization prompt (the no-exemplar baseline).
PromptText build_basic_sum_prompt(const std::string& doc, const std::string& lang,
                                  const LanguageRegistry& registry);

// Judge prompt asking for a single 1-5 rating, ending "Rating:".
PromptText build_judge_prompt(const std::string& doc, const std::string& summary, const std::string& lang,
                              const LanguageRegistry& registry);

// First integer token in 1..5; throws UnparsableRating when none exists.
int parse_rating(const std::string& raw);

}  // namespace ldp
