#include "ldp/prompt.hpp"

#include <algorithm>
#include <cctype>

namespace ldp {

namespace {

constexpr std::string_view kInputLabel = "Input";
constexpr std::string_view kOutputLabel = "Output";

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])) != 0) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])) != 0) --end;
  return std::string(s.substr(begin, end - begin));
}

void require_no_linebreak(const std::string& text, const char* what) {
  if (text.find('\n') != std::string::npos || text.find('\r') != std::string::npos) {
    throw Error(std::string(what) + " must be line-break free");
  }
}

// Shared assembly for pair-style prompts: exemplar blocks joined by "\n",
// then "{src label}: {input}\n{tgt label}:".
PromptText assemble_pair_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                                const std::string& src_lang, const std::string& tgt_lang, TagStyle style,
                                const LanguageRegistry& registry) {
  std::string text;
  for (const auto& exemplar : exemplars) {
    text += render_pair(exemplar, style, registry);
    text += '\n';
  }
  if (style == TagStyle::NoTag) {
    text += std::string(kInputLabel) + ": " + input + "\n" + std::string(kOutputLabel) + ":";
  } else {
    text += label_for(registry.get(src_lang), style) + ": " + input + "\n" +
            label_for(registry.get(tgt_lang), style) + ":";
  }
  return PromptText{std::move(text), {"\n"}, tgt_lang};
}

}  // namespace

std::string_view to_string(TagStyle style) {
  switch (style) {
    case TagStyle::EnglishTag: return "english";
    case TagStyle::NativeTag: return "native";
    case TagStyle::NoTag: return "none";
  }
  return "english";
}

TagStyle tag_style_from_string(std::string_view name) {
  if (name == "english" || name == "english_tag" || name == "en") return TagStyle::EnglishTag;
  if (name == "native" || name == "native_tag") return TagStyle::NativeTag;
  if (name == "none" || name == "no_tag" || name == "notag") return TagStyle::NoTag;
  throw Error("unknown tag style: " + std::string(name));
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Supervised: return "supervised";
    case Provenance::SyntheticBt: return "synthetic_bt";
    case Provenance::SeedTranslation: return "seed_translation";
  }
  return "supervised";
}

Provenance provenance_from_string(std::string_view name) {
  if (name == "supervised") return Provenance::Supervised;
  if (name == "synthetic_bt") return Provenance::SyntheticBt;
  if (name == "seed_translation") return Provenance::SeedTranslation;
  throw Error("unknown provenance: " + std::string(name));
}

std::string label_for(const LanguageSpec& spec, TagStyle style) {
  return style == TagStyle::NativeTag ? spec.native_name : spec.english_name;
}

std::string render_pair(const Exemplar& exemplar, TagStyle style, const LanguageRegistry& registry) {
  require_no_linebreak(exemplar.src_text, "exemplar source");
  require_no_linebreak(exemplar.tgt_text, "exemplar target");
  if (exemplar.src_text.empty() || exemplar.tgt_text.empty()) throw Error("exemplar texts must be non-empty");
  if (style == TagStyle::NoTag) {
    return std::string(kInputLabel) + ": " + exemplar.src_text + "\n" + std::string(kOutputLabel) + ": " +
           exemplar.tgt_text;
  }
  const LanguageSpec& src = registry.get(exemplar.src_lang);
  const LanguageSpec& tgt = registry.get(exemplar.tgt_lang);
  return label_for(src, style) + ": " + exemplar.src_text + "\n" + label_for(tgt, style) + ": " +
         exemplar.tgt_text;
}

PromptText build_x2e_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                            const std::string& src_lang, TagStyle style, const LanguageRegistry& registry,
                            const std::string& pivot) {
  for (const auto& exemplar : exemplars) {
    if (exemplar.tgt_lang != pivot) {
      throw MixedTargetLanguage("x2e exemplar targets '" + exemplar.tgt_lang + "', expected pivot '" + pivot +
                                "'");
    }
  }
  PromptText prompt = assemble_pair_prompt(exemplars, input, src_lang, pivot, style, registry);
  prompt.expected_lang = pivot;
  return prompt;
}

PromptText build_e2x_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                            const std::string& tgt_lang, TagStyle style, const LanguageRegistry& registry,
                            const std::string& pivot) {
  for (const auto& exemplar : exemplars) {
    if (exemplar.tgt_lang != tgt_lang || exemplar.src_lang != pivot) {
      throw MixedTargetLanguage("e2x exemplar is " + exemplar.src_lang + "->" + exemplar.tgt_lang +
                                ", expected " + pivot + "->" + tgt_lang);
    }
  }
  return assemble_pair_prompt(exemplars, input, pivot, tgt_lang, style, registry);
}

PromptText build_pair_prompt(const std::vector<Exemplar>& exemplars, const std::string& input,
                             const std::string& src_lang, const std::string& tgt_lang, TagStyle style,
                             const LanguageRegistry& registry) {
  return assemble_pair_prompt(exemplars, input, src_lang, tgt_lang, style, registry);
}

PromptText build_pivot_prompt(const std::vector<PivotTriplet>& triplets, const std::string& input,
                              const std::string& src_lang, const std::string& tgt_lang,
                              const LanguageRegistry& registry, const std::string& pivot) {
  if (triplets.empty()) throw NeedTriplets("pivot prompts require at least one triplet");
  const LanguageSpec& src = registry.get(src_lang);
  const LanguageSpec& tgt = registry.get(tgt_lang);
  const LanguageSpec& en = registry.get(pivot);
  std::string text;
  for (const auto& triplet : triplets) {
    if (triplet.x_lang != src_lang || triplet.y_lang != tgt_lang) {
      throw NeedTriplets("triplet languages " + triplet.x_lang + "->" + triplet.y_lang + " do not match " +
                         src_lang + "->" + tgt_lang);
    }
    require_no_linebreak(triplet.x_text, "triplet x");
    require_no_linebreak(triplet.en_text, "triplet en");
    require_no_linebreak(triplet.y_text, "triplet y");
    if (triplet.x_text.empty() || triplet.en_text.empty() || triplet.y_text.empty()) {
      throw NeedTriplets("triplet texts must be non-empty");
    }
    text += src.english_name + ": " + triplet.x_text + "\n" + en.english_name + ": " + triplet.en_text +
            "\n" + tgt.english_name + ": " + triplet.y_text + "\n\n";
  }
  text += src.english_name + ": " + input + "\n" + en.english_name + ":";
  return PromptText{std::move(text), {"\n\n"}, tgt_lang};
}

std::string parse_translation(const std::string& raw, const std::vector<std::string>& stop,
                              const std::string& marker) {
  std::string_view view = raw;
  if (!marker.empty()) {
    const std::size_t at = view.find(marker);
    if (at != std::string_view::npos) view = view.substr(at + marker.size());
  }
  std::size_t cut = view.size();
  for (const auto& s : stop) {
    if (s.empty()) continue;
    const std::size_t at = view.find(s);
    if (at != std::string_view::npos) cut = std::min(cut, at);
  }
  return trim(view.substr(0, cut));
}

std::pair<std::string, std::string> parse_pivot_completion(const std::string& raw, const std::string& tgt_lang,
                                                           const LanguageRegistry& registry) {
  const std::string label = registry.get(tgt_lang).english_name + ":";
  std::size_t pos = 0;
  std::size_t label_at = std::string::npos;
  while (pos <= raw.size()) {
    if (raw.compare(pos, label.size(), label) == 0) {
      label_at = pos;
      break;
    }
    const std::size_t next = raw.find('\n', pos);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (label_at == std::string::npos) {
    throw NoTargetSegment("no '" + label + "' line in pivot completion");
  }
  std::string en_part = trim(std::string_view(raw).substr(0, label_at));
  const std::size_t en_break = en_part.find('\n');
  if (en_break != std::string::npos) en_part = trim(std::string_view(en_part).substr(0, en_break));
  std::string_view rest = std::string_view(raw).substr(label_at + label.size());
  const std::size_t line_end = rest.find('\n');
  if (line_end != std::string_view::npos) rest = rest.substr(0, line_end);
  return {en_part, trim(rest)};
}

PromptText build_sum_prompt(const std::vector<DocSumExemplar>& exemplars, const std::string& doc,
                            const std::string& lang, const LanguageRegistry& registry) {
  registry.get(lang);
  std::string text;
  for (const auto& exemplar : exemplars) {
    require_no_linebreak(exemplar.summary, "exemplar summary");
    text += "Document: " + exemplar.doc + "\nSummary: " + exemplar.summary + "\n\n";
  }
  text += "Document: " + doc + "\nSummary:";
  return PromptText{std::move(text), {"\n\n"}, lang};
}

const std::string kXltSumMarker = "Final summary:";

const std::string kXltSumTemplate =
    "Read the {language} document below and make sure you understand it. First summarize the document in "
    "English in one sentence, then translate that English sentence into {language}. Reply with only the "
    "final native-language sentence after the marker.\nDocument: {document}\nFinal summary:";

namespace {

std::string substitute_all(std::string text, std::string_view placeholder, const std::string& value) {
  std::size_t at = 0;
  while ((at = text.find(placeholder, at)) != std::string::npos) {
    text.replace(at, placeholder.size(), value);
    at += value.size();
  }
  return text;
}

}  // namespace

PromptText build_xlt_sum_prompt(const std::string& doc, const std::string& lang,
                                const std::string& instruction_template, const LanguageRegistry& registry) {
  const LanguageSpec& spec = registry.get(lang);
  if (instruction_template.find("{language}") == std::string::npos ||
      instruction_template.find("{document}") == std::string::npos) {
    throw BadTemplate("instruction template must contain {language} and {document}");
  }
  std::string text = substitute_all(instruction_template, "{language}", spec.english_name);
  text = substitute_all(std::move(text), "{document}", doc);
  return PromptText{std::move(text), {"\n\n"}, lang};
}

PromptText build_basic_sum_prompt(const std::string& doc, const std::string& lang,
                                  const LanguageRegistry& registry) {
  const LanguageSpec& spec = registry.get(lang);
  std::string text = "Summarize the following " + spec.english_name + " document in one sentence, writing the "
                     "summary in " + spec.english_name + ".\nDocument: " + doc + "\nSummary:";
  return PromptText{std::move(text), {"\n\n"}, lang};
}

PromptText build_judge_prompt(const std::string& doc, const std::string& summary, const std::string& lang,
                              const LanguageRegistry& registry) {
  const LanguageSpec& spec = registry.get(lang);
  std::string text = "You are grading a one-sentence " + spec.english_name +
                     " summary of a document. Rate how well the summary captures the document on a scale "
                     "from 1 (poor) to 5 (excellent). Reply with a single integer.\nDocument: " + doc +
                     "\nSummary: " + summary + "\nRating:";
  return PromptText{std::move(text), {"\n"}, lang};
}

int parse_rating(const std::string& raw) {
  std::size_t i = 0;
  while (i < raw.size()) {
    if (std::isdigit(static_cast<unsigned char>(raw[i])) != 0) {
      std::size_t end = i;
      while (end < raw.size() && std::isdigit(static_cast<unsigned char>(raw[end])) != 0) ++end;
      const std::string token = raw.substr(i, end - i);
      if (token.size() == 1 && token[0] >= '1' && token[0] <= '5') {
        return token[0] - '0';
      }
      i = end;
    } else {
      ++i;
    }
  }
  throw UnparsableRating("no integer rating in 1..5 found");
}

}  // namespace ldp
