#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ldp/lang.hpp"

namespace ldp {

struct MetricScore {
  std::string name;
  double value = 0.0;
  double scale_max = 100.0;
  std::size_t segment_count = 0;
};

// Pluggable tokenizer: whitespace, per-codepoint, per-byte, the default BLEU
// tokenizer (whitespace plus punctuation isolation), or a vocabulary file
// segmented longest-match-first.
class Tokenizer {
 public:
  static Tokenizer whitespace();
  static Tokenizer character();
  static Tokenizer byte();
  static Tokenizer bleu_default();
  static Tokenizer from_vocab_file(const std::filesystem::path& path);
  static Tokenizer named(const std::string& name);  // "whitespace" | "character" | "byte" | "bleu"

  std::vector<std::string> tokenize(const std::string& text) const;
  const std::string& name() const { return name_; }

 private:
  enum class Kind { Whitespace, Character, Byte, BleuDefault, Vocab };
  explicit Tokenizer(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  // first codepoint -> vocab entries (longest first), for greedy matching
  std::map<char32_t, std::vector<std::u32string>> vocab_;
};

// chrF++: character n-grams up to order 6 on whitespace-stripped text, word
// n-grams up to order 2, beta = 2, counts pooled over the corpus.
MetricScore chrf_pp(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

// Corpus BLEU with clipped precisions 1..4, exponential smoothing for zero
// precisions at orders >= 2 (a zero unigram precision scores 0), and the
// standard brevity penalty.
MetricScore bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
                 const Tokenizer& tokenizer);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

RougeScore rouge_l(const std::string& hypothesis, const std::string& reference, const Tokenizer& tokenizer);

// Mean over pairs of tokens(x) / tokens(en). Throws ZeroDenominator when an
// English side tokenizes to nothing, NoSegments on an empty pair list.
double fragmentation_ratio(const std::vector<std::pair<std::string, std::string>>& pairs,
                           const Tokenizer& tokenizer_x, const Tokenizer& tokenizer_en);

// Reserved prediction code for "other / below the confidence floor".
inline const std::string kLidOther = "##";

struct LidOptions {
  // Mean per-gram log-probability below which the classifier answers "##".
  // The default keeps uniform-random Latin noise out of every candidate
  // while passing held-out seed lines.
  double floor = -5.5;
  std::size_t min_seed_lines = 50;
};

// Character n-gram language identifier (orders 1..3, add-one smoothing) with
// a script prior: candidates are pre-filtered by the dominant script of the
// input before scoring.
class LidModel {
 public:
  const std::vector<std::string>& candidates() const { return candidates_; }
  double floor() const { return options_.floor; }

 private:
  friend LidModel lid_train(const std::map<std::string, std::vector<std::string>>&, const LanguageRegistry&,
                            const LidOptions&);
  friend std::string lid_classify(const std::string&, const LidModel&);

  struct LangTable {
    std::string code;
    Script script = Script::Other;
    std::array<std::unordered_map<std::u32string, std::uint32_t>, 3> grams;
    std::array<std::uint64_t, 3> totals{};
  };

  std::vector<std::string> candidates_;
  std::vector<LangTable> tables_;
  LidOptions options_;
};

LidModel lid_train(const std::map<std::string, std::vector<std::string>>& seed_corpora,
                   const LanguageRegistry& registry, const LidOptions& options = {});

std::string lid_classify(const std::string& text, const LidModel& model);

struct ConfusionMatrix {
  std::vector<std::string> row_langs;  // intended
  std::vector<std::string> col_langs;  // predicted, candidates + "##"
  std::vector<std::vector<std::size_t>> counts;

  std::size_t at(const std::string& intended, const std::string& predicted) const;
  bool is_diagonal() const;
  std::string to_text() const;
  std::string to_json() const;
};

// records are (intended, predicted) pairs; rows follow the candidate order.
ConfusionMatrix confusion_matrix(const std::vector<std::pair<std::string, std::string>>& records,
                                 const std::vector<std::string>& candidates);

}  // namespace ldp
