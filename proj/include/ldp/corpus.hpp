#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldp/lang.hpp"

namespace ldp {

struct CorpusLine {
  std::string text;  // never contains line breaks
  std::string lang;
  std::string source_id;
  std::size_t line_no = 0;
};

enum class RejectReason { TooShort, TooLong, Artifact, ForeignCharRatio };

std::string_view to_string(RejectReason reason);

struct FilterReport {
  std::map<RejectReason, std::size_t> rejected;
  std::size_t accepted = 0;
  std::size_t total = 0;

  std::size_t rejected_total() const;
};

// Filter thresholds. Character counts are Unicode scalar values.
inline constexpr std::size_t kMinChars = 20;    // inclusive
inline constexpr std::size_t kMaxChars = 200;   // inclusive
inline constexpr double kMaxDigitRatio = 0.15;  // strictly more rejects
inline constexpr double kMaxForeignRatio = 0.20;

// Applies the cleaning rules in order length -> artifact -> foreign-script
// ratio and reports the first violation; nullopt means accept. Foreign
// scripts are {Latin} for non-Latin-script languages and every non-Latin
// script for Latin-script languages.
std::optional<RejectReason> filter_line(const CorpusLine& line, const LanguageSpec& spec);

std::pair<std::vector<CorpusLine>, FilterReport> filter_corpus(const std::vector<CorpusLine>& lines,
                                                               const LanguageSpec& spec);

// n lines chosen without replacement by a seeded pseudo-random permutation
// (xoshiro256**, splitmix64-seeded); output keeps the original relative
// order. Throws NotEnoughLines when n exceeds the input size.
std::vector<CorpusLine> sample_lines(const std::vector<CorpusLine>& lines, std::size_t n, std::uint64_t seed);

struct MixtureWeights {
  struct Entry {
    std::string lang;
    std::uint64_t size = 0;
    double probability = 0.0;
  };
  std::vector<Entry> entries;
  double temperature = 1.0;
};

// p_i = (n_i/N)^(1/T) / sum_j (n_j/N)^(1/T). T = 1 returns the raw
// proportions without renormalization.
MixtureWeights mixture_weights(const std::vector<std::pair<std::string, std::uint64_t>>& sizes, double temperature);

// Draws n lines. The language of each draw comes from seeded sampling over
// the weights; within a language, lines are consumed in seeded-shuffle order
// and reshuffled after exhaustion (upsampling). Deterministic for fixed
// inputs.
std::vector<CorpusLine> draw_mixture(const MixtureWeights& weights,
                                     const std::map<std::string, std::vector<CorpusLine>>& corpora,
                                     std::size_t n, std::uint64_t seed);

// Corpus ingestion: UTF-8 plain text (one sentence per line) or JSONL
// records {text, lang, source_id}. Plain-text lines take lang/source_id from
// the arguments.
std::vector<CorpusLine> read_corpus(const std::filesystem::path& path, const std::string& lang,
                                    const std::string& source_id = "");
void write_corpus_text(const std::filesystem::path& path, const std::vector<CorpusLine>& lines);
void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<CorpusLine>& lines);

std::string report_to_json(const FilterReport& report);

}  // namespace ldp
