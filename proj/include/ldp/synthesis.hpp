#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/corpus.hpp"
#include "ldp/prompt.hpp"

namespace ldp {

inline constexpr int kTranslationMaxTokens = 256;
inline constexpr int kSummarizationMaxTokens = 400;

// A back-translated sentence pair. x_text is verbatim from the source
// corpus; en_text is the parsed completion. Pairs whose completion was empty
// or failed are flagged and excluded from exemplar pools downstream.
struct SyntheticPair {
  std::string x_text;
  std::string en_text;
  std::string x_lang;
  std::string generator;      // backend_id/model_id
  std::string prompt_digest;  // cache key of the generating request
  bool flagged = false;
  std::string error;
};

enum class Direction { X2E, E2X };

std::string_view to_string(Direction direction);
Direction direction_from_string(std::string_view name);

// A rendered fine-tuning sample. The loss span [loss_start, loss_end) covers
// exactly the bytes of the output side.
struct FinetuneRecord {
  std::string text;
  std::size_t loss_start = 0;
  std::size_t loss_end = 0;
  std::string x_lang;
  Direction direction = Direction::E2X;
};

// Back-translates every corpus line into the pivot language with the given
// seed exemplars. Order is preserved; failed items come back flagged.
std::vector<SyntheticPair> synthesize_x2e(const std::vector<CorpusLine>& corpus,
                                          const std::vector<Exemplar>& seeds, Engine& engine, TagStyle style,
                                          const LanguageRegistry& registry, const std::string& pivot = "en");

// Deterministically samples m usable pairs and orients them: E2X exemplars
// run en -> x, X2E the reverse. Provenance is synthetic_bt.
std::vector<Exemplar> build_intra_exemplars(const std::vector<SyntheticPair>& pairs, Direction direction,
                                            std::size_t m, std::uint64_t seed, const std::string& pivot = "en");

struct TripletStats {
  std::size_t dropped = 0;
  std::vector<std::string> reasons;
};

// Builds [x, en, y] pivot triplets from source-side unlabeled text: each line
// is back-translated to the pivot with intra-lingual X->En exemplars, then
// forward-translated with intra-lingual En->Y exemplars. m_bt = 0 runs both
// hops zero-shot. Failed lines are dropped and counted.
std::vector<PivotTriplet> synthesize_triplets(const std::vector<CorpusLine>& corpus_x,
                                              const std::vector<CorpusLine>& corpus_y,
                                              const std::vector<Exemplar>& seeds, Engine& engine,
                                              const std::string& tgt_lang, std::size_t m_bt,
                                              std::uint64_t seed, TagStyle style,
                                              const LanguageRegistry& registry,
                                              TripletStats* stats = nullptr, const std::string& pivot = "en");

// Summarizes the first m documents to produce intra-lingual exemplars. When
// cross-lingual exemplars are supplied the summaries come from the diverse
// exemplar prompt; otherwise the English-pivoting instruction prompt is
// used. Summaries truncate at the first line break.
std::vector<DocSumExemplar> synthesize_sum_exemplars(const std::vector<std::string>& docs,
                                                     const std::vector<DocSumExemplar>& cross_exemplars,
                                                     Engine& engine, std::size_t m, const std::string& lang,
                                                     const LanguageRegistry& registry,
                                                     const std::string& xlt_template = kXltSumTemplate);

// Renders "{input}\n<{tag}>\n{output}" fine-tune samples for each requested
// direction, in X2E-then-E2X order; flagged pairs are skipped.
std::vector<FinetuneRecord> export_finetune(const std::vector<SyntheticPair>& pairs,
                                            const std::set<Direction>& directions,
                                            const LanguageRegistry& registry, const std::string& pivot = "en");

// JSONL serialization for pipeline artifacts.
std::string pair_to_json(const SyntheticPair& pair);
SyntheticPair pair_from_json(const std::string& line);
std::string finetune_to_json(const FinetuneRecord& record);
std::string exemplar_to_json(const Exemplar& exemplar);
Exemplar exemplar_from_json(const std::string& line);
std::string triplet_to_json(const PivotTriplet& triplet);
PivotTriplet triplet_from_json(const std::string& line);
std::string doc_sum_to_json(const DocSumExemplar& exemplar);
DocSumExemplar doc_sum_from_json(const std::string& line);

std::vector<Exemplar> read_exemplars(const std::filesystem::path& path);
std::vector<SyntheticPair> read_pairs(const std::filesystem::path& path);
std::vector<DocSumExemplar> read_doc_sums(const std::filesystem::path& path);
std::vector<PivotTriplet> read_triplets(const std::filesystem::path& path);

}  // namespace ldp
