#include "ldp/synthesis.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ldp/rng.hpp"

namespace ldp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string first_line(const std::string& text) {
  const std::size_t at = text.find('\n');
  return at == std::string::npos ? text : text.substr(0, at);
}

}  // namespace

std::string_view to_string(Direction direction) {
  return direction == Direction::X2E ? "x2e" : "e2x";
}

Direction direction_from_string(std::string_view name) {
  if (name == "x2e") return Direction::X2E;
  if (name == "e2x") return Direction::E2X;
  throw Error("unknown direction: " + std::string(name));
}

std::vector<SyntheticPair> synthesize_x2e(const std::vector<CorpusLine>& corpus,
                                          const std::vector<Exemplar>& seeds, Engine& engine, TagStyle style,
                                          const LanguageRegistry& registry, const std::string& pivot) {
  std::vector<GenerationRequest> requests;
  requests.reserve(corpus.size());
  for (const auto& line : corpus) {
    const PromptText prompt = build_x2e_prompt(seeds, line.text, line.lang, style, registry, pivot);
    requests.push_back(engine.make_request(prompt, kTranslationMaxTokens));
  }
  const std::vector<GenerationResult> results = engine.generate_batch(requests);

  std::vector<SyntheticPair> pairs;
  pairs.reserve(corpus.size());
  const std::string generator = engine.backend_id() + "/" + engine.model_id();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    SyntheticPair pair;
    pair.x_text = corpus[i].text;
    pair.x_lang = corpus[i].lang;
    pair.generator = generator;
    pair.prompt_digest = cache_key(requests[i]);
    if (results[i].finish_reason == FinishReason::Error) {
      pair.flagged = true;
      pair.error = results[i].error.empty() ? "generation failed" : results[i].error;
    } else {
      pair.en_text = parse_translation(results[i].text, requests[i].stop);
      if (pair.en_text.empty()) {
        pair.flagged = true;
        pair.error = "empty completion";
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<Exemplar> build_intra_exemplars(const std::vector<SyntheticPair>& pairs, Direction direction,
                                            std::size_t m, std::uint64_t seed, const std::string& pivot) {
  std::vector<const SyntheticPair*> usable;
  usable.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (!pair.flagged) usable.push_back(&pair);
  }
  if (m > usable.size()) {
    throw NotEnoughPairs("need " + std::to_string(m) + " pairs, have " + std::to_string(usable.size()) +
                         " usable");
  }
  std::vector<Exemplar> exemplars;
  exemplars.reserve(m);
  for (std::size_t i : sample_indices(usable.size(), m, seed)) {
    const SyntheticPair& pair = *usable[i];
    Exemplar exemplar;
    exemplar.provenance = Provenance::SyntheticBt;
    if (direction == Direction::E2X) {
      exemplar.src_text = pair.en_text;
      exemplar.tgt_text = pair.x_text;
      exemplar.src_lang = pivot;
      exemplar.tgt_lang = pair.x_lang;
    } else {
      exemplar.src_text = pair.x_text;
      exemplar.tgt_text = pair.en_text;
      exemplar.src_lang = pair.x_lang;
      exemplar.tgt_lang = pivot;
    }
    exemplars.push_back(std::move(exemplar));
  }
  return exemplars;
}

std::vector<PivotTriplet> synthesize_triplets(const std::vector<CorpusLine>& corpus_x,
                                              const std::vector<CorpusLine>& corpus_y,
                                              const std::vector<Exemplar>& seeds, Engine& engine,
                                              const std::string& tgt_lang, std::size_t m_bt,
                                              std::uint64_t seed, TagStyle style,
                                              const LanguageRegistry& registry, TripletStats* stats,
                                              const std::string& pivot) {
  if (corpus_x.empty()) throw MissingCorpus("synthesize_triplets: source corpus is empty");
  if (corpus_y.empty()) throw MissingCorpus("synthesize_triplets: no corpus for target " + tgt_lang);

  // Intra-lingual BT pools for both hops; m_bt = 0 keeps the hops zero-shot.
  std::vector<Exemplar> x2e_exemplars;
  std::vector<Exemplar> e2y_exemplars;
  if (m_bt > 0) {
    const auto pairs_x = synthesize_x2e(corpus_x, seeds, engine, style, registry, pivot);
    x2e_exemplars = build_intra_exemplars(pairs_x, Direction::X2E, m_bt, seed, pivot);
    const auto pairs_y = synthesize_x2e(corpus_y, seeds, engine, style, registry, pivot);
    e2y_exemplars = build_intra_exemplars(pairs_y, Direction::E2X, m_bt, seed, pivot);
  }

  std::vector<GenerationRequest> bt_requests;
  bt_requests.reserve(corpus_x.size());
  for (const auto& line : corpus_x) {
    const PromptText prompt = build_x2e_prompt(x2e_exemplars, line.text, line.lang, style, registry, pivot);
    bt_requests.push_back(engine.make_request(prompt, kTranslationMaxTokens));
  }
  const std::vector<GenerationResult> bt_results = engine.generate_batch(bt_requests);

  struct Hop {
    std::size_t corpus_index;
    std::string en_text;
  };
  std::vector<Hop> hops;
  auto drop = [&](const std::string& reason) {
    if (stats != nullptr) {
      ++stats->dropped;
      stats->reasons.push_back(reason);
    }
  };
  for (std::size_t i = 0; i < corpus_x.size(); ++i) {
    if (bt_results[i].finish_reason == FinishReason::Error) {
      drop("x2e generation failed for line " + std::to_string(i));
      continue;
    }
    const std::string en = parse_translation(bt_results[i].text, bt_requests[i].stop);
    if (en.empty()) {
      drop("empty x2e completion for line " + std::to_string(i));
      continue;
    }
    hops.push_back({i, en});
  }

  std::vector<GenerationRequest> fwd_requests;
  fwd_requests.reserve(hops.size());
  for (const auto& hop : hops) {
    const PromptText prompt = build_e2x_prompt(e2y_exemplars, hop.en_text, tgt_lang, style, registry, pivot);
    fwd_requests.push_back(engine.make_request(prompt, kTranslationMaxTokens));
  }
  const std::vector<GenerationResult> fwd_results = engine.generate_batch(fwd_requests);

  std::vector<PivotTriplet> triplets;
  triplets.reserve(hops.size());
  for (std::size_t k = 0; k < hops.size(); ++k) {
    if (fwd_results[k].finish_reason == FinishReason::Error) {
      drop("e2x generation failed for line " + std::to_string(hops[k].corpus_index));
      continue;
    }
    const std::string y = parse_translation(fwd_results[k].text, fwd_requests[k].stop);
    if (y.empty()) {
      drop("empty e2x completion for line " + std::to_string(hops[k].corpus_index));
      continue;
    }
    const CorpusLine& line = corpus_x[hops[k].corpus_index];
    triplets.push_back(PivotTriplet{line.text, hops[k].en_text, y, line.lang, tgt_lang});
  }
  return triplets;
}

std::vector<DocSumExemplar> synthesize_sum_exemplars(const std::vector<std::string>& docs,
                                                     const std::vector<DocSumExemplar>& cross_exemplars,
                                                     Engine& engine, std::size_t m, const std::string& lang,
                                                     const LanguageRegistry& registry,
                                                     const std::string& xlt_template) {
  const std::size_t count = std::min(m, docs.size());
  std::vector<GenerationRequest> requests;
  requests.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const PromptText prompt = cross_exemplars.empty()
                                  ? build_xlt_sum_prompt(docs[i], lang, xlt_template, registry)
                                  : build_sum_prompt(cross_exemplars, docs[i], lang, registry);
    requests.push_back(engine.make_request(prompt, kSummarizationMaxTokens));
  }
  const std::vector<GenerationResult> results = engine.generate_batch(requests);

  std::vector<DocSumExemplar> exemplars;
  exemplars.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (results[i].finish_reason == FinishReason::Error) continue;
    const std::string marker = cross_exemplars.empty() ? kXltSumMarker : "";
    std::string summary = parse_translation(results[i].text, requests[i].stop, marker);
    summary = first_line(summary);
    if (summary.empty()) continue;
    exemplars.push_back(DocSumExemplar{docs[i], summary, lang});
  }
  return exemplars;
}

std::vector<FinetuneRecord> export_finetune(const std::vector<SyntheticPair>& pairs,
                                            const std::set<Direction>& directions,
                                            const LanguageRegistry& registry, const std::string& pivot) {
  std::vector<FinetuneRecord> records;
  for (const auto& pair : pairs) {
    if (pair.flagged) continue;
    for (const Direction direction : directions) {
      const bool to_x = direction == Direction::E2X;
      const std::string& input = to_x ? pair.en_text : pair.x_text;
      const std::string& output = to_x ? pair.x_text : pair.en_text;
      const std::string tag = to_x ? registry.get(pair.x_lang).english_name : registry.get(pivot).english_name;
      FinetuneRecord record;
      record.text = input + "\n<" + tag + ">\n" + output;
      record.loss_start = record.text.size() - output.size();
      record.loss_end = record.text.size();
      record.x_lang = pair.x_lang;
      record.direction = direction;
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::string pair_to_json(const SyntheticPair& pair) {
  ordered_json j{{"x_text", pair.x_text},       {"en_text", pair.en_text},
                 {"x_lang", pair.x_lang},       {"direction_of_generation", "x2e"},
                 {"generator", pair.generator}, {"prompt_digest", pair.prompt_digest},
                 {"flagged", pair.flagged}};
  if (pair.flagged) j["error"] = pair.error;
  return j.dump();
}

SyntheticPair pair_from_json(const std::string& line) {
  const json j = json::parse(line);
  SyntheticPair pair;
  pair.x_text = j.at("x_text").get<std::string>();
  pair.en_text = j.value("en_text", "");
  pair.x_lang = j.at("x_lang").get<std::string>();
  pair.generator = j.value("generator", "");
  pair.prompt_digest = j.value("prompt_digest", "");
  pair.flagged = j.value("flagged", false);
  pair.error = j.value("error", "");
  return pair;
}

std::string finetune_to_json(const FinetuneRecord& record) {
  ordered_json j{{"text", record.text},
                 {"loss_start", record.loss_start},
                 {"loss_end", record.loss_end},
                 {"x_lang", record.x_lang},
                 {"direction", std::string(to_string(record.direction))}};
  return j.dump();
}

std::string exemplar_to_json(const Exemplar& exemplar) {
  ordered_json j{{"src_text", exemplar.src_text},
                 {"tgt_text", exemplar.tgt_text},
                 {"src_lang", exemplar.src_lang},
                 {"tgt_lang", exemplar.tgt_lang},
                 {"provenance", std::string(to_string(exemplar.provenance))}};
  return j.dump();
}

Exemplar exemplar_from_json(const std::string& line) {
  const json j = json::parse(line);
  Exemplar exemplar;
  exemplar.src_text = j.at("src_text").get<std::string>();
  exemplar.tgt_text = j.at("tgt_text").get<std::string>();
  exemplar.src_lang = j.at("src_lang").get<std::string>();
  exemplar.tgt_lang = j.at("tgt_lang").get<std::string>();
  exemplar.provenance = provenance_from_string(j.value("provenance", "supervised"));
  return exemplar;
}

std::string triplet_to_json(const PivotTriplet& triplet) {
  ordered_json j{{"x_text", triplet.x_text}, {"en_text", triplet.en_text}, {"y_text", triplet.y_text},
                 {"x_lang", triplet.x_lang}, {"y_lang", triplet.y_lang}};
  return j.dump();
}

PivotTriplet triplet_from_json(const std::string& line) {
  const json j = json::parse(line);
  PivotTriplet triplet;
  triplet.x_text = j.at("x_text").get<std::string>();
  triplet.en_text = j.at("en_text").get<std::string>();
  triplet.y_text = j.at("y_text").get<std::string>();
  triplet.x_lang = j.at("x_lang").get<std::string>();
  triplet.y_lang = j.at("y_lang").get<std::string>();
  return triplet;
}

std::string doc_sum_to_json(const DocSumExemplar& exemplar) {
  ordered_json j{{"doc", exemplar.doc}, {"summary", exemplar.summary}, {"lang", exemplar.lang}};
  return j.dump();
}

DocSumExemplar doc_sum_from_json(const std::string& line) {
  const json j = json::parse(line);
  DocSumExemplar exemplar;
  exemplar.doc = j.at("doc").get<std::string>();
  exemplar.summary = j.at("summary").get<std::string>();
  exemplar.lang = j.at("lang").get<std::string>();
  return exemplar;
}

namespace {

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path, T (*parse)(const std::string&)) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::vector<T> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse(line));
  }
  return out;
}

}  // namespace

std::vector<Exemplar> read_exemplars(const std::filesystem::path& path) {
  return read_jsonl(path, exemplar_from_json);
}

std::vector<SyntheticPair> read_pairs(const std::filesystem::path& path) {
  return read_jsonl(path, pair_from_json);
}

std::vector<DocSumExemplar> read_doc_sums(const std::filesystem::path& path) {
  return read_jsonl(path, doc_sum_from_json);
}

std::vector<PivotTriplet> read_triplets(const std::filesystem::path& path) {
  return read_jsonl(path, triplet_from_json);
}

}  // namespace ldp
