#include "ldp/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldp/rng.hpp"
#include "ldp/utf8.hpp"

namespace ldp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kTranslationSampleDefault = 200;
constexpr std::size_t kSummarizationSampleDefault = 100;
constexpr std::size_t kSummarizationDocCap = 1500;  // characters, exclusive

std::vector<std::string> default_metrics(Task task) {
  if (task == Task::Summarize) return {"rouge_l"};
  return {"chrf++", "bleu"};
}

std::string pair_key(const std::pair<std::string, std::string>& pair) {
  return pair.first + "-" + pair.second;
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["task"] = std::string(to_string(config.task));
  j["languages"] = config.languages;
  ordered_json pairs = ordered_json::array();
  for (const auto& pair : config.pairs) pairs.push_back({pair.first, pair.second});
  j["pairs"] = pairs;
  j["pivot"] = config.pivot;
  j["method"] = std::string(to_string(config.method));
  j["tag_style"] = std::string(to_string(config.tag_style));
  j["ldp_set"] = config.ldp_set;
  j["shots"] = config.shots;
  j["m_bt"] = config.m_bt;
  j["sample_size"] = config.effective_sample_size();
  j["seed"] = config.seed;
  j["metrics"] = config.metrics;
  j["test_sets"] = config.test_sets;
  j["exemplar_pools"] = config.exemplar_pools;
  j["unlabeled"] = config.unlabeled;
  j["ldp_seeds"] = config.ldp_seeds_path;
  j["sum_exemplar_pool"] = config.sum_exemplar_pool;
  j["xlt_template"] = config.xlt_template;
  j["max_tokens"] = config.effective_max_tokens();
  return j;
}

const std::string& require_path(const std::map<std::string, std::string>& paths, const std::string& key,
                                const std::string& what) {
  const auto it = paths.find(key);
  if (it == paths.end()) throw ConfigError("missing " + what + " for '" + key + "'");
  return it->second;
}

// Seed exemplars in the configured diverse-language order, one per language.
std::vector<Exemplar> ldp_seed_exemplars(const ExperimentConfig& config) {
  if (config.ldp_seeds_path.empty()) throw ConfigError("ldp_seeds path is required for this method");
  const std::vector<Exemplar> pool = read_exemplars(config.ldp_seeds_path);
  std::vector<Exemplar> seeds;
  for (const auto& lang : config.ldp_set) {
    const auto it = std::find_if(pool.begin(), pool.end(), [&](const Exemplar& e) {
      return e.src_lang == lang && e.tgt_lang == config.pivot;
    });
    if (it == pool.end()) {
      throw ConfigError("no " + lang + "->" + config.pivot + " seed exemplar in " + config.ldp_seeds_path);
    }
    seeds.push_back(*it);
  }
  return seeds;
}

std::vector<Exemplar> reverse_exemplars(std::vector<Exemplar> exemplars) {
  for (auto& exemplar : exemplars) {
    std::swap(exemplar.src_text, exemplar.tgt_text);
    std::swap(exemplar.src_lang, exemplar.tgt_lang);
  }
  return exemplars;
}

std::vector<Exemplar> supervised_exemplars(const ExperimentConfig& config, const std::string& key) {
  const std::string& path = require_path(config.exemplar_pools, key, "exemplar pool");
  const std::vector<Exemplar> pool = read_exemplars(path);
  if (pool.size() < static_cast<std::size_t>(config.shots)) {
    throw NotEnoughPairs("pool " + path + " has " + std::to_string(pool.size()) + " pairs, need " +
                         std::to_string(config.shots));
  }
  std::vector<Exemplar> out;
  for (std::size_t i : sample_indices(pool.size(), config.shots, config.seed)) out.push_back(pool[i]);
  return out;
}

std::vector<CorpusLine> load_filtered_corpus(const ExperimentConfig& config, const std::string& lang,
                                             const LanguageRegistry& registry) {
  const std::string& path = require_path(config.unlabeled, lang, "unlabeled corpus");
  const std::vector<CorpusLine> raw = read_corpus(path, lang);
  auto [kept, report] = filter_corpus(raw, registry.get(lang));
  if (kept.empty()) throw MissingCorpus("no usable lines in " + path + " after filtering");
  return std::move(kept);
}

std::vector<Exemplar> bt_exemplars(const ExperimentConfig& config, const std::string& lang,
                                   Direction direction, Engine& engine, const LanguageRegistry& registry) {
  const std::vector<CorpusLine> corpus = load_filtered_corpus(config, lang, registry);
  const std::vector<Exemplar> seeds = ldp_seed_exemplars(config);
  const std::vector<SyntheticPair> pairs =
      synthesize_x2e(corpus, seeds, engine, config.tag_style, registry, config.pivot);
  return build_intra_exemplars(pairs, direction, config.shots, config.seed, config.pivot);
}

std::vector<TestItem> sample_test_items(const ExperimentConfig& config, const std::string& key) {
  const std::string& path = require_path(config.test_sets, key, "test set");
  std::vector<TestItem> items = read_test_set(path);
  const std::size_t n = std::min(config.effective_sample_size(), items.size());
  std::vector<TestItem> sampled;
  sampled.reserve(n);
  for (std::size_t i : sample_indices(items.size(), n, config.seed)) sampled.push_back(items[i]);
  return sampled;
}

void score_language(LanguageResult& result, const ExperimentConfig& config) {
  if (result.records.empty()) {
    for (const auto& metric : config.metrics) {
      result.scores.push_back(MetricScore{metric, 0.0, metric == "rouge_l" ? 1.0 : 100.0, 0});
    }
    return;
  }
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  hyps.reserve(result.records.size());
  for (const auto& record : result.records) {
    hyps.push_back(record.hypothesis);
    refs.push_back(record.reference);
  }
  const Tokenizer bleu_tok = Tokenizer::bleu_default();
  const Tokenizer rouge_tok = Tokenizer::whitespace();
  for (const auto& metric : config.metrics) {
    if (metric == "chrf++") {
      MetricScore corpus = chrf_pp(hyps, refs);
      for (auto& record : result.records) {
        const double value = chrf_pp({record.hypothesis}, {record.reference}).value;
        record.segment_metrics.emplace_back("chrf++", value);
      }
      result.scores.push_back(corpus);
    } else if (metric == "bleu") {
      MetricScore corpus = bleu(hyps, refs, bleu_tok);
      for (auto& record : result.records) {
        const double value = bleu({record.hypothesis}, {record.reference}, bleu_tok).value;
        record.segment_metrics.emplace_back("bleu", value);
      }
      result.scores.push_back(corpus);
    } else if (metric == "rouge_l") {
      double sum = 0.0;
      for (auto& record : result.records) {
        const RougeScore rouge = rouge_l(record.hypothesis, record.reference, rouge_tok);
        record.segment_metrics.emplace_back("rouge_l", rouge.f);
        sum += rouge.f;
      }
      MetricScore corpus{"rouge_l", result.records.empty() ? 0.0 : sum / result.records.size(), 1.0,
                         result.records.size()};
      result.scores.push_back(corpus);
    } else {
      throw ConfigError("unknown metric: " + metric);
    }
  }
}

void generate_and_fill(LanguageResult& result, std::vector<GenerationRequest>& requests,
                       const std::vector<PromptText>& prompts, Engine& engine,
                       const ExperimentConfig& config) {
  for (std::size_t i = 0; i < requests.size(); ++i) {
    result.records[i].prompt_digest = cache_key(requests[i]);
    if (config.dry_run) result.records[i].prompt_text = prompts[i].text;
  }
  if (config.dry_run) return;
  const std::vector<GenerationResult> results = engine.generate_batch(requests);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EvalRecord& record = result.records[i];
    if (results[i].finish_reason == FinishReason::Error) {
      record.error = results[i].error.empty() ? "generation failed" : results[i].error;
      continue;
    }
    record.hypothesis = parse_translation(results[i].text, requests[i].stop);
  }
}

LanguageResult eval_translation_language(const ExperimentConfig& config, const std::string& lang,
                                         Engine& engine, const LanguageRegistry& registry) {
  LanguageResult result;
  result.key = lang;
  const std::vector<TestItem> items = sample_test_items(config, lang);

  std::vector<Exemplar> exemplars;
  const bool to_english = config.task == Task::X2E;
  switch (config.method) {
    case Method::Supervised:
      exemplars = supervised_exemplars(config, lang);
      break;
    case Method::Ldp:
      exemplars = to_english ? ldp_seed_exemplars(config) : reverse_exemplars(ldp_seed_exemplars(config));
      break;
    case Method::LdpBt:
      exemplars = bt_exemplars(config, lang, to_english ? Direction::X2E : Direction::E2X, engine, registry);
      break;
    case Method::ZeroShot:
      break;
    default:
      throw ConfigError("method not applicable to translation tasks");
  }

  std::vector<PromptText> prompts;
  std::vector<GenerationRequest> requests;
  prompts.reserve(items.size());
  requests.reserve(items.size());
  for (const auto& item : items) {
    PromptText prompt;
    if (to_english) {
      prompt = build_x2e_prompt(exemplars, item.source, lang, config.tag_style, registry, config.pivot);
    } else if (config.method == Method::Ldp && !exemplars.empty()) {
      // Mixed-target baseline: diverse exemplars reversed toward their own
      // languages, closed by the target label. Deliberately bypasses the
      // intra-lingual consistency check.
      prompt = build_pair_prompt(exemplars, item.source, config.pivot, lang, config.tag_style, registry);
    } else {
      prompt = build_e2x_prompt(exemplars, item.source, lang, config.tag_style, registry, config.pivot);
    }
    requests.push_back(engine.make_request(prompt, config.effective_max_tokens()));
    prompts.push_back(std::move(prompt));

    EvalRecord record;
    record.source = item.source;
    record.reference = item.reference;
    record.intended_lang = to_english ? config.pivot : lang;
    result.records.push_back(std::move(record));
  }

  generate_and_fill(result, requests, prompts, engine, config);
  score_language(result, config);
  return result;
}

LanguageResult eval_pivot_pair(const ExperimentConfig& config,
                               const std::pair<std::string, std::string>& langs, Engine& engine,
                               const LanguageRegistry& registry) {
  const auto& [src_lang, tgt_lang] = langs;
  LanguageResult result;
  result.key = pair_key(langs);
  const std::vector<TestItem> items = sample_test_items(config, result.key);

  if (config.method == Method::Supervised) {
    std::vector<Exemplar> exemplars = supervised_exemplars(config, result.key);
    std::vector<PromptText> prompts;
    std::vector<GenerationRequest> requests;
    for (const auto& item : items) {
      PromptText prompt =
          build_pair_prompt(exemplars, item.source, src_lang, tgt_lang, config.tag_style, registry);
      requests.push_back(engine.make_request(prompt, config.effective_max_tokens()));
      prompts.push_back(std::move(prompt));
      EvalRecord record;
      record.source = item.source;
      record.reference = item.reference;
      record.intended_lang = tgt_lang;
      result.records.push_back(std::move(record));
    }
    generate_and_fill(result, requests, prompts, engine, config);
    score_language(result, config);
    return result;
  }

  // Unsupervised pivot route: build triplets from source-side unlabeled text.
  const std::vector<CorpusLine> corpus_x = load_filtered_corpus(config, src_lang, registry);
  const std::vector<CorpusLine> corpus_y = load_filtered_corpus(config, tgt_lang, registry);
  const std::vector<Exemplar> seeds = ldp_seed_exemplars(config);
  const std::size_t base_count = std::min<std::size_t>(config.shots, corpus_x.size());
  const std::vector<CorpusLine> bases = sample_lines(corpus_x, base_count, config.seed);
  const std::size_t m_bt = config.method == Method::LdpBt ? config.m_bt : 0;
  TripletStats stats;
  const std::vector<PivotTriplet> triplets =
      synthesize_triplets(bases, corpus_y, seeds, engine, tgt_lang, m_bt, config.seed, config.tag_style,
                          registry, &stats, config.pivot);
  if (triplets.empty()) {
    throw NeedTriplets("triplet synthesis produced nothing for " + result.key + " (" +
                       std::to_string(stats.dropped) + " dropped)");
  }

  std::vector<PromptText> prompts;
  std::vector<GenerationRequest> requests;
  for (const auto& item : items) {
    PromptText prompt = build_pivot_prompt(triplets, item.source, src_lang, tgt_lang, registry, config.pivot);
    requests.push_back(engine.make_request(prompt, config.effective_max_tokens()));
    prompts.push_back(std::move(prompt));
    EvalRecord record;
    record.source = item.source;
    record.reference = item.reference;
    record.intended_lang = tgt_lang;
    result.records.push_back(std::move(record));
  }

  for (std::size_t i = 0; i < requests.size(); ++i) {
    result.records[i].prompt_digest = cache_key(requests[i]);
    if (config.dry_run) result.records[i].prompt_text = prompts[i].text;
  }
  if (!config.dry_run) {
    const std::vector<GenerationResult> results = engine.generate_batch(requests);
    for (std::size_t i = 0; i < results.size(); ++i) {
      EvalRecord& record = result.records[i];
      if (results[i].finish_reason == FinishReason::Error) {
        record.error = results[i].error.empty() ? "generation failed" : results[i].error;
        continue;
      }
      try {
        auto [en_text, y_text] = parse_pivot_completion(results[i].text, tgt_lang, registry);
        record.intermediate_en = en_text;
        record.hypothesis = y_text;
      } catch (const NoTargetSegment& e) {
        record.error = e.what();
      }
    }
  }
  score_language(result, config);
  return result;
}

LanguageResult eval_summarization_language(const ExperimentConfig& config, const std::string& lang,
                                           Engine& engine, const LanguageRegistry& registry) {
  LanguageResult result;
  result.key = lang;

  // Length cap applies before sampling.
  const std::string& path = require_path(config.test_sets, lang, "test set");
  std::vector<TestItem> pool;
  for (auto& item : read_test_set(path)) {
    if (count_codepoints(item.source) < kSummarizationDocCap) pool.push_back(std::move(item));
  }
  const std::size_t n = std::min(config.effective_sample_size(), pool.size());
  std::vector<TestItem> items;
  for (std::size_t i : sample_indices(pool.size(), n, config.seed)) items.push_back(pool[i]);

  std::vector<DocSumExemplar> exemplars;
  std::string parse_marker;
  if (config.method == Method::LdpSum) {
    if (config.sum_exemplar_pool.empty()) throw ConfigError("ldp_sum requires sum_exemplar_pool");
    exemplars = read_doc_sums(config.sum_exemplar_pool);
  } else if (config.method == Method::LdpSumUnlabeled) {
    const std::string& docs_path = require_path(config.unlabeled, lang, "unlabeled documents");
    std::vector<std::string> docs;
    for (const auto& line : read_corpus(docs_path, lang)) {
      if (count_codepoints(line.text) < kSummarizationDocCap) docs.push_back(line.text);
    }
    std::vector<DocSumExemplar> cross;
    if (!config.sum_exemplar_pool.empty()) cross = read_doc_sums(config.sum_exemplar_pool);
    const std::string xlt = config.xlt_template.empty() ? kXltSumTemplate : config.xlt_template;
    exemplars = synthesize_sum_exemplars(docs, cross, engine, 1, lang, registry, xlt);
    if (exemplars.empty()) throw NotEnoughPairs("could not synthesize an intra-lingual exemplar for " + lang);
  } else if (config.method == Method::Xlt) {
    parse_marker = kXltSumMarker;
  }

  std::vector<PromptText> prompts;
  std::vector<GenerationRequest> requests;
  for (const auto& item : items) {
    PromptText prompt;
    switch (config.method) {
      case Method::Xlt: {
        const std::string tmpl = config.xlt_template.empty() ? kXltSumTemplate : config.xlt_template;
        prompt = build_xlt_sum_prompt(item.source, lang, tmpl, registry);
        break;
      }
      case Method::LdpSum:
      case Method::LdpSumUnlabeled:
        prompt = build_sum_prompt(exemplars, item.source, lang, registry);
        break;
      case Method::ZeroShot:
        prompt = build_basic_sum_prompt(item.source, lang, registry);
        break;
      default:
        throw ConfigError("method not applicable to summarization");
    }
    requests.push_back(engine.make_request(prompt, config.effective_max_tokens()));
    prompts.push_back(std::move(prompt));
    EvalRecord record;
    record.source = item.source;
    record.reference = item.reference;
    record.intended_lang = lang;
    result.records.push_back(std::move(record));
  }

  for (std::size_t i = 0; i < requests.size(); ++i) {
    result.records[i].prompt_digest = cache_key(requests[i]);
    if (config.dry_run) result.records[i].prompt_text = prompts[i].text;
  }
  if (!config.dry_run) {
    const std::vector<GenerationResult> results = engine.generate_batch(requests);
    for (std::size_t i = 0; i < results.size(); ++i) {
      EvalRecord& record = result.records[i];
      if (results[i].finish_reason == FinishReason::Error) {
        record.error = results[i].error.empty() ? "generation failed" : results[i].error;
        continue;
      }
      record.hypothesis = parse_translation(results[i].text, requests[i].stop, parse_marker);
    }
  }
  score_language(result, config);
  return result;
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::X2E: return "x2e";
    case Task::E2X: return "e2x";
    case Task::X2Y: return "x2y";
    case Task::Summarize: return "summarize";
  }
  return "x2e";
}

Task task_from_string(std::string_view name) {
  if (name == "x2e") return Task::X2E;
  if (name == "e2x") return Task::E2X;
  if (name == "x2y") return Task::X2Y;
  if (name == "summarize") return Task::Summarize;
  throw ConfigError("unknown task: " + std::string(name));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Supervised: return "supervised";
    case Method::Ldp: return "ldp";
    case Method::LdpBt: return "ldp_bt";
    case Method::Xlt: return "xlt";
    case Method::LdpSum: return "ldp_sum";
    case Method::LdpSumUnlabeled: return "ldp_sum_unlabeled";
    case Method::ZeroShot: return "zero_shot";
  }
  return "ldp";
}

Method method_from_string(std::string_view name) {
  if (name == "supervised") return Method::Supervised;
  if (name == "ldp") return Method::Ldp;
  if (name == "ldp_bt") return Method::LdpBt;
  if (name == "xlt") return Method::Xlt;
  if (name == "ldp_sum") return Method::LdpSum;
  if (name == "ldp_sum_unlabeled") return Method::LdpSumUnlabeled;
  if (name == "zero_shot" || name == "basic") return Method::ZeroShot;
  throw ConfigError("unknown method: " + std::string(name));
}

std::size_t ExperimentConfig::effective_sample_size() const {
  if (sample_size > 0) return sample_size;
  return task == Task::Summarize ? kSummarizationSampleDefault : kTranslationSampleDefault;
}

int ExperimentConfig::effective_max_tokens() const {
  if (max_tokens > 0) return max_tokens;
  return task == Task::Summarize ? kSummarizationMaxTokens : kTranslationMaxTokens;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig config;
  config.task = task_from_string(j.at("task").get<std::string>());
  if (j.contains("languages")) config.languages = j.at("languages").get<std::vector<std::string>>();
  if (j.contains("pairs")) {
    for (const auto& pair : j.at("pairs")) {
      config.pairs.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
  }
  config.pivot = j.value("pivot", "en");
  config.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("tag_style")) config.tag_style = tag_style_from_string(j.at("tag_style").get<std::string>());
  if (j.contains("ldp_set")) config.ldp_set = j.at("ldp_set").get<std::vector<std::string>>();
  config.shots = j.value("shots", 8);
  config.m_bt = j.value("m_bt", 8);
  config.sample_size = j.value("sample_size", 0);
  config.seed = j.value("seed", 0);
  config.backend_path = j.value("backend", "");
  if (j.contains("metrics")) config.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (config.metrics.empty()) config.metrics = default_metrics(config.task);
  if (j.contains("test_sets")) config.test_sets = j.at("test_sets").get<std::map<std::string, std::string>>();
  if (j.contains("exemplar_pools")) {
    config.exemplar_pools = j.at("exemplar_pools").get<std::map<std::string, std::string>>();
  }
  if (j.contains("unlabeled")) config.unlabeled = j.at("unlabeled").get<std::map<std::string, std::string>>();
  config.ldp_seeds_path = j.value("ldp_seeds", "");
  config.sum_exemplar_pool = j.value("sum_exemplar_pool", "");
  config.xlt_template = j.value("xlt_template", "");
  config.registry_file = j.value("registry_file", "");
  config.output_dir = j.value("output_dir", "");
  config.emit_judge_prompts = j.value("emit_judge_prompts", false);
  config.max_tokens = j.value("max_tokens", 0);
  validate_config(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

void validate_config(const ExperimentConfig& config) {
  if (config.task == Task::X2Y) {
    if (config.pairs.empty()) throw ConfigError("x2y task requires 'pairs'");
  } else if (config.languages.empty()) {
    throw ConfigError("config requires 'languages'");
  }
  if (config.shots < 0) throw ConfigError("shots must be non-negative");

  const bool translation = config.task != Task::Summarize;
  if (translation) {
    switch (config.method) {
      case Method::Supervised: {
        if (config.task == Task::X2Y) {
          for (const auto& pair : config.pairs) require_path(config.exemplar_pools, pair_key(pair), "exemplar pool");
        } else {
          for (const auto& lang : config.languages) require_path(config.exemplar_pools, lang, "exemplar pool");
        }
        break;
      }
      case Method::Ldp:
        if (config.ldp_seeds_path.empty()) throw ConfigError("ldp method requires 'ldp_seeds'");
        if (config.task == Task::X2Y) {
          for (const auto& pair : config.pairs) {
            require_path(config.unlabeled, pair.first, "unlabeled corpus");
            require_path(config.unlabeled, pair.second, "unlabeled corpus");
          }
        }
        break;
      case Method::LdpBt:
        if (config.ldp_seeds_path.empty()) throw ConfigError("ldp_bt method requires 'ldp_seeds'");
        if (config.task == Task::X2Y) {
          for (const auto& pair : config.pairs) {
            require_path(config.unlabeled, pair.first, "unlabeled corpus");
            require_path(config.unlabeled, pair.second, "unlabeled corpus");
          }
        } else {
          for (const auto& lang : config.languages) require_path(config.unlabeled, lang, "unlabeled corpus");
        }
        break;
      case Method::ZeroShot:
        break;
      default:
        throw ConfigError("method '" + std::string(to_string(config.method)) +
                          "' is not a translation method");
    }
  } else {
    switch (config.method) {
      case Method::Xlt:
      case Method::ZeroShot:
        break;
      case Method::LdpSum:
        if (config.sum_exemplar_pool.empty()) throw ConfigError("ldp_sum requires 'sum_exemplar_pool'");
        break;
      case Method::LdpSumUnlabeled:
        for (const auto& lang : config.languages) require_path(config.unlabeled, lang, "unlabeled documents");
        break;
      default:
        throw ConfigError("method '" + std::string(to_string(config.method)) +
                          "' is not a summarization method");
    }
  }
  if (!config.xlt_template.empty()) {
    if (config.xlt_template.find("{language}") == std::string::npos ||
        config.xlt_template.find("{document}") == std::string::npos) {
      throw ConfigError("xlt_template must contain {language} and {document}");
    }
  }
}

std::string config_digest(const ExperimentConfig& config) {
  return sha256_hex(config_to_json(config).dump());
}

std::vector<TestItem> read_test_set(const std::string& path_spec) {
  const std::size_t comma = path_spec.find(',');
  std::vector<TestItem> items;
  if (comma != std::string::npos) {
    std::ifstream src(path_spec.substr(0, comma));
    std::ifstream ref(path_spec.substr(comma + 1));
    if (!src || !ref) throw Error("cannot open paired test files: " + path_spec);
    std::string src_line;
    std::string ref_line;
    while (std::getline(src, src_line)) {
      if (!std::getline(ref, ref_line)) throw Misaligned("paired test files differ in length: " + path_spec);
      if (!src_line.empty() && src_line.back() == '\r') src_line.pop_back();
      if (!ref_line.empty() && ref_line.back() == '\r') ref_line.pop_back();
      items.push_back(TestItem{src_line, ref_line});
    }
    if (std::getline(ref, ref_line)) throw Misaligned("paired test files differ in length: " + path_spec);
    return items;
  }
  std::ifstream in(path_spec);
  if (!in) throw Error("cannot open test set: " + path_spec);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const json j = json::parse(line);
    items.push_back(TestItem{j.at("source").get<std::string>(), j.at("reference").get<std::string>()});
  }
  return items;
}

std::string record_to_json(const EvalRecord& record) {
  ordered_json j;
  j["source"] = record.source;
  j["reference"] = record.reference;
  j["hypothesis"] = record.hypothesis;
  if (record.intermediate_en) j["intermediate_en"] = *record.intermediate_en;
  j["intended_lang"] = record.intended_lang;
  if (record.predicted_lang) j["predicted_lang"] = *record.predicted_lang;
  ordered_json metrics = ordered_json::object();
  for (const auto& [name, value] : record.segment_metrics) metrics[name] = value;
  j["metrics"] = metrics;
  j["prompt_digest"] = record.prompt_digest;
  if (!record.error.empty()) j["error"] = record.error;
  return j.dump();
}

EvalRun run_translation_eval(const ExperimentConfig& config, Engine& engine,
                             const LanguageRegistry& registry) {
  if (config.task == Task::Summarize) throw ConfigError("run_translation_eval called with a summarize task");
  validate_config(config);
  EvalRun run;
  run.config = config;
  if (config.task == Task::X2Y) {
    for (const auto& pair : config.pairs) {
      run.languages.push_back(eval_pivot_pair(config, pair, engine, registry));
    }
  } else {
    for (const auto& lang : config.languages) {
      run.languages.push_back(eval_translation_language(config, lang, engine, registry));
    }
  }
  return run;
}

EvalRun run_summarization_eval(const ExperimentConfig& config, Engine& engine,
                               const LanguageRegistry& registry) {
  if (config.task != Task::Summarize) throw ConfigError("run_summarization_eval requires a summarize task");
  validate_config(config);
  EvalRun run;
  run.config = config;
  for (const auto& lang : config.languages) {
    run.languages.push_back(eval_summarization_language(config, lang, engine, registry));
  }
  return run;
}

ConfusionMatrix language_confusion_analysis(EvalRun& run, const LidModel& model) {
  std::vector<std::pair<std::string, std::string>> observations;
  for (auto& language : run.languages) {
    for (auto& record : language.records) {
      std::string predicted;
      if (record.hypothesis.empty()) {
        predicted = kLidOther;
      } else {
        try {
          predicted = lid_classify(record.hypothesis, model);
        } catch (const EmptyText&) {
          predicted = kLidOther;
        }
      }
      record.predicted_lang = predicted;
      observations.emplace_back(record.intended_lang, predicted);
    }
  }
  return confusion_matrix(observations, model.candidates());
}

Report report(const EvalRun& run) {
  ordered_json j;
  j["task"] = std::string(to_string(run.config.task));
  j["method"] = std::string(to_string(run.config.method));
  j["backend"] = run.config.backend_path;
  j["seed"] = run.config.seed;
  j["tag_style"] = std::string(to_string(run.config.tag_style));
  j["config_digest"] = config_digest(run.config);

  std::vector<std::string> metric_names = run.config.metrics;
  ordered_json languages = ordered_json::object();
  std::map<std::string, double> sums;
  std::size_t total_segments = 0;
  for (const auto& language : run.languages) {
    ordered_json entry = ordered_json::object();
    for (const auto& score : language.scores) {
      entry[score.name] = score.value;
      sums[score.name] += score.value;
    }
    entry["segments"] = language.records.size();
    total_segments += language.records.size();
    languages[language.key] = entry;
  }
  j["languages"] = languages;
  ordered_json average = ordered_json::object();
  for (const auto& name : metric_names) {
    average[name] = run.languages.empty() ? 0.0 : sums[name] / static_cast<double>(run.languages.size());
  }
  j["average"] = average;
  j["segments"] = total_segments;
  if (total_segments == 0) j["empty"] = true;

  // Aligned plain-text table.
  std::ostringstream text;
  text << "task=" << to_string(run.config.task) << " method=" << to_string(run.config.method)
       << " seed=" << run.config.seed << " digest=" << config_digest(run.config).substr(0, 12) << "\n";
  std::size_t key_width = 8;
  for (const auto& language : run.languages) key_width = std::max(key_width, language.key.size());
  text << std::string(key_width - 4, ' ') << "lang";
  for (const auto& name : metric_names) {
    text << ' ' << std::string(name.size() < 10 ? 10 - name.size() : 0, ' ') << name;
  }
  text << "   segments\n";
  auto format_value = [](double value) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << value;
    return out.str();
  };
  for (const auto& language : run.languages) {
    text << std::string(key_width - language.key.size(), ' ') << language.key;
    for (const auto& name : metric_names) {
      std::string cell = "-";
      for (const auto& score : language.scores) {
        if (score.name == name) cell = format_value(score.value);
      }
      text << ' ' << std::string(cell.size() < 10 ? 10 - cell.size() : 0, ' ') << cell;
    }
    text << "   " << language.records.size() << "\n";
  }
  text << std::string(key_width - 7 > 0 ? key_width - 7 : 0, ' ') << "average";
  for (const auto& name : metric_names) {
    const double value =
        run.languages.empty() ? 0.0 : sums[name] / static_cast<double>(run.languages.size());
    const std::string cell = format_value(value);
    text << ' ' << std::string(cell.size() < 10 ? 10 - cell.size() : 0, ' ') << cell;
  }
  text << "   " << total_segments << "\n";

  return Report{j.dump(2), text.str()};
}

void write_outputs(const EvalRun& run, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& language : run.languages) {
    std::ofstream records(out_dir / ("records-" + language.key + ".jsonl"));
    for (const auto& record : language.records) records << record_to_json(record) << '\n';
    if (run.config.dry_run) {
      std::ofstream prompts(out_dir / ("prompts-" + language.key + ".txt"));
      for (std::size_t i = 0; i < language.records.size(); ++i) {
        prompts << "=== prompt " << i << " ===\n" << language.records[i].prompt_text << "\n";
      }
    }
  }
  const Report rep = report(run);
  std::ofstream json_out(out_dir / "report.json");
  json_out << rep.json << '\n';
  std::ofstream text_out(out_dir / "report.txt");
  text_out << rep.text;
}

}  // namespace ldp
