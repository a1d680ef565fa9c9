#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/corpus.hpp"
#include "ldp/metrics.hpp"
#include "ldp/prompt.hpp"
#include "ldp/synthesis.hpp"

namespace ldp {

enum class Task { X2E, E2X, X2Y, Summarize };
enum class Method { Supervised, Ldp, LdpBt, Xlt, LdpSum, LdpSumUnlabeled, ZeroShot };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);
std::string_view to_string(Method method);
Method method_from_string(std::string_view name);  // accepts "basic" as zero_shot

struct ExperimentConfig {
  Task task = Task::X2E;
  std::vector<std::string> languages;                            // x2e / e2x / summarize
  std::vector<std::pair<std::string, std::string>> pairs;        // x2y
  std::string pivot = "en";
  Method method = Method::Ldp;
  TagStyle tag_style = TagStyle::NoTag;
  std::vector<std::string> ldp_set = {"ar", "zh", "vi", "fr"};
  int shots = 8;
  std::size_t m_bt = 8;
  std::size_t sample_size = 0;  // 0 = task default (200 translation, 100 summarization)
  std::uint64_t seed = 0;
  std::string backend_path;  // backend config file
  std::vector<std::string> metrics;  // default: chrf++, bleu (rouge_l for summarize)
  std::map<std::string, std::string> test_sets;        // lang (or "x-y") -> path
  std::map<std::string, std::string> exemplar_pools;   // supervised pools
  std::map<std::string, std::string> unlabeled;        // monolingual corpora
  std::string ldp_seeds_path;
  std::string sum_exemplar_pool;
  std::string xlt_template;  // empty = built-in default
  std::string registry_file;
  std::string output_dir;
  bool emit_judge_prompts = false;
  int max_tokens = 0;  // 0 = task default
  bool dry_run = false;

  std::size_t effective_sample_size() const;
  int effective_max_tokens() const;
};

// Parses and validates a config file; method-specific requirements (pools,
// corpora, seeds) are checked up front. CLI overrides are applied afterward.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);
void validate_config(const ExperimentConfig& config);

std::string config_digest(const ExperimentConfig& config);

struct TestItem {
  std::string source;
  std::string reference;
};

// {source, reference} JSONL, or paired plain-text files via "src.txt,ref.txt".
std::vector<TestItem> read_test_set(const std::string& path_spec);

struct EvalRecord {
  std::string source;
  std::string reference;
  std::string hypothesis;
  std::optional<std::string> intermediate_en;
  std::string intended_lang;
  std::optional<std::string> predicted_lang;
  std::vector<std::pair<std::string, double>> segment_metrics;
  std::string prompt_digest;
  std::string prompt_text;  // kept only in dry runs
  std::string error;
};

std::string record_to_json(const EvalRecord& record);

struct LanguageResult {
  std::string key;  // language code, or "x-y" for pivot pairs
  std::vector<EvalRecord> records;
  std::vector<MetricScore> scores;
};

struct EvalRun {
  ExperimentConfig config;
  std::vector<LanguageResult> languages;
};

EvalRun run_translation_eval(const ExperimentConfig& config, Engine& engine, const LanguageRegistry& registry);
EvalRun run_summarization_eval(const ExperimentConfig& config, Engine& engine,
                               const LanguageRegistry& registry);

// Classifies every hypothesis with the LID model, fills predicted_lang on
// the records, and builds the intended-vs-predicted confusion matrix. Empty
// hypotheses predict "##".
ConfusionMatrix language_confusion_analysis(EvalRun& run, const LidModel& model);

struct Report {
  std::string json;
  std::string text;
};

// Per-language scores plus unweighted per-language means, with method,
// backend, seed and config digest for reproducibility.
Report report(const EvalRun& run);

// records-<key>.jsonl per language plus report.json / report.txt; dry runs
// additionally write prompts-<key>.txt.
void write_outputs(const EvalRun& run, const std::filesystem::path& out_dir);

}  // namespace ldp
