#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldp/lang.hpp"
#include "ldp/prompt.hpp"

namespace ldp {

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 256;
  double temperature = 0.0;
  std::vector<std::string> stop;
  std::string model_id;
  std::string backend_id;
};

enum class FinishReason { Stop, Length, Error };

std::string_view to_string(FinishReason reason);

struct GenerationResult {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  bool cached = false;
  std::uint64_t latency_ms = 0;
  std::string error;  // populated when finish_reason == Error
};

// 256-bit hex digest over the canonical serialization of
// (backend_id, model_id, prompt, max_tokens, temperature, stop).
std::string cache_key(const GenerationRequest& request);

std::string sha256_hex(std::string_view data);

// Content-addressed on-disk store, one JSON file per key under
// <dir>/<first-2-hex>/<digest>.json. Entries are written atomically via a
// temp file + rename; reads never block writes of other keys.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  std::optional<GenerationResult> lookup(const std::string& key) const;
  void store(const std::string& key, const GenerationRequest& request, const GenerationResult& result) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;
  std::filesystem::path dir_;
};

// A text-completion provider. Implementations throw TransportError /
// RateLimited for retryable failures and AuthError for missing credentials.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResult complete(const GenerationRequest& request) = 0;
};

// Deterministic stand-in backend.
//
// Exact mode: maps full prompts to completions, with a default completion
// for unknown prompts.
//
// Table mode: bijective word dictionaries per language pair, applied to the
// final input line of the prompt. The language pair is resolved from the
// prompt's open label and input-line label when they are tag names, and by
// source-vocabulary coverage otherwise (the NoTag case). Prompts whose last
// exemplar block has three labelled lines are treated as pivot prompts: the
// mock emits the English intermediate plus the target line.
class MockBackend : public Backend {
 public:
  struct Table {
    std::string src_lang;
    std::string tgt_lang;
    std::map<std::string, std::string> words;
  };

  static std::unique_ptr<MockBackend> exact(std::map<std::string, std::string> responses,
                                            std::string default_completion = "");
  // Throws BadTable when any table maps two words to the same target word.
  static std::unique_ptr<MockBackend> tables(std::vector<Table> tables, LanguageRegistry registry);

  GenerationResult complete(const GenerationRequest& request) override;

 private:
  MockBackend() = default;

  std::string map_words(const Table& table, const std::string& text) const;
  const Table* resolve_table(const std::string& src_lang, const std::string& tgt_lang) const;
  const Table* resolve_by_coverage(const std::string& text, const std::string& tgt_lang) const;

  bool exact_mode_ = true;
  std::map<std::string, std::string> responses_;
  std::string default_completion_;
  std::vector<Table> tables_;
  LanguageRegistry registry_;
};

// Minimal completion-style HTTP adapter: POSTs a JSON payload with
// configurable field names and extracts the completion text via a JSON
// pointer. The credential is read from the configured environment variable
// at call time; a missing credential raises AuthError before any I/O.
struct HttpAdapterConfig {
  std::string base_url;          // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/completions";
  std::string credential_env;    // name of the env var holding the API key
  std::string prompt_field = "prompt";
  std::string model_field = "model";
  std::string max_tokens_field = "max_tokens";
  std::string temperature_field = "temperature";
  std::string stop_field = "stop";
  std::string text_pointer = "/choices/0/text";
  int timeout_sec = 120;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpAdapterConfig config);
  GenerationResult complete(const GenerationRequest& request) override;

 private:
  HttpAdapterConfig config_;
};

struct RetryPolicy {
  int max_retries = 3;
  int initial_delay_ms = 250;
  double multiplier = 2.0;
};

// Backend configuration, deserialized from the backends config file.
struct BackendConfig {
  std::string backend_id;
  std::string kind;  // "live" | "mock"
  std::string model_id;
  int max_retries = 3;
  int parallelism = 4;
  int retry_delay_ms = 250;
  HttpAdapterConfig http;                        // kind == live
  std::map<std::string, std::string> responses;  // mock exact mode
  std::string default_completion;
  std::vector<MockBackend::Table> tables;  // mock table mode
  std::optional<std::filesystem::path> cache_dir;
};

BackendConfig parse_backend_config(const std::string& json_text);
BackendConfig load_backend_config(const std::filesystem::path& path);

// Front door for generation: stop-sequence truncation, zero-temperature
// caching, retry with exponential backoff, and bounded-parallelism batches.
class Engine {
 public:
  Engine(std::shared_ptr<Backend> backend, std::string backend_id, std::string model_id,
         std::optional<DiskCache> cache = std::nullopt, RetryPolicy retry = {}, int parallelism = 4);

  static Engine from_config(const BackendConfig& config, const LanguageRegistry& registry);

  GenerationRequest make_request(const PromptText& prompt, int max_tokens = 256,
                                 double temperature = 0.0) const;

  GenerationResult generate(const GenerationRequest& request);
  std::vector<GenerationResult> generate_batch(const std::vector<GenerationRequest>& requests,
                                               int parallelism = 0);

  const std::string& backend_id() const { return backend_id_; }
  const std::string& model_id() const { return model_id_; }
  int parallelism() const { return parallelism_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::string backend_id_;
  std::string model_id_;
  std::optional<DiskCache> cache_;
  RetryPolicy retry_;
  int parallelism_ = 4;
};

}  // namespace ldp
