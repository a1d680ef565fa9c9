#include "ldp/backend.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace ldp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find('\n', pos);
    if (next == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return lines;
}

// "Label: text" -> {Label, text}; "Label:" -> {Label, ""}; no colon -> {"", line}.
std::pair<std::string, std::string> split_label(const std::string& line) {
  const std::size_t colon = line.find(':');
  if (colon == std::string::npos) return {"", line};
  std::string value = line.substr(colon + 1);
  if (!value.empty() && value.front() == ' ') value.erase(value.begin());
  return {line.substr(0, colon), value};
}

}  // namespace

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string cache_key(const GenerationRequest& request) {
  ordered_json canonical{
      {"backend_id", request.backend_id}, {"model_id", request.model_id},
      {"prompt", request.prompt},         {"max_tokens", request.max_tokens},
      {"temperature", request.temperature}, {"stop", request.stop},
  };
  return sha256_hex(canonical.dump());
}

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskCache::entry_path(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<GenerationResult> DiskCache::lookup(const std::string& key) const {
  std::ifstream in(entry_path(key));
  if (!in) return std::nullopt;
  json entry = json::parse(in, nullptr, false);
  if (entry.is_discarded()) return std::nullopt;
  GenerationResult result;
  result.text = entry.value("text", "");
  const std::string finish = entry.value("finish_reason", "stop");
  result.finish_reason = finish == "length" ? FinishReason::Length
                        : finish == "error" ? FinishReason::Error
                                            : FinishReason::Stop;
  return result;
}

void DiskCache::store(const std::string& key, const GenerationRequest& request,
                      const GenerationResult& result) const {
  const std::filesystem::path path = entry_path(key);
  std::filesystem::create_directories(path.parent_path());
  ordered_json entry;
  entry["request"] = ordered_json{
      {"backend_id", request.backend_id}, {"model_id", request.model_id},
      {"prompt", request.prompt},         {"max_tokens", request.max_tokens},
      {"temperature", request.temperature}, {"stop", request.stop},
  };
  entry["text"] = result.text;
  entry["finish_reason"] = std::string(to_string(result.finish_reason));
  entry["created_at"] =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
          .count();
  const std::filesystem::path tmp = path.parent_path() / (key + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp);
    out << entry.dump();
  }
  std::filesystem::rename(tmp, path);
}

std::unique_ptr<MockBackend> MockBackend::exact(std::map<std::string, std::string> responses,
                                                std::string default_completion) {
  auto backend = std::unique_ptr<MockBackend>(new MockBackend());
  backend->exact_mode_ = true;
  backend->responses_ = std::move(responses);
  backend->default_completion_ = std::move(default_completion);
  return backend;
}

std::unique_ptr<MockBackend> MockBackend::tables(std::vector<Table> tables, LanguageRegistry registry) {
  for (const auto& table : tables) {
    std::set<std::string> seen;
    for (const auto& [word, mapped] : table.words) {
      if (!seen.insert(mapped).second) {
        throw BadTable("table " + table.src_lang + "->" + table.tgt_lang + " maps two words to '" + mapped +
                       "'");
      }
    }
  }
  auto backend = std::unique_ptr<MockBackend>(new MockBackend());
  backend->exact_mode_ = false;
  backend->tables_ = std::move(tables);
  backend->registry_ = std::move(registry);
  return backend;
}

std::string MockBackend::map_words(const Table& table, const std::string& text) const {
  std::istringstream in(text);
  std::string word;
  std::string out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    const auto it = table.words.find(word);
    out += it == table.words.end() ? word : it->second;
  }
  return out;
}

const MockBackend::Table* MockBackend::resolve_table(const std::string& src_lang,
                                                     const std::string& tgt_lang) const {
  for (const auto& table : tables_) {
    if (table.src_lang == src_lang && table.tgt_lang == tgt_lang) return &table;
  }
  return nullptr;
}

const MockBackend::Table* MockBackend::resolve_by_coverage(const std::string& text,
                                                           const std::string& tgt_lang) const {
  const Table* best = nullptr;
  std::size_t best_hits = 0;
  for (const auto& table : tables_) {
    if (!tgt_lang.empty() && table.tgt_lang != tgt_lang) continue;
    std::istringstream in(text);
    std::string word;
    std::size_t hits = 0;
    while (in >> word) {
      if (table.words.count(word) != 0) ++hits;
    }
    if (hits > best_hits) {
      best = &table;
      best_hits = hits;
    }
  }
  return best;
}

GenerationResult MockBackend::complete(const GenerationRequest& request) {
  GenerationResult result;
  if (exact_mode_) {
    const auto it = responses_.find(request.prompt);
    result.text = it == responses_.end() ? default_completion_ : it->second;
    return result;
  }

  const std::vector<std::string> lines = split_lines(request.prompt);
  if (lines.size() < 2) {
    result.text = "";
    return result;
  }
  const auto [open_label, open_rest] = split_label(lines.back());
  const auto [input_label, input_text] = split_label(lines[lines.size() - 2]);

  const LanguageSpec* tgt = open_label.empty() ? nullptr : registry_.find_by_label(open_label);
  const LanguageSpec* src = input_label.empty() ? nullptr : registry_.find_by_label(input_label);

  // Pivot layout: the exemplar block right above the test block has three
  // labelled lines; answer with the intermediate plus the target line.
  const std::size_t blank = request.prompt.rfind("\n\n");
  if (blank != std::string::npos && tgt != nullptr) {
    const std::string before = request.prompt.substr(0, blank);
    const std::size_t prev_blank = before.rfind("\n\n");
    const std::string block = prev_blank == std::string::npos ? before : before.substr(prev_blank + 2);
    const std::vector<std::string> block_lines = split_lines(block);
    if (block_lines.size() == 3) {
      const auto [final_label, final_text] = split_label(block_lines[2]);
      const LanguageSpec* final_lang = registry_.find_by_label(final_label);
      if (final_lang != nullptr && src != nullptr) {
        const Table* hop_one = resolve_table(src->code, tgt->code);
        const Table* hop_two = resolve_table(tgt->code, final_lang->code);
        if (hop_one != nullptr && hop_two != nullptr) {
          const std::string en = map_words(*hop_one, input_text);
          const std::string y = map_words(*hop_two, en);
          result.text = " " + en + "\n" + final_label + ": " + y;
          return result;
        }
      }
    }
  }

  const Table* table = nullptr;
  if (src != nullptr && tgt != nullptr) table = resolve_table(src->code, tgt->code);
  if (table == nullptr) table = resolve_by_coverage(input_text, tgt == nullptr ? "" : tgt->code);
  if (table == nullptr) table = resolve_by_coverage(input_text, "");
  result.text = table == nullptr ? input_text : map_words(*table, input_text);
  return result;
}

HttpBackend::HttpBackend(HttpAdapterConfig config) : config_(std::move(config)) {}

GenerationResult HttpBackend::complete(const GenerationRequest& request) {
  std::string credential;
  if (!config_.credential_env.empty()) {
    const char* value = std::getenv(config_.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw AuthError("credential environment variable " + config_.credential_env + " is not set");
    }
    credential = value;
  }

  ordered_json payload;
  payload[config_.prompt_field] = request.prompt;
  if (!request.model_id.empty()) payload[config_.model_field] = request.model_id;
  payload[config_.max_tokens_field] = request.max_tokens;
  payload[config_.temperature_field] = request.temperature;
  if (!request.stop.empty()) payload[config_.stop_field] = request.stop;

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_sec);
  client.set_read_timeout(config_.timeout_sec);
  httplib::Headers headers;
  if (!credential.empty()) headers.emplace("Authorization", "Bearer " + credential);

  const auto response = client.Post(config_.path, headers, payload.dump(), "application/json");
  if (!response) {
    throw TransportError("request to " + config_.base_url + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status == 401 || response->status == 403) {
    throw AuthError("backend rejected credentials (status " + std::to_string(response->status) + ")");
  }
  if (response->status == 429) {
    throw RateLimited("backend rate limited the request");
  }
  if (response->status >= 500) {
    throw TransportError("backend returned status " + std::to_string(response->status));
  }
  if (response->status != 200) {
    throw Error("backend returned unexpected status " + std::to_string(response->status) + ": " +
                response->body);
  }

  json body = json::parse(response->body, nullptr, false);
  if (body.is_discarded()) throw TransportError("backend returned invalid JSON");
  GenerationResult result;
  try {
    result.text = body.at(json::json_pointer(config_.text_pointer)).get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("completion text not found at " + config_.text_pointer);
  }
  const auto finish_ptr = json::json_pointer("/choices/0/finish_reason");
  if (body.contains(finish_ptr) && body.at(finish_ptr).is_string() &&
      body.at(finish_ptr).get<std::string>() == "length") {
    result.finish_reason = FinishReason::Length;
  }
  return result;
}

BackendConfig parse_backend_config(const std::string& json_text) {
  json j = json::parse(json_text);
  BackendConfig config;
  config.backend_id = j.at("backend_id").get<std::string>();
  config.kind = j.at("kind").get<std::string>();
  if (config.kind != "live" && config.kind != "mock") {
    throw ConfigError("backend kind must be 'live' or 'mock', got '" + config.kind + "'");
  }
  config.model_id = j.value("model_id", "");
  config.max_retries = j.value("max_retries", 3);
  config.parallelism = j.value("parallelism", 4);
  config.retry_delay_ms = j.value("retry_delay_ms", 250);
  if (j.contains("cache_dir")) config.cache_dir = j.at("cache_dir").get<std::string>();
  if (config.kind == "live") {
    config.http.base_url = j.at("base_url").get<std::string>();
    config.http.path = j.value("path", config.http.path);
    config.http.credential_env = j.value("credential_env", "");
    config.http.text_pointer = j.value("text_pointer", config.http.text_pointer);
    if (j.contains("fields")) {
      const auto& fields = j.at("fields");
      config.http.prompt_field = fields.value("prompt", config.http.prompt_field);
      config.http.model_field = fields.value("model", config.http.model_field);
      config.http.max_tokens_field = fields.value("max_tokens", config.http.max_tokens_field);
      config.http.temperature_field = fields.value("temperature", config.http.temperature_field);
      config.http.stop_field = fields.value("stop", config.http.stop_field);
    }
  } else {
    if (j.contains("responses")) {
      config.responses = j.at("responses").get<std::map<std::string, std::string>>();
    }
    config.default_completion = j.value("default_completion", "");
    if (j.contains("tables")) {
      for (const auto& t : j.at("tables")) {
        MockBackend::Table table;
        table.src_lang = t.at("src_lang").get<std::string>();
        table.tgt_lang = t.at("tgt_lang").get<std::string>();
        table.words = t.at("words").get<std::map<std::string, std::string>>();
        config.tables.push_back(std::move(table));
      }
    }
  }
  return config;
}

BackendConfig load_backend_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open backend config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_backend_config(buffer.str());
}

Engine::Engine(std::shared_ptr<Backend> backend, std::string backend_id, std::string model_id,
               std::optional<DiskCache> cache, RetryPolicy retry, int parallelism)
    : backend_(std::move(backend)),
      backend_id_(std::move(backend_id)),
      model_id_(std::move(model_id)),
      cache_(std::move(cache)),
      retry_(retry),
      parallelism_(parallelism < 1 ? 1 : parallelism) {}

Engine Engine::from_config(const BackendConfig& config, const LanguageRegistry& registry) {
  std::shared_ptr<Backend> backend;
  if (config.kind == "live") {
    backend = std::make_shared<HttpBackend>(config.http);
  } else if (!config.tables.empty()) {
    backend = MockBackend::tables(config.tables, registry);
  } else {
    backend = MockBackend::exact(config.responses, config.default_completion);
  }
  std::optional<DiskCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);
  RetryPolicy retry;
  retry.max_retries = config.max_retries;
  retry.initial_delay_ms = config.retry_delay_ms;
  return Engine(std::move(backend), config.backend_id, config.model_id, std::move(cache), retry,
                config.parallelism);
}

GenerationRequest Engine::make_request(const PromptText& prompt, int max_tokens, double temperature) const {
  GenerationRequest request;
  request.prompt = prompt.text;
  request.max_tokens = max_tokens;
  request.temperature = temperature;
  request.stop = prompt.stop;
  request.model_id = model_id_;
  request.backend_id = backend_id_;
  return request;
}

GenerationResult Engine::generate(const GenerationRequest& request) {
  if (request.prompt.empty()) throw Error("generate: prompt must be non-empty");
  if (request.stop.size() > 4) throw Error("generate: at most 4 stop sequences");
  if (request.max_tokens < 1) throw Error("generate: max_tokens must be positive");

  const std::string key = cache_key(request);
  const bool cacheable = request.temperature == 0.0 && cache_.has_value();
  if (cacheable) {
    if (auto hit = cache_->lookup(key)) {
      hit->cached = true;
      return *hit;
    }
  }

  GenerationResult result;
  int attempt = 0;
  double delay_ms = retry_.initial_delay_ms;
  const auto start = std::chrono::steady_clock::now();
  for (;;) {
    try {
      result = backend_->complete(request);
      break;
    } catch (const AuthError&) {
      throw;
    } catch (const TransportError&) {
      if (attempt >= retry_.max_retries) throw;
    } catch (const RateLimited&) {
      if (attempt >= retry_.max_retries) throw;
    }
    ++attempt;
    std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int>(delay_ms)));
    delay_ms *= retry_.multiplier;
  }
  result.latency_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
          .count());

  std::size_t cut = std::string::npos;
  for (const auto& stop : request.stop) {
    if (stop.empty()) continue;
    const std::size_t at = result.text.find(stop);
    if (at != std::string::npos) cut = std::min(cut, at);
  }
  if (cut != std::string::npos) {
    result.text.resize(cut);
    result.finish_reason = FinishReason::Stop;
  }

  if (cacheable && result.finish_reason != FinishReason::Error) {
    cache_->store(key, request, result);
  }
  return result;
}

std::vector<GenerationResult> Engine::generate_batch(const std::vector<GenerationRequest>& requests,
                                                     int parallelism) {
  if (parallelism < 1) parallelism = parallelism_;
  if (parallelism < 1) parallelism = 1;
  std::vector<GenerationResult> results(requests.size());
  if (requests.empty()) return results;
  const std::size_t workers = std::min<std::size_t>(parallelism, requests.size());

  std::atomic<std::size_t> cursor{0};
  auto run = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        results[i] = generate(requests[i]);
      } catch (const std::exception& e) {
        results[i].finish_reason = FinishReason::Error;
        results[i].error = e.what();
        results[i].text.clear();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& thread : pool) thread.join();
  return results;
}

}  // namespace ldp
