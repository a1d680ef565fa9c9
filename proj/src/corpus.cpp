#include "ldp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldp/rng.hpp"
#include "ldp/utf8.hpp"

namespace ldp {

namespace {

bool starts_with_ci(std::string_view token, std::string_view prefix) {
  if (token.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const char a = token[i];
    const char b = prefix[i];
    const char lower = (a >= 'A' && a <= 'Z') ? static_cast<char>(a - 'A' + 'a') : a;
    if (lower != b) return false;
  }
  return true;
}

bool has_url_token(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
    const std::string_view token = text.substr(pos, end - pos);
    if (starts_with_ci(token, "http://") || starts_with_ci(token, "https://") ||
        starts_with_ci(token, "ftp://") || starts_with_ci(token, "www.")) {
      return true;
    }
    pos = end;
  }
  return false;
}

bool is_artifact(const std::vector<char32_t>& cps, const std::string& text) {
  if (has_url_token(text)) return true;
  std::size_t digits = 0;
  for (char32_t cp : cps) {
    if (cp == U'[' || cp == U']' || cp == U'{' || cp == U'}') return true;
    if (is_digit_char(cp)) ++digits;
  }
  // Leading bullet glyph after optional whitespace.
  for (char32_t cp : cps) {
    const CharInfo info = classify_char(cp);
    if (info.cls == CharClass::Space) continue;
    if (cp == U'-' || cp == U'*' || cp == U'•') return true;
    break;
  }
  return !cps.empty() &&
         static_cast<double>(digits) > kMaxDigitRatio * static_cast<double>(cps.size());
}

std::set<Script> foreign_scripts_for(const LanguageSpec& spec) {
  if (spec.script == Script::Latin) {
    std::set<Script> foreign = all_scripts();
    foreign.erase(Script::Latin);
    return foreign;
  }
  return {Script::Latin};
}

}  // namespace

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::TooShort: return "TooShort";
    case RejectReason::TooLong: return "TooLong";
    case RejectReason::Artifact: return "Artifact";
    case RejectReason::ForeignCharRatio: return "ForeignCharRatio";
  }
  return "Unknown";
}

std::size_t FilterReport::rejected_total() const {
  std::size_t sum = 0;
  for (const auto& [reason, count] : rejected) sum += count;
  return sum;
}

std::optional<RejectReason> filter_line(const CorpusLine& line, const LanguageSpec& spec) {
  if (line.lang != spec.code) {
    throw Error("filter_line: line language '" + line.lang + "' does not match spec '" + spec.code + "'");
  }
  const std::vector<char32_t> cps = decode_utf8(line.text);
  if (cps.size() < kMinChars) return RejectReason::TooShort;
  if (cps.size() > kMaxChars) return RejectReason::TooLong;
  if (is_artifact(cps, line.text)) return RejectReason::Artifact;
  if (letter_ratio(line.text, foreign_scripts_for(spec)) > kMaxForeignRatio) {
    return RejectReason::ForeignCharRatio;
  }
  return std::nullopt;
}

std::pair<std::vector<CorpusLine>, FilterReport> filter_corpus(const std::vector<CorpusLine>& lines,
                                                               const LanguageSpec& spec) {
  std::vector<CorpusLine> kept;
  FilterReport report;
  report.total = lines.size();
  for (const auto& line : lines) {
    if (const auto reason = filter_line(line, spec)) {
      ++report.rejected[*reason];
    } else {
      kept.push_back(line);
      ++report.accepted;
    }
  }
  return {std::move(kept), report};
}

std::vector<CorpusLine> sample_lines(const std::vector<CorpusLine>& lines, std::size_t n, std::uint64_t seed) {
  const std::vector<std::size_t> idx = sample_indices(lines.size(), n, seed);
  std::vector<CorpusLine> out;
  out.reserve(n);
  for (std::size_t i : idx) out.push_back(lines[i]);
  return out;
}

MixtureWeights mixture_weights(const std::vector<std::pair<std::string, std::uint64_t>>& sizes,
                               double temperature) {
  if (sizes.empty()) throw InvalidSizes("mixture_weights: empty size list");
  if (!(temperature > 0.0)) throw InvalidSizes("mixture_weights: temperature must be positive");
  std::uint64_t total = 0;
  for (const auto& [lang, n] : sizes) {
    if (n == 0) throw InvalidSizes("mixture_weights: zero-sized corpus for " + lang);
    total += n;
  }
  MixtureWeights weights;
  weights.temperature = temperature;
  weights.entries.reserve(sizes.size());
  if (temperature == 1.0) {
    for (const auto& [lang, n] : sizes) {
      weights.entries.push_back({lang, n, static_cast<double>(n) / static_cast<double>(total)});
    }
    return weights;
  }
  double norm = 0.0;
  std::vector<double> shares;
  shares.reserve(sizes.size());
  for (const auto& [lang, n] : sizes) {
    const double share = std::pow(static_cast<double>(n) / static_cast<double>(total), 1.0 / temperature);
    shares.push_back(share);
    norm += share;
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    weights.entries.push_back({sizes[i].first, sizes[i].second, shares[i] / norm});
  }
  return weights;
}

std::vector<CorpusLine> draw_mixture(const MixtureWeights& weights,
                                     const std::map<std::string, std::vector<CorpusLine>>& corpora,
                                     std::size_t n, std::uint64_t seed) {
  struct LangState {
    const std::vector<CorpusLine>* lines = nullptr;
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
    Rng rng{0};
  };

  std::vector<LangState> states(weights.entries.size());
  for (std::size_t i = 0; i < weights.entries.size(); ++i) {
    const auto& entry = weights.entries[i];
    const auto it = corpora.find(entry.lang);
    if (it == corpora.end() || it->second.empty()) {
      throw MissingCorpus("draw_mixture: no corpus for weighted language " + entry.lang);
    }
    auto& state = states[i];
    state.lines = &it->second;
    state.rng = Rng(seed ^ fnv1a(entry.lang));
    state.order.resize(it->second.size());
    for (std::size_t k = 0; k < state.order.size(); ++k) state.order[k] = k;
    state.rng.shuffle(state.order);
  }

  Rng selector(seed);
  std::vector<CorpusLine> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = selector.unit();
    double cumulative = 0.0;
    std::size_t pick = weights.entries.size() - 1;
    for (std::size_t i = 0; i < weights.entries.size(); ++i) {
      cumulative += weights.entries[i].probability;
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    auto& state = states[pick];
    if (state.cursor == state.order.size()) {
      state.rng.shuffle(state.order);
      state.cursor = 0;
    }
    out.push_back((*state.lines)[state.order[state.cursor++]]);
  }
  return out;
}

std::vector<CorpusLine> read_corpus(const std::filesystem::path& path, const std::string& lang,
                                    const std::string& source_id) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path.string());
  std::vector<CorpusLine> lines;
  std::string raw;
  std::size_t line_no = 0;
  const std::string source = source_id.empty() ? path.filename().string() : source_id;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) {
      ++line_no;
      continue;
    }
    CorpusLine line;
    if (raw.front() == '{') {
      const auto record = nlohmann::json::parse(raw, nullptr, false);
      if (!record.is_discarded() && record.contains("text")) {
        line.text = record.at("text").get<std::string>();
        line.lang = record.value("lang", lang);
        line.source_id = record.value("source_id", source);
        line.line_no = line_no++;
        lines.push_back(std::move(line));
        continue;
      }
    }
    line.text = raw;
    line.lang = lang;
    line.source_id = source;
    line.line_no = line_no++;
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_corpus_text(const std::filesystem::path& path, const std::vector<CorpusLine>& lines) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  for (const auto& line : lines) out << line.text << '\n';
}

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<CorpusLine>& lines) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  for (const auto& line : lines) {
    nlohmann::ordered_json record{{"text", line.text}, {"lang", line.lang}, {"source_id", line.source_id}};
    out << record.dump() << '\n';
  }
}

std::string report_to_json(const FilterReport& report) {
  nlohmann::ordered_json j;
  j["total"] = report.total;
  j["accepted"] = report.accepted;
  nlohmann::ordered_json rejected = nlohmann::ordered_json::object();
  for (const auto reason : {RejectReason::TooShort, RejectReason::TooLong, RejectReason::Artifact,
                            RejectReason::ForeignCharRatio}) {
    const auto it = report.rejected.find(reason);
    rejected[std::string(to_string(reason))] = it == report.rejected.end() ? 0 : it->second;
  }
  j["rejected"] = rejected;
  return j.dump(2);
}

}  // namespace ldp
