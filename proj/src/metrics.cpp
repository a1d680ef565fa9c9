#include "ldp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ldp/utf8.hpp"

namespace ldp {

namespace {

constexpr std::size_t kChrfCharOrder = 6;
constexpr std::size_t kChrfWordOrder = 2;
constexpr double kChrfBeta = 2.0;
constexpr std::size_t kBleuOrder = 4;

bool is_space_cp(char32_t cp) {
  return classify_char(cp).cls == CharClass::Space;
}

std::u32string codepoints_no_space(const std::string& text) {
  std::u32string out;
  for (char32_t cp : decode_utf8(text)) {
    if (!is_space_cp(cp)) out.push_back(cp);
  }
  return out;
}

std::vector<std::string> split_whitespace(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

// Incremental clipped n-gram matching over hashed keys; one pass per order.
struct OrderStats {
  std::uint64_t matched = 0;
  std::uint64_t hyp = 0;
  std::uint64_t ref = 0;
};

void accumulate_char_order(const std::u32string& hyp, const std::u32string& ref, std::size_t order,
                           OrderStats& stats) {
  std::unordered_map<std::u32string, std::int64_t> ref_counts;
  if (ref.size() >= order) {
    for (std::size_t i = 0; i + order <= ref.size(); ++i) ++ref_counts[ref.substr(i, order)];
    stats.ref += ref.size() - order + 1;
  }
  if (hyp.size() >= order) {
    stats.hyp += hyp.size() - order + 1;
    for (std::size_t i = 0; i + order <= hyp.size(); ++i) {
      const auto it = ref_counts.find(hyp.substr(i, order));
      if (it != ref_counts.end() && it->second > 0) {
        --it->second;
        ++stats.matched;
      }
    }
  }
}

std::string join_gram(const std::vector<std::string>& tokens, std::size_t begin, std::size_t order) {
  std::string key;
  for (std::size_t k = 0; k < order; ++k) {
    key += tokens[begin + k];
    key.push_back('\x1F');
  }
  return key;
}

void accumulate_word_order(const std::vector<std::string>& hyp, const std::vector<std::string>& ref,
                           std::size_t order, OrderStats& stats) {
  std::unordered_map<std::string, std::int64_t> ref_counts;
  if (ref.size() >= order) {
    for (std::size_t i = 0; i + order <= ref.size(); ++i) ++ref_counts[join_gram(ref, i, order)];
    stats.ref += ref.size() - order + 1;
  }
  if (hyp.size() >= order) {
    stats.hyp += hyp.size() - order + 1;
    for (std::size_t i = 0; i + order <= hyp.size(); ++i) {
      const auto it = ref_counts.find(join_gram(hyp, i, order));
      if (it != ref_counts.end() && it->second > 0) {
        --it->second;
        ++stats.matched;
      }
    }
  }
}

bool is_punct_cp(char32_t cp) { return classify_char(cp).cls == CharClass::Punct; }

}  // namespace

Tokenizer Tokenizer::whitespace() { return Tokenizer(Kind::Whitespace, "whitespace"); }
Tokenizer Tokenizer::character() { return Tokenizer(Kind::Character, "character"); }
Tokenizer Tokenizer::byte() { return Tokenizer(Kind::Byte, "byte"); }
Tokenizer Tokenizer::bleu_default() { return Tokenizer(Kind::BleuDefault, "bleu"); }

Tokenizer Tokenizer::from_vocab_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file: " + path.string());
  Tokenizer tokenizer(Kind::Vocab, "vocab:" + path.filename().string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<char32_t> cps = decode_utf8(line);
    std::u32string entry(cps.begin(), cps.end());
    tokenizer.vocab_[entry.front()].push_back(std::move(entry));
  }
  for (auto& [first, entries] : tokenizer.vocab_) {
    std::sort(entries.begin(), entries.end(),
              [](const std::u32string& a, const std::u32string& b) { return a.size() > b.size(); });
  }
  return tokenizer;
}

Tokenizer Tokenizer::named(const std::string& name) {
  if (name == "whitespace") return whitespace();
  if (name == "character") return character();
  if (name == "byte") return byte();
  if (name == "bleu") return bleu_default();
  throw Error("unknown tokenizer: " + name);
}

std::vector<std::string> Tokenizer::tokenize(const std::string& text) const {
  std::vector<std::string> tokens;
  switch (kind_) {
    case Kind::Whitespace:
      return split_whitespace(text);
    case Kind::Character: {
      for (char32_t cp : decode_utf8(text)) {
        if (is_space_cp(cp)) continue;
        std::string token;
        append_utf8(token, cp);
        tokens.push_back(std::move(token));
      }
      return tokens;
    }
    case Kind::Byte: {
      for (char byte : text) {
        if (byte == ' ' || byte == '\t' || byte == '\n' || byte == '\r') continue;
        tokens.push_back(std::string(1, byte));
      }
      return tokens;
    }
    case Kind::BleuDefault: {
      for (const std::string& word : split_whitespace(text)) {
        std::string current;
        for (char32_t cp : decode_utf8(word)) {
          if (is_punct_cp(cp)) {
            if (!current.empty()) {
              tokens.push_back(current);
              current.clear();
            }
            std::string punct;
            append_utf8(punct, cp);
            tokens.push_back(std::move(punct));
          } else {
            append_utf8(current, cp);
          }
        }
        if (!current.empty()) tokens.push_back(std::move(current));
      }
      return tokens;
    }
    case Kind::Vocab: {
      const std::vector<char32_t> decoded = decode_utf8(text);
      const std::u32string cps(decoded.begin(), decoded.end());
      std::size_t i = 0;
      while (i < cps.size()) {
        if (is_space_cp(cps[i])) {
          ++i;
          continue;
        }
        const auto it = vocab_.find(cps[i]);
        std::size_t matched = 0;
        if (it != vocab_.end()) {
          for (const auto& entry : it->second) {
            if (entry.size() <= cps.size() - i && cps.compare(i, entry.size(), entry) == 0) {
              matched = entry.size();
              break;
            }
          }
        }
        if (matched == 0) matched = 1;
        std::string token;
        for (std::size_t k = 0; k < matched; ++k) append_utf8(token, cps[i + k]);
        tokens.push_back(std::move(token));
        i += matched;
      }
      return tokens;
    }
  }
  return tokens;
}

MetricScore chrf_pp(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) {
    throw Misaligned("chrf_pp: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                     std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw NoSegments("chrf_pp: no segments");

  std::array<OrderStats, kChrfCharOrder + kChrfWordOrder> stats{};
  for (std::size_t seg = 0; seg < hypotheses.size(); ++seg) {
    const std::u32string hyp_chars = codepoints_no_space(hypotheses[seg]);
    const std::u32string ref_chars = codepoints_no_space(references[seg]);
    for (std::size_t n = 1; n <= kChrfCharOrder; ++n) {
      accumulate_char_order(hyp_chars, ref_chars, n, stats[n - 1]);
    }
    const std::vector<std::string> hyp_words = split_whitespace(hypotheses[seg]);
    const std::vector<std::string> ref_words = split_whitespace(references[seg]);
    for (std::size_t n = 1; n <= kChrfWordOrder; ++n) {
      accumulate_word_order(hyp_words, ref_words, n, stats[kChrfCharOrder + n - 1]);
    }
  }

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t used = 0;
  for (const auto& s : stats) {
    if (s.hyp == 0 && s.ref == 0) continue;
    ++used;
    if (s.hyp > 0) precision_sum += static_cast<double>(s.matched) / static_cast<double>(s.hyp);
    if (s.ref > 0) recall_sum += static_cast<double>(s.matched) / static_cast<double>(s.ref);
  }

  MetricScore score{"chrf++", 0.0, 100.0, hypotheses.size()};
  if (used == 0) return score;
  const double precision = precision_sum / static_cast<double>(used);
  const double recall = recall_sum / static_cast<double>(used);
  if (precision + recall > 0.0) {
    const double beta_sq = kChrfBeta * kChrfBeta;
    score.value = 100.0 * (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall);
  }
  return score;
}

MetricScore bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
                 const Tokenizer& tokenizer) {
  if (hypotheses.size() != references.size()) {
    throw Misaligned("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                     std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw NoSegments("bleu: no segments");

  std::array<OrderStats, kBleuOrder> stats{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
  for (std::size_t seg = 0; seg < hypotheses.size(); ++seg) {
    const std::vector<std::string> hyp = tokenizer.tokenize(hypotheses[seg]);
    const std::vector<std::string> ref = tokenizer.tokenize(references[seg]);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
      accumulate_word_order(hyp, ref, n, stats[n - 1]);
    }
  }

  MetricScore score{"bleu", 0.0, 100.0, hypotheses.size()};
  if (hyp_len == 0) return score;

  double log_sum = 0.0;
  int smooth_exponent = 0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    double precision;
    if (stats[n].matched > 0) {
      precision = static_cast<double>(stats[n].matched) / static_cast<double>(stats[n].hyp);
    } else if (n == 0) {
      return score;  // zero unigram precision is not smoothed
    } else {
      ++smooth_exponent;
      const double denom = stats[n].hyp > 0 ? static_cast<double>(stats[n].hyp) : 1.0;
      precision = 1.0 / (std::pow(2.0, smooth_exponent) * denom);
    }
    log_sum += std::log(precision);
  }

  const double brevity = hyp_len < ref_len
                             ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                             : 1.0;
  score.value = 100.0 * brevity * std::exp(log_sum / static_cast<double>(kBleuOrder));
  return score;
}

RougeScore rouge_l(const std::string& hypothesis, const std::string& reference, const Tokenizer& tokenizer) {
  const std::vector<std::string> hyp = tokenizer.tokenize(hypothesis);
  const std::vector<std::string> ref = tokenizer.tokenize(reference);
  RougeScore score;
  if (hyp.empty() || ref.empty()) return score;

  // LCS with two rolling rows.
  std::vector<std::size_t> previous(ref.size() + 1, 0);
  std::vector<std::size_t> current(ref.size() + 1, 0);
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      if (hyp[i - 1] == ref[j - 1]) {
        current[j] = previous[j - 1] + 1;
      } else {
        current[j] = std::max(previous[j], current[j - 1]);
      }
    }
    std::swap(previous, current);
  }
  const double lcs = static_cast<double>(previous[ref.size()]);
  score.precision = lcs / static_cast<double>(hyp.size());
  score.recall = lcs / static_cast<double>(ref.size());
  if (score.precision + score.recall > 0.0) {
    score.f = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

double fragmentation_ratio(const std::vector<std::pair<std::string, std::string>>& pairs,
                           const Tokenizer& tokenizer_x, const Tokenizer& tokenizer_en) {
  if (pairs.empty()) throw NoSegments("fragmentation_ratio: no pairs");
  double sum = 0.0;
  for (const auto& [x_text, en_text] : pairs) {
    const std::size_t x_tokens = tokenizer_x.tokenize(x_text).size();
    const std::size_t en_tokens = tokenizer_en.tokenize(en_text).size();
    if (en_tokens == 0) throw ZeroDenominator("fragmentation_ratio: English side has no tokens");
    sum += static_cast<double>(x_tokens) / static_cast<double>(en_tokens);
  }
  return sum / static_cast<double>(pairs.size());
}

namespace {

// Whitespace runs collapse to one space so grams can span word boundaries.
std::u32string lid_normalize(const std::string& text) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : decode_utf8(text)) {
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace

LidModel lid_train(const std::map<std::string, std::vector<std::string>>& seed_corpora,
                   const LanguageRegistry& registry, const LidOptions& options) {
  if (seed_corpora.empty()) throw NeedSeedData("lid_train: no seed corpora");
  LidModel model;
  model.options_ = options;
  for (const auto& [lang, lines] : seed_corpora) {
    if (lines.size() < options.min_seed_lines) {
      throw NeedSeedData("lid_train: language " + lang + " has " + std::to_string(lines.size()) +
                         " seed lines, need " + std::to_string(options.min_seed_lines));
    }
    LidModel::LangTable table;
    table.code = lang;
    table.script = registry.get(lang).script;
    for (const auto& line : lines) {
      const std::u32string cps = lid_normalize(line);
      for (std::size_t order = 1; order <= 3; ++order) {
        if (cps.size() < order) continue;
        for (std::size_t i = 0; i + order <= cps.size(); ++i) {
          ++table.grams[order - 1][cps.substr(i, order)];
        }
        table.totals[order - 1] += cps.size() - order + 1;
      }
    }
    model.candidates_.push_back(lang);
    model.tables_.push_back(std::move(table));
  }
  return model;
}

std::string lid_classify(const std::string& text, const LidModel& model) {
  const std::u32string cps = lid_normalize(text);
  if (cps.empty()) throw EmptyText("lid_classify: empty text");

  // Script prior: keep candidates whose registered script matches the
  // dominant script of the input; fall back to all candidates when the input
  // is ambiguous or nothing matches.
  std::vector<const LidModel::LangTable*> pool;
  const DominantScript dominant = dominant_script(text);
  if (const Script* script = std::get_if<Script>(&dominant)) {
    for (const auto& table : model.tables_) {
      if (table.script == *script) pool.push_back(&table);
    }
  }
  if (pool.empty()) {
    for (const auto& table : model.tables_) pool.push_back(&table);
  }

  const LidModel::LangTable* best = nullptr;
  double best_score = 0.0;
  for (const auto* table : pool) {
    double log_prob = 0.0;
    std::size_t gram_count = 0;
    for (std::size_t order = 1; order <= 3; ++order) {
      if (cps.size() < order) continue;
      const auto& grams = table->grams[order - 1];
      const double denom =
          static_cast<double>(table->totals[order - 1]) + static_cast<double>(grams.size()) + 1.0;
      for (std::size_t i = 0; i + order <= cps.size(); ++i) {
        const auto it = grams.find(cps.substr(i, order));
        const double count = it == grams.end() ? 0.0 : static_cast<double>(it->second);
        log_prob += std::log((count + 1.0) / denom);
        ++gram_count;
      }
    }
    const double mean = gram_count == 0 ? -1e9 : log_prob / static_cast<double>(gram_count);
    if (best == nullptr || mean > best_score) {
      best = table;
      best_score = mean;
    }
  }
  if (best == nullptr || best_score < model.options_.floor) return kLidOther;
  return best->code;
}

std::size_t ConfusionMatrix::at(const std::string& intended, const std::string& predicted) const {
  const auto row = std::find(row_langs.begin(), row_langs.end(), intended);
  const auto col = std::find(col_langs.begin(), col_langs.end(), predicted);
  if (row == row_langs.end() || col == col_langs.end()) {
    throw UnknownLanguage(intended + "/" + predicted);
  }
  return counts[row - row_langs.begin()][col - col_langs.begin()];
}

bool ConfusionMatrix::is_diagonal() const {
  for (std::size_t r = 0; r < row_langs.size(); ++r) {
    for (std::size_t c = 0; c < col_langs.size(); ++c) {
      if (counts[r][c] != 0 && row_langs[r] != col_langs[c]) return false;
    }
  }
  return true;
}

std::string ConfusionMatrix::to_text() const {
  std::size_t width = 2;
  for (const auto& lang : row_langs) width = std::max(width, lang.size());
  for (const auto& lang : col_langs) width = std::max(width, lang.size());
  for (const auto& row : counts) {
    for (std::size_t c : row) width = std::max(width, std::to_string(c).size());
  }
  std::ostringstream out;
  out << std::string(width, ' ');
  for (const auto& lang : col_langs) out << ' ' << std::string(width - lang.size(), ' ') << lang;
  out << '\n';
  for (std::size_t r = 0; r < row_langs.size(); ++r) {
    out << std::string(width - row_langs[r].size(), ' ') << row_langs[r];
    for (std::size_t c = 0; c < col_langs.size(); ++c) {
      const std::string cell = std::to_string(counts[r][c]);
      out << ' ' << std::string(width - cell.size(), ' ') << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string ConfusionMatrix::to_json() const {
  nlohmann::ordered_json j;
  j["rows"] = row_langs;
  j["columns"] = col_langs;
  j["counts"] = counts;
  return j.dump(2);
}

ConfusionMatrix confusion_matrix(const std::vector<std::pair<std::string, std::string>>& records,
                                 const std::vector<std::string>& candidates) {
  ConfusionMatrix matrix;
  matrix.row_langs = candidates;
  matrix.col_langs = candidates;
  matrix.col_langs.push_back(kLidOther);
  matrix.counts.assign(matrix.row_langs.size(), std::vector<std::size_t>(matrix.col_langs.size(), 0));
  for (const auto& [intended, predicted] : records) {
    const auto row = std::find(matrix.row_langs.begin(), matrix.row_langs.end(), intended);
    if (row == matrix.row_langs.end()) throw UnknownLanguage("intended language " + intended);
    const auto col = std::find(matrix.col_langs.begin(), matrix.col_langs.end(), predicted);
    if (col == matrix.col_langs.end()) {
      throw Error("prediction '" + predicted + "' outside candidate set");
    }
    ++matrix.counts[row - matrix.row_langs.begin()][col - matrix.col_langs.begin()];
  }
  return matrix;
}

}  // namespace ldp
