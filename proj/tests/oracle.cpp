#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ldp/utf8.hpp"

namespace oracle {

namespace {

std::vector<std::string> whitespace_split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

std::u32string strip_whitespace(const std::string& text) {
  std::u32string out;
  for (char32_t cp : ldp::decode_utf8(text)) {
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v' ||
        cp == U' ' || cp == U'　' || (cp >= U' ' && cp <= U' ') || cp == U' ' ||
        cp == U' ' || cp == U' ' || cp == U' ' || cp == U'' || cp == U' ') {
      continue;
    }
    out.push_back(cp);
  }
  return out;
}

template <typename Seq>
std::map<Seq, long> ngram_counts(const Seq& items, std::size_t order) {
  std::map<Seq, long> counts;
  if (items.size() < order) return counts;
  for (std::size_t i = 0; i + order <= items.size(); ++i) {
    Seq gram(items.begin() + i, items.begin() + i + order);
    ++counts[gram];
  }
  return counts;
}

template <typename Seq>
long matched_count(const std::map<Seq, long>& hyp, const std::map<Seq, long>& ref) {
  long matched = 0;
  for (const auto& [gram, count] : hyp) {
    const auto it = ref.find(gram);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  return matched;
}

template <typename Seq>
long total_count(const std::map<Seq, long>& counts) {
  long total = 0;
  for (const auto& [gram, count] : counts) total += count;
  return total;
}

}  // namespace

double chrf_pp(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  constexpr std::size_t kCharOrder = 6;
  constexpr std::size_t kWordOrder = 2;
  constexpr double kBeta = 2.0;
  const std::size_t orders = kCharOrder + kWordOrder;

  std::vector<long> matched(orders, 0), hyp_total(orders, 0), ref_total(orders, 0);

  for (std::size_t seg = 0; seg < hypotheses.size(); ++seg) {
    const std::u32string hyp_chars = strip_whitespace(hypotheses[seg]);
    const std::u32string ref_chars = strip_whitespace(references[seg]);
    for (std::size_t n = 1; n <= kCharOrder; ++n) {
      const auto hyp_counts = ngram_counts(hyp_chars, n);
      const auto ref_counts = ngram_counts(ref_chars, n);
      matched[n - 1] += matched_count(hyp_counts, ref_counts);
      hyp_total[n - 1] += total_count(hyp_counts);
      ref_total[n - 1] += total_count(ref_counts);
    }
    const std::vector<std::string> hyp_words = whitespace_split(hypotheses[seg]);
    const std::vector<std::string> ref_words = whitespace_split(references[seg]);
    for (std::size_t n = 1; n <= kWordOrder; ++n) {
      const auto hyp_counts = ngram_counts(hyp_words, n);
      const auto ref_counts = ngram_counts(ref_words, n);
      matched[kCharOrder + n - 1] += matched_count(hyp_counts, ref_counts);
      hyp_total[kCharOrder + n - 1] += total_count(hyp_counts);
      ref_total[kCharOrder + n - 1] += total_count(ref_counts);
    }
  }

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < orders; ++i) {
    if (hyp_total[i] == 0 && ref_total[i] == 0) continue;
    ++used;
    precision_sum += hyp_total[i] > 0 ? static_cast<double>(matched[i]) / hyp_total[i] : 0.0;
    recall_sum += ref_total[i] > 0 ? static_cast<double>(matched[i]) / ref_total[i] : 0.0;
  }
  if (used == 0) return 0.0;
  const double precision = precision_sum / used;
  const double recall = recall_sum / used;
  if (precision + recall == 0.0) return 0.0;
  const double beta_sq = kBeta * kBeta;
  return 100.0 * (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall);
}

double bleu(const std::vector<std::vector<std::string>>& hyp_tokens,
            const std::vector<std::vector<std::string>>& ref_tokens) {
  constexpr std::size_t kMaxOrder = 4;
  std::vector<long> matched(kMaxOrder, 0), hyp_total(kMaxOrder, 0);
  long hyp_len = 0, ref_len = 0;

  for (std::size_t seg = 0; seg < hyp_tokens.size(); ++seg) {
    hyp_len += static_cast<long>(hyp_tokens[seg].size());
    ref_len += static_cast<long>(ref_tokens[seg].size());
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto hyp_counts = ngram_counts(hyp_tokens[seg], n);
      const auto ref_counts = ngram_counts(ref_tokens[seg], n);
      matched[n - 1] += matched_count(hyp_counts, ref_counts);
      hyp_total[n - 1] += total_count(hyp_counts);
    }
  }

  if (hyp_len == 0) return 0.0;

  std::vector<double> precisions(kMaxOrder, 0.0);
  int smooth_exponent = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (hyp_total[n] > 0 && matched[n] > 0) {
      precisions[n] = static_cast<double>(matched[n]) / hyp_total[n];
    } else if (n == 0) {
      return 0.0;  // unigram precision zero is not smoothed
    } else {
      ++smooth_exponent;
      const double denom = hyp_total[n] > 0 ? static_cast<double>(hyp_total[n]) : 1.0;
      precisions[n] = 1.0 / (std::pow(2.0, smooth_exponent) * denom);
    }
  }

  double log_sum = 0.0;
  for (double p : precisions) log_sum += std::log(p);
  const double brevity =
      hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)) : 1.0;
  return 100.0 * brevity * std::exp(log_sum / kMaxOrder);
}

Rouge rouge_l(const std::vector<std::string>& hyp_tokens, const std::vector<std::string>& ref_tokens) {
  Rouge out;
  if (hyp_tokens.empty() || ref_tokens.empty()) return out;
  const std::size_t n = hyp_tokens.size();
  const std::size_t m = ref_tokens.size();
  std::vector<std::vector<std::size_t>> table(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (hyp_tokens[i - 1] == ref_tokens[j - 1]) {
        table[i][j] = table[i - 1][j - 1] + 1;
      } else {
        table[i][j] = std::max(table[i - 1][j], table[i][j - 1]);
      }
    }
  }
  const double lcs = static_cast<double>(table[n][m]);
  out.precision = lcs / static_cast<double>(n);
  out.recall = lcs / static_cast<double>(m);
  out.f = (out.precision + out.recall) == 0.0
              ? 0.0
              : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

}  // namespace oracle
