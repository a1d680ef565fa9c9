#include <doctest.h>

#include <cmath>
#include <fstream>

#include "ldp/metrics.hpp"
#include "ldp/rng.hpp"
#include "oracle.hpp"
#include "test_data.hpp"

using namespace ldp;

namespace {

const LanguageRegistry& registry() {
  static const LanguageRegistry reg = LanguageRegistry::builtin();
  return reg;
}

}  // namespace

TEST_CASE("chrf++ basics") {
  CHECK(chrf_pp({"any non empty text"}, {"any non empty text"}).value == doctest::Approx(100.0));
  CHECK(chrf_pp({"你好世界"}, {"你好世界"}).value == doctest::Approx(100.0));
  CHECK(chrf_pp({"zzzz"}, {"qqqq"}).value == 0.0);
  // Regression constant frozen from the brute-force oracle.
  CHECK(chrf_pp({"the cat sat on mat"}, {"the cat sat on the mat"}).value ==
        doctest::Approx(68.7877078404).epsilon(1e-9));
  CHECK_THROWS_AS(chrf_pp({"a"}, {"a", "b"}), Misaligned);
  CHECK_THROWS_AS(chrf_pp({}, {}), NoSegments);
}

TEST_CASE("chrf++ matches the oracle on the fixed multi-script pairs") {
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    const double expected = oracle::chrf_pp({hyp}, {ref});
    const double actual = chrf_pp({hyp}, {ref}).value;
    CHECK_MESSAGE(std::abs(expected - actual) < 1e-6, "pair: ", hyp, " / ", ref);
  }
  // And as one pooled corpus.
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    hyps.push_back(hyp);
    refs.push_back(ref);
  }
  CHECK(std::abs(oracle::chrf_pp(hyps, refs) - chrf_pp(hyps, refs).value) < 1e-6);
}

TEST_CASE("chrf++ is invariant under segment permutation") {
  std::vector<std::string> hyps = {"the cat", "यह एक", "你好", "habari ya leo"};
  std::vector<std::string> refs = {"the cats", "यह दो", "你好呀", "habari za leo"};
  const double base = chrf_pp(hyps, refs).value;
  std::vector<std::size_t> order = {2, 0, 3, 1};
  std::vector<std::string> hyps2;
  std::vector<std::string> refs2;
  for (std::size_t i : order) {
    hyps2.push_back(hyps[i]);
    refs2.push_back(refs[i]);
  }
  CHECK(chrf_pp(hyps2, refs2).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("bleu basics") {
  const Tokenizer tok = Tokenizer::bleu_default();
  CHECK(bleu({"the cat sat down"}, {"the cat sat down"}, tok).value == doctest::Approx(100.0));
  // Zero unigram overlap is not smoothed.
  CHECK(bleu({"a b"}, {"c d"}, tok).value == 0.0);
  // Regression constant frozen from the brute-force oracle.
  CHECK(bleu({"the cat sat"}, {"the cat sat down"}, tok).value ==
        doctest::Approx(60.2528610479).epsilon(1e-9));
  CHECK_THROWS_AS(bleu({"a"}, {}, tok), Misaligned);
  CHECK_THROWS_AS(bleu({}, {}, tok), NoSegments);
}

TEST_CASE("bleu matches the oracle on the fixed pairs") {
  const Tokenizer tok = Tokenizer::bleu_default();
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    const double expected = oracle::bleu({tok.tokenize(hyp)}, {tok.tokenize(ref)});
    const double actual = bleu({hyp}, {ref}, tok).value;
    CHECK_MESSAGE(std::abs(expected - actual) < 1e-6, "pair: ", hyp, " / ", ref);
  }
  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  std::vector<std::vector<std::string>> hyp_tokens;
  std::vector<std::vector<std::string>> ref_tokens;
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    hyps.push_back(hyp);
    refs.push_back(ref);
    hyp_tokens.push_back(tok.tokenize(hyp));
    ref_tokens.push_back(tok.tokenize(ref));
  }
  CHECK(std::abs(oracle::bleu(hyp_tokens, ref_tokens) - bleu(hyps, refs, tok).value) < 1e-6);
}

TEST_CASE("bleu default tokenizer isolates punctuation") {
  const Tokenizer tok = Tokenizer::bleu_default();
  CHECK(tok.tokenize("hello, world!") == std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(tok.tokenize("it's") == std::vector<std::string>{"it", "'", "s"});
  CHECK(tok.tokenize("यह, ठीक।") == std::vector<std::string>{"यह", ",", "ठीक", "।"});
}

TEST_CASE("rouge_l basics") {
  const Tokenizer tok = Tokenizer::whitespace();
  const RougeScore identical = rouge_l("the same text", "the same text", tok);
  CHECK(identical.precision == doctest::Approx(1.0));
  CHECK(identical.recall == doctest::Approx(1.0));
  CHECK(identical.f == doctest::Approx(1.0));

  // LCS("the cat", "the dog") = 1 token.
  const RougeScore partial = rouge_l("the cat", "the dog", tok);
  CHECK(partial.precision == doctest::Approx(0.5));
  CHECK(partial.recall == doctest::Approx(0.5));
  CHECK(partial.f == doctest::Approx(0.5));

  const RougeScore empty = rouge_l("", "anything", tok);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f == 0.0);
}

TEST_CASE("rouge_l matches the oracle and F is symmetric") {
  const Tokenizer tok = Tokenizer::whitespace();
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    const oracle::Rouge expected = oracle::rouge_l(tok.tokenize(hyp), tok.tokenize(ref));
    const RougeScore actual = rouge_l(hyp, ref, tok);
    CHECK(std::abs(expected.precision - actual.precision) < 1e-9);
    CHECK(std::abs(expected.recall - actual.recall) < 1e-9);
    CHECK(std::abs(expected.f - actual.f) < 1e-9);
    const RougeScore reversed = rouge_l(ref, hyp, tok);
    CHECK(actual.f == doctest::Approx(reversed.f).epsilon(1e-12));
  }
}

TEST_CASE("metric values respect their scales and maxima") {
  const Tokenizer tok = Tokenizer::bleu_default();
  for (const auto& [hyp, ref] : testdata::metric_pairs()) {
    const double chrf = chrf_pp({hyp}, {ref}).value;
    const double b = bleu({hyp}, {ref}, tok).value;
    CHECK(chrf >= 0.0);
    CHECK(chrf <= 100.0);
    CHECK(b >= 0.0);
    CHECK(b <= 100.0);
    const RougeScore rouge = rouge_l(hyp, ref, Tokenizer::whitespace());
    CHECK(rouge.f >= 0.0);
    CHECK(rouge.f <= 1.0);
  }
}

TEST_CASE("fragmentation_ratio") {
  const Tokenizer ws = Tokenizer::whitespace();

  SUBCASE("cited token counts reproduce exactly") {
    std::string x160;
    for (int i = 0; i < 160; ++i) x160 += (i > 0 ? " t" : "t") + std::to_string(i);
    std::string en10;
    for (int i = 0; i < 10; ++i) en10 += (i > 0 ? " w" : "w") + std::to_string(i);
    CHECK(fragmentation_ratio({{x160, en10}}, ws, ws) == 16.0);

    std::string x28;
    for (int i = 0; i < 28; ++i) x28 += (i > 0 ? " t" : "t") + std::to_string(i);
    CHECK(fragmentation_ratio({{x28, en10}}, ws, ws) == doctest::Approx(2.8).epsilon(1e-12));
  }

  SUBCASE("identical texts with the same tokenizer give 1.0") {
    CHECK(fragmentation_ratio({{"same text here", "same text here"}}, ws, ws) == 1.0);
  }

  SUBCASE("mean over pairs") {
    CHECK(fragmentation_ratio({{"a b c d", "a b"}, {"a b", "a b"}}, ws, ws) == doctest::Approx(1.5));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(fragmentation_ratio({}, ws, ws), NoSegments);
    CHECK_THROWS_AS(fragmentation_ratio({{"x", ""}}, ws, ws), ZeroDenominator);
  }

  SUBCASE("byte and character tokenizers are pluggable") {
    const Tokenizer byte = Tokenizer::byte();
    const Tokenizer ch = Tokenizer::character();
    // "नमस्ते" is 6 codepoints, 18 bytes.
    CHECK(fragmentation_ratio({{"नमस्ते", "hi"}}, byte, ws) == doctest::Approx(18.0));
    CHECK(fragmentation_ratio({{"नमस्ते", "hi"}}, ch, ws) == doctest::Approx(6.0));
  }
}

TEST_CASE("vocabulary tokenizer uses longest-match-first greedy segmentation") {
  const auto path = std::filesystem::temp_directory_path() / "ldp_vocab_test.txt";
  {
    std::ofstream out(path);
    out << "mach\nmachine\nlearn\nlearning\ning\n";
  }
  const Tokenizer vocab = Tokenizer::from_vocab_file(path);
  CHECK(vocab.tokenize("machine learning") == std::vector<std::string>{"machine", "learning"});
  // Unknown characters fall back to single codepoints.
  CHECK(vocab.tokenize("machinex") == std::vector<std::string>{"machine", "x"});
  std::filesystem::remove(path);
}

TEST_CASE("lid_train validates seed volume") {
  std::map<std::string, std::vector<std::string>> seeds;
  seeds["sw"] = testdata::make_corpus("sw", 10, 1);
  CHECK_THROWS_AS(lid_train(seeds, registry()), NeedSeedData);
  CHECK_THROWS_AS(lid_train({}, registry()), NeedSeedData);
}

TEST_CASE("lid separates distinct scripts via the script prior") {
  std::map<std::string, std::vector<std::string>> seeds;
  for (const auto* lang : {"zh", "hi", "en"}) seeds[lang] = testdata::make_corpus(lang, 60, 5);
  const LidModel model = lid_train(seeds, registry());
  CHECK(lid_classify("你好世界", model) == "zh");
  CHECK_THROWS_AS(lid_classify("", model), EmptyText);
  CHECK_THROWS_AS(lid_classify("   ", model), EmptyText);
}

TEST_CASE("lid separates languages sharing a script") {
  std::map<std::string, std::vector<std::string>> seeds;
  seeds["hi"] = testdata::make_corpus("hi", 200, 11);
  seeds["mr"] = testdata::make_corpus("mr", 200, 11);
  const LidModel model = lid_train(seeds, registry());

  const std::vector<std::string> hi_held = testdata::make_corpus("hi", 200, 12345);
  const std::vector<std::string> mr_held = testdata::make_corpus("mr", 200, 54321);
  std::size_t correct = 0;
  for (const auto& line : hi_held) correct += lid_classify(line, model) == "hi" ? 1 : 0;
  for (const auto& line : mr_held) correct += lid_classify(line, model) == "mr" ? 1 : 0;
  CHECK(static_cast<double>(correct) / 400.0 >= 0.95);
}

TEST_CASE("lid floor maps Latin noise to the reserved other code") {
  std::map<std::string, std::vector<std::string>> seeds;
  seeds["sw"] = testdata::make_corpus("sw", 100, 21);
  seeds["ig"] = testdata::make_corpus("ig", 100, 22);
  const LidModel model = lid_train(seeds, registry());

  Rng rng(2718);
  std::size_t other = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    if (lid_classify(testdata::random_latin(40, rng), model) == kLidOther) ++other;
  }
  CHECK(static_cast<double>(other) / n >= 0.99);

  // Genuine held-out lines must stay above the floor.
  std::size_t kept = 0;
  for (const auto& line : testdata::make_corpus("sw", 100, 777)) {
    if (lid_classify(line, model) == "sw") ++kept;
  }
  CHECK(kept >= 95);
}

TEST_CASE("confusion_matrix counts and shapes") {
  const std::vector<std::string> candidates = {"mr", "en"};

  SUBCASE("all-correct records give a diagonal matrix") {
    const ConfusionMatrix m =
        confusion_matrix({{"mr", "mr"}, {"en", "en"}, {"mr", "mr"}}, candidates);
    CHECK(m.is_diagonal());
    CHECK(m.at("mr", "mr") == 2);
    CHECK(m.at("en", "en") == 1);
  }

  SUBCASE("empty records give a zero matrix") {
    const ConfusionMatrix m = confusion_matrix({}, candidates);
    for (const auto& row : m.counts) {
      for (std::size_t cell : row) CHECK(cell == 0);
    }
  }

  SUBCASE("the worked three-record example") {
    const ConfusionMatrix m = confusion_matrix({{"mr", "hi"}, {"mr", "mr"}, {"en", "en"}},
                                               {"mr", "hi", "en"});
    CHECK(m.at("mr", "hi") == 1);
    CHECK(m.at("mr", "mr") == 1);
    CHECK(m.at("en", "en") == 1);
    CHECK_FALSE(m.is_diagonal());
  }

  SUBCASE("row sums equal per-language record counts") {
    const std::vector<std::pair<std::string, std::string>> records = {
        {"mr", "hi"}, {"mr", "##"}, {"mr", "mr"}, {"en", "en"}};
    const ConfusionMatrix m = confusion_matrix(records, {"mr", "hi", "en"});
    std::size_t mr_row = 0;
    for (std::size_t c = 0; c < m.col_langs.size(); ++c) mr_row += m.at("mr", m.col_langs[c]);
    CHECK(mr_row == 3);
  }

  SUBCASE("unknown intended language") {
    CHECK_THROWS_AS(confusion_matrix({{"xx", "mr"}}, candidates), UnknownLanguage);
  }

  SUBCASE("prediction outside the candidate set") {
    CHECK_THROWS_AS(confusion_matrix({{"mr", "zz"}}, candidates), Error);
  }
}

TEST_CASE("confusion matrix renders text and json") {
  const ConfusionMatrix m = confusion_matrix({{"mr", "hi"}, {"hi", "hi"}}, {"mr", "hi"});
  const std::string text = m.to_text();
  CHECK(text.find("mr") != std::string::npos);
  CHECK(text.find("##") != std::string::npos);
  const std::string json = m.to_json();
  CHECK(json.find("\"rows\"") != std::string::npos);
}
