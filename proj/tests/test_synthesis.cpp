#include <doctest.h>

#include <map>
#include <sstream>

#include "ldp/synthesis.hpp"
#include "ldp/rng.hpp"
#include "ldp/utf8.hpp"
#include "test_data.hpp"

using namespace ldp;

namespace {

const LanguageRegistry& registry() {
  static const LanguageRegistry reg = LanguageRegistry::builtin();
  return reg;
}

Engine table_engine(std::vector<MockBackend::Table> tables) {
  RetryPolicy retry;
  retry.max_retries = 1;
  retry.initial_delay_ms = 1;
  return Engine(MockBackend::tables(std::move(tables), registry()), "mock", "tables", std::nullopt, retry, 4);
}

MockBackend::Table ig_en_table() {
  return {"ig", "en", {{"igwe", "machine"}, {"ịmụ", "learning"}, {"ọma", "good"}, {"ụtụtụ", "morning"},
                       {"mmiri", "water"}, {"nri", "food"}}};
}

MockBackend::Table en_ig_table() {
  return {"en", "ig", {{"machine", "igwe"}, {"learning", "ịmụ"}, {"good", "ọma"}, {"morning", "ụtụtụ"},
                       {"water", "mmiri"}, {"food", "nri"}}};
}

std::vector<CorpusLine> ig_corpus() {
  return {
      {"igwe ịmụ", "ig", "t", 0},
      {"ụtụtụ ọma", "ig", "t", 1},
      {"mmiri nri", "ig", "t", 2},
      {"ọma igwe", "ig", "t", 3},
      {"nri ụtụtụ", "ig", "t", 4},
  };
}

std::vector<Exemplar> seeds() {
  return {{"Cảm ơn", "Thank you", "vi", "en", Provenance::SeedTranslation}};
}

}  // namespace

TEST_CASE("synthesize_x2e recovers word-mapped English under a bijective mock") {
  Engine engine = table_engine({ig_en_table()});
  const auto pairs = synthesize_x2e(ig_corpus(), seeds(), engine, TagStyle::EnglishTag, registry());
  REQUIRE(pairs.size() == 5);
  CHECK(pairs[0].en_text == "machine learning");
  CHECK(pairs[1].en_text == "morning good");
  CHECK(pairs[2].en_text == "water food");
  for (const auto& pair : pairs) {
    CHECK_FALSE(pair.flagged);
    CHECK(pair.x_lang == "ig");
    CHECK(pair.generator == "mock/tables");
    CHECK(pair.prompt_digest.size() == 64);
  }
  // Order preserved against the corpus.
  const auto corpus = ig_corpus();
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i].x_text == corpus[i].text);
}

TEST_CASE("synthesize_x2e works zero-shot and under NoTag") {
  Engine engine = table_engine({ig_en_table()});
  const auto zero_shot = synthesize_x2e(ig_corpus(), {}, engine, TagStyle::EnglishTag, registry());
  CHECK(zero_shot.size() == 5);
  CHECK_FALSE(zero_shot[0].flagged);
  const auto no_tag = synthesize_x2e(ig_corpus(), seeds(), engine, TagStyle::NoTag, registry());
  CHECK(no_tag[0].en_text == "machine learning");
}

TEST_CASE("synthesize_x2e flags empty completions and excludes them from pools") {
  // Exact-mode mock with no entries: every completion is empty.
  RetryPolicy retry;
  retry.max_retries = 0;
  retry.initial_delay_ms = 1;
  Engine engine(MockBackend::exact({}), "mock", "empty", std::nullopt, retry, 2);
  const auto pairs = synthesize_x2e(ig_corpus(), {}, engine, TagStyle::EnglishTag, registry());
  REQUIRE(pairs.size() == 5);
  for (const auto& pair : pairs) {
    CHECK(pair.flagged);
    CHECK(pair.error == "empty completion");
  }
  CHECK_THROWS_AS(build_intra_exemplars(pairs, Direction::E2X, 1, 0), NotEnoughPairs);
}

TEST_CASE("build_intra_exemplars orients and samples deterministically") {
  Engine engine = table_engine({ig_en_table()});
  const auto pairs = synthesize_x2e(ig_corpus(), seeds(), engine, TagStyle::EnglishTag, registry());

  const auto e2x = build_intra_exemplars(pairs, Direction::E2X, 4, 3);
  REQUIRE(e2x.size() == 4);
  for (const auto& exemplar : e2x) {
    CHECK(exemplar.src_lang == "en");
    CHECK(exemplar.tgt_lang == "ig");
    CHECK(exemplar.provenance == Provenance::SyntheticBt);
  }

  const auto x2e = build_intra_exemplars(pairs, Direction::X2E, 4, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(x2e[i].src_text == e2x[i].tgt_text);
    CHECK(x2e[i].tgt_text == e2x[i].src_text);
    CHECK(x2e[i].src_lang == "ig");
    CHECK(x2e[i].tgt_lang == "en");
  }

  const auto again = build_intra_exemplars(pairs, Direction::E2X, 4, 3);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again[i].src_text == e2x[i].src_text);

  CHECK_THROWS_AS(build_intra_exemplars(pairs, Direction::E2X, 6, 3), NotEnoughPairs);
}

TEST_CASE("synthesize_triplets composes the two mock tables") {
  MockBackend::Table ta_en{"ta", "en", {{"வணக்கம்", "hello"}, {"உலகம்", "world"}, {"நன்றி", "thanks"}}};
  MockBackend::Table en_ta{"en", "ta", {{"hello", "வணக்கம்"}, {"world", "உலகம்"}, {"thanks", "நன்றி"}}};
  MockBackend::Table en_sw{"en", "sw", {{"hello", "habari"}, {"world", "dunia"}, {"thanks", "asante"}}};
  MockBackend::Table sw_en{"sw", "en", {{"habari", "hello"}, {"dunia", "world"}, {"asante", "thanks"}}};
  Engine engine = table_engine({ta_en, en_ta, en_sw, sw_en});

  const std::vector<CorpusLine> corpus_ta = {
      {"வணக்கம் உலகம்", "ta", "t", 0},
      {"நன்றி வணக்கம்", "ta", "t", 1},
      {"உலகம் நன்றி", "ta", "t", 2},
  };
  const std::vector<CorpusLine> corpus_sw = {
      {"habari dunia", "sw", "t", 0},
      {"asante habari", "sw", "t", 1},
      {"dunia asante", "sw", "t", 2},
  };

  TripletStats stats;
  const auto triplets = synthesize_triplets(corpus_ta, corpus_sw, seeds(), engine, "sw", 2, 5,
                                            TagStyle::EnglishTag, registry(), &stats);
  REQUIRE(triplets.size() == 3);
  CHECK(stats.dropped == 0);

  // Composition identity: y = (en->sw)((ta->en)(x)).
  const std::map<std::string, std::string> ta2en = {{"வணக்கம்", "hello"}, {"உலகம்", "world"}, {"நன்றி", "thanks"}};
  const std::map<std::string, std::string> en2sw = {{"hello", "habari"}, {"world", "dunia"}, {"thanks", "asante"}};
  for (const auto& triplet : triplets) {
    std::string expected_en;
    std::string expected_y;
    std::istringstream words(triplet.x_text);
    std::string word;
    while (words >> word) {
      if (!expected_en.empty()) {
        expected_en += ' ';
        expected_y += ' ';
      }
      expected_en += ta2en.at(word);
      expected_y += en2sw.at(ta2en.at(word));
    }
    CHECK(triplet.en_text == expected_en);
    CHECK(triplet.y_text == expected_y);
    CHECK(triplet.x_lang == "ta");
    CHECK(triplet.y_lang == "sw");
  }
}

TEST_CASE("synthesize_triplets with m_bt=0 still produces structurally valid triplets") {
  MockBackend::Table ta_en{"ta", "en", {{"வணக்கம்", "hello"}}};
  MockBackend::Table en_sw{"en", "sw", {{"hello", "habari"}}};
  Engine engine = table_engine({ta_en, en_sw});
  const std::vector<CorpusLine> corpus_ta = {{"வணக்கம்", "ta", "t", 0}};
  const std::vector<CorpusLine> corpus_sw = {{"habari", "sw", "t", 0}};
  const auto triplets =
      synthesize_triplets(corpus_ta, corpus_sw, {}, engine, "sw", 0, 1, TagStyle::EnglishTag, registry());
  REQUIRE(triplets.size() == 1);
  CHECK(triplets[0].en_text == "hello");
  CHECK(triplets[0].y_text == "habari");
}

TEST_CASE("synthesize_triplets requires a target-language corpus") {
  Engine engine = table_engine({ig_en_table()});
  CHECK_THROWS_AS(
      synthesize_triplets({{"x", "ta", "t", 0}}, {}, {}, engine, "sw", 0, 1, TagStyle::EnglishTag, registry()),
      MissingCorpus);
  CHECK_THROWS_AS(
      synthesize_triplets({}, {{"y", "sw", "t", 0}}, {}, engine, "sw", 0, 1, TagStyle::EnglishTag, registry()),
      MissingCorpus);
}

TEST_CASE("synthesize_sum_exemplars") {
  // Exact-mode mock keyed on full prompts.
  const std::string doc = "Hii ni makala ndefu kuhusu shule.";
  const PromptText xlt = build_xlt_sum_prompt(doc, "sw", kXltSumTemplate, registry());
  const DocSumExemplar cross{"Un document en français.", "Un résumé court.", "fr"};
  const PromptText with_cross = build_sum_prompt({cross}, doc, "sw", registry());

  std::map<std::string, std::string> responses;
  responses[xlt.text] = " Makala kuhusu shule.";
  responses[with_cross.text] = " Muhtasari wa makala.";
  RetryPolicy retry;
  retry.max_retries = 0;
  retry.initial_delay_ms = 1;
  Engine engine(MockBackend::exact(std::move(responses)), "mock", "sum", std::nullopt, retry, 2);

  SUBCASE("zero-shot XLT route when no cross-lingual exemplars exist") {
    const auto exemplars = synthesize_sum_exemplars({doc}, {}, engine, 1, "sw", registry());
    REQUIRE(exemplars.size() == 1);
    CHECK(exemplars[0].doc == doc);
    CHECK(exemplars[0].summary == "Makala kuhusu shule.");
    CHECK(exemplars[0].lang == "sw");
  }

  SUBCASE("diverse-exemplar route when cross-lingual exemplars exist") {
    const auto exemplars = synthesize_sum_exemplars({doc}, {cross}, engine, 1, "sw", registry());
    REQUIRE(exemplars.size() == 1);
    CHECK(exemplars[0].summary == "Muhtasari wa makala.");
  }

  SUBCASE("empty docs produce an empty result") {
    CHECK(synthesize_sum_exemplars({}, {}, engine, 3, "sw", registry()).empty());
  }

  SUBCASE("multi-line summaries truncate at the first line break") {
    std::map<std::string, std::string> multi;
    multi[xlt.text] = " Mstari wa kwanza.\nMstari wa pili.";
    Engine engine2(MockBackend::exact(std::move(multi)), "mock", "sum", std::nullopt, retry, 2);
    const auto exemplars = synthesize_sum_exemplars({doc}, {}, engine2, 1, "sw", registry());
    REQUIRE(exemplars.size() == 1);
    CHECK(exemplars[0].summary == "Mstari wa kwanza.");
  }
}

TEST_CASE("export_finetune renders the tagged template with exact loss spans") {
  SyntheticPair pair;
  pair.x_text = "Ụtụtụ ọma";
  pair.en_text = "Good morning";
  pair.x_lang = "ig";

  SUBCASE("e2x worked example") {
    const auto records = export_finetune({pair}, {Direction::E2X}, registry());
    REQUIRE(records.size() == 1);
    CHECK(records[0].text == "Good morning\n<Igbo>\nỤtụtụ ọma");
    CHECK(records[0].loss_start == 20);
    CHECK(records[0].loss_end == records[0].text.size());
    CHECK(records[0].text.substr(records[0].loss_start) == "Ụtụtụ ọma");
  }

  SUBCASE("x2e direction swaps input and output") {
    const auto records = export_finetune({pair}, {Direction::X2E}, registry());
    REQUIRE(records.size() == 1);
    CHECK(records[0].text == "Ụtụtụ ọma\n<English>\nGood morning");
    CHECK(records[0].text.substr(records[0].loss_start, records[0].loss_end - records[0].loss_start) ==
          "Good morning");
  }

  SUBCASE("both directions yield two records per pair") {
    const auto records = export_finetune({pair, pair}, {Direction::X2E, Direction::E2X}, registry());
    CHECK(records.size() == 4);
  }

  SUBCASE("flagged pairs are skipped") {
    SyntheticPair flagged = pair;
    flagged.flagged = true;
    const auto records = export_finetune({pair, flagged}, {Direction::E2X}, registry());
    CHECK(records.size() == 1);
  }
}

TEST_CASE("export_finetune loss-span substring equality holds under fuzzing") {
  Rng rng(424242);
  const std::vector<std::string> alphabets = {
      "abcdefghij", "ịụọṅẹ", "नमस्तेकखग", "你好世界中文", "привет", "مرحبا"};
  const auto random_text = [&](const std::string& alphabet) {
    const auto cps = decode_utf8(alphabet);
    std::string out;
    const std::size_t length = 1 + rng.below(24);
    for (std::size_t i = 0; i < length; ++i) {
      if (i > 0 && rng.below(5) == 0) out += ' ';
      append_utf8(out, cps[rng.below(cps.size())]);
    }
    return out;
  };
  std::vector<SyntheticPair> pairs;
  for (int i = 0; i < 500; ++i) {
    SyntheticPair pair;
    pair.x_lang = i % 2 == 0 ? "ig" : "hi";
    pair.x_text = random_text(alphabets[rng.below(alphabets.size())]);
    pair.en_text = random_text(alphabets[rng.below(alphabets.size())]);
    pairs.push_back(std::move(pair));
  }
  const auto records = export_finetune(pairs, {Direction::X2E, Direction::E2X}, registry());
  REQUIRE(records.size() == 1000);
  for (const auto& record : records) {
    REQUIRE(record.loss_start < record.loss_end);
    REQUIRE(record.loss_end <= record.text.size());
    const std::string span = record.text.substr(record.loss_start, record.loss_end - record.loss_start);
    const bool e2x = record.direction == Direction::E2X;
    // Span equals the output side byte-for-byte; find the source pair.
    bool found = false;
    for (const auto& pair : pairs) {
      if (e2x && pair.x_text == span && record.text.rfind(pair.en_text, 0) == 0) found = true;
      if (!e2x && pair.en_text == span && record.text.rfind(pair.x_text, 0) == 0) found = true;
      if (found) break;
    }
    CHECK(found);
  }
}

TEST_CASE("pipeline artifacts round-trip through JSONL") {
  SyntheticPair pair;
  pair.x_text = "igwe ịmụ";
  pair.en_text = "machine learning";
  pair.x_lang = "ig";
  pair.generator = "mock/tables";
  pair.prompt_digest = std::string(64, 'a');
  const SyntheticPair back = pair_from_json(pair_to_json(pair));
  CHECK(back.x_text == pair.x_text);
  CHECK(back.en_text == pair.en_text);
  CHECK(back.prompt_digest == pair.prompt_digest);

  const Exemplar exemplar{"a", "b", "fr", "en", Provenance::SyntheticBt};
  const Exemplar exemplar_back = exemplar_from_json(exemplar_to_json(exemplar));
  CHECK(exemplar_back.provenance == Provenance::SyntheticBt);
  CHECK(exemplar_back.src_lang == "fr");

  const PivotTriplet triplet{"x", "e", "y", "ta", "sw"};
  const PivotTriplet triplet_back = triplet_from_json(triplet_to_json(triplet));
  CHECK(triplet_back.en_text == "e");

  const DocSumExemplar doc{"document body", "summary", "sw"};
  const DocSumExemplar doc_back = doc_sum_from_json(doc_sum_to_json(doc));
  CHECK(doc_back.summary == "summary");
}
