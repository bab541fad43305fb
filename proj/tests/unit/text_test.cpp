#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "kglink/errors.hpp"
#include "kglink/text/embedding.hpp"
#include "kglink/text/tokenizer.hpp"
#include "kglink/text/utf8.hpp"
#include "kglink/text/vocabulary.hpp"

namespace {

using namespace kglink::text;
namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "kglink_text_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

TEST(Utf8, DecodesMultibyteAndReportsOffsets) {
  const auto cps = decode_utf8("aé€😀");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1].value, U'é');
  EXPECT_EQ(cps[1].byte_begin, 1u);
  EXPECT_EQ(cps[3].byte_end, 10u);
  EXPECT_EQ(to_utf8(to_u32("aé€😀")), "aé€😀");
}

TEST(Utf8, InvalidBytesBecomeReplacement) {
  const auto cps = decode_utf8("a\xff" "b");
  ASSERT_EQ(cps.size(), 3u);
  EXPECT_EQ(cps[1].value, char32_t{0xFFFD});
}

TEST(Tokenizer, SplitsTerminalPunctuation) {
  EXPECT_EQ(tokenize_words("ASIC is an integrated circuit (custom), really!"),
            (std::vector<std::string>{"ASIC", "is", "an", "integrated", "circuit", "(", "custom", ")", ",", "really",
                                      "!"}));
}

TEST(Tokenizer, KeepsInnerPunctuationAndCase) {
  EXPECT_EQ(tokenize_words("L'Heureux general-purpose 3.5 \"HMS\""),
            (std::vector<std::string>{"L'Heureux", "general-purpose", "3.5", "\"", "HMS", "\""}));
}

TEST(Tokenizer, OffsetsAreCodePoints) {
  const auto toks = tokenize("Köln, Tor.");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[0], (Token{"Köln", 0, 4}));
  EXPECT_EQ(toks[1], (Token{",", 4, 5}));
  EXPECT_EQ(toks[2], (Token{"Tor", 6, 9}));
  EXPECT_EQ(toks[3], (Token{".", 9, 10}));
}

TEST(Tokenizer, EmptyAndBlank) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \t\n").empty());
  EXPECT_EQ(tokenize_words("..."), (std::vector<std::string>{".", ".", "."}));
}

TEST(Vocabulary, EmptyStreamHasOnlyReservedTokens) {
  std::vector<std::vector<std::string>> none;
  auto v = Vocabulary::build(none, 10);
  EXPECT_EQ(v.size(), 5u);
  EXPECT_EQ(v.token(kPad), "<pad>");
  EXPECT_EQ(v.token(kUnk), "<unk>");
  EXPECT_EQ(v.token(kSos), "<s>");
  EXPECT_EQ(v.token(kEos), "</s>");
  EXPECT_EQ(v.token(kSep), "<sep>");
}

TEST(Vocabulary, RanksByFrequencyThenLexicographic) {
  std::vector<std::vector<std::string>> s{{"a", "a", "b"}};
  auto v = Vocabulary::build(s, 7);
  EXPECT_EQ(v.id("a"), 5);
  EXPECT_EQ(v.id("b"), 6);

  std::vector<std::vector<std::string>> ties{{"d", "c", "b", "c", "d", "a"}};
  auto t = Vocabulary::build(ties, 8);
  EXPECT_EQ(t.entries(), (std::vector<std::string>{"c", "d", "a"}));
}

TEST(Vocabulary, MinCountAndCap) {
  std::vector<std::vector<std::string>> s{{"x", "x", "x", "y", "y", "z"}};
  EXPECT_EQ(Vocabulary::build(s, 100, 2).entries(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(Vocabulary::build(s, 6).entries(), (std::vector<std::string>{"x"}));
  EXPECT_THROW(Vocabulary::build(s, 5), std::invalid_argument);
}

TEST(Vocabulary, SameCorpusGivesIdenticalFile) {
  std::vector<std::vector<std::string>> s{{"q", "r", "q", "s", "t", "t"}, {"r", "u"}};
  EXPECT_EQ(Vocabulary::build(s, 50).serialize(), Vocabulary::build(s, 50).serialize());
}

TEST(Vocabulary, EncodeDecode) {
  auto v = Vocabulary::from_tokens({"hello", "world"});
  EXPECT_TRUE(v.encode(std::vector<std::string>{}).empty());
  const std::vector<std::string> known{"world", "hello", "world"};
  EXPECT_EQ(v.decode(v.encode(known)), known);
  EXPECT_EQ(v.encode(std::vector<std::string>{"nope"}), (std::vector<int>{kUnk}));
  const int bad[] = {99};
  EXPECT_THROW(v.decode(bad), std::out_of_range);
}

TEST(Vocabulary, RoundTripOverRandomCorpora) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<std::string>> corpus(3);
    for (auto& stream : corpus)
      for (int i = 0; i < 40; ++i) stream.push_back("w" + std::to_string(rng() % 25));
    auto v = Vocabulary::build(corpus, 1000);
    for (const auto& stream : corpus) EXPECT_EQ(v.decode(v.encode(stream)), stream);
    // file round-trip
    const auto p = temp_file("vocab.txt", v.serialize());
    EXPECT_EQ(Vocabulary::load(p), v);
  }
}

TEST(Vocabulary, FromTokensRejectsDuplicates) {
  EXPECT_THROW(Vocabulary::from_tokens({"a", "a"}), std::invalid_argument);
  EXPECT_THROW(Vocabulary::from_tokens({"<unk>"}), std::invalid_argument);
}

TEST(Embedding, PassThroughForMatchingToken) {
  std::string line = "hello";
  std::vector<double> expect;
  for (int i = 0; i < 300; ++i) {
    expect.push_back(0.001 * (i + 1));
    line += " " + std::to_string(0.001 * (i + 1));
  }
  auto v = Vocabulary::from_tokens({"hello"});
  auto table = load_pretrained(temp_file("glove300.txt", line + "\n"), v, 300, 7);
  const auto row = table.matrix.data().subspan(static_cast<std::size_t>(v.id("hello")) * 300, 300);
  for (std::size_t i = 0; i < 300; ++i) EXPECT_DOUBLE_EQ(row[i], expect[i]);
  EXPECT_EQ(table.frozen_rows[static_cast<std::size_t>(v.id("hello"))], 1);
  EXPECT_EQ(table.frozen_rows[kUnk], 0);
}

TEST(Embedding, EmptyFileGivesZeroCoverage) {
  auto v = Vocabulary::from_tokens({"a", "b"});
  auto table = load_pretrained(temp_file("empty.txt", ""), v, 4, 3);
  EXPECT_EQ(table.coverage, 0.0);
  EXPECT_EQ(table.matrix.shape(), (kglink::numeric::Shape{7, 4}));
  const auto fresh = random_embeddings(v, 4, 3);
  for (std::size_t i = 0; i < table.matrix.size(); ++i) EXPECT_EQ(table.matrix.data()[i], fresh.matrix.data()[i]);
}

TEST(Embedding, CoverageCountsMatchedTokens) {
  auto v = Vocabulary::from_tokens({"a", "b", "c"});
  auto table = load_pretrained(temp_file("two.txt", "a 1 2\nzz 0 0\nc 3 4\n"), v, 2, 1);
  EXPECT_DOUBLE_EQ(table.coverage, 2.0 / 3.0);
  EXPECT_EQ(table.matched, 2u);
}

TEST(Embedding, MalformedLineReportsLineNumber) {
  auto v = Vocabulary::from_tokens({"a"});
  try {
    load_pretrained(temp_file("bad.txt", "a 1 2\nb 1 2\nc 1\n"), v, 2, 1);
    FAIL();
  } catch (const kglink::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_pretrained(temp_file("nan.txt", "a 1 x\n"), v, 2, 1), kglink::ParseError);
}

TEST(Embedding, DimensionMismatchIsConfigError) {
  auto v = Vocabulary::from_tokens({"a"});
  EXPECT_THROW(load_pretrained(temp_file("wide.txt", "a 1 2 3\n"), v, 2, 1), kglink::ConfigError);
}

TEST(Embedding, RandomRowsAreSeeded) {
  auto v = Vocabulary::from_tokens({"a", "b"});
  auto t1 = random_embeddings(v, 3, 11), t2 = random_embeddings(v, 3, 11), t3 = random_embeddings(v, 3, 12);
  for (std::size_t i = 0; i < t1.matrix.size(); ++i) {
    EXPECT_EQ(t1.matrix.data()[i], t2.matrix.data()[i]);
    EXPECT_LE(std::abs(t1.matrix.data()[i]), kEmbeddingInitScale);
  }
  EXPECT_NE(t1.matrix.data()[0], t3.matrix.data()[0]);
}

}  // namespace
