#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bayeslab/ingest.hpp"
#include "bayeslab/script.hpp"

using namespace bayeslab;

namespace {

ObservationSet load_group(int k) {
  const auto path = std::string(BAYESLAB_TEST_DATA) + "/group" + std::to_string(k) + ".csv";
  return parse_observations(read_text_file(path), "group" + std::to_string(k)).set;
}

TEST(ParseObservations, Basic) {
  const auto parsed = parse_observations("room_id,lights_on\nA101,1\nA102,0", "g");
  EXPECT_EQ(parsed.set.size(), 2u);
  EXPECT_EQ(to_binomial(parsed.set), BinomialData(2, 1));
  EXPECT_TRUE(parsed.warnings.empty());
}

TEST(ParseObservations, InvalidValueReportsLine) {
  try {
    parse_observations("room_id,lights_on\nA101,2", "g");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_observations("room_id,lights_on\r\nA101,1\r\n\r\nB2,maybe\r\n", "g");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseObservations, EmptyDataSection) {
  EXPECT_EQ(to_binomial(parse_observations("room_id,lights_on\n", "g").set), BinomialData(0, 0));
  EXPECT_EQ(to_binomial(parse_observations("room_id,lights_on", "g").set), BinomialData(0, 0));
}

TEST(ParseObservations, MissingHeader) {
  EXPECT_THROW(parse_observations("A101,1\nA102,0\n", "g"), FormatError);
  EXPECT_THROW(parse_observations("", "g"), FormatError);
  EXPECT_THROW(parse_observations("room,lights\nA,1\n", "g"), FormatError);
}

TEST(ParseObservations, AliasesWhitespaceQuotesAndLineEndings) {
  const std::string raw =
      "\xEF\xBB\xBFroom_id,lights_on\r\n"
      "  A101 , YES \r\n"
      "\n"
      "\"Hall, East 2\",no\r\n"
      "\"He said \"\"hi\"\"\",True\n"
      "B7,FALSE\n";
  const auto parsed = parse_observations(raw, "g");
  ASSERT_EQ(parsed.set.size(), 4u);
  EXPECT_EQ(parsed.set.observations[0], (Observation{"A101", true}));
  EXPECT_EQ(parsed.set.observations[1], (Observation{"Hall, East 2", false}));
  EXPECT_EQ(parsed.set.observations[2], (Observation{"He said \"hi\"", true}));
  EXPECT_EQ(parsed.set.observations[3], (Observation{"B7", false}));
}

TEST(ParseObservations, RowShapeErrors) {
  EXPECT_THROW(parse_observations("room_id,lights_on\nA1,1,extra\n", "g"), ValidationError);
  EXPECT_THROW(parse_observations("room_id,lights_on\n   ,1\n", "g"), ValidationError);
  EXPECT_THROW(parse_observations("room_id,lights_on\n\"A1,1\n", "g"), ValidationError);
}

TEST(ParseObservations, DuplicatesWarnByDefault) {
  const std::string raw = "room_id,lights_on\nA1,1\nA2,0\nA1,0\n";
  const auto parsed = parse_observations(raw, "g");
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_EQ(parsed.warnings[0].line, 4u);
  EXPECT_EQ(parsed.set.size(), 3u);
  EXPECT_THROW(parse_observations(raw, "g", ParseOptions{.strict_duplicates = true}), ValidationError);
}

TEST(SerializeObservations, CanonicalForm) {
  const auto parsed = parse_observations("room_id,lights_on\r\nA101,yes\r\n\"x,y\",false\r\n", "g");
  EXPECT_EQ(serialize_observations(parsed.set), "room_id,lights_on\nA101,1\n\"x,y\",0\n");
}

TEST(SerializeObservations, ParseSerializeParseIsIdentity) {
  std::mt19937_64 rng(4);
  const std::string alphabet = "AB1 ,\"-_x";
  for (int trial = 0; trial < 300; ++trial) {
    ObservationSet set{"g", {}};
    const int rows = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int r = 0; r < rows; ++r) {
      std::string room;
      const int len = std::uniform_int_distribution<int>(1, 8)(rng);
      for (int i = 0; i < len; ++i) room.push_back(alphabet[rng() % alphabet.size()]);
      room = std::string(detail::trim(room));
      if (room.empty()) room = "R";
      set.observations.push_back({room, static_cast<bool>(rng() & 1)});
    }
    const auto text = serialize_observations(set);
    const auto again = parse_observations(text, "g").set;
    ASSERT_EQ(again, set) << text;
    ASSERT_EQ(serialize_observations(again), text);
  }
}

TEST(ToBinomial, FixtureCounts) {
  EXPECT_EQ(to_binomial(ObservationSet{"g", {}}), BinomialData(0, 0));
  const auto g1 = load_group(1);
  // independent count over the raw file lines
  const auto text = read_text_file(std::string(BAYESLAB_TEST_DATA) + "/group1.csv");
  Count rows = 0, ones = 0;
  for (std::size_t pos = text.find('\n') + 1; pos < text.size();) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end - pos);
    ++rows;
    if (line.back() == '1') ++ones;
    pos = end + 1;
  }
  EXPECT_EQ(to_binomial(g1), BinomialData(rows, ones));
  EXPECT_EQ(to_binomial(g1), BinomialData(50, 20));
  EXPECT_EQ(to_binomial(take_first(g1, 5)), BinomialData(5, 2));
}

TEST(TakeFirst, PrefixSemantics) {
  const auto g2 = load_group(2);
  ASSERT_EQ(g2.size(), 52u);
  const auto five = take_first(g2, 5);
  ASSERT_EQ(five.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(five.observations[i], g2.observations[i]);
  EXPECT_EQ(take_first(g2, 0).size(), 0u);
  EXPECT_EQ(take_first(g2, g2.size()), g2);
  EXPECT_THROW(take_first(g2, 53), DomainError);
  for (std::size_t k = 0; k <= g2.size(); ++k) EXPECT_EQ(to_binomial(take_first(g2, k)).n(), k);
  EXPECT_EQ(to_binomial(take_first(g2, 7)) + to_binomial(drop_first(g2, 7)), to_binomial(g2));
}

TEST(Pool, FourGroupsMakeTheClass) {
  const std::vector<ObservationSet> groups{load_group(1), load_group(2), load_group(3), load_group(4)};
  EXPECT_EQ(groups[0].size(), 50u);
  EXPECT_EQ(groups[1].size(), 52u);
  EXPECT_EQ(groups[2].size(), 48u);
  EXPECT_EQ(groups[3].size(), 55u);
  const auto pooled = pool(groups);
  EXPECT_EQ(pooled.group_label, "pooled");
  BinomialData sum;
  for (const auto& g : groups) sum = sum + to_binomial(g);
  EXPECT_EQ(to_binomial(pooled), sum);
  EXPECT_EQ(to_binomial(pooled).n(), 205u);
  EXPECT_EQ(pooled.observations.front(), groups[0].observations.front());
  EXPECT_EQ(pooled.observations.back(), groups[3].observations.back());
}

TEST(Pool, SingleAndEmpty) {
  const auto g = load_group(3);
  const auto pooled = pool(std::vector<ObservationSet>{g});
  EXPECT_EQ(pooled.observations, g.observations);
  EXPECT_EQ(pooled.group_label, "pooled");
  EXPECT_THROW(pool(std::vector<ObservationSet>{}), DomainError);
}

}  // namespace
