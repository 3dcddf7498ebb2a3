#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "poitour/corpus.hpp"
#include "poitour/subword.hpp"
#include "support.hpp"

namespace poitour {
namespace {

using Strings = std::vector<std::string>;

TEST(Ngrams, Enumeration) {
  EXPECT_EQ(extract_ngrams("rome", 3, 3), (Strings{"<ro", "rom", "ome", "me>", "<rome>"}));
  EXPECT_EQ(extract_ngrams("ab", 3, 3), (Strings{"<ab", "ab>", "<ab>"}));
  EXPECT_EQ(extract_ngrams("a", 4, 5), (Strings{"<a>"}));
}

TEST(Ngrams, RangeAndNoDuplicateWholeToken) {
  const auto g = extract_ngrams("ab", 3, 4);
  EXPECT_EQ(g, (Strings{"<ab", "ab>", "<ab>"}));
  for (const auto& s : extract_ngrams("Kings_Park", 3, 6)) {
    EXPECT_TRUE((s.size() >= 3 && s.size() <= 6) || s == "<Kings_Park>") << s;
  }
}

TEST(HashNgram, MatchesReferenceFnv1a) {
  // reference values computed independently of this implementation
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("<ro"), 0x6fd7bb182fe5d52cULL);
  EXPECT_EQ(hash_ngram("<ro", 2'000'000), 1'992'620u);
  EXPECT_EQ(hash_ngram("rom", 2'000'000), 943'417u);
  EXPECT_EQ(hash_ngram("<rome>", 2'000'000), 1'765'844u);
}

TEST(HashNgram, DeterministicAndInRange) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 5000; ++i) {
    std::string s(1 + gen() % 12, ' ');
    for (auto& c : s) c = static_cast<char>(33 + gen() % 94);
    const std::uint64_t buckets = 1 + gen() % 100'000;
    const auto h = hash_ngram(s, buckets);
    EXPECT_LT(h, buckets);
    EXPECT_EQ(h, hash_ngram(s, buckets));
  }
}

PoiTable letters() {
  PoiTable t;
  for (const char* id : {"A", "B", "C", "D"}) t.add({id, id, "", {0, 0}});
  return t;
}

TEST(BuildCorpus, OneSentencePerMultiVisitTrajectory) {
  const std::vector<Trajectory> ts{{"u1", {{"A", 0, 0}, {"B", 1, 1}, {"C", 2, 2}}},
                                   {"u1", {{"A", 0, 0}}},
                                   {"u2", {{"B", 0, 0}, {"D", 1, 1}}},
                                   {"u2", {{"C", 0, 0}, {"A", 1, 1}}}};
  const auto c = build_corpus(ts, letters());
  ASSERT_EQ(c.sentences.size(), 3u);
  EXPECT_EQ(c.sentences[0], (Sentence{"A", "B", "C"}));
  EXPECT_EQ(c.n_users, 2u);
}

TEST(BuildCorpus, EmptyIsAnError) {
  const std::vector<Trajectory> ts{{"u1", {{"A", 0, 0}}}};
  EXPECT_THROW(build_corpus(ts, letters()), DataError);
}

Corpus corpus_of(std::vector<Sentence> s) {
  Corpus c;
  c.sentences = std::move(s);
  c.n_users = 1;
  return c;
}

TEST(BuildVocab, ThresholdAndOrdering) {
  const auto c = corpus_of({{"A", "B", "A"}, {"A", "C"}});
  const auto v2 = build_vocab(c, 2);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2.token(0), "A");
  EXPECT_EQ(v2.count(0), 3);

  const auto v1 = build_vocab(c, 1);
  EXPECT_EQ(v1.size(), 3u);
  EXPECT_EQ(*v1.index_of("A"), 0);

  const auto tie = build_vocab(corpus_of({{"B", "A"}, {"A", "B"}}), 1);
  EXPECT_EQ(tie.token(0), "A");
  EXPECT_EQ(tie.token(1), "B");

  EXPECT_THROW(build_vocab(c, 10), DataError);
}

std::set<TrainingPair> as_set(const std::vector<TrainingPair>& v) { return {v.begin(), v.end()}; }

TEST(TrainingPairs, Adjacency) {
  const std::vector<std::int32_t> ab{0, 1};
  EXPECT_EQ(generate_training_pairs(ab, 1), (std::vector<TrainingPair>{{0, 1}, {1, 0}}));
  const std::vector<std::int32_t> a{0};
  EXPECT_TRUE(generate_training_pairs(a, 5).empty());
  const std::vector<std::int32_t> abc{0, 1, 2};
  EXPECT_EQ(generate_training_pairs(abc, 1), (std::vector<TrainingPair>{{0, 1}, {1, 0}, {1, 2}, {2, 1}}));
  Rng rng(3);
  EXPECT_EQ(generate_training_pairs(abc, 1, &rng), generate_training_pairs(abc, 1));
}

TEST(TrainingPairs, DynamicWindowSubsetProperty) {
  std::mt19937_64 gen(11);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::int32_t> s(1 + gen() % 12);
    for (auto& x : s) x = static_cast<std::int32_t>(gen() % 5);
    const int w = 1 + static_cast<int>(gen() % 5);
    Rng rng(gen());
    const auto drawn = as_set(generate_training_pairs(s, w, &rng));
    const auto full = as_set(generate_training_pairs(s, w));
    const auto wider = as_set(generate_training_pairs(s, w + 1));
    EXPECT_TRUE(std::includes(full.begin(), full.end(), drawn.begin(), drawn.end()));
    EXPECT_TRUE(std::includes(wider.begin(), wider.end(), full.begin(), full.end()));
  }
}

TEST(NegativeSampler, MatchesUnigramPowerDistribution) {
  const std::vector<std::int64_t> counts{50, 20, 10, 5, 1, 1, 30};
  const NegativeSampler sampler(counts);
  double z = 0;
  for (auto c : counts) z += std::pow(static_cast<double>(c), 0.75);
  std::vector<double> hits(counts.size());
  Rng rng(99);
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) hits[static_cast<std::size_t>(sampler(rng))] += 1;
  double max_dev = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = std::pow(static_cast<double>(counts[i]), 0.75) / z;
    EXPECT_NEAR(sampler.probability(i), expected, 1e-12);
    max_dev = std::max(max_dev, std::abs(hits[i] / draws - expected));
  }
  EXPECT_LT(max_dev, 0.01);
}

TEST(Rng, BelowIsInRangeAndUniformIsHalfOpen) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(rng.below(7), 7u);
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace poitour
