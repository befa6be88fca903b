#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cueload/app.hpp"
#include "cueload/classify.hpp"
#include "cueload/rng.hpp"
#include "cueload/synth.hpp"
#include "test_support.hpp"

using namespace cueload;

namespace {

struct Data {
  FeatureMatrix X;
  std::vector<int> y;
};

Data blobs(std::size_t per_class, double sigma, std::uint64_t seed, std::size_t noise_cols = 2) {
  static constexpr double centers[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < per_class * 4; ++i) {
    const int k = static_cast<int>(i % 4);
    std::vector<double> r = {centers[k][0] + sigma * rng.normal(),
                             centers[k][1] + sigma * rng.normal()};
    for (std::size_t j = 0; j < noise_cols; ++j) r.push_back(rng.uniform());
    rows.push_back(r);
    y.push_back(k);
  }
  return {FeatureMatrix::from_rows(rows), y};
}

Data separable_1d(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    rows.push_back({x});
    y.push_back(x > 0.5 ? 1 : 0);
  }
  return {FeatureMatrix::from_rows(rows), y};
}

double accuracy(std::span<const int> pred, std::span<const int> gold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) c += pred[i] == gold[i] ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(gold.size());
}

double norm2(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [i, x] : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(Tfidf, IdenticalDocumentsIdenticalVectors) {
  const std::vector<std::string> docs = {"ein zwei drei", "ein zwei drei", "vier"};
  const auto v = tfidf_fit_transform(docs);
  EXPECT_EQ(v[0], v[1]);
}

TEST(Tfidf, IdfMonotoneInDocumentFrequency) {
  const std::vector<std::string> docs = {"a common", "b common", "c common"};
  const auto vec = TfidfVectorizer::fit(docs);
  const auto& terms = vec.terms();
  const auto idx = [&](const std::string& t) {
    return static_cast<std::size_t>(std::find(terms.begin(), terms.end(), t) - terms.begin());
  };
  EXPECT_LT(vec.idf()[idx("common")], vec.idf()[idx("a")]);
  EXPECT_DOUBLE_EQ(vec.idf()[idx("common")], 1.0);
}

TEST(Tfidf, FrozenThreeDocumentRows) {
  // Oracle: tests/oracles/tfidf_oracle.py
  const std::vector<std::string> docs = {"der hund bellt", "der hund schläft der", "eine katze"};
  const auto vec = TfidfVectorizer::fit(docs);
  EXPECT_EQ(vec.terms(),
            (std::vector<std::string>{"bellt", "der", "eine", "hund", "katze", "schläft"}));
  const double idf[] = {1.6931471805599454, 1.2876820724517808, 1.6931471805599454,
                        1.2876820724517808, 1.6931471805599454, 1.6931471805599454};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(vec.idf()[i], idf[i], 1e-15);
  const double dense[3][6] = {
      {0.680918560398684, 0.5178561161676974, 0, 0.5178561161676974, 0, 0},
      {0, 0.7710058432202013, 0, 0.38550292161010064, 0, 0.5068900148458076},
      {0, 0, 0.7071067811865476, 0, 0.7071067811865476, 0}};
  const auto rows = vec.transform(docs);
  for (std::size_t r = 0; r < 3; ++r) {
    double got[6] = {};
    for (const auto& [j, x] : rows[r]) got[j] = x;
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(got[j], dense[r][j], 1e-12);
    EXPECT_NEAR(norm2(rows[r]), 1.0, 1e-9);
  }
}

TEST(Tfidf, MaxFeaturesByDocumentFrequencyThenLexicographic) {
  const std::vector<std::string> docs = {"zeta beta alpha", "zeta beta", "zeta gamma"};
  const auto vec = TfidfVectorizer::fit(docs, 3);
  EXPECT_EQ(vec.terms(), (std::vector<std::string>{"alpha", "beta", "zeta"}));
}

TEST(Tfidf, EmptyCorpusRejected) {
  EXPECT_THROW(TfidfVectorizer::fit(std::vector<std::string>{"", "..."}), ValidationError);
}

TEST(Tfidf, UnknownTermsGiveEmptyRow) {
  const std::vector<std::string> docs = {"a b"};
  const auto vec = TfidfVectorizer::fit(docs);
  EXPECT_TRUE(vec.transform("c d").empty());
}

TEST(Forest, SeparableTrainingAccuracy) {
  const auto d = separable_1d(200, 1);
  ForestConfig cfg;
  cfg.n_trees = 50;
  cfg.seed = 3;
  const auto m = train_forest(d.X, d.y, 2, cfg);
  EXPECT_EQ(accuracy(m.predict(d.X), d.y), 1.0);
}

TEST(Forest, DeterministicUnderSeed) {
  const auto d = blobs(30, 0.3, 2);
  ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.seed = 99;
  const auto a = train_forest(d.X, d.y, 4, cfg).predict(d.X);
  const auto b = train_forest(d.X, d.y, 4, cfg).predict(d.X);
  EXPECT_EQ(a, b);
}

TEST(Forest, BlobsAccuracy) {
  const auto train = blobs(50, 0.08, 10);
  const auto test = blobs(50, 0.08, 11);
  ForestConfig cfg;
  cfg.seed = 1;
  const auto m = train_forest(train.X, train.y, 4, cfg);
  EXPECT_GE(accuracy(m.predict(test.X), test.y), 0.95);
}

TEST(Forest, TreeOrderDoesNotChangePredictions) {
  const auto d = blobs(25, 0.4, 4);
  ForestConfig cfg;
  cfg.n_trees = 31;
  cfg.seed = 5;
  const auto m = train_forest(d.X, d.y, 4, cfg);
  std::vector<std::size_t> order(31);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    rng.shuffle(std::span(order));
    EXPECT_EQ(m.with_tree_order(order).predict(d.X), m.predict(d.X));
  }
}

TEST(Forest, SingleClassRejected) {
  const auto d = separable_1d(10, 1);
  const std::vector<int> y(10, 2);
  EXPECT_THROW(train_forest(d.X, y, 4, ForestConfig{}), ValidationError);
}

TEST(Forest, ThresholdsWithinTrainingRange) {
  const auto d = blobs(20, 0.3, 6);
  ForestConfig cfg;
  cfg.n_trees = 10;
  const auto m = train_forest(d.X, d.y, 4, cfg);
  for (const auto& tree : m.trees()) {
    for (const auto& n : tree.nodes()) {
      if (n.feature < 0) {
        EXPECT_NEAR(std::accumulate(n.value.begin(), n.value.end(), 0.0), 1.0, 1e-12);
        continue;
      }
      const auto col = d.X.column(static_cast<std::size_t>(n.feature));
      EXPECT_GE(n.threshold, *std::min_element(col.begin(), col.end()));
      EXPECT_LE(n.threshold, *std::max_element(col.begin(), col.end()));
    }
  }
}

TEST(Boosted, SeparableWithinTwentyRounds) {
  const auto d = separable_1d(200, 2);
  BoostedConfig cfg;
  cfg.n_rounds = 20;
  cfg.learning_rate = 0.3;
  const auto m = train_boosted(d.X, d.y, 2, cfg);
  EXPECT_EQ(accuracy(m.predict(d.X), d.y), 1.0);
}

TEST(Boosted, ZeroLearningRatePredictsPriorArgmax) {
  auto d = blobs(10, 0.1, 3);
  d.y[0] = 2;  // class 2 now the most frequent
  BoostedConfig cfg;
  cfg.learning_rate = 0.0;
  const auto pred = train_boosted(d.X, d.y, 4, cfg).predict(d.X);
  for (int p : pred) EXPECT_EQ(p, 2);
}

TEST(Boosted, BlobsCloseToForest) {
  const auto train = blobs(50, 0.08, 10);
  const auto test = blobs(50, 0.08, 11);
  ForestConfig fc;
  fc.seed = 1;
  BoostedConfig bc;
  bc.seed = 1;
  const double f = accuracy(train_forest(train.X, train.y, 4, fc).predict(test.X), test.y);
  const double b = accuracy(train_boosted(train.X, train.y, 4, bc).predict(test.X), test.y);
  EXPECT_NEAR(b, f, 0.05);
}

TEST(Boosted, ProbabilitiesOnSimplex) {
  const auto d = blobs(20, 0.3, 7);
  const auto m = train_boosted(d.X, d.y, 4, BoostedConfig{});
  for (std::size_t r = 0; r < d.X.rows(); ++r) {
    const auto p = m.predict_proba(d.X.row(r));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Boosted, DeterministicUnderSeed) {
  const auto d = blobs(30, 0.3, 2);
  BoostedConfig cfg;
  cfg.subsample = 0.7;
  cfg.seed = 4;
  EXPECT_EQ(train_boosted(d.X, d.y, 4, cfg).predict(d.X), train_boosted(d.X, d.y, 4, cfg).predict(d.X));
}

TEST(Fusion, PerfectCueSignalWithoutText) {
  Rng rng(5);
  std::vector<SparseVector> X;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int k = i % 4;
    std::vector<double> cues = {0.0, 0.0, 0.0};
    if (k > 0) cues[static_cast<std::size_t>(k - 1)] = 1.0;
    for (auto& c : cues) c += 0.05 * rng.uniform();
    X.push_back(fuse_features({}, 0, cues));
    y.push_back(k);
  }
  const auto m = train_fusion(X, y, 3, 4, FusionConfig{});
  std::vector<int> pred;
  for (const auto& x : X) pred.push_back(m.predict(x));
  EXPECT_EQ(accuracy(pred, y), 1.0);
}

TEST(Fusion, ZeroIterationsIsUniform) {
  FusionConfig cfg;
  cfg.max_epochs = 0;
  const std::vector<SparseVector> X = {{{0, 1.0}}, {{1, 1.0}}};
  const std::vector<int> y = {0, 1};
  const auto m = train_fusion(X, y, 2, 4, cfg);
  for (double p : m.predict_proba({{0, 3.0}, {1, -2.0}})) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Fusion, ProbabilitySimplex) {
  const auto d = blobs(20, 0.3, 1, 3);
  std::vector<SparseVector> X;
  for (std::size_t r = 0; r < d.X.rows(); ++r) X.push_back(fuse_features({}, 0, d.X.row(r)));
  const auto m = train_fusion(X, d.y, 5, 4, FusionConfig{});
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform(-20.0, 20.0);
    const auto p = m.predict_proba(fuse_features({}, 0, x));
    ASSERT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    for (double q : p) ASSERT_GE(q, 0.0);
  }
}

TEST(Fusion, DimensionMismatchRejected) {
  const std::vector<SparseVector> X = {{{5, 1.0}}};
  const std::vector<int> y = {0};
  EXPECT_THROW(train_fusion(X, y, 3, 4, FusionConfig{}), ValidationError);
}

TEST(Fusion, InformativeEmbeddingRaisesCvMacroF1) {
  GeneratorConfig g;
  g.seed = 21;
  g.signal = {0.3, 0.3, 0.3, 0.0};
  const auto corpus = generate_corpus(g);
  cueload::testing::TempDir dir("emb");
  cueload::testing::spit(dir / "t.conllu", corpus.conllu);
  cueload::testing::spit(dir / "g.csv", corpus.gaze_csv);
  cueload::testing::spit(dir / "a.csv", corpus.annotations_csv);
  RunConfig rc;
  rc.transcripts = (dir / "t.conllu").string();
  rc.gaze = (dir / "g.csv").string();
  rc.annotations = (dir / "a.csv").string();
  const auto ws = prepare(rc);
  // One embedding column correlated with the label, one pure noise column.
  Rng rng(4);
  std::vector<std::vector<double>> emb;
  for (const auto& r : ws->records) {
    emb.push_back({static_cast<double>(r.label) + 0.5 * rng.normal(), rng.normal()});
  }
  ClassifySuiteConfig cfg;
  cfg.seed = 3;
  const ClassifyDataset without{ws->records, {}};
  const ClassifyDataset with{ws->records, emb};
  const auto a = run_classifier(without, ClassifierKind::Fusion, FeatureSetting::TextAndCues, cfg, 0.7, 5);
  const auto b = run_classifier(with, ClassifierKind::Fusion, FeatureSetting::TextAndCues, cfg, 0.7, 5);
  EXPECT_GT(b.cv.macro_f1.mean, a.cv.macro_f1.mean);
}

TEST(Split, ProportionsPreserved) {
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) y.push_back(i % 4);
  const auto s = stratified_split(y, 0.7, 42);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.test.size(), 30u);
  std::array<int, 4> per{};
  for (auto i : s.train) ++per[static_cast<std::size_t>(y[i])];
  for (int c : per) {
    EXPECT_GE(c, 17);
    EXPECT_LE(c, 18);
  }
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 100u);
}

TEST(Split, Guards) {
  std::vector<int> y = {0, 0, 1, 1};
  EXPECT_THROW(stratified_split(y, 1.0, 1), UsageError);
  EXPECT_THROW(stratified_split(y, 0.0, 1), UsageError);
  y.push_back(2);
  EXPECT_THROW(stratified_split(y, 0.5, 1), ValidationError);
}

TEST(Split, DeterministicUnderSeed) {
  std::vector<int> y;
  for (int i = 0; i < 57; ++i) y.push_back(i % 3);
  const auto a = stratified_split(y, 0.7, 8);
  const auto b = stratified_split(y, 0.7, 8);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(stratified_split(y, 0.7, 9).train, a.train);
}

TEST(KFold, FoldsPartitionRecords) {
  std::vector<int> y;
  for (int i = 0; i < 103; ++i) y.push_back(i % 4 == 3 ? 3 : i % 3);
  const auto folds = stratified_folds(y, 10, 5);
  std::vector<int> seen(y.size(), 0);
  for (const auto& f : folds) {
    for (auto i : f) ++seen[i];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  std::size_t lo = y.size(), hi = 0;
  for (const auto& f : folds) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  EXPECT_LE(hi - lo, 1u);
}

TEST(KFold, PerfectStub) {
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) y.push_back(i % 4);
  const auto cv = kfold_cv(y, 10, 1, [&](auto, std::span<const std::size_t> test) {
    std::vector<int> p;
    for (auto i : test) p.push_back(y[i]);
    return p;
  });
  EXPECT_EQ(cv.accuracy.mean, 1.0);
  EXPECT_EQ(cv.accuracy.sd, 0.0);
  EXPECT_EQ(cv.macro_f1.mean, 1.0);
}

TEST(KFold, ConstantStubAtChance) {
  std::vector<int> y;
  for (int i = 0; i < 400; ++i) y.push_back(i % 4);
  const auto cv = kfold_cv(y, 10, 1, [](auto, std::span<const std::size_t> test) {
    return std::vector<int>(test.size(), 0);
  });
  EXPECT_NEAR(cv.accuracy.mean, 0.25, 1e-12);
  EXPECT_LT(cv.accuracy.sd, 0.01);
}

TEST(KFold, TooFewPerClass) {
  std::vector<int> y = {0, 0, 0, 1, 1};
  EXPECT_THROW(stratified_folds(y, 3, 1), ValidationError);
}

TEST(KFold, RandomLabelsStayNearChance) {
  int inside = 0;
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng(derive_seed(600, static_cast<std::uint64_t>(rep)));
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
      rows.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
      y.push_back(i % 4);
    }
    rng.shuffle(std::span(y));
    const auto X = FeatureMatrix::from_rows(rows);
    ForestConfig fc;
    fc.n_trees = 15;
    fc.seed = static_cast<std::uint64_t>(rep);
    const auto cv = kfold_cv(y, 10, static_cast<std::uint64_t>(rep),
                             [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
                               std::vector<std::vector<double>> a, b;
                               std::vector<int> ya;
                               for (auto i : tr) {
                                 a.push_back(rows[i]);
                                 ya.push_back(y[i]);
                               }
                               for (auto i : te) b.push_back(rows[i]);
                               return train_forest(FeatureMatrix::from_rows(a), ya, 4, fc)
                                   .predict(FeatureMatrix::from_rows(b));
                             });
    if (cv.accuracy.mean >= 0.15 && cv.accuracy.mean <= 0.35) ++inside;
  }
  EXPECT_GE(inside, 48);
}

TEST(Evaluate, AllCorrect) {
  const std::vector<int> y = {0, 1, 2, 3, 3, 2};
  const auto r = evaluate(y, y);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  for (std::size_t a = 0; a < 4; ++a) {
    EXPECT_EQ(r.per_class[a].precision, 1.0);
    EXPECT_EQ(r.per_class[a].recall, 1.0);
    for (std::size_t b = 0; b < 4; ++b) {
      if (a != b) {
        EXPECT_EQ(r.confusion[a][b], 0u);
      }
    }
  }
}

TEST(Evaluate, CyclicShiftIsWorstCase) {
  const std::vector<int> gold = {0, 1, 2, 3, 0, 1};
  std::vector<int> pred;
  for (int g : gold) pred.push_back((g + 1) % 4);
  const auto r = evaluate(pred, gold);
  EXPECT_EQ(r.accuracy, 0.0);
  for (const auto& m : r.per_class) EXPECT_EQ(m.recall, 0.0);
}

TEST(Evaluate, RecallByDirectCount) {
  const std::vector<int> gold(10, 2);
  std::vector<int> pred(8, 2);
  pred.push_back(0);
  pred.push_back(0);
  const auto r = evaluate(pred, gold);
  EXPECT_DOUBLE_EQ(r.per_class[2].recall, 0.8);
  EXPECT_EQ(r.per_class[2].support, 10u);
  EXPECT_TRUE(r.per_class[0].precision_defined);
  EXPECT_FALSE(r.per_class[0].recall_defined);
}

TEST(Evaluate, ConfusionInvariants) {
  Rng rng(3);
  std::vector<int> gold, pred;
  for (int i = 0; i < 300; ++i) {
    gold.push_back(static_cast<int>(rng.index(4)));
    pred.push_back(static_cast<int>(rng.index(4)));
  }
  const auto r = evaluate(pred, gold);
  std::size_t trace = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    trace += r.confusion[k][k];
    std::size_t row = 0;
    for (auto c : r.confusion[k]) row += c;
    EXPECT_EQ(row, r.per_class[k].support);
  }
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(trace) / 300.0);
}

TEST(Evaluate, MacroF1InvariantUnderRelabeling) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> gold, pred;
    for (int i = 0; i < 120; ++i) {
      gold.push_back(static_cast<int>(rng.index(4)));
      pred.push_back(rng.bernoulli(0.6) ? gold.back() : static_cast<int>(rng.index(4)));
    }
    std::vector<int> perm = {0, 1, 2, 3};
    rng.shuffle(std::span(perm));
    std::vector<int> g2, p2;
    for (int g : gold) g2.push_back(perm[static_cast<std::size_t>(g)]);
    for (int p : pred) p2.push_back(perm[static_cast<std::size_t>(p)]);
    EXPECT_NEAR(evaluate(pred, gold).macro_f1, evaluate(p2, g2).macro_f1, 1e-15);
  }
}

TEST(Evaluate, LengthMismatch) {
  EXPECT_THROW(evaluate(std::vector<int>{0, 1}, std::vector<int>{0}), ValidationError);
}

TEST(Embeddings, ImportValidatesDimension) {
  const auto ok = import_embeddings(
      "{\"dimension\": 2}\n{\"dialogue_id\":\"d1\",\"utterance_id\":\"u1\",\"embedding\":[0.5,1]}\n");
  EXPECT_EQ(ok.at({"d1", "u1"}), (std::vector<double>{0.5, 1.0}));
  EXPECT_THROW(import_embeddings("{\"dimension\": 3}\n{\"dialogue_id\":\"d1\",\"utterance_id\":"
                                 "\"u1\",\"embedding\":[0.5,1]}\n"),
               ValidationError);
  EXPECT_THROW(import_embeddings("{\"dialogue_id\":\"d1\"}\n"), ParseError);
  EXPECT_THROW(import_embeddings(""), ParseError);
}

TEST(Embeddings, WindowMeanOverAllUtterances) {
  const auto corpus = parse_conllu(cueload::testing::slurp(cueload::testing::data_dir() / "toy" / "toy.conllu"));
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u3", State::NonUnderstanding}};
  const auto w = build_context_windows(corpus.utterances, ann, {});
  const std::map<RecordKey, std::vector<double>> emb = {
      {{"d1", "u2"}, {100.0}}, {{"d1", "u3"}, {1.0}}, {{"d1", "u4"}, {3.0}}};
  EXPECT_NEAR(window_embedding(w[0], emb, 1)[0], 104.0 / 3.0, 1e-12);
  const std::map<RecordKey, std::vector<double>> partial = {{{"d1", "u4"}, {3.0}}};
  EXPECT_EQ(window_embedding(w[0], partial, 1), std::vector<double>{3.0});
}

TEST(Suite, RunIsDeterministic) {
  GeneratorConfig g;
  g.seed = 2;
  g.n_dialogues = 10;
  g.signal = {1, 1, 1, 0.3};
  const auto corpus = generate_corpus(g);
  cueload::testing::TempDir dir("det");
  cueload::testing::spit(dir / "t.conllu", corpus.conllu);
  cueload::testing::spit(dir / "g.csv", corpus.gaze_csv);
  cueload::testing::spit(dir / "a.csv", corpus.annotations_csv);
  RunConfig rc;
  rc.transcripts = (dir / "t.conllu").string();
  rc.gaze = (dir / "g.csv").string();
  rc.annotations = (dir / "a.csv").string();
  const auto ws = prepare(rc);
  ClassifySuiteConfig cfg;
  cfg.forest.n_trees = 20;
  cfg.seed = 5;
  const ClassifyDataset data{ws->records, {}};
  for (auto kind : {ClassifierKind::Forest, ClassifierKind::Boosted, ClassifierKind::Fusion}) {
    const auto a = run_classifier(data, kind, FeatureSetting::TextAndCues, cfg, 0.7, 5);
    const auto b = run_classifier(data, kind, FeatureSetting::TextAndCues, cfg, 0.7, 5);
    EXPECT_EQ(a.holdout.confusion, b.holdout.confusion);
    EXPECT_EQ(a.cv.fold_accuracy, b.cv.fold_accuracy);
  }
}
