#include <gtest/gtest.h>

#include <string>

#include "cueload/corpus.hpp"
#include "test_support.hpp"

using namespace cueload;
using cueload::testing::data_dir;
using cueload::testing::slurp;

namespace {

std::string sentence(const std::string& utt, const std::string& rows,
                     const std::string& dialogue = "d1", const std::string& speaker = "Explainer",
                     const std::string& start = "0", const std::string& end = "1") {
  return "# dialogue_id = " + dialogue + "\n# utterance_id = " + utt + "\n# speaker = " +
         speaker + "\n# start = " + start + "\n# end = " + end + "\n" + rows + "\n";
}

std::string row(int id, const std::string& form, const std::string& head,
                const std::string& misc = "_") {
  return std::to_string(id) + "\t" + form + "\t_\t_\t_\t_\t" + head + "\t_\t_\t" + misc + "\n";
}

}  // namespace

TEST(Conllu, MinimalTwoTokenTree) {
  const auto r = parse_conllu(sentence("u1", row(1, "a", "0") + row(2, "b", "1")));
  ASSERT_EQ(r.utterances.size(), 1u);
  const auto& u = r.utterances[0];
  EXPECT_EQ(u.tokens.size(), 2u);
  EXPECT_EQ(*u.tokens[0].head, 0);
  EXPECT_EQ(*u.tokens[1].head, 1);
  EXPECT_TRUE(u.has_tree());
}

TEST(Conllu, SelfLoopIsStructureError) {
  EXPECT_THROW(parse_conllu(sentence("u1", row(1, "a", "0") + row(2, "b", "2"))),
               StructureError);
}

TEST(Conllu, CycleNamesUtterance) {
  const auto text = sentence("u7", row(1, "a", "0") + row(2, "b", "3") + row(3, "c", "2"));
  try {
    parse_conllu(text);
    FAIL() << "expected StructureError";
  } catch (const StructureError& e) {
    EXPECT_NE(std::string(e.what()).find("u7"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("cyclic"), std::string::npos);
  }
}

TEST(Conllu, MultipleRootsRejected) {
  EXPECT_THROW(parse_conllu(sentence("u1", row(1, "a", "0") + row(2, "b", "0"))),
               StructureError);
}

TEST(Conllu, HeadOutOfRangeRejected) {
  EXPECT_THROW(parse_conllu(sentence("u1", row(1, "a", "0") + row(2, "b", "5"))),
               StructureError);
}

TEST(Conllu, ColumnCountErrorCarriesLineNumber) {
  const auto text = sentence("u1", row(1, "a", "0") + "2\tb\t_\t_\n");
  try {
    parse_conllu(text, "bad.conllu");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("bad.conllu:7"), std::string::npos);
  }
}

TEST(Conllu, MissingMetadataRejected) {
  const std::string text = "# dialogue_id = d1\n# speaker = Explainer\n# start = 0\n# end = 1\n" +
                           row(1, "a", "0") + "\n";
  try {
    parse_conllu(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("utterance_id"), std::string::npos);
  }
}

TEST(Conllu, UnknownSpeakerRejected) {
  EXPECT_THROW(parse_conllu(sentence("u1", row(1, "a", "0"), "d1", "Narrator")), ParseError);
}

TEST(Conllu, PartialTreeRejected) {
  EXPECT_THROW(parse_conllu(sentence("u1", row(1, "a", "0") + row(2, "b", "_"))),
               StructureError);
}

TEST(Conllu, UnparsedUtteranceKeptWithoutTree) {
  const auto r = parse_conllu(sentence("u1", row(1, "a", "_") + row(2, "b", "_")));
  ASSERT_EQ(r.utterances.size(), 1u);
  EXPECT_FALSE(r.utterances[0].has_tree());
}

TEST(Conllu, MultiwordAndEmptyNodesSkipped) {
  const auto r = parse_conllu(sentence(
      "u1", "1-2\tvom\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(1, "von", "0") + row(2, "dem", "1") +
                "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n"));
  EXPECT_EQ(r.skipped_lines, 2u);
  EXPECT_EQ(r.utterances[0].tokens.size(), 2u);
}

TEST(Conllu, TokenTimesDriveSpan) {
  const auto r = parse_conllu(sentence(
      "u1", row(1, "a", "0", "Start=0.2|End=0.4") + row(2, "b", "1", "Start=0.4|End=0.9"), "d1",
      "Explainer", "0", "2"));
  const auto [lo, hi] = r.utterances[0].span();
  EXPECT_DOUBLE_EQ(lo, 0.2);
  EXPECT_DOUBLE_EQ(hi, 0.9);
}

TEST(Conllu, ToyFixtureHasTwelveUtterancesNoWarnings) {
  const auto r = parse_conllu(slurp(data_dir() / "toy" / "toy.conllu"));
  EXPECT_EQ(r.utterances.size(), 12u);
  EXPECT_EQ(r.skipped_lines, 0u);
  int trees = 0;
  for (const auto& u : r.utterances) trees += u.has_tree() ? 1 : 0;
  EXPECT_EQ(trees, 11);
}

TEST(Conllu, WriteParseRoundTrip) {
  const auto first = parse_conllu(slurp(data_dir() / "toy" / "toy.conllu"));
  const auto text = write_conllu(first.utterances);
  const auto second = parse_conllu(text);
  EXPECT_EQ(first.utterances, second.utterances);
  EXPECT_EQ(write_conllu(second.utterances), text);
}

TEST(Conllu, CrlfInputAccepted) {
  std::string text = sentence("u1", row(1, "a", "0") + row(2, "b", "1"));
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(parse_conllu(crlf).utterances, parse_conllu(text).utterances);
}

TEST(Gaze, TwoSamplesOneDialogue) {
  const auto g = parse_gaze("dialogue_id,time,label\nd1,0.0,41\nd1,0.1,41\n");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.at("d1").size(), 2u);
}

TEST(Gaze, LabelBounds) {
  EXPECT_THROW(parse_gaze("dialogue_id,time,label\nd1,0.0,82\n"), ValidationError);
  EXPECT_THROW(parse_gaze("dialogue_id,time,label\nd1,0.0,0\n"), ValidationError);
  EXPECT_NO_THROW(parse_gaze("dialogue_id,time,label\nd1,0.0,1\nd1,0.1,81\n"));
}

TEST(Gaze, NonMonotoneTimeListsRow) {
  try {
    parse_gaze("dialogue_id,time,label\nd1,0.5,41\nd1,0.2,40\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("d1,0.2,40"), std::string::npos);
  }
}

TEST(Gaze, InterleavedDialoguesAllowed) {
  const auto g = parse_gaze("dialogue_id,time,label\nd1,0.5,41\nd2,0.1,40\nd1,0.6,40\n");
  EXPECT_EQ(g.at("d1").size(), 2u);
  EXPECT_EQ(g.at("d2").size(), 1u);
}

TEST(Gaze, BadHeaderRejected) {
  EXPECT_THROW(parse_gaze("d,t,l\nd1,0.0,41\n"), ParseError);
}

TEST(Annotations, SingleRow) {
  const auto a = parse_annotations("dialogue_id,utterance_id,state\nd1,u3,NU\n");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].dialogue_id, "d1");
  EXPECT_EQ(a[0].utterance_id, "u3");
  EXPECT_EQ(a[0].state, State::NonUnderstanding);
}

TEST(Annotations, UnknownState) {
  try {
    parse_annotations("dialogue_id,utterance_id,state\nd1,u3,XX\n");
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown state"), std::string::npos);
  }
}

TEST(Annotations, StateCounts) {
  std::string csv = "dialogue_id,utterance_id,state\n";
  const std::pair<const char*, int> spec[] = {{"U", 176}, {"PU", 162}, {"NU", 191}, {"MU", 113}};
  int n = 0;
  for (auto [code, count] : spec) {
    for (int i = 0; i < count; ++i) csv += "d1,u" + std::to_string(++n) + "," + code + "\n";
  }
  const auto counts = state_counts(parse_annotations(csv));
  EXPECT_EQ(counts[0], 176u);
  EXPECT_EQ(counts[1], 162u);
  EXPECT_EQ(counts[2], 191u);
  EXPECT_EQ(counts[3], 113u);
}

class Windows : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus = parse_conllu(slurp(data_dir() / "toy" / "toy.conllu"));
    gaze = parse_gaze(slurp(data_dir() / "toy" / "gaze.csv"));
  }
  ConlluResult corpus;
  GazeStreams gaze;
};

TEST_F(Windows, FirstUtteranceHasNoPrev) {
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u1", State::Understanding}};
  const auto w = build_context_windows(corpus.utterances, ann, gaze);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].prev, nullptr);
  ASSERT_NE(w[0].next, nullptr);
  EXPECT_EQ(w[0].next->id, "u2");
  EXPECT_EQ(w[0].utterances().size(), 2u);
}

TEST_F(Windows, MiddleUtteranceHasBothNeighbours) {
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u4", State::Misunderstanding}};
  const auto w = build_context_windows(corpus.utterances, ann, gaze);
  ASSERT_NE(w[0].prev, nullptr);
  ASSERT_NE(w[0].next, nullptr);
  EXPECT_EQ(w[0].prev->id, "u3");
  EXPECT_EQ(w[0].curr->id, "u4");
  EXPECT_EQ(w[0].next->id, "u5");
  EXPECT_EQ(w[0].id, "d1:u4");
}

TEST_F(Windows, LastUtteranceHasNoNext) {
  const std::vector<UnderstandingAnnotation> ann = {{"d2", "u5", State::Understanding}};
  const auto w = build_context_windows(corpus.utterances, ann, gaze);
  EXPECT_EQ(w[0].next, nullptr);
  EXPECT_TRUE(w[0].gaze.empty());
}

TEST_F(Windows, TokenTimesWidenOrNarrowSpan) {
  // d1:u3 carries token times [2.7, 4.9]; its neighbours give [2.1, 7.0].
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u3", State::NonUnderstanding}};
  const auto w = build_context_windows(corpus.utterances, ann, gaze);
  EXPECT_DOUBLE_EQ(w[0].span_start, 2.1);
  EXPECT_DOUBLE_EQ(w[0].span_end, 7.0);
  EXPECT_EQ(w[0].gaze.size(), 10u);  // samples at 2.5 .. 7.0
}

TEST_F(Windows, MissingUtteranceNamesIds) {
  const std::vector<UnderstandingAnnotation> ann = {{"d9", "u42", State::Understanding}};
  try {
    build_context_windows(corpus.utterances, ann, gaze);
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_NE(std::string(e.what()).find("u42"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("d9"), std::string::npos);
  }
}

TEST_F(Windows, DuplicateAnnotationGetsDistinctId) {
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u4", State::Misunderstanding},
                                                    {"d1", "u4", State::Understanding}};
  const auto w = build_context_windows(corpus.utterances, ann, gaze);
  EXPECT_EQ(w[0].id, "d1:u4");
  EXPECT_EQ(w[1].id, "d1:u4#2");
}

TEST(GazeAlignment, IntervalMembership) {
  const auto g = parse_gaze("dialogue_id,time,label\nd1,0.5,41\nd1,5.0,40\n");
  const auto in = gaze_in_span(g.at("d1"), 0.0, 1.0);
  ASSERT_EQ(in.size(), 1u);
  EXPECT_EQ(in[0].label, 41);
  EXPECT_EQ(gaze_in_span(g.at("d1"), 0.5, 5.0).size(), 2u);  // closed interval
  EXPECT_TRUE(gaze_in_span(g.at("d1"), 1.0, 4.9).empty());
}

TEST(GazeAlignment, WindowSpanSelectsOneSample) {
  const auto corpus = parse_conllu(sentence("u1", row(1, "a", "0"), "d1", "Explainer", "0", "1"));
  const auto g = parse_gaze("dialogue_id,time,label\nd1,0.5,41\nd1,5.0,40\n");
  const std::vector<UnderstandingAnnotation> ann = {{"d1", "u1", State::Understanding}};
  const auto w = build_context_windows(corpus.utterances, ann, g);
  ASSERT_EQ(w[0].gaze.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0].gaze[0].time, 0.5);
}
