#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sop/history.hpp"

using namespace sop;
using sop::testing::HistoryBuilder;

TEST(ParseHistory, WriteInvoke) {
  auto ev = parse_history(
      R"({"index":0,"client":"c","phase":"invoke","f":"write","key":"x","value":1,"time":0})");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].client, "c");
  EXPECT_EQ(ev[0].phase, Phase::Invoke);
  EXPECT_EQ(ev[0].kind, OpKind::write(1));
  EXPECT_EQ(ev[0].key, "x");
  EXPECT_EQ(ev[0].time, 0);
}

TEST(ParseHistory, EmptyInput) {
  EXPECT_TRUE(parse_history("").empty());
  EXPECT_TRUE(parse_history("\n  \n").empty());
}

TEST(ParseHistory, UnknownPhaseNamesLine) {
  const std::string text =
      "{\"index\":0,\"client\":\"c\",\"phase\":\"invoke\",\"f\":\"read\",\"key\":\"x\",\"value\":null,\"time\":0}\n"
      "{\"index\":1,\"client\":\"c\",\"phase\":\"done\",\"f\":\"read\",\"key\":\"x\",\"value\":1,\"time\":3}\n";
  try {
    parse_history(text);
    FAIL() << "accepted phase done";
  } catch (const HistoryError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("done"), std::string::npos);
  }
}

TEST(ParseHistory, RejectsBadShape) {
  EXPECT_THROW(parse_history("not json"), HistoryError);
  EXPECT_THROW(parse_history(R"({"index":0,"client":"c","phase":"invoke","f":"write","key":"x","time":0})"),
               HistoryError);
  EXPECT_THROW(parse_history(R"({"index":0,"client":"c","phase":"invoke","f":"write","key":"x","value":1,"time":0,"extra":1})"),
               HistoryError);
  EXPECT_THROW(parse_history(R"({"index":0,"client":"c","phase":"invoke","f":"cas","key":"x","value":1,"time":0})"),
               HistoryError);
  EXPECT_THROW(parse_history(R"({"index":0,"client":"c","phase":"invoke","f":"incr","key":"x","value":1,"time":0})"),
               HistoryError);
  const std::string dup =
      "{\"index\":3,\"client\":\"c\",\"phase\":\"invoke\",\"f\":\"write\",\"key\":\"x\",\"value\":1,\"time\":0}\n"
      "{\"index\":3,\"client\":\"c\",\"phase\":\"ok\",\"f\":\"write\",\"key\":\"x\",\"value\":1,\"time\":1}\n";
  EXPECT_THROW(parse_history(dup), HistoryError);
}

TEST(ParseHistory, RoundTrip) {
  HistoryBuilder h;
  h.write("c", "x", 1, 0, 10).read("d", "x", 1, 5, 12).cas("c", "x", 1, 2, 11, 20).cas(
      "d", "y", 4, 5, 13, 19, false);
  h.unknown("e", "x", OpKind::write(9), 1, 30);
  const auto events = h.events();
  const auto text = serialize_history(events);
  EXPECT_EQ(parse_history(text), events);
  EXPECT_EQ(serialize_history(parse_history(text)), text);
}

TEST(BuildTimeline, SinglePairing) {
  auto tl = HistoryBuilder().write("c", "x", 1, 0, 10).timeline();
  ASSERT_EQ(tl.size(), 1u);
  const auto& op = tl.op(0);
  EXPECT_EQ(op.kind, OpKind::write(1));
  EXPECT_EQ(op.start, 0);
  EXPECT_EQ(op.end, 10);
  EXPECT_EQ(tl.clients()[op.client], "c");
  EXPECT_EQ(op.outcome, Outcome::Ok);
}

TEST(BuildTimeline, TwoClientWorkloadQueues) {
  auto tl = fixtures::two_client_workload();
  ASSERT_EQ(tl.queues().size(), 2u);
  const auto& qc = tl.queues()[0];
  const auto& qd = tl.queues()[1];
  ASSERT_EQ(qc.size(), 3u);
  ASSERT_EQ(qd.size(), 2u);
  EXPECT_EQ(tl.op(qc[0]).kind, OpKind::write(1));
  EXPECT_EQ(tl.op(qc[1]).kind, OpKind::write(3));
  EXPECT_EQ(tl.op(qc[2]).kind.type, OpType::Read);
  EXPECT_EQ(tl.op(qd[0]).kind.type, OpType::Read);
  EXPECT_EQ(tl.op(qd[1]).kind, OpKind::write(2));
  EXPECT_TRUE(tl.program_order(qc[0], qc[2]));
  EXPECT_FALSE(tl.program_order(qc[2], qc[0]));
  EXPECT_FALSE(tl.program_order(qc[0], qd[1]));
}

TEST(BuildTimeline, ClosedLoopViolation) {
  std::vector<HistoryEvent> ev(2);
  ev[0] = {0, "c", Phase::Invoke, OpKind::write(1), "x", std::nullopt, 0};
  ev[1] = {1, "c", Phase::Invoke, OpKind::write(2), "x", std::nullopt, 5};
  EXPECT_THROW(build_timeline(ev), HistoryError);
}

TEST(BuildTimeline, CompletionErrors) {
  std::vector<HistoryEvent> orphan{{0, "c", Phase::Ok, OpKind::write(1), "x", std::nullopt, 3}};
  EXPECT_THROW(build_timeline(orphan), HistoryError);

  std::vector<HistoryEvent> mismatch{
      {0, "c", Phase::Invoke, OpKind::write(1), "x", std::nullopt, 0},
      {1, "c", Phase::Ok, OpKind::write(2), "x", std::nullopt, 3}};
  EXPECT_THROW(build_timeline(mismatch), HistoryError);

  std::vector<HistoryEvent> instant{
      {0, "c", Phase::Invoke, OpKind::write(1), "x", std::nullopt, 4},
      {1, "c", Phase::Ok, OpKind::write(1), "x", std::nullopt, 4}};
  EXPECT_THROW(build_timeline(instant), HistoryError);

  std::vector<HistoryEvent> blind{
      {0, "c", Phase::Invoke, OpKind::read(), "x", std::nullopt, 0},
      {1, "c", Phase::Ok, OpKind::read(), "x", std::nullopt, 3}};
  EXPECT_THROW(build_timeline(blind), HistoryError);
}

TEST(BuildTimeline, Outcomes) {
  HistoryBuilder h;
  h.cas("c", "x", 0, 1, 0, 5);
  h.cas("c", "x", 7, 2, 6, 9, false);
  h.unknown("c", "y", OpKind::write(3), 10, 12);
  h.unknown("d", "y", OpKind::read(), 0, 3);
  auto ev = h.events();
  auto tl = build_timeline(ev);
  ASSERT_EQ(tl.size(), 3u);  // the unanswered read is dropped
  EXPECT_EQ(tl.op(0).outcome, Outcome::Ok);
  EXPECT_TRUE(tl.op(0).is_update());
  EXPECT_TRUE(tl.op(0).accepts(0));
  EXPECT_FALSE(tl.op(0).accepts(1));
  EXPECT_EQ(tl.op(1).outcome, Outcome::CasFailed);
  EXPECT_FALSE(tl.op(1).is_update());
  EXPECT_TRUE(tl.op(1).accepts(1));
  EXPECT_FALSE(tl.op(1).accepts(7));
  EXPECT_TRUE(tl.op(2).indeterminate());
  EXPECT_FALSE(tl.op(2).end.has_value());

  // A failed plain write never happened.
  std::vector<HistoryEvent> failed{
      {0, "c", Phase::Invoke, OpKind::write(1), "x", std::nullopt, 0},
      {1, "c", Phase::Fail, OpKind::write(1), "x", std::nullopt, 3}};
  EXPECT_EQ(build_timeline(failed).size(), 0u);
}

TEST(BuildTimeline, NothingAfterIndeterminate) {
  std::vector<HistoryEvent> ev{
      {0, "c", Phase::Invoke, OpKind::write(1), "x", std::nullopt, 0},
      {1, "c", Phase::Info, OpKind::write(1), "x", std::nullopt, 3},
      {2, "c", Phase::Invoke, OpKind::write(2), "x", std::nullopt, 4}};
  EXPECT_THROW(build_timeline(ev), HistoryError);

  // An invoke left open at the end is indeterminate too.
  ev.pop_back();
  ev.pop_back();
  auto tl = build_timeline(ev);
  ASSERT_EQ(tl.size(), 1u);
  EXPECT_TRUE(tl.op(0).indeterminate());
}

TEST(WrittenValues, Enumeration) {
  auto tl = HistoryBuilder()
                .write("c", "x", 1, 0, 1)
                .write("c", "x", 2, 2, 3)
                .write("c", "x", 3, 4, 5)
                .read("c", "y", 0, 6, 7)
                .timeline();
  EXPECT_EQ(written_values(tl, *tl.find_key("x")), (std::set<Value>{0, 1, 2, 3}));
  EXPECT_EQ(written_values(tl, *tl.find_key("y")), (std::set<Value>{0}));
}

TEST(WrittenValues, IndeterminateWriteCounts) {
  auto tl = HistoryBuilder().unknown("c", "x", OpKind::write(7), 0, 5).timeline();
  EXPECT_EQ(written_values(tl, 0), (std::set<Value>{0, 7}));
}

TEST(Describe, ShortForms) {
  auto tl = HistoryBuilder().write("c", "x", 1, 0, 1).read("d", "x", 1, 2, 3).timeline();
  EXPECT_EQ(describe(tl, 0), "W(c,x,1)");
  EXPECT_EQ(describe(tl, 1), "R(d,x)=1");
}
