#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sop/levels.hpp"
#include "sop/report.hpp"
#include "sop/search.hpp"

using namespace sop;

TEST(ReportJson, RoundTrip) {
  auto r = check(sop::fixtures::register_pair(1), all_levels());
  auto doc = parse_report_json(report_json(r));
  EXPECT_EQ(doc.verdicts.size(), kLevelCount);
  for (const auto& lr : r.results)
    EXPECT_EQ(doc.verdicts.at(std::string(cli_name(lr.level.id))), lr.verdict);
  EXPECT_EQ(doc.verdicts.at("linearizable"), Verdict::Fail);
  EXPECT_EQ(doc.verdicts.at("sequential"), Verdict::Pass);
  EXPECT_TRUE(doc.well_formed);
  EXPECT_EQ(doc.stats.states_explored, r.stats.states_explored);
  ASSERT_TRUE(doc.witnesses.count("sequential"));
  const auto* seq = r.find(LevelId::Sequential);
  EXPECT_EQ(doc.witnesses.at("sequential"), witness_text(seq->witness->dag, seq->witness->rf));
}

TEST(ReportJson, WithoutWitnesses) {
  auto r = check(sop::fixtures::register_pair(9), all_levels());
  auto doc = parse_report_json(report_json(r, false));
  EXPECT_FALSE(doc.well_formed);
  EXPECT_TRUE(doc.witnesses.empty());
  EXPECT_THROW(parse_report_json(R"({"strict": "pass"})"), std::runtime_error);
  EXPECT_THROW(parse_report_json(R"({"weak": "maybe"})"), std::runtime_error);
}

TEST(ReportText, Lines) {
  auto r = check(sop::fixtures::register_pair(1),
                 {ConsistencyLevel{LevelId::Linearizability}, ConsistencyLevel{LevelId::Sequential}});
  const auto text = report_text(r);
  EXPECT_EQ(text.rfind("linearizable: fail\nsequential: pass\nstats: ", 0), 0u) << text;
  const auto with = report_text(r, true);
  EXPECT_NE(with.find("witness sequential:\n"), std::string::npos);
}

TEST(ReportText, IllFormedNote) {
  auto r = check(sop::fixtures::register_pair(9), {ConsistencyLevel{LevelId::Weak}});
  EXPECT_NE(report_text(r).find("never written"), std::string::npos);
}

TEST(Verdicts, Names) {
  for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::Unknown})
    EXPECT_EQ(parse_verdict(to_string(v)), v);
  EXPECT_FALSE(parse_verdict("PASS"));
}
