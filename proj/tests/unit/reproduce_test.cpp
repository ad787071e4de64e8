#include <set>

#include <gtest/gtest.h>

#include "bellising/reproduce.hpp"

using namespace bellising;

TEST(Reproduce, CaseIds) {
  std::set<std::string> ids;
  for (const auto& c : reproduction_cases()) ids.insert(c.id);
  for (const char* id : {"homogeneous", "hetero", "maxima", "crossed", "quantum"}) {
    EXPECT_TRUE(ids.count(id)) << id;
  }
}

TEST(Reproduce, EveryRowHasSource) {
  for (const auto& c : reproduction_cases()) {
    for (const auto& r : c.rows) EXPECT_FALSE(r.source.empty()) << c.id << " " << r.quantity;
  }
}

TEST(Reproduce, HeteroPasses) {
  const auto cases = reproduction_cases();
  const auto rows = run_reproduction(cases, "hetero");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_EQ(r.verdict, Verdict::Pass) << r.row->quantity << " " << r.computed;
  EXPECT_FALSE(any_failure(rows));
}

TEST(Reproduce, CanonicalLadderMaximaAreContingent) {
  const auto cases = reproduction_cases();
  for (const auto& r : run_reproduction(cases, "maxima")) {
    if (r.row->lattice.rfind("ladder", 0) == 0) {
      EXPECT_EQ(r.verdict, Verdict::Contingent);
    } else {
      EXPECT_EQ(r.verdict, Verdict::Pass);
    }
  }
}

TEST(Reproduce, Judge) {
  ReproductionRow within{"q", "l", 1.0, 0.1, Comparison::Within, false, "s", {}};
  EXPECT_EQ(judge(within, 1.05), Verdict::Pass);
  EXPECT_EQ(judge(within, 1.2), Verdict::Fail);
  within.contingent = true;
  EXPECT_EQ(judge(within, 1.2), Verdict::Contingent);
  ReproductionRow above{"q", "l", 2.0, 0.0, Comparison::Above, false, "s", {}};
  EXPECT_EQ(judge(above, 2.5), Verdict::Pass);
  EXPECT_EQ(judge(above, 2.0), Verdict::Fail);
}

TEST(Reproduce, UnknownCase) {
  EXPECT_THROW(run_reproduction(reproduction_cases(), "nope"), Error);
}
