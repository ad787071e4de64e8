#include <gtest/gtest.h>

#include "bellising/builtin.hpp"
#include "bellising/freewill.hpp"
#include "bellising/rng.hpp"

using namespace bellising;

TEST(Clamp, UncoupledQuarter) {
  const auto t = ex2_table(builtin::canonical_ladder(0.0));
  for (double p : t.entries()) EXPECT_DOUBLE_EQ(p, 0.25);
  EXPECT_EQ(assert_equivalence(build_model(builtin::canonical_ladder(0.0))), 0.0);
}

TEST(Clamp, LadderEntry) {
  const auto t = ex2_table(builtin::canonical_ladder());
  EXPECT_NEAR(t.at(1, 1, 1, 1), 0.9563261937724759, 1e-13);
}

TEST(Clamp, ReducedLatticeShape) {
  const auto c = ClampedModel::build(builtin::canonical_ladder(), 1, -1);
  EXPECT_EQ(c.free_part().size(), 8u);
  // a and b are gone, their couplings folded into fields on 1, 6, 2 and 8.
  const auto& r = c.free_part().spec();
  EXPECT_EQ(r.edges.size(), 9u);
  EXPECT_DOUBLE_EQ(r.node("1").h, 1.0);
  EXPECT_DOUBLE_EQ(r.node("2").h, -1.0);
  EXPECT_LE(c.log_z_star(), build_model(builtin::canonical_ladder()).log_z());
}

TEST(Clamp, CubicTermsFold) {
  auto spec = builtin::canonical_ladder(0.6, 0.1);
  spec.cubic = {{{"a", "1", "3"}, 0.3}, {{"a", "b", "4"}, -0.2}, {{"3", "4", "7"}, 0.15}};
  spec.c0 = 0.7;
  const auto m = build_model(spec);
  const auto r = freewill_report(m);
  EXPECT_LE(r.max_discrepancy, 1e-12);
  EXPECT_LE(r.partition_defect, 1e-12);
}

TEST(Clamp, InvalidSpin) {
  try {
    ClampedModel::build(builtin::canonical_ladder(), 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Equivalence, BuiltinsAndRandom) {
  std::vector<LatticeSpec> specs = {builtin::canonical_ladder(), builtin::hetero_ladder(),
                                    builtin::corner_uniform_maximum(), builtin::crossed_lattice(), builtin::chain(8)};
  CounterRng rng(2024);
  for (int i = 0; i < 10; ++i) specs.push_back(builtin::random_grid_model(rng));
  for (const auto& s : specs) {
    const auto r = freewill_report(build_model(s));
    EXPECT_LE(r.max_discrepancy, 1e-12);
    EXPECT_LE(r.partition_defect, 1e-12);
    EXPECT_LE(r.max_measure_discrepancy, 1e-12);
  }
}
