#include <cmath>

#include <gtest/gtest.h>

#include "bellising/builtin.hpp"
#include "bellising/chsh.hpp"
#include "bellising/independence.hpp"
#include "bellising/rng.hpp"

using namespace bellising;

constexpr double kHeteroMd = 1.99985;

TEST(Measures, UncoupledAllZero) {
  const auto m = build_model(builtin::canonical_ladder(0.0));
  const auto r = independence_report(m);
  EXPECT_EQ(r.md.value, 0.0);
  EXPECT_EQ(r.od.value, 0.0);
  EXPECT_EQ(r.pd.value, 0.0);
  EXPECT_TRUE(r.mi_holds && r.oi_holds && r.pi_holds && r.factorizable);
}

TEST(Measures, HeteroMd) {
  const auto m = build_model(builtin::hetero_ladder());
  EXPECT_NEAR(measurement_dependence(m, HiddenSubset::all(m.spec())).value, kHeteroMd, 1e-5);
}

TEST(Measures, LadderFactorizesWithFullLambda) {
  const auto m = build_model(builtin::canonical_ladder());
  const auto r = independence_report(m);
  EXPECT_GT(r.md.value, 0.5);
  EXPECT_LE(r.od.value, 1e-9);
  EXPECT_LE(r.pd.value, 1e-9);
  EXPECT_TRUE(r.factorization.factorizable);
}

TEST(Measures, SubsetWithThreeAndFiveFactorizes) {
  const auto m = build_model(builtin::canonical_ladder());
  const auto lam = HiddenSubset::of(m.spec(), {"3", "5"});
  EXPECT_TRUE(factorizability_check(m, lam).factorizable);
  EXPECT_LE(outcome_dependence(m, lam).value, 1e-9);
}

TEST(Measures, MiddleRungIsACut) {
  const auto m = build_model(builtin::canonical_ladder());
  const auto r = independence_report(m, HiddenSubset::of(m.spec(), {"4", "7"}));
  EXPECT_LE(r.od.value, 1e-9);
  EXPECT_TRUE(r.factorizable);
}

TEST(Measures, SubsetLeavingAPathIsMeasured) {
  // 1-3-4-5-2 stays open when only 6 and 8 are fixed.
  const auto m = build_model(builtin::canonical_ladder());
  const auto r = independence_report(m, HiddenSubset::of(m.spec(), {"6", "8"}));
  EXPECT_GT(r.od.value, 1e-6);
  EXPECT_FALSE(r.factorizable);
}

TEST(Measures, CrossedViolatesAllThree) {
  const auto m = build_model(builtin::crossed_lattice());
  const auto r = independence_report(m);
  EXPECT_GT(r.md.value, 0.01);
  EXPECT_GT(r.od.value, 0.01);
  EXPECT_GT(r.pd.value, 0.01);
  EXPECT_FALSE(r.factorization.factorizable);
  EXPECT_GT(chsh(m).x_bi, 2.0);
}

TEST(Measures, DiagonalLadderStillFactorizes) {
  const auto r = independence_report(build_model(builtin::ladder_diagonal_ladder()));
  EXPECT_LE(r.od.value, 1e-9);
  EXPECT_LE(r.pd.value, 1e-9);
}

TEST(Measures, MdInRange) {
  CounterRng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto r = independence_report(build_model(builtin::random_grid_model(rng)));
    EXPECT_GE(r.md.value, 0.0);
    EXPECT_LE(r.md.value, 2.0 + 1e-12);
    EXPECT_EQ(r.factorizable, r.oi_holds && r.pi_holds);
  }
}

TEST(Measures, MdInvariantUnderAnalyzerRelabelling) {
  const auto spec = builtin::canonical_ladder(0.9);
  const auto m = build_model(spec);
  const auto j = setting_joint(m, HiddenSubset::all(spec));
  SettingJoint flipped = j;
  for (const auto& [sa, sb] : kSettingPairs) {
    flipped.weights[SettingJoint::setting_index(sa, sb)] = j.weights[SettingJoint::setting_index(-sa, -sb)];
  }
  EXPECT_EQ(measurement_dependence(j).value, measurement_dependence(flipped).value);
}

TEST(Witness, ReproducesMd) {
  const auto m = build_model(builtin::hetero_ladder());
  const auto lam = HiddenSubset::all(m.spec());
  const auto md = measurement_dependence(m, lam);
  const auto& w = md.witness;
  const auto ia = m.spec().require_index("a"), ib = m.spec().require_index("b");
  double sum = 0.0;
  for (std::size_t code = 0; code < (std::size_t{1} << lam.size()); ++code) {
    PartialAssignment l;
    for (std::size_t i = 0; i < lam.size(); ++i) l.set(lam.indices()[i], (code >> i) & 1u ? 1 : -1);
    PartialAssignment g1, g2;
    g1.set(ia, w.sa).set(ib, w.sb);
    g2.set(ia, w.sap).set(ib, w.sbp);
    sum += std::abs(m.conditional(l, g1) - m.conditional(l, g2));
  }
  EXPECT_NEAR(sum, md.value, 1e-12);
}

TEST(Witness, ReproducesOdAndPd) {
  const auto m = build_model(builtin::crossed_lattice());
  const auto lam = HiddenSubset::all(m.spec());
  const auto od = outcome_dependence(m, lam);
  const auto pd = parameter_dependence(m, lam);
  ASSERT_TRUE(od.witness && pd.witness);
  const auto& sp = m.spec();
  auto lambda_of = [&](std::size_t code) {
    PartialAssignment l;
    for (std::size_t i = 0; i < lam.size(); ++i) l.set(lam.indices()[i], (code >> i) & 1u ? 1 : -1);
    return l;
  };
  {
    const auto& w = *od.witness;
    const auto g = lambda_of(w.lambda).merged(PartialAssignment::of(sp, {{"a", w.sa}, {"b", w.sb}}));
    double d = 0.0;
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        const double joint = m.conditional(PartialAssignment::of(sp, {{"1", s1}, {"2", s2}}), g);
        d += std::abs(joint - m.conditional(PartialAssignment::of(sp, {{"1", s1}}), g) *
                                  m.conditional(PartialAssignment::of(sp, {{"2", s2}}), g));
      }
    }
    EXPECT_NEAR(d, od.value, 1e-12);
  }
  {
    const auto& w = *pd.witness;
    const std::string out = w.side == 2 ? "2" : "1";
    const std::string fixed = w.side == 2 ? "b" : "a";
    const std::string varied = w.side == 2 ? "a" : "b";
    const auto l = lambda_of(w.lambda);
    const auto g1 = l.merged(PartialAssignment::of(sp, {{fixed, w.fixed_setting}, {varied, w.varied}}));
    const auto g2 = l.merged(PartialAssignment::of(sp, {{fixed, w.fixed_setting}, {varied, w.varied_prime}}));
    const auto t = PartialAssignment::of(sp, {{out, w.outcome}});
    EXPECT_NEAR(std::abs(m.conditional(t, g1) - m.conditional(t, g2)), pd.value, 1e-12);
  }
}

TEST(Pairwise, LadderAllDependentUncoupledNone) {
  const auto dep = pairwise_correlation_check(build_model(builtin::canonical_ladder()));
  const auto ind = pairwise_correlation_check(build_model(builtin::canonical_ladder(0.0)));
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t k = 0; k < 10; ++k) {
      if (i == k) continue;
      EXPECT_TRUE(dep.dependent[i][k]) << dep.ids[i] << "," << dep.ids[k];
      EXPECT_FALSE(ind.dependent[i][k]);
    }
  }
}

TEST(Pairwise, ShortChainAdjacentDependent) {
  LatticeSpec s;
  s.nodes = {{"p", NodeRole::Hidden, 0}, {"q", NodeRole::Hidden, 0}, {"r", NodeRole::Hidden, 0},
             {"t", NodeRole::Hidden, 0}};
  s.edges = {{"p", "q", 0.5}, {"q", "r", 0.5}, {"r", "t", 0.5}};
  EnumerationOptions o;
  o.require_roles = false;
  const auto pc = pairwise_correlation_check(build_model(s, o));
  EXPECT_TRUE(pc.dependent[0][1]);
  EXPECT_TRUE(pc.dependent[1][2]);
  EXPECT_TRUE(pc.dependent[2][3]);
}

TEST(Decoupling, ZeroScaleRemovesMd) {
  const auto sweep = decoupling_sweep(builtin::hetero_ladder(), {1.0, 0.5, 0.0});
  EXPECT_NEAR(sweep[0].md, kHeteroMd, 1e-5);
  EXPECT_LE(sweep[2].md, 1e-12);
  EXPECT_GT(sweep[1].md, sweep[2].md);
}

TEST(Factorizability, ClampedJointIsRejected) {
  SettingJoint j;
  j.shared_scale = false;
  try {
    factorizability_check(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}
