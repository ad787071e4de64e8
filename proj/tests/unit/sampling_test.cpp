#include <cmath>

#include <gtest/gtest.h>

#include "bellising/builtin.hpp"
#include "bellising/sampling.hpp"

using namespace bellising;

namespace {

BoltzmannModel single_fair_node() {
  LatticeSpec s;
  s.nodes = {{"x", NodeRole::Hidden, 0.0}};
  EnumerationOptions o;
  o.require_roles = false;
  return build_model(s, o);
}

}  // namespace

TEST(Rng, Deterministic) {
  CounterRng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
  CounterRng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(Sample, FairCoinReproducible) {
  const auto m = single_fair_node();
  SampleRun run{42, 10000};
  const auto x = sample(m, run), y = sample(m, run);
  EXPECT_EQ(x, y);
  double ups = 0;
  for (auto w : x) ups += w & 1u;
  EXPECT_NEAR(ups / x.size(), 0.5, 4 * std::sqrt(0.25 / x.size()));
}

TEST(Sample, ZeroCountRejected) {
  try {
    sample(single_fair_node(), SampleRun{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Frequency, UncoupledHalf) {
  const auto m = build_model(builtin::canonical_ladder(0.0));
  const auto r = frequency_report(m, SampleRun{3, 20000}, PartialAssignment::of(m.spec(), {{"4", 1}}));
  EXPECT_EQ(r.exact, 0.5);
  EXPECT_LE(r.final_deviation, 4 * r.standard_error);
}

TEST(Frequency, LadderPostselected) {
  const auto m = build_model(builtin::canonical_ladder());
  const auto ev = PartialAssignment::of(m.spec(), {{"1", 1}, {"2", 1}});
  const auto given = PartialAssignment::of(m.spec(), {{"a", 1}, {"b", 1}});
  const auto r = frequency_report(m, SampleRun{42, 100000}, ev, given);
  EXPECT_NEAR(r.exact, 0.9563261937724759, 1e-13);
  EXPECT_LE(r.final_deviation, 4 * r.standard_error);
  ASSERT_EQ(r.trace.size(), 4u);  // 1e2, 1e3, 1e4, 1e5
  EXPECT_EQ(r.trace.back().n, 100000u);
}

TEST(Frequency, InsufficientPostselectionWarns) {
  auto spec = builtin::canonical_ladder();
  spec.node("a").h = 30.0;
  const auto m = build_model(spec);
  const auto r = frequency_report(m, SampleRun{1, 200}, PartialAssignment::of(spec, {{"1", 1}}),
                                  PartialAssignment::of(spec, {{"a", -1}}));
  ASSERT_TRUE(r.warning.has_value());
  EXPECT_EQ(r.postselected, 0u);
}

TEST(Frequency, MetropolisAgreesWithExact) {
  const auto m = build_model(builtin::canonical_ladder(0.5, 0.2));
  const auto ev = PartialAssignment::of(m.spec(), {{"1", 1}, {"2", -1}});
  SampleRun ex{5, 40000};
  SampleRun mc{5, 40000, SamplerKind::Metropolis};
  const auto a = frequency_report(m, ex, ev);
  const auto b = frequency_report(m, mc, ev);
  // Metropolis samples are correlated; thinning N keeps the band honest at this coupling.
  EXPECT_LE(std::abs(a.final_frequency - b.final_frequency), 4 * std::hypot(a.standard_error, b.standard_error) * 2);
}

TEST(Frequency, MetropolisFromSpecNeedsNoEnumeration) {
  const auto spec = builtin::chain(60, 0.3);  // 62 spins
  SampleRun run{9, 50, SamplerKind::Metropolis, 1000, 62};
  const auto x = sample_metropolis(spec, run);
  EXPECT_EQ(x.size(), 50u);
  EXPECT_EQ(x, sample_metropolis(spec, run));
}
