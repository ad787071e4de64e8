#pragma once

// Closed forms against exact enumeration on the homogeneous, field-free
// ladder and chains.

#include <cmath>
#include <string>
#include <vector>

#include "bellising/boltzmann.hpp"
#include "bellising/builtin.hpp"
#include "bellising/series.hpp"

namespace bellising::series {

inline constexpr double kSeriesRelativeTolerance = 1e-9;

struct QuantityCheck {
  std::string quantity;
  std::string geometry;
  double max_relative_deviation = 0.0;
  std::size_t cases = 0;
  double worst_k = 0.0;
};

struct SeriesCheckReport {
  std::vector<double> k_grid;
  std::vector<int> chain_lengths;
  std::vector<QuantityCheck> checks;
  double tolerance = kSeriesRelativeTolerance;

  double max_relative_deviation() const {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.max_relative_deviation);
    return worst;
  }
  bool passed() const { return max_relative_deviation() <= tolerance; }
};

inline std::vector<double> default_k_grid() {
  std::vector<double> ks;
  for (int i = 0; i <= 9; ++i) ks.push_back(i / 10.0);
  return ks;
}

namespace detail {

inline double relative_deviation(double formula, double exact) {
  const double scale = std::max(std::abs(exact), 1e-300);
  return std::abs(formula - exact) / scale;
}

class Accumulator {
 public:
  Accumulator(std::string eq, std::string geom) { c_.quantity = std::move(eq), c_.geometry = std::move(geom); }
  void add(double k, double formula, double exact) {
    const double d = relative_deviation(formula, exact);
    ++c_.cases;
    if (d > c_.max_relative_deviation || !std::isfinite(d)) {
      c_.max_relative_deviation = std::isfinite(d) ? d : INFINITY;
      c_.worst_k = k;
    }
  }
  QuantityCheck result() const { return c_; }

 private:
  QuantityCheck c_;
};

inline PartialAssignment assign(const LatticeSpec& spec, const std::vector<std::pair<std::string, int>>& spins) {
  PartialAssignment p;
  for (const auto& [id, s] : spins) p.set(spec, id, s);
  return p;
}

inline double ratio(const BoltzmannModel& m, const PartialAssignment& num, const PartialAssignment& den) {
  return m.marginal_weight(num.merged(den)) / m.marginal_weight(den);
}

inline PartialAssignment lambda_assignment(const LatticeSpec& spec, int first_id, std::size_t code, std::size_t count,
                                           std::vector<int>& spins) {
  PartialAssignment p;
  spins.assign(count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    spins[i] = ((code >> i) & 1u) ? 1 : -1;
    p.set(spec, std::to_string(first_id + static_cast<int>(i)), spins[i]);
  }
  return p;
}

}  // namespace detail

inline std::vector<QuantityCheck> check_ladder(const std::vector<double>& ks) {
  using detail::assign;
  using detail::ratio;
  detail::Accumulator e12("joint-weight", "ladder"), e13("setting-weight", "ladder"), e12r("P(12|ab)", "ladder"), e14("P(++|++)", "ladder"),
      e16("P(lam|ab)", "ladder"), e17("P(lam-up|ab)", "ladder"), e21("P(12|ab,lam)", "ladder"), e22("P(1|a,lam)", "ladder"), e23("P(2|b,lam)", "ladder");
  const std::vector<int> pm = {1, -1};
  for (double k : ks) {
    const auto spec = builtin::canonical_ladder(std::atanh(k));
    const auto m = build_model(spec);
    const auto ctx = SeriesContext::from_spec(spec);
    // Z P(eta) / alpha = marginal_weight * exp(-beta H_min) / alpha.
    const double unshift = -spec.beta * m.energy_shift() - ctx.log_alpha;
    for (const auto& [sa, sb] : kSettingPairs) {
      const auto given = assign(spec, {{"a", sa}, {"b", sb}});
      e13.add(k, ladder_setting_marginal_reduced(k, sa, sb), m.marginal_weight(given) * std::exp(unshift));
      for (int s1 : pm) {
        for (int s2 : pm) {
          const auto target = assign(spec, {{"1", s1}, {"2", s2}});
          const double joint = m.marginal_weight(target.merged(given));
          e12.add(k, ladder_joint_numerator_reduced(k, s1, s2, sa, sb), joint * std::exp(unshift));
          e12r.add(k, ladder_conditional(ctx, s1, s2, sa, sb), ratio(m, target, given));
        }
      }
      std::vector<int> l;
      for (std::size_t code = 0; code < 64; ++code) {
        const auto lam = detail::lambda_assignment(spec, 3, code, 6, l);
        const LadderLambda ll = {l[0], l[1], l[2], l[3], l[4], l[5]};
        e16.add(k, ladder_lambda_conditional(ctx, ll, sa, sb), ratio(m, lam, given));
        const auto full = lam.merged(given);
        for (int s1 : pm) {
          for (int s2 : pm) {
            const auto f = ladder_factor_forms(ctx, s1, s2, sa, sb, ll[0], ll[2]);
            e21.add(k, f.joint, ratio(m, assign(spec, {{"1", s1}, {"2", s2}}), full));
          }
        }
        for (int s : pm) {
          const auto f = ladder_factor_forms(ctx, s, s, sa, sb, ll[0], ll[2]);
          e22.add(k, f.left, ratio(m, assign(spec, {{"1", s}}), lam.merged(assign(spec, {{"a", sa}}))));
          e23.add(k, f.right, ratio(m, assign(spec, {{"2", s}}), lam.merged(assign(spec, {{"b", sb}}))));
        }
      }
      std::vector<int> up;
      const auto all_up = detail::lambda_assignment(spec, 3, 63, 6, up);
      e17.add(k, ladder_all_up_lambda_conditional(ctx, sa, sb), ratio(m, all_up, given));
    }
    e14.add(k, ladder_pp_given_pp(ctx),
            ratio(m, assign(spec, {{"1", 1}, {"2", 1}}), assign(spec, {{"a", 1}, {"b", 1}})));
  }
  return {e12.result(), e13.result(), e12r.result(), e14.result(), e16.result(),
          e17.result(), e21.result(), e22.result(), e23.result()};
}

inline std::vector<QuantityCheck> check_chain(int n, const std::vector<double>& ks) {
  using detail::assign;
  using detail::ratio;
  check_chain_length(n);
  const std::string geom = "chain" + std::to_string(n);
  detail::Accumulator a9("P(lam|ab)", geom), a10("P(lam-up|ab)", geom), a11("P(12|ab,lam)", geom), a12("P(1|a,lam)", geom);
  const std::vector<int> pm = {1, -1};
  const std::size_t hidden = static_cast<std::size_t>(n - 2);
  for (double k : ks) {
    const auto spec = builtin::chain(n, std::atanh(k));
    const auto m = build_model(spec);
    const auto ctx = SeriesContext::from_spec(spec);
    for (const auto& [sa, sb] : kSettingPairs) {
      const auto given = assign(spec, {{"a", sa}, {"b", sb}});
      const double given_w = m.marginal_weight(given);
      std::vector<int> l;
      for (std::size_t code = 0; code < (std::size_t{1} << hidden); ++code) {
        const auto lam = detail::lambda_assignment(spec, 3, code, hidden, l);
        a9.add(k, chain_lambda_conditional(n, ctx, l, sa, sb), m.marginal_weight(lam.merged(given)) / given_w);
        const auto full = lam.merged(given);
        for (int s1 : pm) {
          for (int s2 : pm) {
            a11.add(k, chain_outcome_joint(ctx, s1, s2, sa, sb),
                    ratio(m, assign(spec, {{"1", s1}, {"2", s2}}), full));
          }
        }
        for (int s : pm) {
          a12.add(k, chain_outcome_factor(ctx, s, sa),
                  ratio(m, assign(spec, {{"1", s}}), lam.merged(assign(spec, {{"a", sa}}))));
          a12.add(k, chain_outcome_factor(ctx, s, sb),
                  ratio(m, assign(spec, {{"2", s}}), lam.merged(assign(spec, {{"b", sb}}))));
        }
      }
    }
    std::vector<int> up;
    const auto all_up = detail::lambda_assignment(spec, 3, (std::size_t{1} << hidden) - 1, hidden, up);
    const auto closed = chain_all_up(n, ctx);
    a10.add(k, closed[0], ratio(m, all_up, assign(spec, {{"a", 1}, {"b", 1}})));
    a10.add(k, closed[1], ratio(m, all_up, assign(spec, {{"a", -1}, {"b", -1}})));
  }
  return {a9.result(), a10.result(), a11.result(), a12.result()};
}

inline SeriesCheckReport series_check(const std::vector<double>& ks = default_k_grid(),
                                      const std::vector<int>& chain_lengths = {5, 6, 7, 8, 9, 10}) {
  SeriesCheckReport r;
  r.k_grid = ks;
  r.chain_lengths = chain_lengths;
  r.checks = check_ladder(ks);
  for (int n : chain_lengths) {
    auto c = check_chain(n, ks);
    r.checks.insert(r.checks.end(), c.begin(), c.end());
  }
  return r;
}

/// Chain MD from enumeration, both readings, with the full hidden set.
inline ChainMdPoint chain_md_enumerated(int n, double K) {
  check_chain_length(n);
  const auto spec = builtin::chain(n, std::atanh(K));
  const auto m = build_model(spec);
  std::vector<std::size_t> nodes = {spec.require_index("a"), spec.require_index("b")};
  for (int k = 3; k <= n; ++k) nodes.push_back(spec.require_index(std::to_string(k)));
  const auto t = m.project(nodes);
  const std::size_t lambdas = std::size_t{1} << (n - 2);
  auto rho = [&](int sa, int sb, std::size_t lam, double total) {
    return t[(sa > 0 ? 1u : 0u) | (sb > 0 ? 2u : 0u) | (lam << 2)] / total;
  };
  std::array<double, 4> totals{};
  for (std::size_t i = 0; i < t.size(); ++i) totals[i & 3u] += t[i];
  auto total = [&](int sa, int sb) { return totals[(sa > 0 ? 1u : 0u) | (sb > 0 ? 2u : 0u)]; };
  ChainMdPoint out;
  out.n = n;
  for (const auto& [sa, sb] : kSettingPairs) {
    for (const auto& [sap, sbp] : kSettingPairs) {
      CompensatedSum sum;
      for (std::size_t lam = 0; lam < lambdas; ++lam) {
        const double d = std::abs(rho(sa, sb, lam, total(sa, sb)) - rho(sap, sbp, lam, total(sap, sbp)));
        sum.add(d);
        out.md_per_configuration = std::max(out.md_per_configuration, d);
      }
      out.md_summed = std::max(out.md_summed, sum.value());
    }
  }
  return out;
}

}  // namespace bellising::series
