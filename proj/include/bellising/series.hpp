#pragma once

// Closed-form high-temperature expansions (K = tanh(beta J)) for the homogeneous
// canonical ladder and the homogeneous N-chain, both with zero fields.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bellising/boltzmann.hpp"
#include "bellising/builtin.hpp"
#include "bellising/chsh.hpp"
#include "bellising/error.hpp"
#include "bellising/lattice.hpp"

namespace bellising::series {

struct SeriesContext {
  double k = 0.0;
  /// log of alpha = cosh(beta J)^edges.
  double log_alpha = 0.0;
  std::size_t edges = 0;

  static SeriesContext from_coupling(double beta, double j, std::size_t edges) {
    if (!(beta > 0.0)) fail(ErrorKind::InvalidArgument, "beta must be positive");
    SeriesContext c;
    c.k = std::tanh(beta * j);
    c.log_alpha = static_cast<double>(edges) * std::log(std::cosh(beta * j));
    c.edges = edges;
    if (!(std::abs(c.k) < 1.0)) fail(ErrorKind::NumericRange, "|K| must be below 1");
    return c;
  }

  static SeriesContext from_k(double k, std::size_t edges) {
    if (!(std::abs(k) < 1.0)) fail(ErrorKind::InvalidArgument, "|K| must be below 1");
    return from_coupling(1.0, std::atanh(k), edges);
  }

  /// Refuses anything but equal couplings, zero fields and no extra terms.
  static SeriesContext from_spec(const LatticeSpec& spec) {
    if (spec.edges.empty()) fail(ErrorKind::Precondition, "series needs at least one coupling");
    const double j = spec.edges.front().j;
    for (const auto& e : spec.edges) {
      if (e.j != j) fail(ErrorKind::Precondition, "series formulas need homogeneous couplings");
    }
    for (const auto& n : spec.nodes) {
      if (n.h != 0.0) fail(ErrorKind::Precondition, "series formulas need zero fields");
    }
    if (!spec.cubic.empty() || spec.c0 != 0.0) {
      fail(ErrorKind::Precondition, "series formulas cover the plain Ising Hamiltonian only");
    }
    return from_coupling(spec.beta, j, spec.edges.size());
  }

  double alpha() const { return std::exp(log_alpha); }
};

inline constexpr std::size_t kLadderEdges = 13;

// ---------------------------------------------------------------------------
// Canonical ladder

/// Z * P(s1, s2, sa, sb) divided by alpha.
inline double ladder_joint_numerator_reduced(double K, int s1, int s2, int sa, int sb) {
  const double K2 = K * K, K3 = K2 * K, K4 = K2 * K2, K5 = K4 * K, K6 = K3 * K3, K7 = K6 * K, K8 = K4 * K4;
  const double bracket = 1.0 + (K3 + K5 + 2.0 * K7) * (s1 * sa + s2 * sb) + (K4 + 3.0 * K6) * (s1 * s2 + sa * sb) +
                         (K6 + 3.0 * K8) * (s1 * s2 * sa * sb) + (3.0 * K5 + K7) * (s1 * sb + s2 * sa) +
                         2.0 * K4 + K6;
  return (1.0 + K * s1 * sa) * (1.0 + K * s2 * sb) * 64.0 * bracket;
}

inline double ladder_joint_numerator(const SeriesContext& c, int s1, int s2, int sa, int sb) {
  return c.alpha() * ladder_joint_numerator_reduced(c.k, s1, s2, sa, sb);
}

/// The bracket 1 + sa sb (K^4 + 10K^6 + 5K^8) + 4K^4 + 3K^6 + 5K^8 + 3K^10.
inline double ladder_setting_bracket(double K, int sa, int sb) {
  const double K4 = std::pow(K, 4), K6 = std::pow(K, 6), K8 = std::pow(K, 8), K10 = std::pow(K, 10);
  return 1.0 + sa * sb * (K4 + 10.0 * K6 + 5.0 * K8) + 4.0 * K4 + 3.0 * K6 + 5.0 * K8 + 3.0 * K10;
}

/// Z * P(sa, sb) divided by alpha.
inline double ladder_setting_marginal_reduced(double K, int sa, int sb) {
  return 256.0 * ladder_setting_bracket(K, sa, sb);
}

inline double ladder_setting_marginal(const SeriesContext& c, int sa, int sb) {
  return c.alpha() * ladder_setting_marginal_reduced(c.k, sa, sb);
}

inline double ladder_conditional(const SeriesContext& c, int s1, int s2, int sa, int sb) {
  return ladder_joint_numerator_reduced(c.k, s1, s2, sa, sb) / ladder_setting_marginal_reduced(c.k, sa, sb);
}

/// P(+,+ | +,+) in closed form.
inline double ladder_pp_given_pp(const SeriesContext& c) {
  const double K = c.k;
  const double num = (1.0 + K) * (1.0 + K) *
                     (1.0 + 2 * std::pow(K, 3) + 4 * std::pow(K, 4) + 8 * std::pow(K, 5) + 8 * std::pow(K, 6) +
                      6 * std::pow(K, 7) + 3 * std::pow(K, 8));
  const double den = 4.0 * (1.0 + 5 * std::pow(K, 4) + 13 * std::pow(K, 6) + 10 * std::pow(K, 8) + 3 * std::pow(K, 10));
  return num / den;
}

/// Hidden spins of the ladder in the order 3, 4, 5, 6, 7, 8.
using LadderLambda = std::array<int, 6>;

/// P(s3..s8 | sa, sb).
inline double ladder_lambda_conditional(const SeriesContext& c, const LadderLambda& l, int sa, int sb) {
  const double K = c.k, K2 = K * K;
  const int s3 = l[0], s4 = l[1], s5 = l[2], s6 = l[3], s7 = l[4], s8 = l[5];
  double hidden = 1.0;
  for (const auto& [u, v] : std::array<std::array<int, 2>, 7>{
           {{s3, s6}, {s3, s4}, {s6, s7}, {s4, s7}, {s4, s5}, {s7, s8}, {s5, s8}}}) {
    hidden *= 1.0 + K * u * v;
  }
  const double num = (1.0 + K2 * sa * s3) * (1.0 + K2 * sb * s5) * (1.0 + K * sa * s6) * (1.0 + K * sb * s8) * hidden;
  return num / (64.0 * ladder_setting_bracket(K, sa, sb));
}

/// P(all hidden +1 | sa, sb).
inline double ladder_all_up_lambda_conditional(const SeriesContext& c, int sa, int sb) {
  const double K = c.k, K2 = K * K;
  return (1.0 + K2 * sa) * (1.0 + K2 * sb) * (1.0 + K * sa) * (1.0 + K * sb) * std::pow(1.0 + K, 7) /
         (64.0 * ladder_setting_bracket(K, sa, sb));
}

struct LadderFactors {
  double joint = 0.0;  // P(s1, s2 | lambda, a, b)
  double left = 0.0;   // P(s1 | lambda, a)
  double right = 0.0;  // P(s2 | lambda, b)
};

/// Clauser-Horne factors on the ladder; only s3 and s5 of lambda enter.
inline LadderFactors ladder_factor_forms(const SeriesContext& c, int s1, int s2, int sa, int sb, int s3, int s5) {
  const double K = c.k, K2 = K * K;
  LadderFactors f;
  f.joint = (1.0 + K * s1 * sa) * (1.0 + K * s1 * s3) * (1.0 + K * s5 * s2) * (1.0 + K * s2 * sb) /
            (4.0 * (1.0 + K2 * sa * s3) * (1.0 + K2 * s5 * sb));
  f.left = (1.0 + K * s1 * sa) * (1.0 + K * s1 * s3) / (2.0 * (1.0 + K2 * sa * s3));
  f.right = (1.0 + K * s2 * sb) * (1.0 + K * s2 * s5) / (2.0 * (1.0 + K2 * sb * s5));
  return f;
}

/// Leading weak-coupling behaviour of X on the homogeneous ladder.
inline double weak_coupling_chsh(const SeriesContext& c) { return -2.0 * c.k * c.k; }

// ---------------------------------------------------------------------------
// N-chain 1 - a - 3 - ... - N - b - 2

inline void check_chain_length(int n) {
  if (n < builtin::kMinChainLength) fail(ErrorKind::InvalidArgument, "chain length N must be at least 5");
}

/// P(s3..sN | sa, sb); `lambda` holds s3..sN (N - 2 spins).
inline double chain_lambda_conditional(int n, const SeriesContext& c, const std::vector<int>& lambda, int sa, int sb) {
  check_chain_length(n);
  if (lambda.size() != static_cast<std::size_t>(n - 2)) {
    fail(ErrorKind::InvalidArgument, "chain lambda must hold N - 2 spins");
  }
  const double K = c.k;
  double num = (1.0 + K * sa * lambda.front()) * (1.0 + K * lambda.back() * sb);
  for (std::size_t i = 0; i + 1 < lambda.size(); ++i) num *= 1.0 + K * lambda[i] * lambda[i + 1];
  return num / (std::ldexp(1.0, n - 2) * (1.0 + std::pow(K, n - 1) * sa * sb));
}

/// (P(all + | +,+), P(all + | -,-)).
inline std::array<double, 2> chain_all_up(int n, const SeriesContext& c) {
  check_chain_length(n);
  const double K = c.k;
  const double den = std::ldexp(1.0, n - 2) * (1.0 + std::pow(K, n - 1));
  const double common = std::pow(1.0 + K, n - 3);
  return {common * (1.0 + K) * (1.0 + K) / den, common * (1.0 - K) * (1.0 - K) / den};
}

/// P(s1, s2 | lambda, a, b) on the chain.
inline double chain_outcome_joint(const SeriesContext& c, int s1, int s2, int sa, int sb) {
  return (1.0 + c.k * s1 * sa) * (1.0 + c.k * s2 * sb) / 4.0;
}

/// P(s | lambda, neighbouring setting) for either outcome spin.
inline double chain_outcome_factor(const SeriesContext& c, int s, int setting) {
  return (1.0 + c.k * s * setting) / 2.0;
}

struct ChainMdPoint {
  int n = 0;
  /// sup over setting pairs of sum_lambda |P(l|a,b) - P(l|a',b')|.
  double md_summed = 0.0;
  /// sup over setting pairs and lambda of |P(l|a,b) - P(l|a',b')|.
  double md_per_configuration = 0.0;
};

/// MD of the chain from the closed form, grouping lambda by (s3, broken internal bonds).
inline ChainMdPoint chain_md_closed_form(int n, double K) {
  check_chain_length(n);
  const int internal = n - 3;
  ChainMdPoint out;
  out.n = n;
  auto f = [&](int m, int s3, int sn, int sa, int sb) {
    return std::pow(1.0 + K, internal - m) * std::pow(1.0 - K, m) * (1.0 + K * sa * s3) * (1.0 + K * sn * sb) /
           (std::ldexp(1.0, n - 2) * (1.0 + std::pow(K, n - 1) * sa * sb));
  };
  for (const auto& [sa, sb] : kSettingPairs) {
    for (const auto& [sap, sbp] : kSettingPairs) {
      double summed = 0.0;
      double count = 1.0;  // binomial(internal, m)
      for (int m = 0; m <= internal; ++m) {
        if (m > 0) count = count * (internal - m + 1) / m;
        for (int s3 : {1, -1}) {
          const int sn = (m % 2 == 0) ? s3 : -s3;
          const double d = std::abs(f(m, s3, sn, sa, sb) - f(m, s3, sn, sap, sbp));
          summed += count * d;
          out.md_per_configuration = std::max(out.md_per_configuration, d);
        }
      }
      out.md_summed = std::max(out.md_summed, summed);
    }
  }
  return out;
}

inline std::vector<ChainMdPoint> chain_md_profile(const std::vector<int>& ns, double K) {
  std::vector<ChainMdPoint> out;
  for (int n : ns) out.push_back(chain_md_closed_form(n, K));
  return out;
}

}  // namespace bellising::series
