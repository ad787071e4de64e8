#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bellising/boltzmann.hpp"
#include "bellising/error.hpp"

namespace bellising {

inline std::string setting_name(int sa, int sb) {
  return std::string("(") + (sa > 0 ? "+" : "-") + "," + (sb > 0 ? "+" : "-") + ")";
}

/// P(s1, s2 | sa, sb) for all 16 sign combinations.
class ConditionalTable {
 public:
  static constexpr std::size_t index(int s1, int s2, int sa, int sb) noexcept {
    return (s1 > 0 ? 8u : 0u) | (s2 > 0 ? 4u : 0u) | (sa > 0 ? 2u : 0u) | (sb > 0 ? 1u : 0u);
  }

  double at(int s1, int s2, int sa, int sb) const noexcept { return entries_[index(s1, s2, sa, sb)]; }
  void set(int s1, int s2, int sa, int sb, double p) noexcept { entries_[index(s1, s2, sa, sb)] = p; }

  const std::array<double, 16>& entries() const noexcept { return entries_; }

  /// Largest deviation of a setting column from unit sum.
  double normalization_defect() const noexcept {
    double worst = 0.0;
    for (int sa : {1, -1}) {
      for (int sb : {1, -1}) {
        double s = 0.0;
        for (int s1 : {1, -1}) {
          for (int s2 : {1, -1}) s += at(s1, s2, sa, sb);
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    return worst;
  }

  void validate(double tol = 1e-10) const {
    for (double p : entries_) {
      if (!(p >= -tol && p <= 1.0 + tol)) fail(ErrorKind::InvalidArgument, "table entry outside [0,1]");
    }
    if (normalization_defect() > tol) fail(ErrorKind::InvalidArgument, "table column does not sum to 1");
  }

  double max_abs_difference(const ConditionalTable& other) const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < 16; ++i) worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
    return worst;
  }

 private:
  std::array<double, 16> entries_{};
};

inline constexpr std::array<std::array<int, 2>, 4> kSettingPairs = {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Postselected conditional table P(s1, s2 | sa, sb) from the exact distribution.
inline ConditionalTable conditional_table(const BoltzmannModel& model) {
  const auto& spec = model.spec();
  const auto i1 = spec.role_index(NodeRole::Outcome1);
  const auto i2 = spec.role_index(NodeRole::Outcome2);
  const auto ia = spec.role_index(NodeRole::AnalyzerA);
  const auto ib = spec.role_index(NodeRole::AnalyzerB);
  ConditionalTable table;
  for (const auto& [sa, sb] : kSettingPairs) {
    PartialAssignment given;
    given.set(ia, sa).set(ib, sb);
    if (model.marginal_weight(given) < kZeroMeasureThreshold) {
      fail(ErrorKind::ZeroMeasure, "setting " + setting_name(sa, sb) + " has zero probability");
    }
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        PartialAssignment target;
        target.set(i1, s1).set(i2, s2);
        table.set(s1, s2, sa, sb, model.conditional(target, given));
      }
    }
  }
  return table;
}

/// M(sa, sb) = sum over outcomes of s1 * s2 * P(s1, s2 | sa, sb).
inline double correlator(const ConditionalTable& t, int sa, int sb) {
  return t.at(1, 1, sa, sb) + t.at(-1, -1, sa, sb) - t.at(1, -1, sa, sb) - t.at(-1, 1, sa, sb);
}

struct ChshReport {
  double m_ab = 0.0;    // M(+1, +1)
  double m_apb = 0.0;   // M(-1, +1)
  double m_abp = 0.0;   // M(+1, -1)
  double m_apbp = 0.0;  // M(-1, -1)
  double x_bi = 0.0;
  /// max |X| over which spin value plays a/a', b/b' and which term is subtracted.
  double max_abs_x = 0.0;
  std::string convention = "a=b=+1,a'=b'=-1";
};

/// CHSH combination with a = b = +1 and a' = b' = -1.
inline ChshReport chsh(const ConditionalTable& table) {
  ChshReport r;
  r.m_ab = correlator(table, 1, 1);
  r.m_apb = correlator(table, -1, 1);
  r.m_abp = correlator(table, 1, -1);
  r.m_apbp = correlator(table, -1, -1);
  r.x_bi = r.m_ab + r.m_apb + r.m_abp - r.m_apbp;
  for (int a : {1, -1}) {
    for (int b : {1, -1}) {
      const std::array<double, 4> m = {correlator(table, a, b), correlator(table, -a, b), correlator(table, a, -b),
                                       correlator(table, -a, -b)};
      for (int minus = 0; minus < 4; ++minus) {
        double x = 0.0;
        for (int k = 0; k < 4; ++k) x += (k == minus ? -m[k] : m[k]);
        r.max_abs_x = std::max(r.max_abs_x, std::abs(x));
      }
    }
  }
  return r;
}

inline ChshReport chsh(const BoltzmannModel& model) { return chsh(conditional_table(model)); }

/// Cosine correlation law M(a, b) = cos(a - b). The singlet state is often
/// written with the opposite sign; the bound is the same.
inline double quantum_reference(double a, double b) { return std::cos(a - b); }

inline double quantum_chsh(double a, double ap, double b, double bp) {
  return quantum_reference(a, b) + quantum_reference(ap, b) + quantum_reference(a, bp) - quantum_reference(ap, bp);
}

struct AngleSet {
  double a, ap, b, bp;
};

inline constexpr AngleSet kStandardAngles = {0.0, std::numbers::pi / 2, std::numbers::pi / 4, -std::numbers::pi / 4};

}  // namespace bellising
