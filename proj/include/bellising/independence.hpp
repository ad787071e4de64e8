#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bellising/boltzmann.hpp"
#include "bellising/chsh.hpp"
#include "bellising/error.hpp"
#include "bellising/lattice.hpp"

namespace bellising {

/// Defects at or below this count as "condition holds".
inline constexpr double kIndependenceTolerance = 1e-9;

/// Hidden spins playing the role of lambda. Default: every hidden node.
class HiddenSubset {
 public:
  static HiddenSubset all(const LatticeSpec& spec) { return HiddenSubset(spec, spec.hidden_indices()); }

  static HiddenSubset of(const LatticeSpec& spec, const std::vector<std::string>& ids) {
    std::vector<std::size_t> idx;
    for (const auto& id : ids) idx.push_back(spec.require_index(id));
    return HiddenSubset(spec, std::move(idx));
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return indices_.size(); }

  /// Renders a lambda code as e.g. "3=+,4=-".
  std::string describe(std::size_t code) const {
    std::string out;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (i) out += ",";
      out += ids_[i] + "=" + (((code >> i) & 1u) ? "+" : "-");
    }
    return out;
  }

 private:
  HiddenSubset(const LatticeSpec& spec, std::vector<std::size_t> idx) : indices_(std::move(idx)) {
    if (indices_.empty()) fail(ErrorKind::InvalidArgument, "hidden subset is empty");
    std::vector<std::size_t> sorted = indices_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(ErrorKind::InvalidArgument, "hidden subset repeats a node");
    }
    for (auto k : indices_) {
      if (k >= spec.size() || spec.nodes[k].role != NodeRole::Hidden) {
        fail(ErrorKind::InvalidArgument, "hidden subset contains non-hidden node");
      }
      ids_.push_back(spec.nodes[k].id);
    }
  }

  std::vector<std::size_t> indices_;
  std::vector<std::string> ids_;
};

/// Unnormalized joint weights of (s1, s2, lambda) for each of the four setting
/// pairs. Index within a setting: bit 0 = s1, bit 1 = s2, bits 2.. = lambda.
/// Each setting may carry its own scale; conditionals only use ratios within a
/// setting. `shared_scale` marks tables where weights across settings are
/// comparable (needed for the Clauser-Horne factors, which average over the
/// distant setting).
struct SettingJoint {
  std::size_t lambda_bits = 0;
  std::array<std::vector<double>, 4> weights;
  bool shared_scale = false;

  static constexpr std::size_t setting_index(int sa, int sb) noexcept {
    return (sa > 0 ? 0u : 2u) | (sb > 0 ? 0u : 1u);
  }
  std::size_t lambda_count() const noexcept { return std::size_t{1} << lambda_bits; }
  double w(std::size_t setting, int s1, int s2, std::size_t lam) const noexcept {
    return weights[setting][(s1 > 0 ? 1u : 0u) | (s2 > 0 ? 2u : 0u) | (lam << 2)];
  }
  double cell(std::size_t setting, std::size_t lam) const noexcept {
    return w(setting, 1, 1, lam) + w(setting, 1, -1, lam) + w(setting, -1, 1, lam) + w(setting, -1, -1, lam);
  }
  double total(std::size_t setting) const {
    CompensatedSum acc;
    for (double x : weights[setting]) acc.add(x);
    return acc.value();
  }
};

/// Builds the joint from the unclamped (postselection) distribution.
inline SettingJoint setting_joint(const BoltzmannModel& model, const HiddenSubset& lambda) {
  const auto& spec = model.spec();
  std::vector<std::size_t> nodes = {spec.role_index(NodeRole::Outcome1), spec.role_index(NodeRole::Outcome2),
                                    spec.role_index(NodeRole::AnalyzerA), spec.role_index(NodeRole::AnalyzerB)};
  nodes.insert(nodes.end(), lambda.indices().begin(), lambda.indices().end());
  const auto table = model.project(nodes);
  SettingJoint j;
  j.lambda_bits = lambda.size();
  j.shared_scale = true;
  const std::size_t per = std::size_t{4} << lambda.size();
  for (auto& v : j.weights) v.assign(per, 0.0);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    const int sa = (idx >> 2) & 1u ? 1 : -1;
    const int sb = (idx >> 3) & 1u ? 1 : -1;
    const std::size_t inner = (idx & 3u) | ((idx >> 4) << 2);
    j.weights[SettingJoint::setting_index(sa, sb)][inner] = table[idx];
  }
  return j;
}

struct SettingPairWitness {
  int sa = 1, sb = 1, sap = 1, sbp = 1;
};

struct CellWitness {
  int sa = 1, sb = 1;
  std::size_t lambda = 0;
};

struct ParameterWitness {
  /// 2: |P(s2 | a,b,l) - P(s2 | a',b,l)|, 1: the mirrored s1 form with b, b'.
  int side = 2;
  int fixed_setting = 1;   // b for side 2, a for side 1
  int varied = 1;          // a (side 2) or b (side 1)
  int varied_prime = -1;   // a' or b'
  int outcome = 1;
  std::size_t lambda = 0;
};

struct MeasureResult {
  double value = 0.0;
  std::size_t skipped_cells = 0;
};

struct MdResult : MeasureResult {
  SettingPairWitness witness;
};
struct OdResult : MeasureResult {
  std::optional<CellWitness> witness;
};
struct PdResult : MeasureResult {
  std::optional<ParameterWitness> witness;
};
struct FactorizabilityResult {
  bool factorizable = true;
  double max_defect = 0.0;
  std::optional<CellWitness> witness;
  std::size_t skipped_cells = 0;
};

inline MdResult measurement_dependence(const SettingJoint& j) {
  std::array<double, 4> totals{};
  std::array<std::vector<double>, 4> rho;
  for (const auto& [sa, sb] : kSettingPairs) {
    const auto s = SettingJoint::setting_index(sa, sb);
    totals[s] = j.total(s);
    if (totals[s] < kZeroMeasureThreshold) {
      fail(ErrorKind::ZeroMeasure, "setting " + setting_name(sa, sb) + " has zero probability");
    }
    rho[s].resize(j.lambda_count());
    for (std::size_t lam = 0; lam < j.lambda_count(); ++lam) rho[s][lam] = j.cell(s, lam) / totals[s];
  }
  MdResult out;
  out.value = -1.0;
  for (const auto& [sa, sb] : kSettingPairs) {
    for (const auto& [sap, sbp] : kSettingPairs) {
      const auto s = SettingJoint::setting_index(sa, sb);
      const auto t = SettingJoint::setting_index(sap, sbp);
      CompensatedSum acc;
      for (std::size_t lam = 0; lam < j.lambda_count(); ++lam) acc.add(std::abs(rho[s][lam] - rho[t][lam]));
      if (acc.value() > out.value) {
        out.value = acc.value();
        out.witness = {sa, sb, sap, sbp};
      }
    }
  }
  return out;
}

inline OdResult outcome_dependence(const SettingJoint& j) {
  OdResult out;
  out.value = -1.0;
  std::size_t considered = 0;
  for (const auto& [sa, sb] : kSettingPairs) {
    const auto s = SettingJoint::setting_index(sa, sb);
    for (std::size_t lam = 0; lam < j.lambda_count(); ++lam) {
      const double c = j.cell(s, lam);
      if (c < kZeroMeasureThreshold) {
        ++out.skipped_cells;
        continue;
      }
      ++considered;
      double defect = 0.0;
      const double p1 = (j.w(s, 1, 1, lam) + j.w(s, 1, -1, lam)) / c;
      const double p2 = (j.w(s, 1, 1, lam) + j.w(s, -1, 1, lam)) / c;
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
          const double m1 = s1 > 0 ? p1 : 1.0 - p1;
          const double m2 = s2 > 0 ? p2 : 1.0 - p2;
          defect += std::abs(j.w(s, s1, s2, lam) / c - m1 * m2);
        }
      }
      if (defect > out.value) {
        out.value = defect;
        out.witness = CellWitness{sa, sb, lam};
      }
    }
  }
  if (considered == 0) fail(ErrorKind::Degenerate, "every (a, b, lambda) cell has zero probability");
  return out;
}

inline PdResult parameter_dependence(const SettingJoint& j) {
  PdResult out;
  out.value = -1.0;
  std::size_t considered = 0;
  auto marginal = [&](std::size_t s, int side, int outcome, std::size_t lam) {
    const double c = j.cell(s, lam);
    double num = 0.0;
    for (int o : {1, -1}) num += side == 2 ? j.w(s, o, outcome, lam) : j.w(s, outcome, o, lam);
    return num / c;
  };
  for (std::size_t lam = 0; lam < j.lambda_count(); ++lam) {
    for (int side : {2, 1}) {
      for (int fixed : {1, -1}) {
        for (int v : {1, -1}) {
          for (int vp : {1, -1}) {
            if (v == vp) continue;
            const auto s = side == 2 ? SettingJoint::setting_index(v, fixed) : SettingJoint::setting_index(fixed, v);
            const auto t = side == 2 ? SettingJoint::setting_index(vp, fixed) : SettingJoint::setting_index(fixed, vp);
            if (j.cell(s, lam) < kZeroMeasureThreshold || j.cell(t, lam) < kZeroMeasureThreshold) {
              ++out.skipped_cells;
              continue;
            }
            ++considered;
            for (int o : {1, -1}) {
              const double d = std::abs(marginal(s, side, o, lam) - marginal(t, side, o, lam));
              if (d > out.value) {
                out.value = d;
                out.witness = ParameterWitness{side, fixed, v, vp, o, lam};
              }
            }
          }
        }
      }
    }
  }
  if (considered == 0) fail(ErrorKind::Degenerate, "every (a, b, lambda) cell has zero probability");
  return out;
}

/// Clauser-Horne check: P(s1, s2 | l, a, b) against P(s1 | l, a) * P(s2 | l, b),
/// where the single-side factors average over the distant setting.
inline FactorizabilityResult factorizability_check(const SettingJoint& j, double tol = kIndependenceTolerance) {
  if (!j.shared_scale) fail(ErrorKind::InvalidArgument, "factorizability needs a common-scale joint");
  FactorizabilityResult out;
  std::size_t considered = 0;
  for (std::size_t lam = 0; lam < j.lambda_count(); ++lam) {
    for (const auto& [sa, sb] : kSettingPairs) {
      const auto s = SettingJoint::setting_index(sa, sb);
      const double c = j.cell(s, lam);
      if (c < kZeroMeasureThreshold) {
        ++out.skipped_cells;
        continue;
      }
      ++considered;
      // Weights with lambda and a fixed, summed over b (and lambda, b fixed, summed over a).
      double left_total = 0.0, right_total = 0.0;
      std::array<double, 2> left{}, right{};
      for (int x : {1, -1}) {
        const auto sl = SettingJoint::setting_index(sa, x);
        const auto sr = SettingJoint::setting_index(x, sb);
        left_total += j.cell(sl, lam);
        right_total += j.cell(sr, lam);
        for (int o : {1, -1}) {
          left[o > 0 ? 0 : 1] += j.w(sl, o, 1, lam) + j.w(sl, o, -1, lam);
          right[o > 0 ? 0 : 1] += j.w(sr, 1, o, lam) + j.w(sr, -1, o, lam);
        }
      }
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
          const double joint = j.w(s, s1, s2, lam) / c;
          const double f = (left[s1 > 0 ? 0 : 1] / left_total) * (right[s2 > 0 ? 0 : 1] / right_total);
          const double d = std::abs(joint - f);
          if (d > out.max_defect || !out.witness) {
            out.max_defect = std::max(out.max_defect, d);
            out.witness = CellWitness{sa, sb, lam};
          }
        }
      }
    }
  }
  if (considered == 0) fail(ErrorKind::Degenerate, "every (a, b, lambda) cell has zero probability");
  out.factorizable = out.max_defect <= tol;
  return out;
}

inline MdResult measurement_dependence(const BoltzmannModel& m, const HiddenSubset& l) {
  return measurement_dependence(setting_joint(m, l));
}
inline OdResult outcome_dependence(const BoltzmannModel& m, const HiddenSubset& l) {
  return outcome_dependence(setting_joint(m, l));
}
inline PdResult parameter_dependence(const BoltzmannModel& m, const HiddenSubset& l) {
  return parameter_dependence(setting_joint(m, l));
}
inline FactorizabilityResult factorizability_check(const BoltzmannModel& m, const HiddenSubset& l,
                                                   double tol = kIndependenceTolerance) {
  return factorizability_check(setting_joint(m, l), tol);
}

struct IndependenceReport {
  std::vector<std::string> lambda_ids;
  double tolerance = kIndependenceTolerance;
  MdResult md;
  OdResult od;
  PdResult pd;
  FactorizabilityResult factorization;
  bool mi_holds = false;
  bool oi_holds = false;
  bool pi_holds = false;
  bool factorizable = false;
};

inline IndependenceReport independence_report(const SettingJoint& j, const HiddenSubset& lambda,
                                              double tol = kIndependenceTolerance) {
  IndependenceReport r;
  r.lambda_ids = lambda.ids();
  r.tolerance = tol;
  r.md = measurement_dependence(j);
  r.od = outcome_dependence(j);
  r.pd = parameter_dependence(j);
  r.factorization = factorizability_check(j, tol);
  r.mi_holds = r.md.value <= tol;
  r.oi_holds = r.od.value <= tol;
  r.pi_holds = r.pd.value <= tol;
  r.factorizable = r.oi_holds && r.pi_holds;
  return r;
}

inline IndependenceReport independence_report(const BoltzmannModel& model, const HiddenSubset& lambda,
                                              double tol = kIndependenceTolerance) {
  return independence_report(setting_joint(model, lambda), lambda, tol);
}

inline IndependenceReport independence_report(const BoltzmannModel& model) {
  return independence_report(model, HiddenSubset::all(model.spec()));
}

struct PairwiseCorrelation {
  std::vector<std::string> ids;
  /// defect[i][j] = max over signs of |P(i, j) - P(i) P(j)|.
  std::vector<std::vector<double>> defect;
  std::vector<std::vector<bool>> dependent;
  double tolerance = kIndependenceTolerance;
};

inline PairwiseCorrelation pairwise_correlation_check(const BoltzmannModel& model,
                                                      double tol = kIndependenceTolerance) {
  const auto n = model.size();
  PairwiseCorrelation out;
  out.tolerance = tol;
  for (const auto& node : model.spec().nodes) out.ids.push_back(node.id);
  out.defect.assign(n, std::vector<double>(n, 0.0));
  out.dependent.assign(n, std::vector<bool>(n, false));
  const double z = model.stabilized_z();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const std::array<std::size_t, 2> nodes = {i, k};
      const auto t = model.project(nodes);
      const double pi = (t[1] + t[3]) / z;
      const double pk = (t[2] + t[3]) / z;
      double worst = 0.0;
      for (std::size_t idx = 0; idx < 4; ++idx) {
        const double mi = (idx & 1u) ? pi : 1.0 - pi;
        const double mk = (idx & 2u) ? pk : 1.0 - pk;
        worst = std::max(worst, std::abs(t[idx] / z - mi * mk));
      }
      out.defect[i][k] = out.defect[k][i] = worst;
      out.dependent[i][k] = out.dependent[k][i] = worst > tol;
    }
  }
  return out;
}

/// Copy of `spec` with every coupling that touches an analyzer node scaled by `s`.
inline LatticeSpec scale_analyzer_couplings(const LatticeSpec& spec, double s) {
  LatticeSpec out = spec;
  auto is_analyzer = [&](const std::string& id) {
    const auto role = spec.node(id).role;
    return role == NodeRole::AnalyzerA || role == NodeRole::AnalyzerB;
  };
  for (auto& e : out.edges) {
    if (is_analyzer(e.a) || is_analyzer(e.b)) e.j *= s;
  }
  for (auto& t : out.cubic) {
    if (is_analyzer(t.nodes[0]) || is_analyzer(t.nodes[1]) || is_analyzer(t.nodes[2])) t.c *= s;
  }
  return out;
}

struct DecouplingPoint {
  double scale = 0.0;
  double md = 0.0;
  double x_bi = 0.0;
};

/// MD (and X) as the analyzers are decoupled from the rest of the lattice.
inline std::vector<DecouplingPoint> decoupling_sweep(const LatticeSpec& templ, const std::vector<double>& scales,
                                                     const std::vector<std::string>& lambda_ids = {},
                                                     const EnumerationOptions& opts = {}) {
  std::vector<DecouplingPoint> out;
  for (double s : scales) {
    const auto model = BoltzmannModel::build(scale_analyzer_couplings(templ, s), opts);
    const auto lambda =
        lambda_ids.empty() ? HiddenSubset::all(model.spec()) : HiddenSubset::of(model.spec(), lambda_ids);
    out.push_back({s, measurement_dependence(model, lambda).value, chsh(model).x_bi});
  }
  return out;
}

}  // namespace bellising
