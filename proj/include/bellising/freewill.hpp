#pragma once

// Postselection (Ex1) versus clamped analyzers (Ex2).
//
// Ex2 does not reuse the parent enumeration: clamping sa and sb folds their
// couplings into fields and constants on a reduced lattice of N - 2 free spins,
// which is enumerated on its own. Agreement of the two tables is therefore a
// check between two independent summations.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bellising/boltzmann.hpp"
#include "bellising/chsh.hpp"
#include "bellising/independence.hpp"
#include "bellising/lattice.hpp"

namespace bellising {

/// Lattice with both analyzer spins fixed by the experimenters.
class ClampedModel {
 public:
  static ClampedModel build(const LatticeSpec& base, int sa, int sb, const EnumerationOptions& opts = {}) {
    base.validate(opts.cap, true);
    if ((sa != 1 && sa != -1) || (sb != 1 && sb != -1)) fail(ErrorKind::InvalidArgument, "clamp spins must be +-1");
    return ClampedModel(base, sa, sb, opts);
  }

  int sa() const noexcept { return sa_; }
  int sb() const noexcept { return sb_; }
  const LatticeSpec& base() const noexcept { return base_; }
  const BoltzmannModel& free_part() const noexcept { return reduced_; }

  /// log Z*, the sum of exp(-beta H) over configurations consistent with the clamp.
  double log_z_star() const noexcept { return reduced_.log_z(); }

  /// P*(s1, s2) read directly from the clamped ensemble.
  double outcome_probability(int s1, int s2) const {
    PartialAssignment t;
    t.set(reduced_index(NodeRole::Outcome1), s1).set(reduced_index(NodeRole::Outcome2), s2);
    return reduced_.marginal(t);
  }

  std::size_t reduced_index(NodeRole role) const { return reduced_.spec().require_index(role_id(role)); }

 private:
  ClampedModel(const LatticeSpec& base, int sa, int sb, const EnumerationOptions& opts)
      : base_(base), sa_(sa), sb_(sb), reduced_(BoltzmannModel::build(reduce(base, sa, sb), free_options(opts))) {}

  static EnumerationOptions free_options(EnumerationOptions opts) {
    opts.require_roles = false;
    return opts;
  }

  std::string role_id(NodeRole role) const { return base_.nodes[base_.role_index(role)].id; }

  static LatticeSpec reduce(const LatticeSpec& base, int sa, int sb) {
    const std::string ida = base.nodes[base.role_index(NodeRole::AnalyzerA)].id;
    const std::string idb = base.nodes[base.role_index(NodeRole::AnalyzerB)].id;
    auto clamp_of = [&](const std::string& id) -> int {
      if (id == ida) return sa;
      if (id == idb) return sb;
      return 0;
    };
    LatticeSpec r;
    r.beta = base.beta;
    r.c0 = base.c0;
    for (const auto& n : base.nodes) {
      if (const int s = clamp_of(n.id)) {
        r.c0 -= n.h * s;
      } else {
        r.nodes.push_back(n);
      }
    }
    std::map<std::pair<std::string, std::string>, double> pair_j;
    std::vector<std::pair<std::string, std::string>> pair_order;
    auto add_pair = [&](std::string u, std::string v, double j) {
      if (v < u) std::swap(u, v);
      auto [it, inserted] = pair_j.try_emplace({u, v}, 0.0);
      if (inserted) pair_order.emplace_back(u, v);
      it->second += j;
    };
    for (const auto& e : base.edges) {
      const int su = clamp_of(e.a), sv = clamp_of(e.b);
      if (su && sv) {
        r.c0 -= e.j * su * sv;
      } else if (su) {
        r.node(e.b).h += e.j * su;
      } else if (sv) {
        r.node(e.a).h += e.j * sv;
      } else {
        add_pair(e.a, e.b, e.j);
      }
    }
    for (const auto& t : base.cubic) {
      std::vector<std::string> free_ids;
      int clamped = 1;
      for (const auto& id : t.nodes) {
        if (const int s = clamp_of(id)) {
          clamped *= s;
        } else {
          free_ids.push_back(id);
        }
      }
      // +c * (clamped product) * (remaining spins)
      const double c = t.c * clamped;
      if (free_ids.size() == 3) {
        r.cubic.push_back(t);
      } else if (free_ids.size() == 2) {
        add_pair(free_ids[0], free_ids[1], -c);
      } else if (free_ids.size() == 1) {
        r.node(free_ids[0]).h -= c;
      } else {
        r.c0 += c;
      }
    }
    for (const auto& key : pair_order) r.edges.push_back({key.first, key.second, pair_j.at(key)});
    return r;
  }

  LatticeSpec base_;
  int sa_;
  int sb_;
  BoltzmannModel reduced_;
};

/// Conditional table by postselection on the free-running ensemble.
inline ConditionalTable ex1_table(const BoltzmannModel& model) { return conditional_table(model); }

struct ClampedEnsembles {
  std::array<ClampedModel, 4> clamps;
};

inline std::array<ClampedModel, 4> clamp_all(const LatticeSpec& spec, const EnumerationOptions& opts = {}) {
  return {ClampedModel::build(spec, 1, 1, opts), ClampedModel::build(spec, 1, -1, opts),
          ClampedModel::build(spec, -1, 1, opts), ClampedModel::build(spec, -1, -1, opts)};
}

/// Conditional table from four clamped experiments; conditioning is vacuous.
inline ConditionalTable ex2_table(const std::array<ClampedModel, 4>& clamps) {
  ConditionalTable table;
  for (const auto& c : clamps) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) table.set(s1, s2, c.sa(), c.sb(), c.outcome_probability(s1, s2));
    }
  }
  return table;
}

inline ConditionalTable ex2_table(const LatticeSpec& spec, const EnumerationOptions& opts = {}) {
  return ex2_table(clamp_all(spec, opts));
}

/// Per-setting joint of (s1, s2, lambda) from the clamped ensembles.
inline SettingJoint clamped_setting_joint(const std::array<ClampedModel, 4>& clamps,
                                          const std::vector<std::string>& lambda_ids) {
  SettingJoint j;
  j.lambda_bits = lambda_ids.size();
  j.shared_scale = false;
  for (const auto& c : clamps) {
    const auto& rs = c.free_part().spec();
    std::vector<std::size_t> nodes = {c.reduced_index(NodeRole::Outcome1), c.reduced_index(NodeRole::Outcome2)};
    for (const auto& id : lambda_ids) nodes.push_back(rs.require_index(id));
    j.weights[SettingJoint::setting_index(c.sa(), c.sb())] = c.free_part().project(nodes);
  }
  return j;
}

struct FreewillReport {
  ConditionalTable ex1;
  ConditionalTable ex2;
  double max_discrepancy = 0.0;
  /// |sum over clamps of Z* / Z - 1|.
  double partition_defect = 0.0;
  double md_ex1 = 0.0, md_ex2 = 0.0;
  double od_ex1 = 0.0, od_ex2 = 0.0;
  double pd_ex1 = 0.0, pd_ex2 = 0.0;
  double max_measure_discrepancy = 0.0;
};

inline FreewillReport freewill_report(const BoltzmannModel& model, const EnumerationOptions& opts = {}) {
  FreewillReport r;
  const auto clamps = clamp_all(model.spec(), opts);
  r.ex1 = ex1_table(model);
  r.ex2 = ex2_table(clamps);
  r.max_discrepancy = r.ex1.max_abs_difference(r.ex2);
  double ratio = 0.0;
  for (const auto& c : clamps) ratio += std::exp(c.log_z_star() - model.log_z());
  r.partition_defect = std::abs(ratio - 1.0);
  const auto lambda = HiddenSubset::all(model.spec());
  const auto j1 = setting_joint(model, lambda);
  const auto j2 = clamped_setting_joint(clamps, lambda.ids());
  r.md_ex1 = measurement_dependence(j1).value;
  r.md_ex2 = measurement_dependence(j2).value;
  r.od_ex1 = outcome_dependence(j1).value;
  r.od_ex2 = outcome_dependence(j2).value;
  r.pd_ex1 = parameter_dependence(j1).value;
  r.pd_ex2 = parameter_dependence(j2).value;
  r.max_measure_discrepancy = std::max({std::abs(r.md_ex1 - r.md_ex2), std::abs(r.od_ex1 - r.od_ex2),
                                        std::abs(r.pd_ex1 - r.pd_ex2)});
  return r;
}

/// max over the 16 cells of |Ex1 - Ex2|.
inline double assert_equivalence(const BoltzmannModel& model, const EnumerationOptions& opts = {}) {
  return ex1_table(model).max_abs_difference(ex2_table(model.spec(), opts));
}

}  // namespace bellising
