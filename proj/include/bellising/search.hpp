#pragma once

// Derivative-free maximisation of the CHSH combination over fields and
// couplings, grid scans, and role-placement searches on the 2 x 5 grid.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellising/boltzmann.hpp"
#include "bellising/builtin.hpp"
#include "bellising/chsh.hpp"
#include "bellising/error.hpp"
#include "bellising/independence.hpp"
#include "bellising/rng.hpp"
#include "bellising/spec_io.hpp"

namespace bellising {

inline constexpr double kDefaultFieldBound = 3.0;
inline constexpr double kDefaultCouplingLo = 0.0;
inline constexpr double kDefaultCouplingHi = 4.0;
inline constexpr double kMinimumStep = 1e-3;

struct FieldTarget {
  std::string node;
};
struct CouplingTarget {
  std::string a, b;
};
using ParamTarget = std::variant<FieldTarget, CouplingTarget>;

/// One free parameter; every target in the group takes the same value.
struct Parameter {
  std::string name;
  std::vector<ParamTarget> targets;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> initial;

  bool clamped() const noexcept { return lo == hi; }
};

enum class Objective { XBi, MaxAbsX };

struct SearchSpace {
  LatticeSpec base;
  std::vector<Parameter> params;
  Objective objective = Objective::XBi;
  EnumerationOptions enumeration;

  std::size_t dimension() const noexcept { return params.size(); }

  void validate() const {
    base.validate(enumeration.cap, enumeration.require_roles);
    std::set<std::string> seen;
    for (const auto& p : params) {
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo > p.hi) {
        fail(ErrorKind::InvalidArgument, "parameter " + p.name + ": bounds must be finite with lo <= hi");
      }
      if (p.targets.empty()) fail(ErrorKind::InvalidArgument, "parameter " + p.name + " has no targets");
      if (p.initial && (*p.initial < p.lo || *p.initial > p.hi)) {
        fail(ErrorKind::InvalidArgument, "parameter " + p.name + ": initial value outside bounds");
      }
      for (const auto& t : p.targets) {
        std::string key;
        if (const auto* f = std::get_if<FieldTarget>(&t)) {
          base.require_index(f->node);
          key = "h:" + f->node;
        } else {
          const auto& c = std::get<CouplingTarget>(t);
          const auto* e = base.find_edge(c.a, c.b);
          if (!e) fail(ErrorKind::InvalidArgument, "parameter " + p.name + ": no edge " + c.a + "-" + c.b);
          key = "J:" + std::min(c.a, c.b) + "-" + std::max(c.a, c.b);
        }
        if (!seen.insert(key).second) fail(ErrorKind::InvalidArgument, "target " + key + " is in two tie groups");
      }
    }
  }

  std::vector<double> lower() const {
    std::vector<double> v;
    for (const auto& p : params) v.push_back(p.lo);
    return v;
  }
  std::vector<double> upper() const {
    std::vector<double> v;
    for (const auto& p : params) v.push_back(p.hi);
    return v;
  }

  LatticeSpec apply(const std::vector<double>& point) const {
    if (point.size() != params.size()) fail(ErrorKind::InvalidArgument, "point dimension mismatch");
    LatticeSpec spec = base;
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (const auto& t : params[i].targets) {
        if (const auto* f = std::get_if<FieldTarget>(&t)) {
          spec.node(f->node).h = point[i];
        } else {
          const auto& c = std::get<CouplingTarget>(t);
          for (auto& e : spec.edges) {
            if ((e.a == c.a && e.b == c.b) || (e.a == c.b && e.b == c.a)) e.j = point[i];
          }
        }
      }
    }
    check_ties(spec);
    return spec;
  }

  /// Every member of a tie group carries the same value.
  void check_ties(const LatticeSpec& spec) const {
    for (const auto& p : params) {
      std::optional<double> v;
      for (const auto& t : p.targets) {
        double x;
        if (const auto* f = std::get_if<FieldTarget>(&t)) {
          x = spec.node(f->node).h;
        } else {
          const auto& c = std::get<CouplingTarget>(t);
          x = spec.find_edge(c.a, c.b)->j;
        }
        if (v && *v != x) fail(ErrorKind::Precondition, "tie group " + p.name + " violated");
        v = x;
      }
    }
  }

  /// Objective value; -inf where the model cannot be evaluated.
  double evaluate(const std::vector<double>& point) const {
    try {
      const auto r = chsh(BoltzmannModel::build(apply(point), enumeration));
      return objective == Objective::XBi ? r.x_bi : r.max_abs_x;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Precondition) throw;
      return -std::numeric_limits<double>::infinity();
    }
  }
};

struct Incumbent {
  std::size_t evaluation = 0;
  std::size_t restart = 0;
  std::vector<double> point;
  double value = 0.0;
};

struct SearchResult {
  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  double best_x_bi = 0.0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  std::vector<Incumbent> trajectory;
  std::vector<std::uint64_t> restart_seeds;
  /// The final stencil of the winning restart found no improvement.
  bool certified_local = false;
};

namespace detail {

class Budget {
 public:
  explicit Budget(std::size_t n) : left_(n) {}
  bool take() {
    if (left_ == 0) return false;
    --left_;
    ++used_;
    return true;
  }
  bool empty() const { return left_ == 0; }
  std::size_t used() const { return used_; }

 private:
  std::size_t left_;
  std::size_t used_ = 0;
};

}  // namespace detail

/// Stencil pattern search: from a start point, try +-step along each free
/// coordinate, move to the best improving neighbour, halve every step when
/// none improves, stop when all steps are below 1e-3. Further restarts start
/// from uniform random points until the budget is spent. Deterministic in seed.
inline SearchResult maximize_chsh(const SearchSpace& space, std::size_t budget, std::uint64_t seed) {
  if (budget < 1) fail(ErrorKind::InvalidArgument, "budget must be at least 1");
  space.validate();
  const auto lo = space.lower(), hi = space.upper();
  const std::size_t d = space.dimension();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < d; ++i) {
    if (!space.params[i].clamped()) free.push_back(i);
  }
  SearchResult res;
  detail::Budget left(budget);
  CounterRng master(seed);

  auto record = [&](const std::vector<double>& x, double v, std::size_t restart) {
    if (v > res.best_value) {
      res.best_value = v;
      res.best = x;
      res.trajectory.push_back({left.used(), restart, x, v});
      return true;
    }
    return false;
  };

  for (std::size_t restart = 0; !left.empty(); ++restart) {
    const std::uint64_t rseed = master();
    res.restart_seeds.push_back(rseed);
    CounterRng rng(rseed);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& p = space.params[i];
      x[i] = (restart == 0 && p.initial) ? *p.initial : (p.clamped() ? p.lo : rng.uniform(p.lo, p.hi));
    }
    left.take();
    double fx = space.evaluate(x);
    const bool leads = record(x, fx, restart);
    ++res.restarts;
    if (free.empty()) {
      res.certified_local = true;
      break;
    }
    std::vector<double> step(d);
    for (std::size_t i : free) step[i] = (hi[i] - lo[i]) / 4.0;
    bool certified = false;
    while (!left.empty()) {
      std::optional<std::vector<double>> best_nb;
      double best_f = fx;
      for (std::size_t i : free) {
        for (double sign : {1.0, -1.0}) {
          auto y = x;
          y[i] = std::clamp(x[i] + sign * step[i], lo[i], hi[i]);
          if (y[i] == x[i]) continue;
          if (!left.take()) break;
          const double fy = space.evaluate(y);
          if (fy > best_f) {
            best_f = fy;
            best_nb = y;
          }
        }
      }
      if (best_nb) {
        x = *best_nb;
        fx = best_f;
        record(x, fx, restart);
        continue;
      }
      if (left.empty()) break;
      bool small = true;
      for (std::size_t i : free) {
        step[i] /= 2.0;
        small = small && step[i] < kMinimumStep;
      }
      if (small) {
        certified = true;
        break;
      }
    }
    if (fx == res.best_value && (leads || x == res.best)) res.certified_local = certified;
  }
  res.evaluations = left.used();
  if (!res.best.empty() && std::isfinite(res.best_value)) {
    res.best_x_bi = chsh(BoltzmannModel::build(space.apply(res.best), space.enumeration)).x_bi;
  }
  return res;
}

struct ScanRow {
  std::vector<double> point;
  double x_bi = std::numeric_limits<double>::quiet_NaN();
  double md = std::numeric_limits<double>::quiet_NaN();
  double od = std::numeric_limits<double>::quiet_NaN();
  double pd = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

/// Exhaustive grid: `resolution` points per free parameter, lo to hi inclusive.
inline std::vector<ScanRow> grid_scan(const SearchSpace& space, std::size_t resolution) {
  if (resolution < 1) fail(ErrorKind::InvalidArgument, "resolution must be at least 1");
  space.validate();
  const std::size_t d = space.dimension();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& p = space.params[i];
    if (p.clamped() || resolution == 1) {
      axes[i] = {p.clamped() ? p.lo : p.initial.value_or(p.lo)};
      continue;
    }
    for (std::size_t k = 0; k < resolution; ++k) {
      axes[i].push_back(p.lo + (p.hi - p.lo) * static_cast<double>(k) / static_cast<double>(resolution - 1));
    }
  }
  std::vector<ScanRow> rows;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    ScanRow row;
    for (std::size_t i = 0; i < d; ++i) row.point.push_back(axes[i][idx[i]]);
    try {
      const auto model = BoltzmannModel::build(space.apply(row.point), space.enumeration);
      row.x_bi = chsh(model).x_bi;
      const auto rep = independence_report(model);
      row.md = rep.md.value;
      row.od = rep.od.value;
      row.pd = rep.pd.value;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
      if (k == 0) return rows;
    }
    if (d == 0) return rows;
  }
}

/// Uniform coupling on every edge and uniform field on every node.
inline SearchSpace uniform_space(const LatticeSpec& base, std::optional<double> j, std::optional<double> h) {
  SearchSpace s;
  s.base = base;
  Parameter pj{"J", {}, kDefaultCouplingLo, kDefaultCouplingHi, j};
  for (const auto& e : base.edges) pj.targets.push_back(CouplingTarget{e.a, e.b});
  Parameter ph{"h", {}, -kDefaultFieldBound, kDefaultFieldBound, h};
  for (const auto& n : base.nodes) ph.targets.push_back(FieldTarget{n.id});
  s.params = {pj, ph};
  return s;
}

/// Fields and couplings tied in left-right mirror pairs of the 2 x 5 ladder
/// node naming (1<->2, a<->b, 3<->5, 6<->8, 4 and 7 self-mirrored).
inline SearchSpace mirror_space(const LatticeSpec& base) {
  SearchSpace s;
  s.base = base;
  std::set<std::string> done;
  for (const auto& n : base.nodes) {
    if (done.count(n.id)) continue;
    const auto m = builtin::ladder_mirror(n.id);
    Parameter p{"h" + n.id, {FieldTarget{n.id}}, -kDefaultFieldBound, kDefaultFieldBound, n.h};
    if (m != n.id && base.index_of(m)) p.targets.push_back(FieldTarget{m});
    done.insert(n.id);
    done.insert(m);
    s.params.push_back(p);
  }
  std::set<std::pair<std::string, std::string>> edone;
  auto key = [](std::string u, std::string v) { return u < v ? std::pair{u, v} : std::pair{v, u}; };
  for (const auto& e : base.edges) {
    if (edone.count(key(e.a, e.b))) continue;
    const auto ma = builtin::ladder_mirror(e.a), mb = builtin::ladder_mirror(e.b);
    Parameter p{"J" + e.a + e.b, {CouplingTarget{e.a, e.b}}, kDefaultCouplingLo, kDefaultCouplingHi, e.j};
    if (key(ma, mb) != key(e.a, e.b) && base.find_edge(ma, mb)) p.targets.push_back(CouplingTarget{ma, mb});
    edone.insert(key(e.a, e.b));
    edone.insert(key(ma, mb));
    s.params.push_back(p);
  }
  for (auto& p : s.params) {
    if (p.initial) p.initial = std::clamp(*p.initial, p.lo, p.hi);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Role placements on the 2 x 5 grid

inline builtin::GridPos mirror(const builtin::GridPos& p, int cols = 5) { return {p.row, cols - 1 - p.col}; }

/// Placements with 2 and b the mirror images of 1 and a, 1 in the left half.
inline std::vector<builtin::GridPlacement> symmetric_placements(int rows = 2, int cols = 5) {
  std::vector<builtin::GridPlacement> out;
  for (int r1 = 0; r1 < rows; ++r1) {
    for (int c1 = 0; c1 < cols / 2; ++c1) {
      for (int ra = 0; ra < rows; ++ra) {
        for (int ca = 0; ca < cols / 2; ++ca) {
          if (r1 == ra && c1 == ca) continue;
          const builtin::GridPos p1{r1, c1}, pa{ra, ca};
          out.push_back({p1, mirror(p1, cols), pa, mirror(pa, cols)});
        }
      }
    }
  }
  return out;
}

/// Every injective placement of the four roles.
inline std::vector<builtin::GridPlacement> all_placements(int rows = 2, int cols = 5) {
  std::vector<builtin::GridPos> sites;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) sites.push_back({r, c});
  }
  std::vector<builtin::GridPlacement> out;
  for (const auto& p1 : sites) {
    for (const auto& p2 : sites) {
      for (const auto& pa : sites) {
        for (const auto& pb : sites) {
          const std::set<builtin::GridPos> u = {p1, p2, pa, pb};
          if (u.size() == 4) out.push_back({p1, p2, pa, pb});
        }
      }
    }
  }
  return out;
}

inline std::string describe(const builtin::GridPlacement& p) {
  auto s = [](const builtin::GridPos& g) { return "(" + std::to_string(g.row) + "," + std::to_string(g.col) + ")"; };
  return "1=" + s(p.outcome1) + " 2=" + s(p.outcome2) + " a=" + s(p.analyzer_a) + " b=" + s(p.analyzer_b);
}

/// h = 1.9 on the four grid corners and 0.4 elsewhere, every J = 2. On the
/// corner placement the corners are 1, 2, 6, 8.
inline LatticeSpec corner_field_set(const builtin::GridPlacement& place) {
  auto spec = builtin::grid_lattice(2, 5, place, 2.0, 0.0, 0.4);
  const std::set<builtin::GridPos> corners = {{0, 0}, {0, 4}, {1, 0}, {1, 4}};
  // Hidden sites are numbered row-major from 3, skipping role sites.
  std::map<builtin::GridPos, std::string> ids = {
      {place.outcome1, "1"}, {place.outcome2, "2"}, {place.analyzer_a, "a"}, {place.analyzer_b, "b"}};
  int next = 3;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (!ids.count({r, c})) ids[{r, c}] = std::to_string(next++);
    }
  }
  for (const auto& c : corners) spec.node(ids.at(c)).h = 1.9;
  return spec;
}

struct PlacementRow {
  builtin::GridPlacement placement;
  double x_uniform = 0.0;  // J = 1.4, h = 1
  double x_fields = 0.0;   // corner field set, J = 2
  bool matches = false;
};

inline constexpr double kUniformTarget = 2.24, kUniformTolerance = 0.02;
inline constexpr double kFieldTarget = 2.883, kFieldTolerance = 0.005;

/// Both Ch. 2 parameter sets on every left-right symmetric placement.
inline std::vector<PlacementRow> chsh_placement_search() {
  std::vector<PlacementRow> rows;
  for (const auto& p : symmetric_placements()) {
    PlacementRow r;
    r.placement = p;
    r.x_uniform = chsh(build_model(builtin::grid_lattice(2, 5, p, 1.4, 0.0, 1.0))).x_bi;
    r.x_fields = chsh(build_model(corner_field_set(p))).x_bi;
    r.matches = std::abs(r.x_uniform - kUniformTarget) <= kUniformTolerance &&
                std::abs(r.x_fields - kFieldTarget) <= kFieldTolerance;
    rows.push_back(r);
  }
  return rows;
}

struct CrossedTargets {
  double x_bi = 2.32, md = 0.03, od = 0.15, pd = 0.78;
};

struct CrossedRow {
  builtin::GridPlacement placement;
  double x_bi = 0.0, md = 0.0, od = 0.0, pd = 0.0;
  /// Sum of squared relative misses against the targets.
  double score = 0.0;
};

/// Second-neighbour lattice (J = 1 nearest, 0.5 diagonal, h = 1) over all
/// placements, sorted by score (best first; ties keep enumeration order).
inline std::vector<CrossedRow> crossed_placement_search(const CrossedTargets& t = {}) {
  std::vector<CrossedRow> rows;
  for (const auto& p : all_placements()) {
    const auto m = build_model(builtin::grid_lattice(2, 5, p, 1.0, 0.5, 1.0));
    const auto rep = independence_report(m);
    CrossedRow r{p, chsh(m).x_bi, rep.md.value, rep.od.value, rep.pd.value, 0.0};
    for (const auto& [v, target] : {std::pair{r.x_bi, t.x_bi}, {r.md, t.md}, {r.od, t.od}, {r.pd, t.pd}}) {
      r.score += (v / target - 1.0) * (v / target - 1.0);
    }
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CrossedRow& a, const CrossedRow& b) { return a.score < b.score; });
  return rows;
}

// ---------------------------------------------------------------------------
// Search config file
//
// {
//   "lattice": "<built-in name>" | { lattice spec },
//   "objective": "x_bi" | "max_abs_x",
//   "budget": 500, "seed": 1,
//   "parameters": [
//     {"name": "J", "targets": [{"edge": ["a", "6"]}, {"edge": ["b", "8"]}],
//      "lo": 0, "hi": 4, "initial": 1.0},
//     {"name": "h", "targets": "all_fields"},
//     {"name": "Jall", "targets": "all_edges"}
//   ]
// }
//
// Bounds default to [-3, 3] for field-only groups and [0, 4] otherwise.

struct SearchConfig {
  SearchSpace space;
  std::size_t budget = 500;
  std::uint64_t seed = 1;
};

inline SearchConfig search_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys = {"lattice", "objective", "budget", "seed", "parameters"};
  for (const auto& [k, _] : j.items()) {
    if (!keys.count(k)) fail(ErrorKind::InvalidSpec, "unknown search config key '" + k + "'");
  }
  SearchConfig c;
  if (!j.contains("lattice")) fail(ErrorKind::InvalidSpec, "search config needs 'lattice'");
  if (j["lattice"].is_string()) {
    auto b = builtin::by_name(j["lattice"].get<std::string>());
    if (!b) fail(ErrorKind::InvalidSpec, "unknown built-in lattice " + j["lattice"].get<std::string>());
    c.space.base = *b;
  } else {
    c.space.base = lattice_from_json(j["lattice"]);
  }
  const auto obj = j.value("objective", std::string("x_bi"));
  if (obj == "x_bi") {
    c.space.objective = Objective::XBi;
  } else if (obj == "max_abs_x") {
    c.space.objective = Objective::MaxAbsX;
  } else {
    fail(ErrorKind::InvalidSpec, "objective must be x_bi or max_abs_x");
  }
  c.budget = j.value("budget", c.budget);
  c.seed = j.value("seed", c.seed);
  for (const auto& pj : j.value("parameters", nlohmann::json::array())) {
    Parameter p;
    p.name = pj.at("name").get<std::string>();
    bool fields_only = true;
    const auto& t = pj.at("targets");
    if (t.is_string()) {
      const auto s = t.get<std::string>();
      if (s == "all_fields") {
        for (const auto& n : c.space.base.nodes) p.targets.push_back(FieldTarget{n.id});
      } else if (s == "all_edges") {
        for (const auto& e : c.space.base.edges) p.targets.push_back(CouplingTarget{e.a, e.b});
        fields_only = false;
      } else {
        fail(ErrorKind::InvalidSpec, "targets must be a list, all_fields or all_edges");
      }
    } else {
      for (const auto& tj : t) {
        if (tj.contains("field")) {
          p.targets.push_back(FieldTarget{tj["field"].get<std::string>()});
        } else if (tj.contains("edge") && tj["edge"].size() == 2) {
          p.targets.push_back(CouplingTarget{tj["edge"][0].get<std::string>(), tj["edge"][1].get<std::string>()});
          fields_only = false;
        } else {
          fail(ErrorKind::InvalidSpec, "target must be {\"field\": id} or {\"edge\": [u, v]}");
        }
      }
    }
    p.lo = pj.value("lo", fields_only ? -kDefaultFieldBound : kDefaultCouplingLo);
    p.hi = pj.value("hi", fields_only ? kDefaultFieldBound : kDefaultCouplingHi);
    if (pj.contains("initial")) p.initial = pj["initial"].get<double>();
    c.space.params.push_back(std::move(p));
  }
  c.space.validate();
  return c;
}

inline SearchConfig load_search_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return search_config_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
}

}  // namespace bellising
