#pragma once

// Built-in lattices.
//
// Canonical ladder (2 x 5), top row 1 3 4 5 2, bottom row a 6 7 8 b:
//
//   1 - 3 - 4 - 5 - 2
//   |   |   |   |   |
//   a - 6 - 7 - 8 - b
//
// "corner" ladder: same grid, outcome spins on the top corners, analyzers one step
// in on the bottom row:
//
//   1 - 3 - 4 - 5 - 2
//   |   |   |   |   |
//   6 - a - 7 - b - 8
//
// N-chain: 1 - a - 3 - 4 - ... - N - b - 2 (N + 2 spins, outcome spins are leaves).

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellising/error.hpp"
#include "bellising/lattice.hpp"
#include "bellising/rng.hpp"

namespace bellising::builtin {

inline const std::vector<std::pair<std::string, std::string>>& canonical_ladder_edges() {
  static const std::vector<std::pair<std::string, std::string>> edges = {
      {"1", "a"}, {"1", "3"}, {"a", "6"}, {"3", "6"}, {"3", "4"}, {"6", "7"}, {"4", "7"},
      {"4", "5"}, {"7", "8"}, {"5", "8"}, {"5", "2"}, {"8", "b"}, {"2", "b"},
  };
  return edges;
}

/// Left-right mirror of the canonical ladder: 1<->2, a<->b, 3<->5, 6<->8; 4 and 7 fixed.
inline std::string ladder_mirror(const std::string& id) {
  static const std::map<std::string, std::string> m = {{"1", "2"}, {"2", "1"}, {"a", "b"}, {"b", "a"},
                                                       {"3", "5"}, {"5", "3"}, {"6", "8"}, {"8", "6"},
                                                       {"4", "4"}, {"7", "7"}};
  return m.at(id);
}

inline std::vector<Node> ten_nodes(double h = 0.0) {
  return {
      {"1", NodeRole::Outcome1, h}, {"2", NodeRole::Outcome2, h}, {"a", NodeRole::AnalyzerA, h},
      {"b", NodeRole::AnalyzerB, h}, {"3", NodeRole::Hidden, h},   {"4", NodeRole::Hidden, h},
      {"5", NodeRole::Hidden, h},    {"6", NodeRole::Hidden, h},   {"7", NodeRole::Hidden, h},
      {"8", NodeRole::Hidden, h},
  };
}

/// Homogeneous canonical ladder.
inline LatticeSpec canonical_ladder(double j = 1.0, double h = 0.0, double beta = 1.0) {
  LatticeSpec spec;
  spec.beta = beta;
  spec.nodes = ten_nodes(h);
  for (const auto& [u, v] : canonical_ladder_edges()) spec.edges.push_back({u, v, j});
  return spec;
}

/// Canonical ladder with the heterogeneous fields and couplings of the 2.87 local
/// maximum, mirrored left-right. h7 = -1, chosen because it lands X at 2.87.
inline LatticeSpec hetero_ladder() {
  LatticeSpec spec = canonical_ladder(0.0);
  const std::map<std::string, double> h_left = {{"1", 3.0}, {"3", 1.0}, {"4", 1.0}, {"6", -1.0},
                                                {"a", -1.0}, {"7", -1.0}};
  for (const auto& [id, h] : h_left) {
    spec.node(id).h = h;
    spec.node(ladder_mirror(id)).h = h;
  }
  const std::vector<std::tuple<std::string, std::string, double>> j_left = {
      {"1", "a", 2.0}, {"1", "3", 2.0}, {"3", "6", 1.0}, {"3", "4", 1.0},
      {"4", "7", 4.0}, {"6", "7", 4.0}, {"6", "a", 3.0},
  };
  for (const auto& [u, v, j] : j_left) {
    spec.find_edge(u, v)->j = j;
    spec.find_edge(ladder_mirror(u), ladder_mirror(v))->j = j;
  }
  return spec;
}

struct GridPos {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

struct GridPlacement {
  GridPos outcome1;
  GridPos outcome2;
  GridPos analyzer_a;
  GridPos analyzer_b;
};

/// Rows x cols grid. Roles sit at the placement; remaining sites are hidden
/// spins named 3, 4, ... in row-major order. Nearest neighbours get
/// `j_nearest`, unit-square diagonals `j_diagonal` (edge omitted when zero).
inline LatticeSpec grid_lattice(int rows, int cols, const GridPlacement& place, double j_nearest,
                                double j_diagonal = 0.0, double h = 0.0, double beta = 1.0) {
  auto site_id = std::map<GridPos, std::string>{};
  site_id[place.outcome1] = "1";
  site_id[place.outcome2] = "2";
  site_id[place.analyzer_a] = "a";
  site_id[place.analyzer_b] = "b";
  if (site_id.size() != 4) fail(ErrorKind::InvalidArgument, "role placement sites must be distinct");
  for (const auto& [pos, _] : site_id) {
    if (pos.row < 0 || pos.row >= rows || pos.col < 0 || pos.col >= cols) {
      fail(ErrorKind::InvalidArgument, "role placement outside grid");
    }
  }
  LatticeSpec spec;
  spec.beta = beta;
  spec.nodes = {{"1", NodeRole::Outcome1, h},
                {"2", NodeRole::Outcome2, h},
                {"a", NodeRole::AnalyzerA, h},
                {"b", NodeRole::AnalyzerB, h}};
  int next = 3;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (site_id.count({r, c})) continue;
      site_id[{r, c}] = std::to_string(next);
      spec.nodes.push_back({std::to_string(next), NodeRole::Hidden, h});
      ++next;
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto& here = site_id.at({r, c});
      if (c + 1 < cols) spec.edges.push_back({here, site_id.at({r, c + 1}), j_nearest});
      if (r + 1 < rows) spec.edges.push_back({here, site_id.at({r + 1, c}), j_nearest});
      if (j_diagonal != 0.0 && r + 1 < rows) {
        if (c + 1 < cols) spec.edges.push_back({here, site_id.at({r + 1, c + 1}), j_diagonal});
        if (c > 0) spec.edges.push_back({here, site_id.at({r + 1, c - 1}), j_diagonal});
      }
    }
  }
  return spec;
}

inline GridPlacement canonical_placement() { return {{0, 0}, {0, 4}, {1, 0}, {1, 4}}; }
inline GridPlacement corner_placement() { return {{0, 0}, {0, 4}, {1, 1}, {1, 3}}; }
/// Best fit to the second-neighbour lattice figures (see README).
inline GridPlacement crossed_placement() { return {{0, 1}, {1, 0}, {0, 0}, {1, 1}}; }

/// The 2 x 5 lattice on which the uniform and 1.9 / 0.4 maxima are reproduced.
inline LatticeSpec corner_ladder(double j = 1.0, double h = 0.0, double beta = 1.0) {
  return grid_lattice(2, 5, corner_placement(), j, 0.0, h, beta);
}

inline LatticeSpec corner_uniform_maximum() { return corner_ladder(1.4, 1.0); }

/// h = 1.9 on 1, 2, 6, 8 and 0.4 elsewhere, J = 2.
inline LatticeSpec corner_field_maximum(const LatticeSpec& base) {
  LatticeSpec spec = base;
  for (auto& n : spec.nodes) n.h = 0.4;
  for (const char* id : {"1", "2", "6", "8"}) spec.node(id).h = 1.9;
  for (auto& e : spec.edges) e.j = 2.0;
  return spec;
}

/// Second-neighbour lattice with left-right couplings: best-fit placement,
/// J = 1 nearest, 0.5 diagonal, h = 1.
inline LatticeSpec crossed_lattice() { return grid_lattice(2, 5, crossed_placement(), 1.0, 0.5, 1.0); }

/// Canonical ladder plus its eight unit-square diagonals (J2), h everywhere.
inline LatticeSpec ladder_diagonal_ladder(double j1 = 1.0, double j2 = 0.5, double h = 1.0) {
  return grid_lattice(2, 5, canonical_placement(), j1, j2, h);
}

inline constexpr int kMinChainLength = 5;

/// Homogeneous N-chain 1 - a - 3 - ... - N - b - 2 with N + 2 spins.
inline LatticeSpec chain(int n, double j = 1.0, double beta = 1.0, double h = 0.0) {
  if (n < kMinChainLength) fail(ErrorKind::InvalidArgument, "chain needs N >= 5");
  LatticeSpec spec;
  spec.beta = beta;
  spec.nodes.push_back({"1", NodeRole::Outcome1, h});
  spec.nodes.push_back({"a", NodeRole::AnalyzerA, h});
  for (int k = 3; k <= n; ++k) spec.nodes.push_back({std::to_string(k), NodeRole::Hidden, h});
  spec.nodes.push_back({"b", NodeRole::AnalyzerB, h});
  spec.nodes.push_back({"2", NodeRole::Outcome2, h});
  for (std::size_t k = 0; k + 1 < spec.nodes.size(); ++k) {
    spec.edges.push_back({spec.nodes[k].id, spec.nodes[k + 1].id, j});
  }
  return spec;
}

/// Random 2 x c grid model (c in 3..6, so N <= 12): random role placement,
/// nearest-neighbour edges kept with probability 0.8, J and h uniform in
/// [-range, range].
inline LatticeSpec random_grid_model(CounterRng& rng, double range = 2.0, int max_cols = 6) {
  const int cols = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_cols - 2)));
  std::vector<GridPos> sites;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < cols; ++c) sites.push_back({r, c});
  }
  for (std::size_t i = 0; i < 4; ++i) {
    std::swap(sites[i], sites[i + rng.below(sites.size() - i)]);
  }
  LatticeSpec spec = grid_lattice(2, cols, {sites[0], sites[1], sites[2], sites[3]}, 1.0);
  std::vector<Edge> kept;
  for (auto& e : spec.edges) {
    const double keep = rng.uniform();
    const double j = rng.uniform(-range, range);
    if (keep < 0.8) kept.push_back({e.a, e.b, j});
  }
  spec.edges = std::move(kept);
  for (auto& n : spec.nodes) n.h = rng.uniform(-range, range);
  return spec;
}

/// Random local model whose analyzers can only reach the outcome on their own
/// side: each outcome spin couples either to its analyzer or to hidden spins,
/// never both. Hidden spins form a random chain/ladder.
inline LatticeSpec random_independent_settings_model(CounterRng& rng, double range = 2.0) {
  const int hidden = 2 + static_cast<int>(rng.below(7));  // N = hidden + 4 <= 12
  LatticeSpec spec;
  spec.beta = 1.0;
  spec.nodes = {{"1", NodeRole::Outcome1, 0.0},
                {"2", NodeRole::Outcome2, 0.0},
                {"a", NodeRole::AnalyzerA, 0.0},
                {"b", NodeRole::AnalyzerB, 0.0}};
  for (int k = 0; k < hidden; ++k) spec.nodes.push_back({std::to_string(k + 3), NodeRole::Hidden, 0.0});
  for (auto& n : spec.nodes) n.h = rng.uniform(-range, range);
  auto hid = [](int k) { return std::to_string(k + 3); };
  for (int k = 0; k + 1 < hidden; ++k) spec.edges.push_back({hid(k), hid(k + 1), rng.uniform(-range, range)});
  if (hidden >= 4 && rng.uniform() < 0.5) spec.edges.push_back({hid(0), hid(hidden - 1), rng.uniform(-range, range)});
  for (const auto& [out, an, end] : {std::tuple{"1", "a", 0}, std::tuple{"2", "b", hidden - 1}}) {
    if (rng.uniform() < 0.5) {
      spec.edges.push_back({out, an, rng.uniform(-range, range)});
    } else {
      spec.edges.push_back({out, hid(end), rng.uniform(-range, range)});
    }
  }
  return spec;
}

/// Looks up a built-in lattice by name.
inline std::optional<LatticeSpec> by_name(const std::string& name) {
  if (name == "ladder") return canonical_ladder();
  if (name == "hetero") return hetero_ladder();
  if (name == "corner-uniform") return corner_uniform_maximum();
  if (name == "corner-fields") return corner_field_maximum(corner_ladder());
  if (name == "ladder-uniform") return canonical_ladder(1.4, 1.0);
  if (name == "ladder-fields") return corner_field_maximum(canonical_ladder());
  if (name == "crossed") return crossed_lattice();
  if (name == "ladder-diagonal") return ladder_diagonal_ladder();
  if (name == "uncoupled") return canonical_ladder(0.0);
  if (name.rfind("chain", 0) == 0 && name.size() > 5) {
    try {
      return chain(std::stoi(name.substr(5)));
    } catch (const std::logic_error&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::vector<std::string> names() {
  return {"ladder", "hetero", "corner-uniform", "corner-fields", "ladder-uniform", "ladder-fields",
          "crossed", "ladder-diagonal", "uncoupled", "chain<N>"};
}

}  // namespace bellising::builtin
