#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bellising/error.hpp"

namespace bellising {

inline constexpr std::size_t kDefaultEnumerationCap = 24;
inline constexpr std::size_t kHardNodeLimit = 62;

enum class NodeRole { Outcome1, Outcome2, AnalyzerA, AnalyzerB, Hidden };

inline const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Outcome1: return "outcome1";
    case NodeRole::Outcome2: return "outcome2";
    case NodeRole::AnalyzerA: return "analyzer_a";
    case NodeRole::AnalyzerB: return "analyzer_b";
    case NodeRole::Hidden: return "hidden";
  }
  return "?";
}

inline std::optional<NodeRole> parse_role(std::string_view s) {
  if (s == "outcome1") return NodeRole::Outcome1;
  if (s == "outcome2") return NodeRole::Outcome2;
  if (s == "analyzer_a") return NodeRole::AnalyzerA;
  if (s == "analyzer_b") return NodeRole::AnalyzerB;
  if (s == "hidden") return NodeRole::Hidden;
  return std::nullopt;
}

struct Node {
  std::string id;
  NodeRole role = NodeRole::Hidden;
  double h = 0.0;
};

struct Edge {
  std::string a;
  std::string b;
  double j = 0.0;
};

/// Third-order term c * s_i * s_j * s_k, added to the energy with a plus sign.
struct CubicTerm {
  std::array<std::string, 3> nodes;
  double c = 0.0;
};

/// Spin lattice with roles, couplings and fields.
///
/// Energy convention: H = c0 - sum_edges j s_a s_b - sum_nodes h s + sum_cubic c s_i s_j s_k.
/// Node k (declaration order) is bit k of a configuration word; a set bit means spin +1.
struct LatticeSpec {
  double beta = 1.0;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<CubicTerm> cubic;
  double c0 = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].id == id) return k;
    }
    return std::nullopt;
  }

  std::size_t require_index(std::string_view id) const {
    if (auto k = index_of(id)) return *k;
    fail(ErrorKind::InvalidArgument, "unknown node id '" + std::string(id) + "'");
  }

  std::size_t role_index(NodeRole role) const {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].role == role) return k;
    }
    fail(ErrorKind::InvalidSpec, std::string("lattice has no node with role ") + to_string(role));
  }

  std::vector<std::size_t> hidden_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].role == NodeRole::Hidden) out.push_back(k);
    }
    return out;
  }

  Node& node(std::string_view id) { return nodes[require_index(id)]; }
  const Node& node(std::string_view id) const { return nodes[require_index(id)]; }

  Edge* find_edge(std::string_view u, std::string_view v) {
    for (auto& e : edges) {
      if ((e.a == u && e.b == v) || (e.a == v && e.b == u)) return &e;
    }
    return nullptr;
  }
  const Edge* find_edge(std::string_view u, std::string_view v) const {
    return const_cast<LatticeSpec*>(this)->find_edge(u, v);
  }

  /// Full structural check. `require_roles` demands exactly one node per non-hidden role.
  void validate(std::size_t cap = kDefaultEnumerationCap, bool require_roles = true) const {
    if (!(beta > 0.0) || !std::isfinite(beta)) fail(ErrorKind::InvalidSpec, "beta must be positive and finite");
    if (nodes.empty()) fail(ErrorKind::InvalidSpec, "lattice has no nodes");
    if (nodes.size() > kHardNodeLimit) fail(ErrorKind::EnumerationLimit, "more than 62 nodes");
    if (nodes.size() > cap) {
      fail(ErrorKind::EnumerationLimit, std::to_string(nodes.size()) + " nodes exceeds enumeration cap " +
                                            std::to_string(cap));
    }
    std::set<std::string> ids;
    std::array<int, 4> role_count{};
    for (const auto& n : nodes) {
      if (n.id.empty()) fail(ErrorKind::InvalidSpec, "empty node id");
      if (!ids.insert(n.id).second) fail(ErrorKind::InvalidSpec, "duplicate node id '" + n.id + "'");
      if (!std::isfinite(n.h)) fail(ErrorKind::InvalidSpec, "non-finite field on node '" + n.id + "'");
      if (n.role != NodeRole::Hidden) ++role_count[static_cast<int>(n.role)];
    }
    if (require_roles) {
      for (int r = 0; r < 4; ++r) {
        if (role_count[r] != 1) {
          fail(ErrorKind::InvalidSpec, std::string("expected exactly one node with role ") +
                                           to_string(static_cast<NodeRole>(r)) + ", found " +
                                           std::to_string(role_count[r]));
        }
      }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : edges) {
      if (!ids.count(e.a) || !ids.count(e.b)) {
        fail(ErrorKind::InvalidSpec, "edge " + e.a + "-" + e.b + " references an unknown node");
      }
      if (e.a == e.b) fail(ErrorKind::InvalidSpec, "self-edge on node '" + e.a + "'");
      if (!std::isfinite(e.j)) fail(ErrorKind::InvalidSpec, "non-finite coupling on edge " + e.a + "-" + e.b);
      auto key = std::minmax(e.a, e.b);
      if (!seen.insert({key.first, key.second}).second) {
        fail(ErrorKind::InvalidSpec, "duplicate edge " + e.a + "-" + e.b);
      }
    }
    for (const auto& t : cubic) {
      for (const auto& id : t.nodes) {
        if (!ids.count(id)) fail(ErrorKind::InvalidSpec, "cubic term references unknown node '" + id + "'");
      }
      if (t.nodes[0] == t.nodes[1] || t.nodes[1] == t.nodes[2] || t.nodes[0] == t.nodes[2]) {
        fail(ErrorKind::InvalidSpec, "cubic term needs three distinct nodes");
      }
      if (!std::isfinite(t.c)) fail(ErrorKind::InvalidSpec, "non-finite cubic coefficient");
    }
    if (!std::isfinite(c0)) fail(ErrorKind::InvalidSpec, "non-finite c0");
  }
};

using Word = std::uint64_t;

inline constexpr int spin_of(Word w, std::size_t k) noexcept { return ((w >> k) & 1u) ? 1 : -1; }

inline constexpr Word bit(std::size_t k) noexcept { return Word{1} << k; }

/// A full assignment of spins, encoded as an N-bit word.
class SpinConfiguration {
 public:
  SpinConfiguration(Word word, std::size_t n) : word_(word), n_(n) {
    if (n > kHardNodeLimit) fail(ErrorKind::InvalidConfiguration, "configuration too large");
    if (n < 64 && (word >> n) != 0) fail(ErrorKind::InvalidConfiguration, "bits set beyond node count");
  }

  static SpinConfiguration from_spins(const LatticeSpec& spec,
                                      std::initializer_list<std::pair<std::string_view, int>> spins) {
    return from_spins(spec, std::vector<std::pair<std::string_view, int>>(spins));
  }

  static SpinConfiguration from_spins(const LatticeSpec& spec,
                                      const std::vector<std::pair<std::string_view, int>>& spins) {
    Word w = 0;
    Word covered = 0;
    for (const auto& [id, s] : spins) {
      auto k = spec.index_of(id);
      if (!k) fail(ErrorKind::InvalidConfiguration, "unknown node '" + std::string(id) + "'");
      if (s != 1 && s != -1) fail(ErrorKind::InvalidConfiguration, "spin must be +1 or -1");
      if (covered & bit(*k)) fail(ErrorKind::InvalidConfiguration, "node '" + std::string(id) + "' given twice");
      covered |= bit(*k);
      if (s > 0) w |= bit(*k);
    }
    const Word full = spec.size() == 64 ? ~Word{0} : bit(spec.size()) - 1;
    if (covered != full) fail(ErrorKind::InvalidConfiguration, "configuration does not cover every node");
    return {w, spec.size()};
  }

  static SpinConfiguration all_up(std::size_t n) { return {n == 64 ? ~Word{0} : bit(n) - 1, n}; }
  static SpinConfiguration all_down(std::size_t n) { return {0, n}; }

  Word word() const noexcept { return word_; }
  std::size_t size() const noexcept { return n_; }
  int spin(std::size_t k) const noexcept { return spin_of(word_, k); }

  SpinConfiguration flipped() const {
    const Word full = n_ == 64 ? ~Word{0} : bit(n_) - 1;
    return {~word_ & full, n_};
  }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  Word word_;
  std::size_t n_;
};

/// Spins fixed on a subset of nodes: `mask` selects nodes, `bits` holds +1 as set bits.
struct PartialAssignment {
  Word mask = 0;
  Word bits = 0;

  bool empty() const noexcept { return mask == 0; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(__builtin_popcountll(mask)); }
  bool overlaps(const PartialAssignment& o) const noexcept { return (mask & o.mask) != 0; }

  PartialAssignment& set(std::size_t k, int s) {
    if (s != 1 && s != -1) fail(ErrorKind::InvalidArgument, "spin must be +1 or -1");
    mask |= bit(k);
    if (s > 0) {
      bits |= bit(k);
    } else {
      bits &= ~bit(k);
    }
    return *this;
  }

  PartialAssignment& set(const LatticeSpec& spec, std::string_view id, int s) {
    return set(spec.require_index(id), s);
  }

  static PartialAssignment of(const LatticeSpec& spec,
                              std::initializer_list<std::pair<std::string_view, int>> spins) {
    PartialAssignment p;
    for (const auto& [id, s] : spins) {
      const auto k = spec.require_index(id);
      if (p.mask & bit(k)) fail(ErrorKind::InvalidArgument, "node '" + std::string(id) + "' given twice");
      p.set(k, s);
    }
    return p;
  }

  PartialAssignment merged(const PartialAssignment& o) const {
    if (overlaps(o)) fail(ErrorKind::InvalidArgument, "partial assignments overlap");
    return {mask | o.mask, bits | o.bits};
  }

  bool matches(Word w) const noexcept { return (w & mask) == bits; }

  friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;
};

/// Index-resolved Hamiltonian used in the hot enumeration loops.
struct CompiledHamiltonian {
  struct Pair {
    std::size_t u, v;
    double j;
  };
  struct Triple {
    std::size_t u, v, w;
    double c;
  };

  std::size_t n = 0;
  double c0 = 0.0;
  std::vector<double> fields;
  std::vector<Pair> pairs;
  std::vector<Triple> triples;
  /// Per-node list of (pair index) and (triple index) touching the node, for local updates.
  std::vector<std::vector<std::size_t>> pairs_at;
  std::vector<std::vector<std::size_t>> triples_at;

  explicit CompiledHamiltonian(const LatticeSpec& spec) : n(spec.size()), c0(spec.c0) {
    fields.reserve(n);
    for (const auto& node : spec.nodes) fields.push_back(node.h);
    pairs_at.resize(n);
    triples_at.resize(n);
    for (const auto& e : spec.edges) {
      const auto u = spec.require_index(e.a);
      const auto v = spec.require_index(e.b);
      pairs_at[u].push_back(pairs.size());
      pairs_at[v].push_back(pairs.size());
      pairs.push_back({u, v, e.j});
    }
    for (const auto& t : spec.cubic) {
      Triple tr{spec.require_index(t.nodes[0]), spec.require_index(t.nodes[1]), spec.require_index(t.nodes[2]), t.c};
      triples_at[tr.u].push_back(triples.size());
      triples_at[tr.v].push_back(triples.size());
      triples_at[tr.w].push_back(triples.size());
      triples.push_back(tr);
    }
  }

  double energy(Word w) const noexcept {
    double e = c0;
    for (const auto& p : pairs) e -= p.j * (spin_of(w, p.u) * spin_of(w, p.v));
    for (std::size_t k = 0; k < n; ++k) e -= fields[k] * spin_of(w, k);
    for (const auto& t : triples) e += t.c * (spin_of(w, t.u) * spin_of(w, t.v) * spin_of(w, t.w));
    return e;
  }

  /// H(w with bit k flipped) - H(w).
  double flip_delta(Word w, std::size_t k) const noexcept {
    const int s = spin_of(w, k);
    double local = -fields[k] * s;
    for (auto pi : pairs_at[k]) {
      const auto& p = pairs[pi];
      local -= p.j * (spin_of(w, p.u) * spin_of(w, p.v));
    }
    for (auto ti : triples_at[k]) {
      const auto& t = triples[ti];
      local += t.c * (spin_of(w, t.u) * spin_of(w, t.v) * spin_of(w, t.w));
    }
    return -2.0 * local;
  }
};

/// Ising (or generalized) energy of a full configuration.
inline double energy(const LatticeSpec& spec, const SpinConfiguration& config) {
  if (config.size() != spec.size()) {
    fail(ErrorKind::InvalidConfiguration, "configuration has " + std::to_string(config.size()) +
                                              " spins, lattice has " + std::to_string(spec.size()));
  }
  return CompiledHamiltonian(spec).energy(config.word());
}

}  // namespace bellising
