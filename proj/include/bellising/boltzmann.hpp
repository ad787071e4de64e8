#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bellising/error.hpp"
#include "bellising/lattice.hpp"
#include "bellising/summation.hpp"

namespace bellising {

/// Stabilized weight sums below this are treated as events of zero measure.
inline constexpr double kZeroMeasureThreshold = 1e-300;

struct EnumerationOptions {
  std::size_t cap = kDefaultEnumerationCap;
  unsigned threads = 1;
  bool require_roles = true;
};

/// Exact Boltzmann distribution of a lattice, held as the table of stabilized
/// weights exp(-beta * (H - H_min)) over all 2^N configurations.
///
/// Immutable after construction; all queries are const and thread-safe.
class BoltzmannModel {
 public:
  static BoltzmannModel build(LatticeSpec spec, const EnumerationOptions& opts = {}) {
    spec.validate(opts.cap, opts.require_roles);
    return BoltzmannModel(std::move(spec), opts);
  }

  const LatticeSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.size(); }
  std::size_t configuration_count() const noexcept { return weights_.size(); }

  /// Minimum energy subtracted before exponentiation.
  double energy_shift() const noexcept { return min_energy_; }
  /// Sum of stabilized weights; Z = stabilized_z * exp(-beta * energy_shift).
  double stabilized_z() const noexcept { return z_stable_; }
  double log_z() const noexcept { return std::log(z_stable_) - spec_.beta * min_energy_; }

  double z() const {
    const double z = std::exp(log_z());
    if (!std::isfinite(z) || z <= 0.0) fail(ErrorKind::NumericRange, "partition function not representable");
    return z;
  }

  std::span<const double> weights() const noexcept { return weights_; }
  double weight(Word w) const noexcept { return weights_[w]; }

  double probability(const SpinConfiguration& config) const {
    check_config(config);
    return weights_[config.word()] / z_stable_;
  }

  /// Stabilized weight summed over the 2^(N-m) completions of `eta`.
  double marginal_weight(const PartialAssignment& eta) const {
    check_partial(eta);
    const Word free = full_mask() & ~eta.mask;
    CompensatedSum acc;
    Word sub = 0;
    do {
      acc.add(weights_[eta.bits | sub]);
      sub = (sub - free) & free;
    } while (sub != 0);
    return acc.value();
  }

  double marginal(const PartialAssignment& eta) const {
    if (eta.empty()) fail(ErrorKind::InvalidArgument, "marginal of an empty assignment");
    return marginal_weight(eta) / z_stable_;
  }

  double conditional(const PartialAssignment& target, const PartialAssignment& given) const {
    if (target.empty()) fail(ErrorKind::InvalidArgument, "empty conditional target");
    if (target.overlaps(given)) fail(ErrorKind::InvalidArgument, "target and condition share nodes");
    const double denom = given.empty() ? z_stable_ : marginal_weight(given);
    if (denom < kZeroMeasureThreshold) {
      fail(ErrorKind::ZeroMeasure, "conditioning event has zero probability");
    }
    return marginal_weight(target.merged(given)) / denom;
  }

  /// Joint stabilized-weight table over `nodes`: entry index bit i is +1 for nodes[i].
  std::vector<double> project(std::span<const std::size_t> nodes) const {
    for (auto k : nodes) {
      if (k >= size()) fail(ErrorKind::InvalidArgument, "projection node out of range");
    }
    if (nodes.size() > 30) fail(ErrorKind::InvalidArgument, "projection too large");
    std::vector<CompensatedSum> acc(std::size_t{1} << nodes.size());
    const std::size_t m = nodes.size();
    for (Word w = 0; w < weights_.size(); ++w) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < m; ++i) idx |= static_cast<std::size_t>((w >> nodes[i]) & 1u) << i;
      acc[idx].add(weights_[w]);
    }
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value();
    return out;
  }

  Word full_mask() const noexcept { return size() == 64 ? ~Word{0} : bit(size()) - 1; }

 private:
  BoltzmannModel(LatticeSpec spec, const EnumerationOptions& opts) : spec_(std::move(spec)) {
    const CompiledHamiltonian ham(spec_);
    const std::size_t count = std::size_t{1} << spec_.size();
    weights_.resize(count);
    // Energies first, then shift and exponentiate in place.
    min_energy_ = std::numeric_limits<double>::infinity();
    for (Word w = 0; w < count; ++w) {
      const double e = ham.energy(w);
      weights_[w] = e;
      min_energy_ = std::min(min_energy_, e);
    }
    if (!std::isfinite(min_energy_)) fail(ErrorKind::NumericRange, "non-finite energy");
    for (auto& x : weights_) x = std::exp(-spec_.beta * (x - min_energy_));
    z_stable_ = pairwise_sum(weights_, opts.threads);
    if (!std::isfinite(z_stable_) || z_stable_ < 1.0) {
      fail(ErrorKind::NumericRange, "stabilized partition function out of range");
    }
  }

  void check_config(const SpinConfiguration& c) const {
    if (c.size() != size()) {
      fail(ErrorKind::InvalidConfiguration, "configuration size " + std::to_string(c.size()) +
                                                " does not match lattice size " + std::to_string(size()));
    }
  }

  void check_partial(const PartialAssignment& p) const {
    if ((p.mask & ~full_mask()) != 0) fail(ErrorKind::InvalidArgument, "assignment references nodes outside lattice");
    if ((p.bits & ~p.mask) != 0) fail(ErrorKind::InvalidArgument, "assignment bits outside its mask");
  }

  LatticeSpec spec_;
  std::vector<double> weights_;
  double min_energy_ = 0.0;
  double z_stable_ = 0.0;
};

inline BoltzmannModel build_model(const LatticeSpec& spec, const EnumerationOptions& opts = {}) {
  return BoltzmannModel::build(spec, opts);
}

}  // namespace bellising
