#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellising/boltzmann.hpp"
#include "bellising/error.hpp"
#include "bellising/lattice.hpp"
#include "bellising/rng.hpp"

namespace bellising {

enum class SamplerKind { Exact, Metropolis };

inline const char* to_string(SamplerKind k) { return k == SamplerKind::Exact ? "exact" : "metropolis"; }

inline std::optional<SamplerKind> parse_sampler(std::string_view s) {
  if (s == "exact") return SamplerKind::Exact;
  if (s == "metropolis") return SamplerKind::Metropolis;
  return std::nullopt;
}

struct SampleRun {
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  SamplerKind kind = SamplerKind::Exact;
  /// Metropolis only; 0 means the defaults below.
  std::uint64_t burn_in = 0;
  std::uint64_t thinning = 0;

  std::uint64_t effective_burn_in(std::size_t nodes) const { return burn_in ? burn_in : 10 * nodes * 1024; }
  std::uint64_t effective_thinning(std::size_t nodes) const { return thinning ? thinning : nodes; }

  void validate() const {
    if (n == 0) fail(ErrorKind::InvalidArgument, "sample count must be at least 1");
  }
};

/// i.i.d. draws by inversion of the cumulative weight table.
class ExactSampler {
 public:
  explicit ExactSampler(const BoltzmannModel& model) : cumulative_(model.weights().size()) {
    const auto& w = model.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) cumulative_[i] = acc += w[i];
  }

  Word draw(CounterRng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<Word>(std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

/// Single-spin-flip Metropolis chain with uniform site proposals. Works on
/// lattices too large to enumerate.
class MetropolisSampler {
 public:
  MetropolisSampler(const LatticeSpec& spec, const SampleRun& run)
      : h_(spec), beta_(spec.beta), n_(spec.size()), thinning_(run.effective_thinning(spec.size())) {
    burn_in_ = run.effective_burn_in(n_);
  }

  void start(CounterRng& rng) {
    state_ = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      if (rng() & 1u) state_ |= bit(k);
    }
    for (std::uint64_t i = 0; i < burn_in_; ++i) step(rng);
  }

  Word draw(CounterRng& rng) {
    for (std::uint64_t i = 0; i < thinning_; ++i) step(rng);
    return state_;
  }

 private:
  void step(CounterRng& rng) {
    const auto k = static_cast<std::size_t>(rng.below(n_));
    const double d = h_.flip_delta(state_, k);
    if (d <= 0.0 || rng.uniform() < std::exp(-beta_ * d)) state_ ^= bit(k);
  }

  CompiledHamiltonian h_;
  double beta_;
  std::size_t n_;
  std::uint64_t thinning_;
  std::uint64_t burn_in_ = 0;
  Word state_ = 0;
};

/// Draws run.n configurations. Exact runs need an enumerated model.
inline std::vector<Word> sample(const BoltzmannModel& model, const SampleRun& run) {
  run.validate();
  CounterRng rng(run.seed);
  std::vector<Word> out;
  out.reserve(run.n);
  if (run.kind == SamplerKind::Exact) {
    const ExactSampler s(model);
    for (std::uint64_t i = 0; i < run.n; ++i) out.push_back(s.draw(rng));
  } else {
    MetropolisSampler s(model.spec(), run);
    s.start(rng);
    for (std::uint64_t i = 0; i < run.n; ++i) out.push_back(s.draw(rng));
  }
  return out;
}

/// Metropolis draws straight from a spec, with no enumeration cap.
inline std::vector<Word> sample_metropolis(const LatticeSpec& spec, const SampleRun& run) {
  run.validate();
  spec.validate(kHardNodeLimit, false);
  if (run.kind != SamplerKind::Metropolis) fail(ErrorKind::InvalidArgument, "exact sampling needs an enumerated model");
  CounterRng rng(run.seed);
  MetropolisSampler s(spec, run);
  s.start(rng);
  std::vector<Word> out;
  out.reserve(run.n);
  for (std::uint64_t i = 0; i < run.n; ++i) out.push_back(s.draw(rng));
  return out;
}

struct TracePoint {
  std::uint64_t n = 0;        // samples drawn so far
  std::uint64_t matched = 0;  // of which consistent with `given`
  double freq = 0.0;
  double exact = 0.0;
  double se = 0.0;
};

struct ConvergenceReport {
  std::string event;
  std::string given;
  std::uint64_t seed = 0;
  SamplerKind kind = SamplerKind::Exact;
  double exact = 0.0;
  std::vector<TracePoint> trace;
  std::uint64_t postselected = 0;
  double final_frequency = 0.0;
  double final_deviation = 0.0;
  double standard_error = 0.0;
  /// Set when no sample matched `given`.
  std::optional<std::string> warning;

  double deviation_in_se() const { return standard_error > 0.0 ? final_deviation / standard_error : 0.0; }
};

inline std::vector<std::uint64_t> default_checkpoints(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 100; c < n; c *= 10) out.push_back(c);
  out.push_back(n);
  return out;
}

inline std::string describe_assignment(const LatticeSpec& spec, const PartialAssignment& p) {
  if (p.empty()) return "-";
  std::string s;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (!((p.mask >> k) & 1u)) continue;
    if (!s.empty()) s += ' ';
    s += spec.nodes[k].id + ((p.bits >> k) & 1u ? "=+" : "=-");
  }
  return s;
}

/// Running frequency of `event` among samples consistent with `given`.
/// Checkpoints count drawn samples, not postselected ones.
inline ConvergenceReport frequency_report(const BoltzmannModel& model, const SampleRun& run,
                                          const PartialAssignment& event, const PartialAssignment& given = {},
                                          std::vector<std::uint64_t> checkpoints = {}) {
  run.validate();
  if (event.empty()) fail(ErrorKind::InvalidArgument, "event must fix at least one spin");
  if (checkpoints.empty()) checkpoints = default_checkpoints(run.n);
  ConvergenceReport r;
  r.event = describe_assignment(model.spec(), event);
  r.given = describe_assignment(model.spec(), given);
  r.seed = run.seed;
  r.kind = run.kind;
  r.exact = given.empty() ? model.marginal(event) : model.conditional(event, given);
  const auto samples = sample(model, run);
  std::uint64_t matched = 0, hits = 0;
  std::size_t next = 0;
  for (std::uint64_t i = 0; i < samples.size(); ++i) {
    const Word w = samples[i];
    if (given.matches(w)) {
      ++matched;
      if (event.matches(w)) ++hits;
    }
    while (next < checkpoints.size() && checkpoints[next] == i + 1) {
      TracePoint t;
      t.n = i + 1;
      t.matched = matched;
      t.exact = r.exact;
      if (matched > 0) {
        t.freq = static_cast<double>(hits) / static_cast<double>(matched);
        t.se = std::sqrt(r.exact * (1.0 - r.exact) / static_cast<double>(matched));
      }
      r.trace.push_back(t);
      ++next;
    }
  }
  r.postselected = matched;
  if (matched == 0) {
    r.warning = "insufficient postselection: 0 of " + std::to_string(run.n) + " samples match the condition";
    return r;
  }
  r.final_frequency = static_cast<double>(hits) / static_cast<double>(matched);
  r.final_deviation = std::abs(r.final_frequency - r.exact);
  r.standard_error = std::sqrt(r.exact * (1.0 - r.exact) / static_cast<double>(matched));
  return r;
}

}  // namespace bellising
