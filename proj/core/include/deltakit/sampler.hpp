#pragma once

// Monte Carlo realisation of the product probability P_{x,rho} on squarefree
// integers with prime factors below x: each prime p < x is included
// independently with probability rho(p) / (p + rho(p)).
//
// Reproducibility: sample number i of a run with seed s is drawn from its own
// splitmix64 stream keyed by (s, i), so a sample path never depends on chunk
// size or worker count. Means are accumulated per fixed-size chunk and the
// chunk summaries merged in chunk order, which makes every estimate
// bit-identical across thread counts for a fixed chunk size.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltakit/deltafn.hpp"
#include "deltakit/weights.hpp"

namespace deltakit {

inline constexpr const char* kRngAlgorithm = "splitmix64, one stream per (seed, sample index)";
inline constexpr std::size_t kDefaultOmegaCap = 30;
inline constexpr std::size_t kDefaultChunkSize = 4096;

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  // The stream for sample `index` of a run seeded with `seed`.
  static SplitMix64 for_sample(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t next() noexcept;
  // Uniform on (0, 1], 53-bit resolution.
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

struct RandomSquarefree {
  std::vector<std::uint64_t> primes;  // increasing, all < x
  double log_n = 0;
  std::size_t omega() const noexcept { return primes.size(); }
};

// Precomputed prime table and inclusion probabilities for one (x, rho).
class SampleModel {
 public:
  SampleModel(double x, WeightFamily w);

  double x() const noexcept { return x_; }
  const WeightFamily& weight() const noexcept { return w_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  const std::vector<double>& inclusion() const noexcept { return inclusion_; }
  // sum_{p<x} rho(p) / (p + rho(p))
  double expected_omega() const noexcept { return expected_omega_; }

  // Exact draw by geometric skipping over a non-increasing envelope of the
  // inclusion probabilities, with thinning at each candidate.
  void draw(SplitMix64& rng, RandomSquarefree& out) const;

 private:
  double x_;
  WeightFamily w_;
  std::vector<std::uint64_t> primes_;
  std::vector<double> inclusion_;
  std::vector<double> envelope_;  // suffix maxima of inclusion_
  double expected_omega_ = 0;
};

RandomSquarefree sample(double x, const WeightFamily& w, SplitMix64& rng);

// View of one sample handed to statistics. Divisor logs are produced on first
// request and shared by later statistics. A statistic that requests them when
// omega exceeds the cap gets an empty span and its value is discarded;
// statistics that never ask are unaffected.
class SampleView {
 public:
  SampleView(const RandomSquarefree& s, std::size_t omega_cap, std::vector<double>& buffer)
      : s_(s), omega_cap_(omega_cap), buffer_(buffer) {}

  std::span<const std::uint64_t> primes() const noexcept { return s_.primes; }
  std::size_t omega() const noexcept { return s_.primes.size(); }
  double log_n() const noexcept { return s_.log_n; }
  LogSpan logs();
  // Clears the per-statistic request flag.
  void begin_statistic() noexcept { requested_ = false; }
  bool rejected() const noexcept { return requested_ && s_.primes.size() > omega_cap_; }

 private:
  const RandomSquarefree& s_;
  std::size_t omega_cap_;
  std::vector<double>& buffer_;
  bool built_ = false;
  bool requested_ = false;
};

struct Statistic {
  std::string name;
  std::optional<double> T;  // reported alongside the estimate when relevant
  std::function<double(SampleView&)> eval;
};

Statistic stat_omega();
Statistic stat_delta_pow(double t);             // Delta^t
Statistic stat_m2_over_tau_pow(double t);       // (M_2 / tau)^t
Statistic stat_mq_over_tau(int q);              // M_q / tau
// M_q / tau on the H-set of level q - 1, zero outside it.
Statistic stat_mq_over_tau_in_H(int q, const ThetaSequence& seq, EVariant variant,
                                const TruncationParams& params);
Statistic stat_m2_chi_over_tau(int h);          // M_2 1_{omega = h} / tau
// Indicators of the tail events.
Statistic event_outside_E_T(EVariant variant, const TruncationParams& params);
Statistic event_delta_exceeds(double lambda, double x);  // Delta > lambda log log x

struct Estimate {
  std::string stat;
  double x = 0;
  double z = 0;
  std::optional<double> T;
  double mean = 0;
  double std_error = 0;
  std::uint64_t n_samples = 0;    // draws requested
  std::uint64_t n_accepted = 0;   // draws that passed the omega cap
  std::uint64_t seed = 0;
  double rejected_fraction = 0;
};

struct SamplerOptions {
  std::size_t omega_cap = kDefaultOmegaCap;
  std::size_t chunk_size = kDefaultChunkSize;
  unsigned threads = 1;
};

// All statistics are evaluated on the same sample paths.
std::vector<Estimate> expect_many(std::span<const Statistic> stats, const SampleModel& model,
                                  std::uint64_t n_samples, std::uint64_t seed,
                                  const SamplerOptions& options = {});

Estimate expect(const Statistic& stat, double x, const WeightFamily& w, std::uint64_t n_samples,
                std::uint64_t seed, const SamplerOptions& options = {});

// Indicator mean with binomial standard error sqrt(p(1-p)/n).
Estimate tail_prob(const Statistic& event, double x, const WeightFamily& w,
                   std::uint64_t n_samples, std::uint64_t seed,
                   const SamplerOptions& options = {});

// Tail probabilities of E \ E_T for several T on shared sample paths.
std::vector<Estimate> tail_prob_T_sweep(std::span<const double> Ts, EVariant variant,
                                        const TruncationParams& base, double x,
                                        const WeightFamily& w, std::uint64_t n_samples,
                                        std::uint64_t seed, const SamplerOptions& options = {});

struct Atom {
  std::uint64_t n = 1;
  std::vector<std::uint64_t> primes;
  double probability = 0;
};

// Every atom of P_{x,rho} for x <= 30 (at most 10 primes), with
// P({n}) = (rho(n)/n) prod_{p<x} (1 + rho(p)/p)^{-1}.
class ExhaustiveTable {
 public:
  ExhaustiveTable(double x, const WeightFamily& w);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  double total_probability() const;
  double expectation(const Statistic& stat) const;
  // Index of the atom with this prime set, encoded as a bitmask over primes().
  std::size_t atom_index(std::span<const std::uint64_t> sample_primes) const;

 private:
  std::vector<std::uint64_t> primes_;
  std::vector<Atom> atoms_;  // indexed by bitmask
};

ExhaustiveTable exhaustive_check(double x, const WeightFamily& w);

// Sampled atom counts aligned with table.atoms().
std::vector<std::uint64_t> sample_atom_counts(const ExhaustiveTable& table,
                                              const SampleModel& model, std::uint64_t n_samples,
                                              std::uint64_t seed);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 0;
};

// Pearson goodness of fit of observed counts to probabilities.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> probabilities);

}  // namespace deltakit
