#pragma once

// Full-range sweeps over n <= x: per-integer Delta rows, weighted moments
// S_{t,rho}(x) = sum_{n<=x} z^omega(n) Delta(n)^t, exponent fits and the
// sweep-to-sampler moment ratio.
//
// Rows are produced block-parallel and delivered to the sink in increasing n,
// so every accumulated quantity is independent of block size and worker
// count.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltakit/factor.hpp"
#include "deltakit/sampler.hpp"

namespace deltakit {

inline constexpr std::uint64_t kDefaultSweepCap = 100'000'000;

struct DeltaRow {
  std::uint64_t n = 1;
  std::uint64_t tau = 1;
  std::uint64_t omega = 0;
  std::uint64_t mu_squared = 1;
  std::uint64_t delta = 1;
  double m2 = 1;

  friend bool operator==(const DeltaRow&, const DeltaRow&) = default;
};

struct SweepOptions {
  std::uint64_t block_size = 1 << 16;
  unsigned threads = 1;
  bool compute_m2 = true;
  std::uint64_t cap = kDefaultSweepCap;
};

using RowSink = std::function<void(std::span<const DeltaRow>)>;

// Rows for first_n <= n <= x_max, in order. The table may be shared; a fresh
// one is built when `table` is null. ResourceError past options.cap.
void delta_table(std::uint64_t x_max, const SweepOptions& options, const RowSink& sink,
                 std::uint64_t first_n = 1, const SpfTable* table = nullptr);
std::vector<DeltaRow> delta_table(std::uint64_t x_max, const SweepOptions& options = {});

// One row, computed directly.
DeltaRow delta_row(std::uint64_t n, const SpfTable& table);

struct MomentSpec {
  double t = 1;
  double z = 1;
};

struct SweepRecord {
  double x = 0;
  double t = 1;
  double z = 1;
  double S = 0;
  double normalized = 0;  // S / (x (log x)^{max(beta, z) - 1}); NaN for x < 2
};

// Normalizing factor x (log x)^{max(beta, z) - 1}.
double sweep_normalizer(double x, double t, double z);

// Accumulates S_{t,z} for several specs over a row stream, recording a
// SweepRecord whenever n reaches a checkpoint.
class MomentAccumulator {
 public:
  MomentAccumulator(std::vector<MomentSpec> specs, std::vector<std::uint64_t> checkpoints);

  void consume(std::span<const DeltaRow> rows);
  const std::vector<SweepRecord>& records() const noexcept { return records_; }
  std::uint64_t last_n() const noexcept { return last_n_; }

 private:
  void emit(std::uint64_t x);

  std::vector<MomentSpec> specs_;
  std::vector<std::uint64_t> checkpoints_;
  std::size_t next_checkpoint_ = 0;
  std::vector<double> sum_;
  std::vector<double> comp_;
  std::vector<std::vector<double>> z_powers_;  // z^k for k <= 64
  std::vector<SweepRecord> records_;
  std::uint64_t last_n_ = 0;
};

// S_{t,rho}(x) for rho(n) = z^omega(n) over all n <= x.
SweepRecord s_moment(std::uint64_t x, double t, double z, const SweepOptions& options = {});

// Every (spec, checkpoint) pair from one pass over n <= max(checkpoints).
std::vector<SweepRecord> s_moments(std::span<const MomentSpec> specs,
                                   std::span<const std::uint64_t> checkpoints,
                                   const SweepOptions& options = {});

struct ExponentFit {
  double t = 1;
  double z = 1;
  double slope = 0;    // d log(S/x) / d log log x
  double intercept = 0;
  double target = 0;   // max(beta, z) - 1
  std::vector<double> residuals;
  // Slope of the residuals against log log log x: the part of the trend
  // attributable to log_2 x powers.
  std::optional<double> residual_trend;
};

// Least squares of log(S/x) on log log x. Needs at least three x > e with S > 0.
ExponentFit fit_loglog_slope(std::span<const double> x, std::span<const double> S, double t,
                             double z);
ExponentFit exponent_fit(std::span<const SweepRecord> records);
ExponentFit exponent_fit(std::span<const std::uint64_t> x_grid, double t, double z,
                         const SweepOptions& options = {});

struct MomentRatio {
  double x = 0;
  double t = 1;
  double z = 1;
  double S = 0;
  Estimate expectation;
  double ratio = 0;
  double std_error = 0;
};

// S_{t,z}(x) / (x (log 3x)^{z-1} E_{x,rho}(Delta^t)). S is swept unless given.
MomentRatio moment_ratio(std::uint64_t x, double t, const WeightFamily& w, std::uint64_t n_samples,
                 std::uint64_t seed, const SamplerOptions& sampler = {},
                 const SweepOptions& sweep = {}, std::optional<double> S = std::nullopt);

}  // namespace deltakit
