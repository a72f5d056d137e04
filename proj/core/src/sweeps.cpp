#include "deltakit/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltakit/deltafn.hpp"
#include "deltakit/error.hpp"
#include "deltakit/fit.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/summation.hpp"
#include "deltakit/weights.hpp"

namespace deltakit {

namespace {

void fill_row(std::uint64_t n, const SpfTable& table, bool compute_m2, Factorization& f,
              std::vector<double>& logs, DeltaRow& row) {
  factorize_into(n, table, f);
  divisor_logs_into(f, logs);
  const ArithStats a = arith_stats(f);
  row.n = n;
  row.tau = a.tau;
  row.omega = a.omega;
  row.mu_squared = static_cast<std::uint64_t>(a.mu_squared);
  row.delta = delta_max(logs);
  row.m2 = compute_m2 ? m_q(logs, 2.0) : std::numeric_limits<double>::quiet_NaN();
}

bool is_integral(double t) { return t == std::floor(t) && t >= 0 && t <= 64; }

double int_pow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

DeltaRow delta_row(std::uint64_t n, const SpfTable& table) {
  Factorization f;
  std::vector<double> logs;
  DeltaRow row;
  fill_row(n, table, true, f, logs, row);
  return row;
}

void delta_table(std::uint64_t x_max, const SweepOptions& options, const RowSink& sink,
                 std::uint64_t first_n, const SpfTable* table) {
  if (x_max > options.cap) {
    throw ResourceError("delta_table: x_max " + std::to_string(x_max) + " exceeds cap " +
                        std::to_string(options.cap));
  }
  if (options.block_size == 0) throw DomainError("delta_table: block_size must be positive");
  if (first_n == 0) first_n = 1;
  if (x_max < first_n) return;
  std::optional<SpfTable> owned;
  if (!table) {
    owned = SpfTable::build(std::max<std::uint64_t>(x_max, 2), options.cap);
    table = &*owned;
  } else if (table->limit() < x_max) {
    throw RangeError("delta_table: shared table is smaller than x_max");
  }

  const unsigned threads = resolve_threads(options.threads);
  const std::uint64_t total_blocks = (x_max - first_n) / options.block_size + 1;
  // Blocks are computed a wave at a time and emitted in order.
  const std::uint64_t wave = std::max<std::uint64_t>(1, 4ULL * threads);
  std::vector<std::vector<DeltaRow>> blocks(wave);
  for (std::uint64_t start = 0; start < total_blocks; start += wave) {
    const std::uint64_t count = std::min(wave, total_blocks - start);
    parallel_for(count, threads, [&](std::size_t i) {
      const std::uint64_t lo = first_n + (start + i) * options.block_size;
      const std::uint64_t hi = std::min(x_max, lo + options.block_size - 1);
      auto& rows = blocks[i];
      rows.resize(hi - lo + 1);
      Factorization f;
      std::vector<double> logs;
      for (std::uint64_t n = lo; n <= hi; ++n) {
        fill_row(n, *table, options.compute_m2, f, logs, rows[n - lo]);
      }
    });
    for (std::uint64_t i = 0; i < count; ++i) sink(blocks[i]);
  }
}

std::vector<DeltaRow> delta_table(std::uint64_t x_max, const SweepOptions& options) {
  std::vector<DeltaRow> out;
  out.reserve(x_max);
  delta_table(x_max, options,
              [&out](std::span<const DeltaRow> rows) { out.insert(out.end(), rows.begin(), rows.end()); });
  return out;
}

double sweep_normalizer(double x, double t, double z) {
  if (!(x >= 2.0)) return std::numeric_limits<double>::quiet_NaN();
  const double beta = std::exp2(t) * z - t;
  return x * std::pow(std::log(x), std::max(beta, z) - 1.0);
}

MomentAccumulator::MomentAccumulator(std::vector<MomentSpec> specs,
                                     std::vector<std::uint64_t> checkpoints)
    : specs_(std::move(specs)), checkpoints_(std::move(checkpoints)) {
  for (const auto& s : specs_) {
    if (!(s.t >= 1.0)) throw DomainError("s_moment: t must be >= 1");
    if (!(s.z > 0)) throw DomainError("s_moment: z must be positive");
  }
  std::sort(checkpoints_.begin(), checkpoints_.end());
  checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());
  sum_.assign(specs_.size(), 0.0);
  comp_.assign(specs_.size(), 0.0);
  for (const auto& s : specs_) {
    std::vector<double> powers(65, 1.0);
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * s.z;
    z_powers_.push_back(std::move(powers));
  }
  while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == 0) {
    emit(0);
  }
}

void MomentAccumulator::emit(std::uint64_t x) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    SweepRecord r;
    r.x = static_cast<double>(x);
    r.t = specs_[i].t;
    r.z = specs_[i].z;
    r.S = sum_[i] + comp_[i];
    r.normalized = r.S / sweep_normalizer(r.x, r.t, r.z);
    records_.push_back(r);
  }
  ++next_checkpoint_;
}

void MomentAccumulator::consume(std::span<const DeltaRow> rows) {
  for (const DeltaRow& row : rows) {
    if (row.n != last_n_ + 1) throw DomainError("MomentAccumulator: rows must arrive as n = 1, 2, ...");
    last_n_ = row.n;
    const double d = static_cast<double>(row.delta);
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      const double t = specs_[i].t;
      const double dt = is_integral(t) ? int_pow(d, static_cast<int>(t)) : std::pow(d, t);
      const double x = z_powers_[i][row.omega] * dt;
      // Neumaier step, inlined over parallel arrays.
      const double s = sum_[i] + x;
      comp_[i] += std::fabs(sum_[i]) >= std::fabs(x) ? (sum_[i] - s) + x : (x - s) + sum_[i];
      sum_[i] = s;
    }
    while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == row.n) {
      emit(row.n);
    }
  }
}

std::vector<SweepRecord> s_moments(std::span<const MomentSpec> specs,
                                   std::span<const std::uint64_t> checkpoints,
                                   const SweepOptions& options) {
  if (checkpoints.empty()) return {};
  MomentAccumulator acc({specs.begin(), specs.end()}, {checkpoints.begin(), checkpoints.end()});
  const std::uint64_t x_max = *std::max_element(checkpoints.begin(), checkpoints.end());
  SweepOptions o = options;
  o.compute_m2 = false;
  delta_table(x_max, o, [&acc](std::span<const DeltaRow> rows) { acc.consume(rows); });
  return acc.records();
}

SweepRecord s_moment(std::uint64_t x, double t, double z, const SweepOptions& options) {
  const MomentSpec spec{t, z};
  const std::uint64_t cp = x;
  return s_moments(std::span(&spec, 1), std::span(&cp, 1), options).front();
}

ExponentFit fit_loglog_slope(std::span<const double> x, std::span<const double> S, double t,
                             double z) {
  if (x.size() != S.size()) throw DomainError("exponent_fit: x and S differ in length");
  if (x.size() < 3) throw DomainError("exponent_fit: need at least three grid points");
  std::vector<std::vector<double>> columns(2);
  std::vector<double> y;
  std::vector<double> lll;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > std::exp(1.0))) throw DomainError("exponent_fit: x must exceed e");
    if (!(S[i] > 0)) throw DomainError("exponent_fit: S must be positive");
    const double ll = std::log(std::log(x[i]));
    columns[0].push_back(ll);
    columns[1].push_back(1.0);
    y.push_back(std::log(S[i] / x[i]));
    lll.push_back(std::log(ll));
  }
  const LinearFit lf = least_squares(columns, y);
  ExponentFit fit;
  fit.t = t;
  fit.z = z;
  fit.slope = lf.coefficients[0];
  fit.intercept = lf.coefficients[1];
  fit.target = std::max(std::exp2(t) * z - t, z) - 1.0;
  fit.residuals = lf.residuals;
  if (x.size() >= 3 && std::all_of(lll.begin(), lll.end(), [](double v) { return std::isfinite(v); })) {
    try {
      const LinearFit trend = least_squares({lll, columns[1]}, lf.residuals);
      fit.residual_trend = trend.coefficients[0];
    } catch (const NumericalError&) {
    }
  }
  return fit;
}

ExponentFit exponent_fit(std::span<const SweepRecord> records) {
  if (records.empty()) throw DomainError("exponent_fit: no records");
  std::vector<double> x;
  std::vector<double> S;
  for (const auto& r : records) {
    if (r.t != records.front().t || r.z != records.front().z) {
      throw DomainError("exponent_fit: records mix (t, z) pairs");
    }
    x.push_back(r.x);
    S.push_back(r.S);
  }
  return fit_loglog_slope(x, S, records.front().t, records.front().z);
}

ExponentFit exponent_fit(std::span<const std::uint64_t> x_grid, double t, double z,
                         const SweepOptions& options) {
  const MomentSpec spec{t, z};
  const auto records = s_moments(std::span(&spec, 1), x_grid, options);
  return exponent_fit(records);
}

MomentRatio moment_ratio(std::uint64_t x, double t, const WeightFamily& w, std::uint64_t n_samples,
                 std::uint64_t seed, const SamplerOptions& sampler, const SweepOptions& sweep,
                 std::optional<double> S) {
  if (!w.is_standard()) throw DomainError("moment_ratio: the sweep side needs rho(n) = z^omega(n)");
  if (x < 2) throw DomainError("moment_ratio: x must be >= 2");
  MomentRatio r;
  r.x = static_cast<double>(x);
  r.t = t;
  r.z = w.z();
  r.S = S ? *S : s_moment(x, t, w.z(), sweep).S;
  r.expectation = expect(stat_delta_pow(t), r.x, w, n_samples, seed, sampler);
  const double scale = r.x * std::pow(std::log(3.0 * r.x), w.z() - 1.0);
  r.ratio = r.S / (scale * r.expectation.mean);
  r.std_error = r.ratio * r.expectation.std_error / r.expectation.mean;
  return r;
}

}  // namespace deltakit
