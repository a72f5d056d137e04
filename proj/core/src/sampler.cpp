#include "deltakit/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "deltakit/error.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/summation.hpp"

namespace deltakit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::uint64_t> primes_below(double x) {
  if (!(x >= 2.0)) throw DomainError("sampler: x must be >= 2");
  const double top = std::ceil(x) - 1.0;
  if (top < 2.0) return {};
  if (top > static_cast<double>(kDefaultSieveCap)) {
    throw ResourceError("sampler: x exceeds the sieve cap");
  }
  auto primes = primes_up_to(static_cast<std::uint64_t>(top));
  while (!primes.empty() && static_cast<double>(primes.back()) >= x) primes.pop_back();
  return primes;
}

double inclusion_probability(const WeightFamily& w, std::uint64_t p) {
  const double r = w.at_prime(p);
  if (!(r >= 0)) throw DomainError("sampler: rho(p) must be non-negative");
  return r / (static_cast<double>(p) + r);
}

}  // namespace

SplitMix64 SplitMix64::for_sample(std::uint64_t seed, std::uint64_t index) noexcept {
  return SplitMix64(mix64(seed + kGolden) ^ mix64(index * kGolden + 0x632be59bd9b4e019ULL));
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

SampleModel::SampleModel(double x, WeightFamily w) : x_(x), w_(std::move(w)) {
  primes_ = primes_below(x);
  inclusion_.reserve(primes_.size());
  CompensatedSum omega;
  for (const std::uint64_t p : primes_) {
    inclusion_.push_back(inclusion_probability(w_, p));
    omega.add(inclusion_.back());
  }
  expected_omega_ = omega.value();
  envelope_.assign(inclusion_.size(), 0.0);
  double m = 0.0;
  for (std::size_t i = inclusion_.size(); i-- > 0;) {
    m = std::max(m, inclusion_[i]);
    envelope_[i] = m;
  }
}

void SampleModel::draw(SplitMix64& rng, RandomSquarefree& out) const {
  out.primes.clear();
  out.log_n = 0.0;
  const std::size_t m = primes_.size();
  std::size_t i = 0;
  while (i < m) {
    const double bound = envelope_[i];
    if (bound <= 0.0) break;
    // Failures before the next success of Bernoulli(bound) trials.
    const double skip = std::floor(std::log(rng.uniform()) / std::log1p(-bound));
    if (skip >= static_cast<double>(m - i)) break;
    i += static_cast<std::size_t>(skip);
    if (rng.uniform() * bound <= inclusion_[i]) {
      out.primes.push_back(primes_[i]);
      out.log_n += std::log(static_cast<double>(primes_[i]));
    }
    ++i;
  }
}

RandomSquarefree sample(double x, const WeightFamily& w, SplitMix64& rng) {
  const SampleModel model(x, w);
  RandomSquarefree out;
  model.draw(rng, out);
  return out;
}

LogSpan SampleView::logs() {
  requested_ = true;
  if (!built_) {
    built_ = true;
    if (s_.primes.size() > omega_cap_) {
      buffer_.clear();
    } else {
      divisor_logs_squarefree(s_.primes, buffer_);
    }
  }
  return buffer_;
}

Statistic stat_omega() {
  return {"omega", std::nullopt, [](SampleView& v) { return static_cast<double>(v.omega()); }};
}

Statistic stat_delta_pow(double t) {
  return {"delta^" + std::to_string(t), std::nullopt, [t](SampleView& v) {
            return std::pow(static_cast<double>(delta_max(v.logs())), t);
          }};
}

Statistic stat_m2_over_tau_pow(double t) {
  return {"m2_over_tau^" + std::to_string(t), std::nullopt, [t](SampleView& v) {
            const LogSpan logs = v.logs();
            return std::pow(m_q(logs, 2.0) / static_cast<double>(logs.size()), t);
          }};
}

Statistic stat_mq_over_tau(int q) {
  if (q < 1) throw DomainError("stat_mq_over_tau: q must be >= 1");
  return {"m" + std::to_string(q) + "_over_tau", std::nullopt, [q](SampleView& v) {
            const LogSpan logs = v.logs();
            return m_q(logs, q) / static_cast<double>(logs.size());
          }};
}

Statistic stat_mq_over_tau_in_H(int q, const ThetaSequence& seq, EVariant variant,
                                const TruncationParams& params) {
  if (q < 2) throw DomainError("stat_mq_over_tau_in_H: q must be >= 2");
  if (params.T != seq.T()) throw DomainError("stat_mq_over_tau_in_H: T mismatch");
  return {"m" + std::to_string(q) + "_over_tau_H_" + to_string(variant), params.T,
          [q, seq, variant, params](SampleView& v) {
            if (!mem_E_T(v.primes(), variant, params)) return 0.0;
            const LogSpan logs = v.logs();
            if (v.rejected()) return 0.0;
            if (!mem_H(v.primes(), logs, q - 1, seq, variant, params)) return 0.0;
            return m_q(logs, q) / static_cast<double>(logs.size());
          }};
}

Statistic stat_m2_chi_over_tau(int h) {
  if (h < 0) throw DomainError("stat_m2_chi_over_tau: h must be >= 0");
  return {"m2_chi" + std::to_string(h) + "_over_tau", std::nullopt, [h](SampleView& v) {
            if (v.omega() != static_cast<std::size_t>(h)) return 0.0;
            const LogSpan logs = v.logs();
            return m_q(logs, 2.0) / static_cast<double>(logs.size());
          }};
}

Statistic event_outside_E_T(EVariant variant, const TruncationParams& params) {
  return {"outside_E_T_" + to_string(variant), params.T, [variant, params](SampleView& v) {
            return mem_E_T(v.primes(), variant, params) ? 0.0 : 1.0;
          }};
}

Statistic event_delta_exceeds(double lambda, double x) {
  if (!(x > std::exp(1.0))) throw DomainError("event_delta_exceeds: x must exceed e");
  const double level = lambda * std::log(std::log(x));
  return {"delta_exceeds_" + std::to_string(lambda) + "_loglog", std::nullopt,
          [level](SampleView& v) {
            return static_cast<double>(delta_max(v.logs())) > level ? 1.0 : 0.0;
          }};
}

std::vector<Estimate> expect_many(std::span<const Statistic> stats, const SampleModel& model,
                                  std::uint64_t n_samples, std::uint64_t seed,
                                  const SamplerOptions& options) {
  if (n_samples == 0) throw DomainError("expect: n_samples must be positive");
  if (options.chunk_size == 0) throw DomainError("expect: chunk_size must be positive");
  const std::size_t k = stats.size();
  const std::uint64_t chunks = (n_samples + options.chunk_size - 1) / options.chunk_size;

  struct ChunkResult {
    std::vector<RunningStats> stats;
    std::vector<std::uint64_t> rejected;
  };
  std::vector<ChunkResult> results(chunks);

  parallel_for(chunks, resolve_threads(options.threads), [&](std::size_t c) {
    ChunkResult& r = results[c];
    r.stats.assign(k, RunningStats{});
    r.rejected.assign(k, 0);
    RandomSquarefree s;
    std::vector<double> buffer;
    const std::uint64_t begin = c * options.chunk_size;
    const std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + options.chunk_size);
    for (std::uint64_t i = begin; i < end; ++i) {
      SplitMix64 rng = SplitMix64::for_sample(seed, i);
      model.draw(rng, s);
      // One view per sample so the divisor logs are shared by all statistics.
      SampleView view(s, options.omega_cap, buffer);
      for (std::size_t a = 0; a < k; ++a) {
        view.begin_statistic();
        const double value = stats[a].eval(view);
        if (view.rejected()) {
          ++r.rejected[a];
        } else {
          r.stats[a].add(value);
        }
      }
    }
  });

  std::vector<Estimate> out(k);
  for (std::size_t a = 0; a < k; ++a) {
    RunningStats total;
    std::uint64_t rejected = 0;
    for (const auto& r : results) {
      total.merge(r.stats[a]);
      rejected += r.rejected[a];
    }
    if (total.count() == 0) {
      throw DegenerateEstimateError("expect: every sample of '" + stats[a].name +
                                    "' was rejected by the omega cap");
    }
    Estimate& e = out[a];
    e.stat = stats[a].name;
    e.x = model.x();
    e.z = model.weight().z();
    e.T = stats[a].T;
    e.mean = total.mean();
    e.std_error = total.std_error();
    e.n_samples = n_samples;
    e.n_accepted = static_cast<std::uint64_t>(total.count());
    e.seed = seed;
    e.rejected_fraction = static_cast<double>(rejected) / static_cast<double>(n_samples);
  }
  return out;
}

Estimate expect(const Statistic& stat, double x, const WeightFamily& w, std::uint64_t n_samples,
                std::uint64_t seed, const SamplerOptions& options) {
  const SampleModel model(x, w);
  return expect_many(std::span<const Statistic>(&stat, 1), model, n_samples, seed, options)
      .front();
}

namespace {

void binomial_error(Estimate& e) {
  const double p = e.mean;
  e.std_error = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(e.n_accepted));
}

}  // namespace

Estimate tail_prob(const Statistic& event, double x, const WeightFamily& w,
                   std::uint64_t n_samples, std::uint64_t seed, const SamplerOptions& options) {
  Estimate e = expect(event, x, w, n_samples, seed, options);
  binomial_error(e);
  return e;
}

std::vector<Estimate> tail_prob_T_sweep(std::span<const double> Ts, EVariant variant,
                                        const TruncationParams& base, double x,
                                        const WeightFamily& w, std::uint64_t n_samples,
                                        std::uint64_t seed, const SamplerOptions& options) {
  std::vector<Statistic> events;
  events.reserve(Ts.size());
  for (const double T : Ts) {
    TruncationParams p = base;
    p.T = T;
    events.push_back(event_outside_E_T(variant, p));
  }
  const SampleModel model(x, w);
  auto out = expect_many(events, model, n_samples, seed, options);
  for (auto& e : out) binomial_error(e);
  return out;
}

ExhaustiveTable::ExhaustiveTable(double x, const WeightFamily& w) {
  if (!(x >= 2.0)) throw DomainError("exhaustive_check: x must be >= 2");
  if (x > 30.0) throw ResourceError("exhaustive_check: x must be <= 30");
  primes_ = primes_below(x);
  if (primes_.size() > 10) throw ResourceError("exhaustive_check: more than 10 primes");
  const std::size_t m = primes_.size();
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) q[i] = inclusion_probability(w, primes_[i]);
  atoms_.resize(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < atoms_.size(); ++mask) {
    Atom& a = atoms_[mask];
    a.probability = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1U) {
        a.primes.push_back(primes_[i]);
        a.n *= primes_[i];
        a.probability *= q[i];
      } else {
        a.probability *= 1.0 - q[i];
      }
    }
  }
}

double ExhaustiveTable::total_probability() const {
  CompensatedSum s;
  for (const auto& a : atoms_) s.add(a.probability);
  return s.value();
}

double ExhaustiveTable::expectation(const Statistic& stat) const {
  CompensatedSum s;
  std::vector<double> buffer;
  RandomSquarefree r;
  for (const auto& a : atoms_) {
    r.primes = a.primes;
    r.log_n = 0.0;
    for (const std::uint64_t p : a.primes) r.log_n += std::log(static_cast<double>(p));
    SampleView view(r, std::numeric_limits<std::size_t>::max(), buffer);
    s.add(a.probability * stat.eval(view));
  }
  return s.value();
}

std::size_t ExhaustiveTable::atom_index(std::span<const std::uint64_t> sample_primes) const {
  std::size_t mask = 0;
  std::size_t i = 0;
  for (const std::uint64_t p : sample_primes) {
    while (i < primes_.size() && primes_[i] < p) ++i;
    if (i == primes_.size() || primes_[i] != p) {
      throw DomainError("atom_index: prime outside the table support");
    }
    mask |= std::size_t{1} << i;
  }
  return mask;
}

ExhaustiveTable exhaustive_check(double x, const WeightFamily& w) { return ExhaustiveTable(x, w); }

std::vector<std::uint64_t> sample_atom_counts(const ExhaustiveTable& table,
                                              const SampleModel& model, std::uint64_t n_samples,
                                              std::uint64_t seed) {
  std::vector<std::uint64_t> counts(table.atoms().size(), 0);
  RandomSquarefree s;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    SplitMix64 rng = SplitMix64::for_sample(seed, i);
    model.draw(rng, s);
    ++counts[table.atom_index(s.primes)];
  }
  return counts;
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw DomainError("chi_square_test: need matching spans with at least two cells");
  }
  double n = 0;
  for (const std::uint64_t o : observed) n += static_cast<double>(o);
  ChiSquareResult r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = n * probabilities[i];
    if (expected <= 0) {
      if (observed[i] != 0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    r.statistic += d * d / expected;
    ++cells;
  }
  r.dof = cells - 1;
  if (std::isinf(r.statistic) || r.dof < 1) {
    r.p_value = std::isinf(r.statistic) ? 0.0 : 1.0;
    return r;
  }
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace deltakit
