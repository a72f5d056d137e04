#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltakit/error.hpp"
#include "deltakit/integrals.hpp"
#include "deltakit/io.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/sampler.hpp"
#include "deltakit/sweeps.hpp"
#include "deltakit/verify.hpp"
#include "deltakit/version.hpp"
#include "deltakit/weights.hpp"
#include "deltakit/wforms.hpp"

namespace deltakit::cli {

namespace {

using json = nlohmann::json;

struct Options {
  std::string command;
  std::string xmax = "100000";
  std::string t = "1";
  std::string z = "1";
  std::string T;  // per-command default
  std::string q;
  std::string c0 = "10";
  std::string frakc = "0.01";
  std::uint64_t seed = 1;
  std::string samples = "100000";
  std::string grid;
  std::string mode;
  std::string variant;
  std::string out;
  std::string format;
  unsigned threads = 0;
  // Command-specific extras.
  std::string suite = "ineq";
  std::string stat = "omega";
  std::string event = "plain";
  std::string lambda = "1";
  std::string h = "0,1,2,3,4,5,6";
  std::string delta = "0,1";
  std::string block = "65536";
  std::string chunk = "4096";
  std::string cache;
  bool resume = false;
  bool summary_only = false;
  std::string fit;
};

double parse_number(const std::string& s, const char* flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError(std::string("--") + flag + ": '" + s + "' is not a number");
  }
}

std::uint64_t parse_count(const std::string& s, const char* flag) {
  const double v = parse_number(s, flag);
  if (!(v >= 0) || v != std::floor(v) || v > 1.8e19) {
    throw DomainError(std::string("--") + flag + ": '" + s + "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<double> number_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number(item, flag));
  if (out.empty()) throw DomainError(std::string("--") + flag + ": empty list");
  return out;
}

std::vector<std::uint64_t> count_list(const std::string& s, const char* flag) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) out.push_back(parse_count(item, flag));
  if (out.empty()) throw DomainError(std::string("--") + flag + ": empty list");
  return out;
}

EVariant parse_event_variant(const std::string& s) {
  if (s == "plain") return EVariant::kPlain;
  if (s == "tz") return EVariant::kTz;
  throw DomainError("--event: expected plain or tz, got '" + s + "'");
}

// Owns the output stream (file or the caller's stream) and the table writer.
class Output {
 public:
  Output(const Options& o, std::ostream& fallback, Format default_format)
      : format_(o.format.empty() ? default_format : parse_format(o.format)) {
    if (!o.out.empty()) {
      file_ = std::make_unique<std::ofstream>(o.out, std::ios::binary);
      if (!*file_) throw ResourceError("cannot open --out file " + o.out);
    }
    stream_ = file_ ? file_.get() : &fallback;
  }

  TableWriter& table(std::vector<std::string> columns, const Provenance& p) {
    writer_.emplace(*stream_, format_, std::move(columns), p);
    return *writer_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  Format format_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
  std::optional<TableWriter> writer_;
};

// Fit summaries go to --fit, else next to --out, else to the diagnostic stream.
class FitSink {
 public:
  FitSink(const Options& o, std::ostream& err) : err_(err) {
    std::string path = o.fit;
    if (path.empty() && !o.out.empty()) path = o.out + ".fit.json";
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ResourceError("cannot open fit output " + path);
    }
  }
  void write(const json& j) { (file_ ? *file_ : err_) << j.dump() << '\n'; }

 private:
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;
};

Provenance provenance(const Options& o) {
  Provenance p;
  p.command = o.command;
  p.set("version", std::string(kVersion));
  return p;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------- commands

int cmd_sieve(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t x_max = parse_count(o.xmax, "xmax");
  SweepOptions so;
  so.block_size = parse_count(o.block, "block");
  so.threads = o.threads;
  Provenance p = provenance(o);
  p.set("xmax", x_max);
  p.set("block", so.block_size);
  if (!o.cache.empty()) p.set("cache", o.cache);
  Output output(o, out, Format::kCsv);
  TableWriter* writer = nullptr;
  if (!o.summary_only) writer = &output.table(kDeltaColumns, p);

  std::uint64_t rows = 0;
  std::uint64_t sum_delta = 0;
  std::uint64_t sum_tau = 0;
  auto emit = [&](std::span<const DeltaRow> block) {
    for (const auto& r : block) {
      ++rows;
      sum_delta += r.delta;
      sum_tau += r.tau;
      if (writer) writer->row(to_cells(r));
    }
  };

  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<DeltaCacheWriter> cache;
  std::uint64_t first = 1;
  if (!o.cache.empty()) {
    if (o.resume && std::filesystem::exists(o.cache)) {
      const CacheContents existing = read_delta_cache(o.cache);
      std::vector<DeltaRow> kept;
      for (const auto& r : existing.rows) {
        if (r.n <= x_max) kept.push_back(r);
      }
      emit(kept);
      first = kept.empty() ? 1 : kept.back().n + 1;
      err << "resumed from cache at n=" << first << (existing.truncated_tail ? " (torn tail dropped)" : "")
          << '\n';
    }
    cache = std::make_unique<DeltaCacheWriter>(o.cache, o.resume);
    if (cache->last_n() + 1 < first) first = cache->last_n() + 1;
  }
  delta_table(x_max, so,
              [&](std::span<const DeltaRow> block) {
                if (cache && block.front().n > cache->last_n()) cache->write_block(block);
                emit(block);
              },
              first);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "sieve: rows=" << rows << " sum_delta=" << sum_delta << " sum_tau=" << sum_tau
      << " seconds=" << format_double(secs) << '\n';
  return kExitOk;
}

int cmd_moments(const Options& o, std::ostream& out, std::ostream& err) {
  const auto ts = number_list(o.t, "t");
  const auto zs = number_list(o.z, "z");
  const auto grid = count_list(o.grid.empty() ? "10000,100000,1000000" : o.grid, "grid");
  std::vector<MomentSpec> specs;
  for (const double t : ts) {
    for (const double z : zs) specs.push_back({t, z});
  }
  SweepOptions so;
  so.block_size = parse_count(o.block, "block");
  so.threads = o.threads;
  Provenance p = provenance(o);
  p.set("t", o.t);
  p.set("z", o.z);
  p.set("grid", o.grid.empty() ? "10000,100000,1000000" : o.grid);
  p.set("weight", "rho(n) = z^omega(n) over all n <= x");
  p.set("note", "desk-scale trend check; log_2 x corrections dominate at this range");
  const auto records = s_moments(specs, grid, so);
  Output output(o, out, Format::kCsv);
  auto& w = output.table(kSweepColumns, p);
  for (const auto& r : records) w.row(to_cells(r));

  FitSink fits(o, err);
  for (const auto& spec : specs) {
    std::vector<SweepRecord> mine;
    for (const auto& r : records) {
      if (r.t == spec.t && r.z == spec.z && r.x > std::exp(1.0)) mine.push_back(r);
    }
    json j;
    j["t"] = spec.t;
    j["z"] = spec.z;
    j["grid"] = grid;
    if (mine.size() < 3) {
      j["fit"] = nullptr;
      j["reason"] = "need at least three grid points above e";
    } else {
      const ExponentFit f = exponent_fit(mine);
      j["slope"] = f.slope;
      j["intercept"] = f.intercept;
      j["target"] = f.target;
      j["slope_minus_target"] = f.slope - f.target;
      j["residuals"] = f.residuals;
      j["residual_trend_logloglog"] = nullable(f.residual_trend);
    }
    j["note"] = "desk-scale trend check";
    fits.write(j);
  }
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
  const auto xs = number_list(o.xmax, "xmax");
  const auto zs = number_list(o.z, "z");
  const double t = parse_number(o.t, "t");
  const std::uint64_t n = parse_count(o.samples, "samples");
  SamplerOptions so;
  so.threads = o.threads;
  so.chunk_size = parse_count(o.chunk, "chunk");
  Provenance p = provenance(o);
  p.set("stat", o.stat);
  p.set("samples", n);
  p.set("seed", o.seed);
  p.set("rng", std::string(kRngAlgorithm));
  p.set("chunk", static_cast<std::uint64_t>(so.chunk_size));
  p.set("omega_cap", static_cast<std::uint64_t>(so.omega_cap));
  Output output(o, out, Format::kJsonl);
  auto& w = output.table(kEstimateColumns, p);

  for (const double x : xs) {
    for (const double z : zs) {
      const WeightFamily rho(z);
      const SampleModel model(x, rho);
      std::vector<Statistic> stats;
      bool binomial = false;
      if (o.stat == "omega") {
        stats.push_back(stat_omega());
      } else if (o.stat == "delta") {
        stats.push_back(stat_delta_pow(t));
      } else if (o.stat == "m2tau") {
        stats.push_back(stat_m2_over_tau_pow(t));
      } else if (o.stat == "mqtau") {
        stats.push_back(stat_mq_over_tau(static_cast<int>(parse_count(o.q.empty() ? "2" : o.q, "q"))));
      } else if (o.stat == "mqtau_H") {
        const int q = static_cast<int>(parse_count(o.q.empty() ? "3" : o.q, "q"));
        const auto ev = parse_event_variant(o.event);
        const auto tv = parse_theta_variant(o.variant.empty() ? "B" : o.variant);
        const double c0 = parse_number(o.c0, "c0");
        const int delta = exponents(t, z).delta;
        for (const double T : number_list(o.T.empty() ? "4,8,16,32" : o.T, "T")) {
          TruncationParams tp{T, t, z, parse_number(o.frakc, "frakc")};
          stats.push_back(stat_mq_over_tau_in_H(q, ThetaSequence(T, delta, c0, tv), ev, tp));
        }
      } else if (o.stat == "m2chi") {
        for (const auto h : count_list(o.h, "h")) stats.push_back(stat_m2_chi_over_tau(static_cast<int>(h)));
      } else if (o.stat == "outside_ET") {
        binomial = true;
        const auto ev = parse_event_variant(o.event);
        for (const double T : number_list(o.T.empty() ? "4,8,16,32" : o.T, "T")) {
          TruncationParams tp{T, t, z, parse_number(o.frakc, "frakc")};
          stats.push_back(event_outside_E_T(ev, tp));
        }
      } else if (o.stat == "delta_exceeds") {
        binomial = true;
        stats.push_back(event_delta_exceeds(parse_number(o.lambda, "lambda"), x));
      } else {
        throw DomainError("--stat: unknown statistic '" + o.stat +
                          "' (omega, delta, m2tau, mqtau, mqtau_H, m2chi, outside_ET, delta_exceeds)");
      }
      auto est = expect_many(stats, model, n, o.seed, so);
      for (auto& e : est) {
        if (binomial) {
          e.std_error = std::sqrt(std::max(0.0, e.mean * (1.0 - e.mean)) /
                                  static_cast<double>(e.n_accepted));
        }
        w.row(to_cells(e));
      }
      if (o.stat == "omega") {
        err << "sample: x=" << format_double(x) << " z=" << format_double(z)
            << " exact E(omega)=" << format_double(model.expected_omega()) << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t x_max = parse_count(o.xmax, "xmax");
  VerifyOptions vo;
  vo.threads = o.threads;
  vo.seed = o.seed;
  Provenance p = provenance(o);
  p.set("suite", o.suite);
  p.set("xmax", x_max);
  p.set("seed", o.seed);
  p.set("slack", vo.slack);
  const auto results = run_suite(o.suite, x_max, vo);
  Output output(o, out, Format::kCsv);
  auto& w = output.table({"name", "statement", "checked", "violations", "worst_excess",
                          "counterexample", "gating", "verdict"},
                         p);
  bool failed = false;
  for (const auto& r : results) {
    const bool gating = !r.informational;
    const std::string verdict = !gating ? "report" : r.passed() ? "pass" : "FAIL";
    if (gating && !r.passed()) failed = true;
    w.row({r.name, r.statement, r.checked, r.violations, r.worst_excess, r.counterexample, gating,
           verdict});
    err << "verify: " << verdict << "  " << r.name << "  (" << r.violations << "/" << r.checked
        << ")\n";
  }
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_wforms(const Options& o, std::ostream& out, std::ostream& err) {
  const int t = static_cast<int>(parse_count(o.t, "t"));
  const MassBoundMode mode =
      o.mode.empty() || o.mode == "exhaustive" ? MassBoundMode::kExhaustive
      : o.mode == "sampled"                    ? MassBoundMode::kSampled
                                               : throw DomainError("--mode: exhaustive or sampled");
  MassBoundOptions lo;
  lo.n_samples = parse_count(o.samples, "samples");
  lo.seed = o.seed;
  lo.grid = static_cast<int>(parse_count(o.grid.empty() ? "50" : o.grid, "grid"));
  lo.threads = o.threads;
  const MassBoundReport report = verify_mass_bound(t, mode, lo);
  Provenance p = provenance(o);
  p.set("t", std::to_string(t));
  p.set("mode", to_string(mode));
  if (mode == MassBoundMode::kExhaustive) {
    p.set("grid", std::to_string(lo.grid));
  } else {
    p.set("samples", lo.n_samples);
    p.set("seed", o.seed);
  }
  p.set("tie_break", "lexicographic among sign-normalized forms");
  Output output(o, out, Format::kCsv);
  auto& w = output.table({"t", "basis", "origin", "k", "c_k_num", "c_k_den", "bound", "verdict"}, p);
  for (const auto& r : report.rows) {
    w.row({static_cast<std::uint64_t>(r.t), r.basis, to_string(r.origin),
           static_cast<std::uint64_t>(r.k), r.c_k.num, r.c_k.den, r.bound,
           std::string(r.pass ? "pass" : "violation")});
  }
  auto line = [&err](const char* name, const PopulationSummary& s) {
    err << "wforms: " << name << " bases=" << s.bases << " violations=" << s.violations
        << " monotone_fail=" << s.monotone_fail << " full_mass_fail=" << s.full_mass_fail
        << " equality_fail=" << s.equality_fail << '\n';
  };
  line("realizable", report.realizable);
  line("abstract", report.abstract);
  line("canonical", report.canonical);
  const bool failed = report.realizable.violations > 0 || report.canonical.equality_fail > 0 ||
                      report.realizable.full_mass_fail > 0 || report.abstract.full_mass_fail > 0 ||
                      report.realizable.monotone_fail > 0 || report.abstract.monotone_fail > 0;
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_integrals(const Options& o, std::ostream& out, std::ostream& err) {
  const int t = static_cast<int>(parse_count(o.t, "t"));
  const auto zs = number_list(o.z, "z");
  const auto Xs = number_list(o.grid.empty() ? "100,1000,10000" : o.grid, "grid");
  IntegralOptions io;
  io.threads = o.threads;
  io.mc_seed = o.seed;
  const IntegralMethod method = o.mode.empty()
                                    ? (t <= 2 ? IntegralMethod::kAdaptive : IntegralMethod::kMonteCarlo)
                                    : parse_integral_method(o.mode);
  Provenance p = provenance(o);
  p.set("t", std::to_string(t));
  p.set("z", o.z);
  p.set("grid", o.grid.empty() ? "100,1000,10000" : o.grid);
  p.set("method", to_string(method));
  if (method == IntegralMethod::kMonteCarlo) p.set("seed", o.seed);
  Output output(o, out, Format::kCsv);
  auto& w = output.table({"t", "z", "X", "value", "error_estimate", "method"}, p);
  FitSink fits(o, err);
  for (const double z : zs) {
    std::vector<double> X_fit;
    std::vector<double> values;
    for (const double X : Xs) {
      const IntegralResult r = I_tz(t, z, X, method, io);
      w.row({static_cast<std::uint64_t>(t), z, X, r.value, r.error_estimate, to_string(r.method)});
      if (X > std::exp(1.0)) {
        X_fit.push_back(X);
        values.push_back(r.value);
      }
    }
    json j;
    j["t"] = t;
    j["z"] = z;
    j["X"] = X_fit;
    if (X_fit.size() >= 3) {
      const GrowthFit f = growth_fit(t, z, X_fit, values);
      j["a"] = f.a;
      j["b"] = f.b;
      j["c"] = f.c;
      j["a_target"] = f.a_target;
      j["delta"] = f.delta;
      j["a_minus_target"] = f.a_gap();
      j["b_minus_delta"] = f.b_gap();
    } else {
      j["fit"] = nullptr;
    }
    fits.write(j);
  }
  return kExitOk;
}

int cmd_recursion(const Options& o, std::ostream& out, std::ostream& err) {
  const auto Ts = number_list(o.T.empty() ? "10,100" : o.T, "T");
  const int q_max = static_cast<int>(parse_count(o.q.empty() ? "200" : o.q, "q"));
  const double c0 = parse_number(o.c0, "c0");
  const auto variant = parse_theta_variant(o.variant.empty() ? "B" : o.variant);
  const auto deltas = count_list(o.delta, "delta");
  Provenance p = provenance(o);
  p.set("T", o.T.empty() ? "10,100" : o.T);
  p.set("q_max", std::to_string(q_max));
  p.set("c0", c0);
  p.set("variant", to_string(variant));
  p.set("delta", o.delta);
  Output output(o, out, Format::kCsv);
  auto& w = output.table(
      {"T", "delta", "q", "log_lhs", "log_rhs", "pass_sum", "log_floor", "pass_floor"}, p);
  for (const double T : Ts) {
    for (const auto d : deltas) {
      const auto report = check_recursion(q_max, T, static_cast<int>(d), c0, variant);
      for (const auto& r : report.rows) {
        w.row({T, d, static_cast<std::uint64_t>(r.q), r.log_lhs, r.log_rhs, r.pass_sum, r.log_floor,
               r.pass_floor});
      }
      err << "recursion: T=" << format_double(T) << " delta=" << d << " variant=" << to_string(variant)
          << " first_fail_sum="
          << (report.first_fail_sum ? std::to_string(*report.first_fail_sum) : "none")
          << " first_fail_floor="
          << (report.first_fail_floor ? std::to_string(*report.first_fail_floor) : "none") << '\n';
    }
  }
  return kExitOk;
}

int cmd_thresholds(const Options& o, std::ostream& out, std::ostream&) {
  const auto ts = number_list(o.t, "t");
  const auto zs = number_list(o.z, "z");
  Provenance p = provenance(o);
  p.set("t", o.t);
  p.set("z", o.z);
  Output output(o, out, Format::kCsv);
  auto& w = output.table(
      {"t", "z", "beta", "z_t", "z_t_plus", "frak_z_t", "delta", "max_beta_z_minus_1"}, p);
  for (const double t : ts) {
    for (const double z : zs) {
      const ExponentSet e = exponents(t, z);
      w.row({t, z, e.beta, e.z_t, e.z_t_plus, e.frak_z_t, static_cast<std::uint64_t>(e.delta),
             std::max(e.beta, z) - 1.0});
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"deltakit: Delta-function computation and verification toolkit"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Read 'key = value' defaults from a file");
  app.allow_config_extras(false);
  app.require_subcommand(1, 1);

  app.add_option("--xmax", o.xmax, "Upper limit x (list for sample)");
  app.add_option("--t", o.t, "Moment order t (list where supported)");
  app.add_option("--z", o.z, "Weight parameter z (list where supported)");
  app.add_option("--T", o.T, "Truncation parameter(s) T");
  app.add_option("--q", o.q, "Moment index q (q_max for recursion)");
  app.add_option("--c0", o.c0, "Constant C_0");
  app.add_option("--frakc", o.frakc, "Constant frak c of f_T");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--samples", o.samples, "Monte Carlo sample count");
  app.add_option("--grid", o.grid, "Grid: x or X list, or the integer grid size for wforms");
  app.add_option("--mode", o.mode, "wforms: exhaustive|sampled; integrals: adaptive|closed|monte-carlo");
  app.add_option("--variant", o.variant, "Theta sequence variant A|B");
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--format", o.format, "csv|jsonl");
  app.add_option("--threads", o.threads, "Worker threads (0: DELTAKIT_THREADS or hardware)");
  app.add_option("--suite", o.suite, "verify: ineq|identities|weights|all");
  app.add_option("--stat", o.stat, "sample: statistic name");
  app.add_option("--event", o.event, "E_T variant plain|tz");
  app.add_option("--lambda", o.lambda, "sample delta_exceeds: level lambda");
  app.add_option("--h", o.h, "sample m2chi: omega values h");
  app.add_option("--delta", o.delta, "recursion: log-power delta list");
  app.add_option("--block", o.block, "Sweep block size");
  app.add_option("--chunk", o.chunk, "Sampler chunk size");
  app.add_option("--cache", o.cache, "sieve: HDL1 cache file");
  app.add_flag("--resume", o.resume, "sieve: continue from the cache");
  app.add_flag("--summary-only", o.summary_only, "sieve: skip the row table");
  app.add_option("--fit", o.fit, "Fit summary output file");

  const char* commands[][2] = {
      {"sieve", "Delta table for n <= xmax"},
      {"moments", "S_{t,z}(x) sweeps and exponent fits"},
      {"sample", "Monte Carlo estimates under P_{x,rho}"},
      {"verify", "Inequality and identity suites"},
      {"wforms", "Greedy bases and mass bounds over W_t"},
      {"integrals", "I_{t,z}(X) and growth fits"},
      {"recursion", "Theta-sequence constraint report"},
      {"thresholds", "Exponent table beta, z_t, z_t^+, frak z_t, delta"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  o.command = app.get_subcommands().front()->get_name();
  o.threads = resolve_threads(o.threads);

  try {
    if (o.command == "sieve") return cmd_sieve(o, out, err);
    if (o.command == "moments") return cmd_moments(o, out, err);
    if (o.command == "sample") return cmd_sample(o, out, err);
    if (o.command == "verify") return cmd_verify(o, out, err);
    if (o.command == "wforms") return cmd_wforms(o, out, err);
    if (o.command == "integrals") return cmd_integrals(o, out, err);
    if (o.command == "recursion") return cmd_recursion(o, out, err);
    if (o.command == "thresholds") return cmd_thresholds(o, out, err);
  } catch (const AccuracyError& e) {
    err << "error: " << e.what() << " (best estimate " << format_double(e.best_value()) << ")\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "usage error: unknown command\n";
  return kExitUsage;
}

}  // namespace deltakit::cli
