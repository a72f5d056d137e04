#include "deltakit/wforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "deltakit/error.hpp"
#include "deltakit/parallel.hpp"
#include "deltakit/sampler.hpp"

namespace deltakit {

namespace {

void check_dim(int t, const char* who) {
  if (t < 1 || t > kMaxFormDim) {
    throw ResourceError(std::string(who) + ": t must lie in [1, " +
                        std::to_string(kMaxFormDim) + "]");
  }
}

std::int64_t pow3(int t) {
  std::int64_t r = 1;
  for (int i = 0; i < t; ++i) r *= 3;
  return r;
}

// Non-zero sign-normalized forms of W_t, sorted lexicographically.
std::vector<Form> normalized_forms(int t) {
  std::vector<Form> out;
  for (Form& w : enumerate_forms(t)) {
    if (!w.is_zero() && w.sign_normalized()) out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Form unit(int t, int i, std::int8_t sign = 1) {
  Form w;
  w.coeffs.assign(static_cast<std::size_t>(t), 0);
  w.coeffs[static_cast<std::size_t>(i)] = sign;
  return w;
}

}  // namespace

int Form::length() const noexcept {
  int n = 0;
  for (const auto c : coeffs) n += c != 0;
  return n;
}

bool Form::sign_normalized() const noexcept {
  for (const auto c : coeffs) {
    if (c != 0) return c > 0;
  }
  return true;
}

Form Form::negated() const {
  Form w = *this;
  for (auto& c : w.coeffs) c = static_cast<std::int8_t>(-c);
  return w;
}

Form Form::normalized() const { return sign_normalized() ? *this : negated(); }

double Form::value(std::span<const double> theta) const {
  if (theta.size() != coeffs.size()) throw DomainError("Form::value: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * theta[i];
  return s;
}

std::string Form::to_string() const {
  std::string s;
  for (const auto c : coeffs) s.push_back(c > 0 ? '+' : c < 0 ? '-' : '0');
  return s;
}

Form Form::parse(const std::string& s) {
  Form w;
  for (const char ch : s) {
    switch (ch) {
      case '+': w.coeffs.push_back(1); break;
      case '0': w.coeffs.push_back(0); break;
      case '-': w.coeffs.push_back(-1); break;
      default: throw FormatError("Form::parse: unexpected character in '" + s + "'");
    }
  }
  return w;
}

Rational Rational::dyadic(std::int64_t num, int log2_den) {
  Rational r{num, std::int64_t{1} << log2_den};
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  const std::int64_t l = std::lcm(den, o.den);
  Rational r{num * (l / den) + o.num * (l / o.den), l};
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  // Masses have denominators <= 2^8, so the cross products fit in 64 bits.
  return a.num * b.den < b.num * a.den;
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::string Basis::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (i) s.push_back(';');
    s += forms[i].to_string();
  }
  return s;
}

std::vector<std::int64_t> IntegerEchelon::reduce(const Form& w) const {
  if (w.dim() != dim_) throw DomainError("IntegerEchelon: dimension mismatch");
  std::vector<std::int64_t> v(w.coeffs.begin(), w.coeffs.end());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto c = static_cast<std::size_t>(pivots_[r]);
    if (v[c] == 0) continue;
    const std::int64_t a = rows_[r][c];
    const std::int64_t b = v[c];
    std::int64_t g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = a * v[i] - b * rows_[r][i];
      g = std::gcd(g, v[i]);
    }
    if (g > 1) {
      for (auto& x : v) x /= g;
    }
  }
  return v;
}

bool IntegerEchelon::in_span(const Form& w) const {
  const auto v = reduce(w);
  return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

bool IntegerEchelon::insert(const Form& w) {
  auto v = reduce(w);
  const auto it = std::find_if(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
  if (it == v.end()) return false;
  const int pivot = static_cast<int>(it - v.begin());
  // Keep earlier rows free of the new pivot so reduction stays a single pass.
  for (auto& row : rows_) {
    const auto c = static_cast<std::size_t>(pivot);
    if (row[c] == 0) continue;
    const std::int64_t a = v[c];
    const std::int64_t b = row[c];
    std::int64_t g = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = a * row[i] - b * v[i];
      g = std::gcd(g, row[i]);
    }
    if (g > 1) {
      for (auto& x : row) x /= g;
    }
  }
  rows_.push_back(std::move(v));
  pivots_.push_back(pivot);
  return true;
}

std::vector<Form> enumerate_forms(int t) {
  check_dim(t, "enumerate_forms");
  const std::int64_t total = pow3(t);
  std::vector<Form> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t code = 0; code < total; ++code) {
    Form w;
    w.coeffs.resize(static_cast<std::size_t>(t));
    std::int64_t c = code;
    for (int i = t - 1; i >= 0; --i) {
      w.coeffs[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(c % 3 - 1);
      c /= 3;
    }
    out.push_back(std::move(w));
  }
  return out;
}

Rational mass_identity(int t) {
  Rational total;
  for (const Form& w : enumerate_forms(t)) total = total + Rational::dyadic(1, w.length());
  return total;
}

Basis greedy_basis(std::span<const double> theta) {
  const int t = static_cast<int>(theta.size());
  check_dim(t, "greedy_basis");
  for (const double x : theta) {
    if (!(x > 0)) throw DomainError("greedy_basis: coordinates must be strictly positive");
  }
  struct Candidate {
    double abs_value;
    Form form;
  };
  std::vector<Candidate> candidates;
  for (Form& w : normalized_forms(t)) {
    const double a = std::fabs(w.value(theta));
    candidates.push_back({a, std::move(w)});
  }
  // normalized_forms is already lexicographic, so a stable sort on the value
  // realizes the tie-break.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.abs_value < b.abs_value; });
  Basis basis;
  basis.origin = BasisOrigin::kRealizable;
  IntegerEchelon echelon(t);
  for (const auto& c : candidates) {
    if (echelon.insert(c.form)) {
      basis.forms.push_back(c.form);
      if (echelon.rank() == t) break;
    }
  }
  return basis;
}

std::vector<Rational> c_k_all(const Basis& basis) {
  const int t = basis.dim();
  check_dim(t, "c_k");
  const std::size_t k_max = basis.size();
  std::vector<IntegerEchelon> prefixes;
  IntegerEchelon running(t);
  for (const Form& w : basis.forms) {
    if (!running.insert(w)) throw DomainError("c_k: basis forms are dependent");
    prefixes.push_back(running);
  }
  std::vector<std::int64_t> numerators(k_max, 0);  // over 2^t
  for (const Form& w : enumerate_forms(t)) {
    if (w.is_zero()) continue;
    for (std::size_t k = 0; k < k_max; ++k) {
      if (prefixes[k].in_span(w)) {
        // Spans are nested: w counts for every k' >= k.
        for (std::size_t j = k; j < k_max; ++j) numerators[j] += std::int64_t{1} << (t - w.length());
        break;
      }
    }
  }
  std::vector<Rational> out;
  out.reserve(k_max);
  for (const auto n : numerators) out.push_back(Rational::dyadic(n, t));
  return out;
}

Rational c_k(const Basis& basis, int k) {
  if (k < 1 || k > static_cast<int>(basis.size())) throw DomainError("c_k: k out of range");
  return c_k_all(basis)[static_cast<std::size_t>(k - 1)];
}

bool independent(const Basis& basis) {
  if (basis.forms.empty()) return true;
  IntegerEchelon e(basis.dim());
  for (const Form& w : basis.forms) {
    if (!e.insert(w)) return false;
  }
  return true;
}

namespace {

// Every ordered tuple of t independent sign-normalized forms.
void abstract_bases(int t, std::vector<Basis>& out) {
  const auto forms = normalized_forms(t);
  std::vector<Form> stack;
  std::vector<IntegerEchelon> echelons{IntegerEchelon(t)};
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(stack.size()) == t) {
      out.push_back({stack, BasisOrigin::kAbstract});
      return;
    }
    for (const Form& w : forms) {
      IntegerEchelon next = echelons.back();
      if (!next.insert(w)) continue;
      stack.push_back(w);
      echelons.push_back(std::move(next));
      self(self);
      echelons.pop_back();
      stack.pop_back();
    }
  };
  recurse(recurse);
}

// Bases whose k-th prefix spans k coordinate duals: pure duals in every order,
// and the chain e_{p1}, e_{p2} + e_{p1}, ..., e_{pk} - e_{p(k-1)}.
void canonical_bases(int t, std::vector<Basis>& out) {
  std::vector<int> perm(static_cast<std::size_t>(t));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Basis pure{{}, BasisOrigin::kCanonical};
    Basis chain{{}, BasisOrigin::kCanonical};
    for (int k = 0; k < t; ++k) {
      pure.forms.push_back(unit(t, perm[static_cast<std::size_t>(k)]));
      Form w = unit(t, perm[static_cast<std::size_t>(k)]);
      if (k > 0) {
        w.coeffs[static_cast<std::size_t>(perm[static_cast<std::size_t>(k - 1)])] =
            (k % 2) ? 1 : -1;
      }
      chain.forms.push_back(w.normalized());
    }
    out.push_back(std::move(pure));
    out.push_back(std::move(chain));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

void tally(const Basis& basis, const std::vector<Rational>& masses, PopulationSummary& summary,
           std::vector<MassBoundRow>* rows) {
  const int t = basis.dim();
  ++summary.bases;
  bool monotone = true;
  bool equality = true;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const std::int64_t bound = (std::int64_t{1} << k) - 1;
    const bool pass = masses[i] <= Rational{bound, 1};
    if (!pass) ++summary.violations;
    if (!(masses[i] == Rational{bound, 1})) equality = false;
    if (i > 0 && masses[i] < masses[i - 1]) monotone = false;
    if (rows) {
      rows->push_back({t, basis.to_string(), basis.origin, k, masses[i], bound, pass});
    }
  }
  if (!monotone) ++summary.monotone_fail;
  if (static_cast<int>(masses.size()) == t &&
      !(masses.back() == Rational{(std::int64_t{1} << t) - 1, 1})) {
    ++summary.full_mass_fail;
  }
  if (basis.origin == BasisOrigin::kCanonical && !equality) ++summary.equality_fail;
}

}  // namespace

MassBoundReport verify_mass_bound(int t, MassBoundMode mode, const MassBoundOptions& options) {
  check_dim(t, "verify_mass_bound");
  if (mode == MassBoundMode::kExhaustive && t > 3) {
    throw ResourceError("verify_mass_bound: exhaustive mode needs t <= 3");
  }
  if (mode == MassBoundMode::kSampled && t > 6) {
    throw ResourceError("verify_mass_bound: sampled mode needs t <= 6");
  }
  if (mode == MassBoundMode::kExhaustive && options.grid < 1) {
    throw DomainError("verify_mass_bound: grid must be positive");
  }

  // Distinct realizable bases, in first-seen order.
  std::vector<Basis> bases;
  std::set<std::string> seen;
  auto add_realizable = [&](std::span<const double> theta) {
    Basis b = greedy_basis(theta);
    if (seen.insert(b.to_string()).second) bases.push_back(std::move(b));
  };
  std::vector<double> theta(static_cast<std::size_t>(t));
  if (mode == MassBoundMode::kExhaustive) {
    std::vector<int> idx(static_cast<std::size_t>(t), 1);
    for (;;) {
      for (int i = 0; i < t; ++i) theta[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
      add_realizable(theta);
      int i = t - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == options.grid) {
        idx[static_cast<std::size_t>(i)] = 1;
        --i;
      }
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
    }
    abstract_bases(t, bases);
  } else {
    for (std::uint64_t s = 0; s < options.n_samples; ++s) {
      SplitMix64 rng = SplitMix64::for_sample(options.seed, s);
      for (auto& x : theta) x = rng.uniform();
      add_realizable(theta);
    }
  }
  canonical_bases(t, bases);

  std::vector<std::vector<Rational>> masses(bases.size());
  parallel_for(bases.size(), resolve_threads(options.threads),
               [&](std::size_t i) { masses[i] = c_k_all(bases[i]); });

  MassBoundReport report;
  report.t = t;
  report.mode = mode;
  auto* rows = options.keep_rows ? &report.rows : nullptr;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    PopulationSummary& s = bases[i].origin == BasisOrigin::kRealizable ? report.realizable
                           : bases[i].origin == BasisOrigin::kAbstract ? report.abstract
                                                                       : report.canonical;
    tally(bases[i], masses[i], s, rows);
  }
  return report;
}

std::string to_string(BasisOrigin o) {
  switch (o) {
    case BasisOrigin::kRealizable: return "realizable";
    case BasisOrigin::kAbstract: return "abstract";
    case BasisOrigin::kCanonical: return "canonical";
  }
  return "unknown";
}

std::string to_string(MassBoundMode m) {
  return m == MassBoundMode::kExhaustive ? "exhaustive" : "sampled";
}

}  // namespace deltakit
