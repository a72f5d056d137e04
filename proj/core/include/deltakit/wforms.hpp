#pragma once

// Linear forms with coefficients in {-1, 0, 1}, greedy bases and their
// masses. All span tests and masses are exact (integers and dyadic
// rationals); floating point only orders forms by |w(theta)|.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace deltakit {

inline constexpr int kMaxFormDim = 8;

struct Form {
  std::vector<std::int8_t> coeffs;

  int dim() const noexcept { return static_cast<int>(coeffs.size()); }
  int length() const noexcept;  // sum of |coeffs|
  bool is_zero() const noexcept { return length() == 0; }
  // First non-zero coefficient is +1 (the zero form counts as normalized).
  bool sign_normalized() const noexcept;
  Form negated() const;
  Form normalized() const;
  double value(std::span<const double> theta) const;
  // One character per coefficient: '+', '0', '-'.
  std::string to_string() const;
  static Form parse(const std::string& s);

  friend bool operator==(const Form&, const Form&) = default;
  // Lexicographic on coefficients with -1 < 0 < +1.
  friend auto operator<=>(const Form& a, const Form& b) { return a.coeffs <=> b.coeffs; }
};

// Exact rational with positive denominator, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational dyadic(std::int64_t num, int log2_den);
  Rational operator+(const Rational& o) const;
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
};

enum class BasisOrigin { kRealizable, kAbstract, kCanonical };

struct Basis {
  std::vector<Form> forms;
  BasisOrigin origin = BasisOrigin::kAbstract;

  int dim() const noexcept { return forms.empty() ? 0 : forms.front().dim(); }
  std::size_t size() const noexcept { return forms.size(); }
  // Forms joined by ';'.
  std::string to_string() const;
};

// Fraction-free row echelon over the integers; rows are reduced by gcd.
class IntegerEchelon {
 public:
  explicit IntegerEchelon(int dim) : dim_(dim) {}

  int rank() const noexcept { return static_cast<int>(rows_.size()); }
  bool in_span(const Form& w) const;
  // Adds w if it is independent of the current rows; returns whether it was added.
  bool insert(const Form& w);

 private:
  std::vector<std::int64_t> reduce(const Form& w) const;

  int dim_;
  std::vector<std::vector<std::int64_t>> rows_;
  std::vector<int> pivots_;
};

// All 3^t forms in base-3 order; ResourceError unless 1 <= t <= 8.
std::vector<Form> enumerate_forms(int t);

// sum_{w in W_t} 2^{-|w|}.
Rational mass_identity(int t);

// The greedy basis B_theta. Ties in |w(theta)| go to the lexicographically
// smallest sign-normalized form. DomainError unless every coordinate is > 0.
Basis greedy_basis(std::span<const double> theta);

// c_k(B): sum of 2^{-|w|} over non-zero w in W_t lying in span(w_1..w_k).
// DomainError unless 1 <= k <= basis.size().
Rational c_k(const Basis& basis, int k);
// c_1 .. c_{size} in one pass.
std::vector<Rational> c_k_all(const Basis& basis);

// Independence of the forms, decided exactly.
bool independent(const Basis& basis);

enum class MassBoundMode { kExhaustive, kSampled };

struct MassBoundRow {
  int t = 0;
  std::string basis;
  BasisOrigin origin = BasisOrigin::kAbstract;
  int k = 0;
  Rational c_k;
  std::int64_t bound = 0;  // 2^k - 1
  bool pass = false;
};

struct PopulationSummary {
  std::uint64_t bases = 0;
  std::uint64_t violations = 0;      // rows with c_k > 2^k - 1
  std::uint64_t monotone_fail = 0;   // bases where c_k decreases in k
  std::uint64_t full_mass_fail = 0;  // full bases with c_t != 2^t - 1
  std::uint64_t equality_fail = 0;   // canonical bases only: some c_k != 2^k - 1
};

struct MassBoundReport {
  int t = 0;
  MassBoundMode mode = MassBoundMode::kExhaustive;
  std::vector<MassBoundRow> rows;
  PopulationSummary realizable;
  PopulationSummary abstract;
  PopulationSummary canonical;
};

struct MassBoundOptions {
  std::uint64_t n_samples = 100'000;  // sampled mode
  std::uint64_t seed = 1;
  int grid = 50;                      // exhaustive mode: theta in {1..grid}^t
  unsigned threads = 1;
  bool keep_rows = true;
};

// Exhaustive: t <= 3, realizable bases from the positive integer grid plus every
// ordered independent tuple of sign-normalized forms. Sampled: t <= 6,
// realizable bases from uniform random theta. Both add the canonical bases
// built from coordinate duals (the equality case). Distinct bases are
// evaluated once.
MassBoundReport verify_mass_bound(int t, MassBoundMode mode, const MassBoundOptions& options = {});

std::string to_string(BasisOrigin o);
std::string to_string(MassBoundMode m);

}  // namespace deltakit
