#pragma once

// Output plumbing: CSV / JSON-lines tables with a provenance header, readers
// for the same schemas, and the HDL1 binary cache of Delta rows.
//
// CSV files start with '#'-prefixed "key=value" provenance lines, then the
// column header. JSON-lines files start with one {"provenance": {...}} line.
// Doubles are written in shortest round-trip form.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "deltakit/sampler.hpp"
#include "deltakit/sweeps.hpp"

namespace deltakit {

enum class Format { kCsv, kJsonl };

Format parse_format(const std::string& s);
std::string to_string(Format f);

// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& s);

struct Provenance {
  std::string command;
  // Insertion order is preserved in the output.
  std::vector<std::pair<std::string, std::string>> params;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  const std::string* find(const std::string& key) const;
};

using Cell = std::variant<std::monostate, std::uint64_t, std::int64_t, double, std::string, bool>;

class TableWriter {
 public:
  TableWriter(std::ostream& out, Format format, std::vector<std::string> columns,
              const Provenance& provenance);

  void row(const std::vector<Cell>& cells);
  Format format() const noexcept { return format_; }

 private:
  std::ostream& out_;
  Format format_;
  std::vector<std::string> columns_;
};

// A parsed table: provenance and the raw cell text of each row ("" for null).
struct Table {
  Provenance provenance;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // FormatError if absent
};

Table read_table(std::istream& in, Format format);

// Schema-specific helpers.
inline const std::vector<std::string> kDeltaColumns = {"n", "tau", "omega", "mu2", "delta", "m2"};
inline const std::vector<std::string> kSweepColumns = {"x", "t", "z", "S", "normalized"};
inline const std::vector<std::string> kEstimateColumns = {
    "stat", "x", "z", "T", "mean", "std_error", "n_samples", "seed", "rejected_fraction"};

std::vector<Cell> to_cells(const DeltaRow& r);
std::vector<Cell> to_cells(const SweepRecord& r);
std::vector<Cell> to_cells(const Estimate& e);
std::vector<DeltaRow> delta_rows(const Table& t);
std::vector<SweepRecord> sweep_records(const Table& t);
std::vector<Estimate> estimates(const Table& t);

// HDL1 cache: "HDL1", 4 zero bytes, u64 column count (6); then blocks of
// [u64 first_n][u64 count][count u64 per column, column-major], all
// little-endian, m2 stored as its IEEE-754 bit pattern.
inline constexpr char kCacheMagic[4] = {'H', 'D', 'L', '1'};
inline constexpr std::uint64_t kCacheColumns = 6;

class DeltaCacheWriter {
 public:
  // Creates the file, or appends after the last complete block of an
  // existing cache (a torn trailing block is cut off).
  DeltaCacheWriter(const std::filesystem::path& path, bool resume);
  ~DeltaCacheWriter();
  DeltaCacheWriter(const DeltaCacheWriter&) = delete;
  DeltaCacheWriter& operator=(const DeltaCacheWriter&) = delete;

  void write_block(std::span<const DeltaRow> rows);
  // Last n covered by complete blocks (0 for a fresh cache).
  std::uint64_t last_n() const noexcept { return last_n_; }

 private:
  std::FILE* file_ = nullptr;
  std::uint64_t last_n_ = 0;
};

struct CacheContents {
  std::vector<DeltaRow> rows;
  std::uint64_t complete_bytes = 0;  // file prefix made of whole blocks
  bool truncated_tail = false;
};

// Reads every complete block. FormatError on a bad header or on blocks that
// do not continue the previous one.
CacheContents read_delta_cache(const std::filesystem::path& path);

}  // namespace deltakit
