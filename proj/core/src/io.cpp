#include "deltakit/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "deltakit/error.hpp"

namespace deltakit {

namespace {

using json = nlohmann::json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw FormatError("csv: unterminated quote in '" + line + "'");
  out.push_back(std::move(cell));
  return out;
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<V, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<V, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<V, double>) {
          // JSON has no non-finite numbers; they travel as strings.
          if (!std::isfinite(v)) return format_double(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::string json_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw FormatError("expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

constexpr std::size_t kHeaderBytes = 16;

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::kCsv;
  if (s == "jsonl") return Format::kJsonl;
  throw DomainError("unknown format '" + s + "' (expected csv or jsonl)");
}

std::string to_string(Format f) { return f == Format::kCsv ? "csv" : "jsonl"; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw FormatError("expected a number, got '" + s + "'");
  }
  return v;
}

void Provenance::set(const std::string& key, const std::string& value) {
  for (auto& kv : params) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  params.emplace_back(key, value);
}

const std::string* Provenance::find(const std::string& key) const {
  for (const auto& kv : params) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

TableWriter::TableWriter(std::ostream& out, Format format, std::vector<std::string> columns,
                         const Provenance& provenance)
    : out_(out), format_(format), columns_(std::move(columns)) {
  if (format_ == Format::kCsv) {
    out_ << "# command=" << provenance.command << '\n';
    for (const auto& [k, v] : provenance.params) out_ << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_escape(columns_[i]);
    }
    out_ << '\n';
  } else {
    json p = json::object();
    p["command"] = provenance.command;
    for (const auto& [k, v] : provenance.params) p[k] = v;
    json head;
    head["provenance"] = p;
    head["columns"] = columns_;
    out_ << head.dump() << '\n';
  }
}

void TableWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size()) throw DomainError("TableWriter: row width mismatch");
  if (format_ == Format::kCsv) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_escape(cell_text(cells[i]));
    }
    out_ << '\n';
  } else {
    // Keys in column order, not the sorted order of json::object.
    std::string line = "{";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += json(columns_[i]).dump();
      line += ':';
      line += cell_json(cells[i]).dump();
    }
    line += '}';
    out_ << line << '\n';
  }
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw FormatError("table has no column '" + name + "'");
}

Table read_table(std::istream& in, Format format) {
  Table t;
  std::string line;
  if (format == Format::kCsv) {
    bool have_header = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (!have_header && line[0] == '#') {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.size() < 2) throw FormatError("csv: bad provenance line");
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        if (key == "command") {
          t.provenance.command = value;
        } else {
          t.provenance.set(key, value);
        }
        continue;
      }
      if (!have_header) {
        t.columns = csv_split(line);
        have_header = true;
        continue;
      }
      auto cells = csv_split(line);
      if (cells.size() != t.columns.size()) throw FormatError("csv: row width mismatch");
      t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw FormatError("csv: missing column header");
    return t;
  }
  if (!std::getline(in, line)) throw FormatError("jsonl: empty input");
  json head;
  try {
    head = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("jsonl: bad provenance line: ") + e.what());
  }
  if (!head.contains("provenance") || !head.contains("columns")) {
    throw FormatError("jsonl: first line must carry provenance and columns");
  }
  for (const auto& [k, v] : head["provenance"].items()) {
    if (k == "command") {
      t.provenance.command = v.get<std::string>();
    } else {
      t.provenance.set(k, json_text(v));
    }
  }
  t.columns = head["columns"].get<std::vector<std::string>>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("jsonl: bad row: ") + e.what());
    }
    std::vector<std::string> cells;
    for (const auto& c : t.columns) {
      cells.push_back(obj.contains(c) ? json_text(obj[c]) : std::string());
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<Cell> to_cells(const DeltaRow& r) {
  return {r.n, r.tau, r.omega, r.mu_squared, r.delta, r.m2};
}

std::vector<Cell> to_cells(const SweepRecord& r) { return {r.x, r.t, r.z, r.S, r.normalized}; }

std::vector<Cell> to_cells(const Estimate& e) {
  Cell T = std::monostate{};
  if (e.T) T = *e.T;
  return {e.stat, e.x, e.z, T, e.mean, e.std_error, e.n_samples, e.seed, e.rejected_fraction};
}

std::vector<DeltaRow> delta_rows(const Table& t) {
  const std::size_t c[] = {t.column("n"), t.column("tau"), t.column("omega"),
                           t.column("mu2"), t.column("delta"), t.column("m2")};
  std::vector<DeltaRow> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    out.push_back({parse_u64(row[c[0]]), parse_u64(row[c[1]]), parse_u64(row[c[2]]),
                   parse_u64(row[c[3]]), parse_u64(row[c[4]]), parse_double(row[c[5]])});
  }
  return out;
}

std::vector<SweepRecord> sweep_records(const Table& t) {
  const std::size_t c[] = {t.column("x"), t.column("t"), t.column("z"), t.column("S"),
                           t.column("normalized")};
  std::vector<SweepRecord> out;
  for (const auto& row : t.rows) {
    out.push_back({parse_double(row[c[0]]), parse_double(row[c[1]]), parse_double(row[c[2]]),
                   parse_double(row[c[3]]), parse_double(row[c[4]])});
  }
  return out;
}

std::vector<Estimate> estimates(const Table& t) {
  std::vector<Estimate> out;
  for (const auto& row : t.rows) {
    Estimate e;
    e.stat = row[t.column("stat")];
    e.x = parse_double(row[t.column("x")]);
    e.z = parse_double(row[t.column("z")]);
    const std::string& T = row[t.column("T")];
    if (!T.empty()) e.T = parse_double(T);
    e.mean = parse_double(row[t.column("mean")]);
    e.std_error = parse_double(row[t.column("std_error")]);
    e.n_samples = parse_u64(row[t.column("n_samples")]);
    e.seed = parse_u64(row[t.column("seed")]);
    e.rejected_fraction = parse_double(row[t.column("rejected_fraction")]);
    out.push_back(std::move(e));
  }
  return out;
}

CacheContents read_delta_cache(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw FormatError("cache: cannot open " + path.string());
  std::vector<unsigned char> data;
  unsigned char buf[1 << 16];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) data.insert(data.end(), buf, buf + got);
  std::fclose(f);

  if (data.size() < kHeaderBytes || std::memcmp(data.data(), kCacheMagic, 4) != 0) {
    throw FormatError("cache: missing HDL1 header in " + path.string());
  }
  if (get_u64(data.data() + 8) != kCacheColumns) throw FormatError("cache: unexpected column count");
  CacheContents out;
  std::size_t pos = kHeaderBytes;
  out.complete_bytes = pos;
  std::uint64_t expected_n = 1;
  while (pos < data.size()) {
    if (data.size() - pos < 16) {
      out.truncated_tail = true;
      break;
    }
    const std::uint64_t first = get_u64(data.data() + pos);
    const std::uint64_t count = get_u64(data.data() + pos + 8);
    const std::uint64_t body = count * kCacheColumns * 8;
    if (count == 0 || body / (kCacheColumns * 8) != count || data.size() - pos - 16 < body) {
      out.truncated_tail = true;
      break;
    }
    if (first != expected_n) throw FormatError("cache: blocks are not contiguous");
    const unsigned char* col = data.data() + pos + 16;
    for (std::uint64_t i = 0; i < count; ++i) {
      DeltaRow r;
      r.n = get_u64(col + 8 * i);
      r.tau = get_u64(col + 8 * (count + i));
      r.omega = get_u64(col + 8 * (2 * count + i));
      r.mu_squared = get_u64(col + 8 * (3 * count + i));
      r.delta = get_u64(col + 8 * (4 * count + i));
      r.m2 = std::bit_cast<double>(get_u64(col + 8 * (5 * count + i)));
      if (r.n != first + i) throw FormatError("cache: row numbering broken inside a block");
      out.rows.push_back(r);
    }
    expected_n = first + count;
    pos += 16 + body;
    out.complete_bytes = pos;
  }
  return out;
}

DeltaCacheWriter::DeltaCacheWriter(const std::filesystem::path& path, bool resume) {
  if (resume && std::filesystem::exists(path)) {
    const CacheContents existing = read_delta_cache(path);
    if (existing.truncated_tail) std::filesystem::resize_file(path, existing.complete_bytes);
    last_n_ = existing.rows.empty() ? 0 : existing.rows.back().n;
    file_ = std::fopen(path.c_str(), "ab");
  } else {
    file_ = std::fopen(path.c_str(), "wb");
    if (file_) {
      std::vector<unsigned char> head(kCacheMagic, kCacheMagic + 4);
      head.resize(8, 0);
      put_u64(head, kCacheColumns);
      std::fwrite(head.data(), 1, head.size(), file_);
      std::fflush(file_);
    }
  }
  if (!file_) throw ResourceError("cache: cannot open " + path.string() + " for writing");
}

DeltaCacheWriter::~DeltaCacheWriter() {
  if (file_) std::fclose(file_);
}

void DeltaCacheWriter::write_block(std::span<const DeltaRow> rows) {
  if (rows.empty()) return;
  if (rows.front().n != last_n_ + 1) throw DomainError("cache: block does not continue the file");
  std::vector<unsigned char> buf;
  buf.reserve(16 + rows.size() * kCacheColumns * 8);
  put_u64(buf, rows.front().n);
  put_u64(buf, rows.size());
  for (const auto& r : rows) put_u64(buf, r.n);
  for (const auto& r : rows) put_u64(buf, r.tau);
  for (const auto& r : rows) put_u64(buf, r.omega);
  for (const auto& r : rows) put_u64(buf, r.mu_squared);
  for (const auto& r : rows) put_u64(buf, r.delta);
  for (const auto& r : rows) put_u64(buf, std::bit_cast<std::uint64_t>(r.m2));
  if (std::fwrite(buf.data(), 1, buf.size(), file_) != buf.size() || std::fflush(file_) != 0) {
    throw ResourceError("cache: write failed");
  }
  last_n_ = rows.back().n;
}

}  // namespace deltakit
