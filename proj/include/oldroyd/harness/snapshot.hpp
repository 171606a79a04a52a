#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oldroyd/spectral/transform.hpp"

namespace oldroyd::harness {

// Snapshot files hold one or more field records. Each record is a text header
//
//   field <name>
//   n <grid n>
//   components <C>
//   time <t, %.17g>
//   byteorder little
//   dtype float64
//   data
//
// followed by C * n^3 little-endian doubles: component-major, then physical
// samples with x1 fastest, x3 slowest.

inline constexpr const char* kSnapshotMagic = "oldroyd-snapshot 1";

struct SnapshotRecord {
  std::string name;
  int n = 0;
  std::size_t components = 0;
  double time = 0.0;
  std::vector<double> samples;
};

namespace detail {

inline void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline std::string header_value(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw Error("snapshot: truncated header, expected " + key);
  if (line.rfind(key + " ", 0) != 0) throw Error("snapshot: expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace detail

class SnapshotWriter {
 public:
  explicit SnapshotWriter(const std::filesystem::path& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open snapshot file " + path.string());
    out_ << kSnapshotMagic << "\n";
  }

  template <std::size_t C>
  void write(const std::string& name, const Field<C>& f, double t) {
    const PhysicalField<C> p = transform_inverse(f);
    char tbuf[64];
    std::snprintf(tbuf, sizeof tbuf, "%.17g", t);
    out_ << "field " << name << "\n"
         << "n " << f.grid().n() << "\n"
         << "components " << C << "\n"
         << "time " << tbuf << "\n"
         << "byteorder little\n"
         << "dtype float64\n"
         << "data\n";
    for (const auto& comp : p.comp) {
      for (double v : comp) detail::put_le(out_, v);
    }
    out_.flush();
    if (!out_) throw Error("snapshot write failed");
  }

 private:
  std::ofstream out_;
};

inline std::vector<SnapshotRecord> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotMagic) throw Error("snapshot: bad magic line");
  std::vector<SnapshotRecord> out;
  while (in.peek() != std::char_traits<char>::eof()) {
    SnapshotRecord r;
    r.name = detail::header_value(in, "field");
    r.n = std::stoi(detail::header_value(in, "n"));
    r.components = std::stoul(detail::header_value(in, "components"));
    r.time = std::stod(detail::header_value(in, "time"));
    if (detail::header_value(in, "byteorder") != "little") throw Error("snapshot: byte order");
    if (detail::header_value(in, "dtype") != "float64") throw Error("snapshot: element type");
    if (!std::getline(in, line) || line != "data") throw Error("snapshot: expected 'data'");
    if (r.n <= 0) throw Error("snapshot: bad grid size");
    const std::size_t count = r.components * static_cast<std::size_t>(r.n) * r.n * r.n;
    std::vector<unsigned char> raw(8 * count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw Error("snapshot: truncated data");
    r.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) r.samples[i] = detail::get_le(raw.data() + 8 * i);
    out.push_back(std::move(r));
  }
  return out;
}

/// Spectral coefficients of a record; lossless for band-limited fields.
template <std::size_t C>
Field<C> to_field(const SnapshotRecord& r, const GridPtr& g) {
  if (r.components != C || r.n != g->n()) throw SizeMismatch("snapshot record does not fit field");
  PhysicalField<C> p(g);
  const std::size_t m = g->physical_size();
  for (std::size_t c = 0; c < C; ++c) {
    std::memcpy(p.comp[c].data(), r.samples.data() + c * m, m * sizeof(double));
  }
  return transform_forward(p);
}

}  // namespace oldroyd::harness
