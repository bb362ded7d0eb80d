#include "tsd/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "tsd/errors.hpp"

namespace tsd {

namespace {

template <class T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw DomainError("field cache: truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_field(const DensityField& field, std::ostream& out) {
  out.write("TLVD", 4);
  put<std::uint32_t>(out, kFieldVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.d));
  put<std::uint64_t>(out, field.grid.N);
  put<double>(out, field.grid.L);
  put<double>(out, field.t);
  for (double v : field.values) put<double>(out, v);
  if (!out) throw DomainError("field cache: write failed");
}

void write_field(const DensityField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path.string());
  write_field(field, out);
}

DensityField read_field(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "TLVD", 4) != 0) throw DomainError("field cache: bad magic");
  if (get<std::uint32_t>(in) != kFieldVersion) throw DomainError("field cache: unknown version");
  DensityField f;
  f.grid.d = static_cast<int>(get<std::uint32_t>(in));
  f.grid.N = get<std::uint64_t>(in);
  f.grid.L = get<double>(in);
  f.t = get<double>(in);
  f.grid.validate();
  const std::size_t count = f.grid.d == 1 ? f.grid.N : f.grid.N * f.grid.N;
  f.values.resize(count);
  for (auto& v : f.values) v = get<double>(in);
  double sum = 0.0;
  for (double v : f.values) sum += v;
  f.mass = sum * std::pow(f.grid.h(), f.grid.d);
  return f;
}

DensityField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path.string());
  return read_field(in);
}

void write_field_csv(const DensityField& field, std::ostream& out) {
  const auto& g = field.grid;
  out << std::setprecision(17);
  if (g.d == 1) {
    out << "x,p\n";
    for (std::size_t j = 0; j < g.N; ++j) out << g.x(j) << ',' << field.values[j] << '\n';
  } else {
    out << "x0,x1,p\n";
    for (std::size_t i = 0; i < g.N; ++i)
      for (std::size_t j = 0; j < g.N; ++j) out << g.x(i) << ',' << g.x(j) << ',' << field.values[i * g.N + j] << '\n';
  }
}

}  // namespace tsd
