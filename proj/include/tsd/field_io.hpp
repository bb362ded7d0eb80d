#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "tsd/density.hpp"

namespace tsd {

inline constexpr std::uint32_t kFieldVersion = 1;

/// Binary cache: "TLVD", u32 version, u32 d, u64 N, f64 L, f64 t, then N^d f64 values,
/// all little-endian. Only grid, t and values survive; mass is recomputed on load.
void write_field(const DensityField& field, std::ostream& out);
void write_field(const DensityField& field, const std::filesystem::path& path);
/// DomainError on bad magic, unknown version, inconsistent sizes or truncation.
DensityField read_field(std::istream& in);
DensityField read_field(const std::filesystem::path& path);

/// CSV with header "x,p" (d = 1) or "x0,x1,p" (d = 2).
void write_field_csv(const DensityField& field, std::ostream& out);

}  // namespace tsd
